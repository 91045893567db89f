#pragma once

#include "lgeo/core.hpp"
#include "lgeo/ode.hpp"

namespace lgeo {

// ---------------------------------------------------------------------------
// Causal classification
// ---------------------------------------------------------------------------

enum class CausalKind { Timelike, Null, Spacelike };
enum class Orientation { Future, Past, None };

struct CausalChar {
    CausalKind kind = CausalKind::Spacelike;
    Orientation orientation = Orientation::None;
    bool zero = false;  // degenerate input vector

    bool causal() const { return !zero && kind != CausalKind::Spacelike; }
};

/// Classify v by the sign of g(v,v) with a relative null tolerance
/// eps_null * |v|^2 (Euclidean components); orientation by the sign of
/// g(v, T) against the future timelike reference field T.
CausalChar causal_character(const MetricField& g, const TangentVector& v,
                            const std::function<Vec(const Vec&)>& T, double eps_null = 1e-9);

/// Classification without an orientation field: orientation from the sign of
/// dtau(v) for a temporal function (future iff positive).
CausalChar causal_character_tau(const MetricField& g, const TangentVector& v, const Vec& dtau,
                                double eps_null = 1e-9);

// ---------------------------------------------------------------------------
// Exact-style reach oracle for 2D diagonal metrics g = -dt^2 + f^2 dx^2
// ---------------------------------------------------------------------------

/// Future reach J^+(p) intersected with [p_t, t_max], bounded by the two
/// extreme null curves x'(t) = +-1/f integrated by adaptive RK. Correct up to
/// the ODE tolerance for this metric class.
struct ReachRegion2D {
    Vec origin;
    std::vector<double> t;     // increasing sample grid, t.front() = origin[0]
    std::vector<double> x_lo;  // left boundary
    std::vector<double> x_hi;  // right boundary
    double ode_tol = 1e-9;

    double hi_at(double tq) const;
    double lo_at(double tq) const;

    /// Membership with a safety pad: pad > 0 shrinks the region (inner test),
    /// pad < 0 grows it (outer test).
    bool contains(const Vec& q, double pad = 0.0) const;
};

ReachRegion2D reach_2d_diagonal(const MetricField& g, const Vec& p, double t_max,
                                const OdeOptions& opts = OdeOptions::defaults());

} // namespace lgeo
