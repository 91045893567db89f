#pragma once

#include "lgeo/core.hpp"

namespace lgeo {

// ---------------------------------------------------------------------------
// Temporal functions
// ---------------------------------------------------------------------------

/// Scalar field tau with optional analytic differential (and Hessian).
/// At every sampled point of a valid scenario, the metric gradient of tau is
/// timelike and past-directed.
class TemporalField {
public:
    using ValFn = std::function<double(const Vec&)>;
    using DiffFn = std::function<Vec(const Vec&)>;
    using HessFn = std::function<Mat(const Vec&)>;

    TemporalField() = default;
    explicit TemporalField(int dim, ValFn tau) : dim_(dim), tau_(std::move(tau)) {}

    TemporalField& with_analytic_differential(DiffFn d) { dtau_ = std::move(d); return *this; }
    TemporalField& with_analytic_hessian(HessFn h) { hess_ = std::move(h); return *this; }
    TemporalField& with_step(double h) { step_ = h; return *this; }

    int dim() const { return dim_; }
    bool has_analytic() const { return static_cast<bool>(dtau_); }
    bool has_analytic_hessian() const { return static_cast<bool>(hess_); }
    double step() const { return step_; }

    double operator()(const Vec& p) const { return tau_(p); }

    /// Differential d tau as a covector; analytic when attached, central
    /// differences otherwise.
    Vec differential(const Vec& p) const;

    /// Second derivatives d_a d_b tau.
    Mat hessian(const Vec& p) const;

private:
    int dim_ = 0;
    ValFn tau_;
    DiffFn dtau_;
    HessFn hess_;
    double step_ = 1e-4;
};

struct Lapse {
    double value = 0.0;  // Lambda = -1 / g(grad tau, grad tau) > 0
};

/// Result of a cone minimization of d tau(v) - |v|_h over future causal
/// directions normalized to |v|_h = 1.
struct SteepReport {
    Vec point;
    double margin = 0.0;
    Vec witness;        // direction attaining the minimum
    int samples = 0;
    bool boundary_tight = false;  // |margin| within the tight band around zero
};

struct LemmaResiduals {
    double tau_part = 0.0;   // | dtau(v)^2 - g_W(v^tau, v^tau) |
    double perp_part = 0.0;  // | dtau(v)^2 - g_W(v^perp, v^perp) |
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Metric gradient of tau: grad tau = g^{-1} d tau. Throws TemporalError when
/// the gradient fails to be timelike at p.
TangentVector gradient_tau(const MetricField& g, const TemporalField& tau, const Vec& p);

/// Lapse Lambda = -1 / g(grad tau, grad tau).
Lapse lapse(const MetricField& g, const TemporalField& tau, const Vec& p);

/// Canonical conformal representative g^tau = g / Lambda at p. The tau-gradient
/// of the result is unit (checked to 1e-10).
Mat canonical_rep(const MetricField& g, const TemporalField& tau, const Vec& p);

/// Wick-rotated Riemannian metric at p: g_W = g^tau + 2 dtau (x) dtau.
/// Throws NumericError when the result fails to be positive definite.
Mat wick_rotate(const MetricField& g, const TemporalField& tau, const Vec& p);

/// Whole-field version of the Wick rotation, with analytic first partials
/// propagated when both g and tau carry them.
MetricField wick_field(const MetricField& g, const TemporalField& tau);

/// Wick rotation by an explicit unit timelike field: g_T = g + 2 T^b (x) T^b.
/// T must be g-unit (g(T,T) = -1 within tolerance).
Mat wick_by_observer(const MetricField& g, const std::function<Vec(const Vec&)>& T, const Vec& p);

/// g-orthogonal split v = v^tau + v^perp with v^tau parallel to grad tau.
/// Reconstruction v^tau + v^perp = v is exact.
std::pair<TangentVector, TangentVector> split(const MetricField& g, const TemporalField& tau,
                                              const TangentVector& v);

/// Residuals of the lightlike-split identities
/// dtau(v)^2 = g_W(v^tau, v^tau) = g_W(v^perp, v^perp).
/// v must be null within eps_null (relative to its Euclidean size).
LemmaResiduals lemma_identities(const MetricField& g, const TemporalField& tau,
                                const TangentVector& v, double eps_null = 1e-9);

/// Pointwise steepness verdict: g(grad tau, grad tau) <= -c.
bool is_steep(const MetricField& g, const TemporalField& tau, const Vec& p, double c);

/// Box sweep: infimum of -g(grad tau, grad tau) over a sample grid.
double steep_infimum(const MetricField& g, const TemporalField& tau, const Box& box,
                     int per_axis = 41);

/// Cone minimization of the h-steepness margin at p. Samples the null-cone
/// boundary at the given angular resolution plus an interior grid, then runs
/// one local refinement pass around the best sample. Margins within 1e-7 of
/// zero are reported boundary-tight rather than pass/fail. resolution 0 picks
/// the default for the chart dimension (720 in 2D, 10^4 in 3D).
SteepReport is_h_steep(const MetricField& g, const TemporalField& tau, const MetricField& h,
                       const Vec& p, int resolution = 0);

/// Pointwise margin dtau(v) - |v|_h for an explicit direction (v is rescaled
/// to |v|_h = 1 first). Building block for sampled verdicts.
double h_steep_margin(const MetricField& g, const TemporalField& tau, const MetricField& h,
                      const TangentVector& v);

/// Cone-widening deformation g' = g - alpha dtau^2 with 0 < alpha < Lambda.
/// Throws ConeCollapseError lazily when alpha >= Lambda at an evaluated point.
MetricField widen_cones(const MetricField& g, const TemporalField& tau,
                        const std::function<double(const Vec&)>& alpha);

/// Sampled two-sided (weak-temporal) bounds: extremes of dtau(v) / |v|_h over
/// future causal directions across a box grid. ratio_min > 0 witnesses the
/// anti-Lipschitz side, ratio_max < infinity the Lipschitz side. No acceptance
/// number is attached; the report is diagnostic.
struct TwoSidedReport {
    double ratio_min = 0.0;
    double ratio_max = 0.0;
    int samples = 0;
};
TwoSidedReport weak_temporal_ratios(const MetricField& g, const TemporalField& tau,
                                    const MetricField& h, const Box& box, int per_axis = 9,
                                    int directions = 64);

/// Radial completeness probe for the Wick metric: integrates unit-speed
/// Wick geodesics from the basepoint in sampled directions and reports
/// whether every ray reached the length budget inside the domain. Evidence,
/// not a verdict.
struct CompletenessProbe {
    bool all_rays_exceeded_budget = false;
    double min_length_reached = 0.0;
    int rays = 0;
};
CompletenessProbe wick_completeness_probe(const MetricField& g, const TemporalField& tau,
                                          const Vec& basepoint, double length_budget,
                                          int directions = 16);

} // namespace lgeo
