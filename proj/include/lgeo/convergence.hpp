#pragma once

#include "lgeo/core.hpp"
#include "lgeo/geodesic.hpp"
#include "lgeo/temporal.hpp"

#include <map>
#include <optional>
#include <string>

namespace lgeo {

// ---------------------------------------------------------------------------
// Diffeomorphisms and pullbacks
// ---------------------------------------------------------------------------

struct Diffeo {
    std::function<Vec(const Vec&)> forward;
    std::function<Vec(const Vec&)> inverse;
    std::optional<Mat> const_jacobian;           // affine maps carry it exactly
    std::function<Mat(const Vec&)> jacobian_fn;  // analytic Jacobian, optional
    double fd_step = 1e-6;

    Mat jacobian(const Vec& p) const;

    static Diffeo identity(int dim);
    static Diffeo affine(const Mat& A, const Vec& b);

    /// Composition (this after other): x -> this(other(x)).
    Diffeo after(const Diffeo& other) const;

    /// Max-abs defect of forward(inverse(p)) - p over sample points.
    double roundtrip_residual(const std::vector<Vec>& pts) const;
};

/// (phi^* g)(x)(u, v) = g(phi(x))(Dphi u, Dphi v); analytic partials are
/// propagated for affine phi when g carries them.
MetricField pullback_metric(const Diffeo& phi, const MetricField& g);

TemporalField pullback_temporal(const Diffeo& phi, const TemporalField& tau);

// ---------------------------------------------------------------------------
// Tensor fields and C^k norms
// ---------------------------------------------------------------------------

/// A (0,2)-tensor field with derivative access (analytic or FD, inherited
/// from its constituents).
struct Tensor2Field {
    int dim = 0;
    std::function<Mat(const Vec&)> eval;
    std::function<Mat(const Vec&, int)> d1;
    std::function<Mat(const Vec&, int, int)> d2;

    static Tensor2Field difference(const MetricField& a, const MetricField& b);
    static Tensor2Field of(const MetricField& a);
};

/// Grid supremum over the box of |nabla^r T|_href for r <= k (k <= 2), with
/// covariant derivatives taken in the conn connection (href by default).
/// Grid suprema are lower bounds for the true suprema.
double ck_norm(const Tensor2Field& T, const MetricField& href, const Box& box, int k,
               int per_axis = 41, const std::optional<MetricField>& conn = std::nullopt);

/// C^k norm of a scalar difference (orders up to 3 supported, for the k+1
/// requirement on temporal functions).
double ck_norm_scalar(const std::function<double(const Vec&)>& f,
                      const std::function<Vec(const Vec&)>& df, const MetricField& href,
                      const Box& box, int k, int per_axis = 41,
                      const std::optional<MetricField>& conn = std::nullopt);

// ---------------------------------------------------------------------------
// Sequences and reports
// ---------------------------------------------------------------------------

struct SequenceMember {
    MetricField g;
    std::optional<TemporalField> tau;
    Diffeo phi;
    Vec basepoint;
    std::optional<Frame> anchor;
};

struct MetricSequence {
    int dim = 0;
    std::vector<SequenceMember> members;
};

struct ConvergenceRow {
    int index = 0;
    int box_id = 0;
    int k = 0;
    double norm = 0.0;
    double basepoint_dist = 0.0;
    std::optional<double> lambda;
    std::optional<double> anchor_residual;
    std::string verdict;
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    std::map<double, int> first_index_at_eps;  // eps -> first index staying below (-1: none)
    bool diverging = false;   // monotone growth across three consecutive indices above max eps
    std::string overall;      // "converges" / "diverges" / "inconclusive"
};

/// Pullback convergence in C^k on each box against the limit metric,
/// including basepoint convergence |phi_i^{-1}(p_i) - p|.
ConvergenceReport check_convergence(const MetricSequence& seq, const MetricField& limit,
                                    const Vec& limit_basepoint, const std::vector<Box>& boxes,
                                    int k, const std::vector<double>& eps_schedule,
                                    const MetricField& href,
                                    const std::optional<MetricField>& conn = std::nullopt);

struct AnchoredRow {
    int index = 0;
    double align_residual = 0.0;   // frame_align distance of the mapped adapted basis
    double principal_angle = 0.0;  // largest principal angle between anchor subspaces
};

/// Anchored-convergence diagnostics: dphi_i^{-1} images of the member anchors
/// against the limit anchor.
std::vector<AnchoredRow> anchored_convergence(const MetricSequence& seq, const Frame& limit_anchor);

/// Smallest lambda >= 1 with g1/lambda <= g2 <= lambda g1 over the box grid,
/// via generalized symmetric eigenvalues. Both inputs must be Riemannian.
double quasi_isometry_factor(const MetricField& g1, const MetricField& g2, const Box& box,
                             int per_axis = 41);

struct ConformalResult {
    std::vector<std::pair<Vec, double>> omega_samples;
    double residual = 0.0;  // sup |F*g' - Omega g|_href / |g|_href
};

/// Trace-ratio conformal factor fit of F^* gprime against g.
ConformalResult conformal_check(const Diffeo& F, const MetricField& g, const MetricField& gprime,
                                const Box& box, int per_axis = 21);

// ---------------------------------------------------------------------------
// Wick pipeline
// ---------------------------------------------------------------------------

struct WickPipelineRow {
    int index = 0;
    double wick_norm = 0.0;       // C^k of phi* g_W^{tau_i} - h
    double tau_norm = 0.0;        // C^{k+1} of tau_i o phi_i - tau
    double rec_norm = 0.0;        // C^k of phi* g_i - (h - 2 dtau^2)
    double identity_residual = 0.0;  // max |g_W - 2 dtau (x) dtau - g| on the grid
};

struct WickPipelineReport {
    std::vector<WickPipelineRow> rows;
    double dtau_unit_residual = 0.0;  // max | |dtau|_h - 1 | on the grid
    double hsteep_margin_min = 0.0;   // limit tau against h/2
    bool passed = false;
};

/// The reconstruction pipeline: members must carry unit-lapse canonical
/// representatives (checked; TemporalError otherwise). Verifies the Wick
/// convergence, the C^{k+1} temporal convergence, the reconstructed limit
/// g = h - 2 dtau^2, |dtau|_h = 1, and the h/2-steep margin of the limit.
WickPipelineReport wick_pipeline(const MetricSequence& seq, const MetricField& h_limit,
                                 const TemporalField& tau_limit, const Box& box, int k,
                                 double tol = 1e-8, int per_axis = 21);

struct CurvatureRow {
    int index = 0;
    int order = 0;
    double sup_norm = 0.0;
};

struct CurvatureBoundReport {
    std::vector<CurvatureRow> rows;
    bool bounded_trend = true;        // false when suprema grow monotonically
    bool injectivity_radius_checked = false;  // hypothesis outside scope: always false
};

/// Grid suprema of |nabla^a Rm| per index for Riemannian fields (use the Wick
/// companions for spacetime members). The injectivity-radius hypothesis is
/// reported as not checked.
CurvatureBoundReport curvature_bound_report(const std::vector<MetricField>& fields, const Box& box,
                                            int a_max, int per_axis = 9);

} // namespace lgeo
