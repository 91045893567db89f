#pragma once

#include "lgeo/core.hpp"
#include "lgeo/ode.hpp"

namespace lgeo {

struct CurveSample {
    double s;
    Vec x;
    Vec v;
};

/// Adaptive RK solution of the geodesic equation x'' + Gamma(x', x') = 0.
/// The samples are the accepted integrator steps, endpoints included.
std::vector<CurveSample> geodesic(const MetricField& g, const Vec& p, const Vec& v, double s_max,
                                  const OdeOptions& opts = OdeOptions::defaults());

/// Geodesic endpoint at parameter 1.
Vec exp_map(const MetricField& g, const Vec& p, const Vec& v,
            const OdeOptions& opts = OdeOptions::defaults());

/// Inverse of exp_map by multidimensional shooting with a damped Newton
/// iteration; chart-unit tolerance tol.
Vec log_map(const MetricField& g, const Vec& p, const Vec& q, double tol = 1e-8,
            const OdeOptions& opts = OdeOptions::defaults());

// ---------------------------------------------------------------------------
// Frames and transport
// ---------------------------------------------------------------------------

/// Ordered g-orthonormal basis at a point; the first neg_count vectors have
/// negative norm, so the Gram matrix is eta = diag(-1 x nu, +1 x n).
struct Frame {
    Vec base;
    Mat basis;       // columns are the basis vectors
    int neg_count = 0;
};

/// Max-abs deviation of the g-Gram matrix of the frame from eta.
double frame_gram_residual(const MetricField& g, const Frame& frame);

/// A parametrized curve: s -> (position, velocity).
using Curve = std::function<std::pair<Vec, Vec>(double)>;

/// Parallel transport of the frame along the curve from s0 to s1.
Frame parallel_transport(const MetricField& g, const Curve& curve, double s0, double s1,
                         const Frame& frame, const OdeOptions& opts = OdeOptions::defaults());

// ---------------------------------------------------------------------------
// Anchored metric
// ---------------------------------------------------------------------------

/// Riemannian metric on a normal ball: transport the sign-flipped orthonormal
/// frame along radial geodesics and declare it orthonormal. The ball radius
/// is probed (sampled-direction non-crossing heuristic), not proven.
class AnchoredMetric {
public:
    AnchoredMetric(MetricField g, Frame frame, double r0,
                   OdeOptions opts = OdeOptions::defaults());

    /// Metric value at a query point inside the ball. Radial inversion by
    /// shooting; frame transported along the radial geodesic.
    Mat operator()(const Vec& x) const;

    MetricField field() const;
    double radius() const { return r0_; }
    const Frame& center_frame() const { return frame_; }

private:
    MetricField g_;
    Frame frame_;
    double r0_;
    OdeOptions opts_;
};

inline AnchoredMetric anchored_metric(const MetricField& g, const Frame& frame, double r0,
                                      const OdeOptions& opts = OdeOptions::defaults()) {
    return AnchoredMetric(g, frame, r0, opts);
}

// ---------------------------------------------------------------------------
// Frame alignment
// ---------------------------------------------------------------------------

/// Nearest element of O(nu) x O(n) to A by blockwise polar decomposition,
/// with the Frobenius distance (which includes the off-block mass) as the
/// residual. Throws NumericError on singular blocks.
std::pair<Mat, double> frame_align(const Mat& A, int nu);

} // namespace lgeo
