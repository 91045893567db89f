#include "lgeo/geodesic.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace lgeo {

namespace {

// state layout: [x (n), v (n)]
OdeRhs geodesic_rhs(const MetricField& g, int n) {
    return [&g, n](const std::vector<double>& s, std::vector<double>& ds, double) {
        Vec x(n), v(n);
        for (int i = 0; i < n; ++i) {
            x[i] = s[i];
            v[i] = s[n + i];
        }
        const auto gamma = christoffel(g, x);
        for (int i = 0; i < n; ++i) ds[i] = v[i];
        for (int k = 0; k < n; ++k) ds[n + k] = -v.dot(gamma[k] * v);
    };
}

} // namespace

std::vector<CurveSample> geodesic(const MetricField& g, const Vec& p, const Vec& v, double s_max,
                                  const OdeOptions& opts) {
    const int n = g.dim();
    std::vector<double> state(2 * n);
    for (int i = 0; i < n; ++i) {
        state[i] = p[i];
        state[n + i] = v[i];
    }
    std::vector<CurveSample> samples;
    integrate_adaptive(geodesic_rhs(g, n), state, 0.0, s_max, opts,
                       [&](const std::vector<double>& s, double t) {
                           CurveSample cs;
                           cs.s = t;
                           cs.x = Vec(n);
                           cs.v = Vec(n);
                           for (int i = 0; i < n; ++i) {
                               cs.x[i] = s[i];
                               cs.v[i] = s[n + i];
                           }
                           samples.push_back(std::move(cs));
                       });
    return samples;
}

Vec exp_map(const MetricField& g, const Vec& p, const Vec& v, const OdeOptions& opts) {
    if (v.norm() == 0.0) return p;
    const int n = g.dim();
    std::vector<double> state(2 * n);
    for (int i = 0; i < n; ++i) {
        state[i] = p[i];
        state[n + i] = v[i];
    }
    integrate_adaptive(geodesic_rhs(g, n), state, 0.0, 1.0, opts);
    Vec out(n);
    for (int i = 0; i < n; ++i) out[i] = state[i];
    return out;
}

Vec log_map(const MetricField& g, const Vec& p, const Vec& q, double tol, const OdeOptions& opts) {
    const int n = g.dim();
    Vec v = q - p;  // chart-difference initial guess
    double err = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 60; ++it) {
        const Vec f = exp_map(g, p, v, opts) - q;
        err = f.cwiseAbs().maxCoeff();
        if (err <= tol) return v;

        Mat J(n, n);
        const double h = std::max(1e-7, 1e-7 * v.norm());
        for (int c = 0; c < n; ++c) {
            Vec vp = v, vm = v;
            vp[c] += h;
            vm[c] -= h;
            J.col(c) = (exp_map(g, p, vp, opts) - exp_map(g, p, vm, opts)) / (2.0 * h);
        }
        Eigen::FullPivLU<Mat> lu(J);
        if (!lu.isInvertible())
            throw NumericError("log_map: singular shooting Jacobian");
        const Vec step = lu.solve(f);

        // damping: accept the largest fraction that reduces the defect
        double factor = 1.0;
        bool accepted = false;
        for (int d = 0; d < 8; ++d) {
            const Vec cand = v - factor * step;
            const double cand_err = (exp_map(g, p, cand, opts) - q).cwiseAbs().maxCoeff();
            if (cand_err < err) {
                v = cand;
                accepted = true;
                break;
            }
            factor *= 0.5;
        }
        if (!accepted)
            throw NumericError("log_map: shooting failed to converge");
    }
    throw NumericError("log_map: iteration budget exhausted");
}

double frame_gram_residual(const MetricField& g, const Frame& frame) {
    const Mat gm = g(frame.base);
    const int n = static_cast<int>(frame.basis.cols());
    Mat eta = Mat::Identity(n, n);
    for (int i = 0; i < frame.neg_count; ++i) eta(i, i) = -1.0;
    return (frame.basis.transpose() * gm * frame.basis - eta).cwiseAbs().maxCoeff();
}

Frame parallel_transport(const MetricField& g, const Curve& curve, double s0, double s1,
                         const Frame& frame, const OdeOptions& opts) {
    const int n = g.dim();
    const int m = static_cast<int>(frame.basis.cols());
    std::vector<double> state(n * m);
    for (int c = 0; c < m; ++c)
        for (int i = 0; i < n; ++i) state[c * n + i] = frame.basis(i, c);

    auto rhs = [&](const std::vector<double>& s, std::vector<double>& ds, double t) {
        const auto [x, xdot] = curve(t);
        const auto gamma = christoffel(g, x);
        for (int c = 0; c < m; ++c) {
            Vec w(n);
            for (int i = 0; i < n; ++i) w[i] = s[c * n + i];
            for (int k = 0; k < n; ++k) ds[c * n + k] = -xdot.dot(gamma[k] * w);
        }
    };
    integrate_adaptive(rhs, state, s0, s1, opts);

    Frame out;
    out.base = curve(s1).first;
    out.neg_count = frame.neg_count;
    out.basis = Mat(n, m);
    for (int c = 0; c < m; ++c)
        for (int i = 0; i < n; ++i) out.basis(i, c) = state[c * n + i];
    return out;
}

// ---------------------------------------------------------------------------

AnchoredMetric::AnchoredMetric(MetricField g, Frame frame, double r0, OdeOptions opts)
    : g_(std::move(g)), frame_(std::move(frame)), r0_(r0), opts_(opts) {
    if (!(r0 > 0)) throw ConfigError("anchored_metric: radius must be positive");
    if (frame_gram_residual(g_, frame_) > 1e-9)
        throw NumericError("anchored_metric: frame not g-orthonormal");

    // normal-ball probe: shoot sampled directions to radius r0 and require the
    // endpoints to stay apart (a non-crossing heuristic, not a proof)
    const int n = g_.dim();
    std::vector<Vec> ends;
    const int count = (n == 2) ? 16 : 48;
    for (int i = 0; i < count; ++i) {
        Vec u;
        if (n == 2) {
            const double th = 2.0 * M_PI * i / count;
            u = Vec(2);
            u << std::cos(th), std::sin(th);
        } else {
            u = Vec::Random(n);
            u /= u.norm();
        }
        ends.push_back(exp_map(g_, frame_.base, r0_ * (frame_.basis * u), opts_));
    }
    for (size_t i = 0; i < ends.size(); ++i)
        for (size_t j = i + 1; j < ends.size(); ++j)
            if ((ends[i] - ends[j]).norm() < 1e-3 * r0_)
                throw NumericError("anchored_metric: sampled radial geodesics nearly cross; "
                                   "shrink r0");
}

Mat AnchoredMetric::operator()(const Vec& x) const {
    const Vec diff = x - frame_.base;
    if (diff.norm() == 0.0) {
        const Mat Binv = frame_.basis.inverse();
        return Mat(Binv.transpose() * Binv);
    }
    const Vec v = log_map(g_, frame_.base, x, 1e-10, opts_);
    // flat-coefficient radius: coefficients of v in the anchored frame
    const Vec coeff = frame_.basis.fullPivLu().solve(v);
    const double r = coeff.norm();
    if (r > r0_ * (1.0 + 1e-9))
        throw DomainError("anchored_metric: query outside the anchored ball");

    // transport the frame along the radial geodesic and flip the Gram sign
    const auto samples = geodesic(g_, frame_.base, v, 1.0, opts_);
    auto interp = [&samples](double s) -> std::pair<Vec, Vec> {
        // piecewise-linear interpolation of the dense integrator output
        if (s <= samples.front().s) return {samples.front().x, samples.front().v};
        if (s >= samples.back().s) return {samples.back().x, samples.back().v};
        size_t lo = 0, hi = samples.size() - 1;
        while (hi - lo > 1) {
            const size_t mid = (lo + hi) / 2;
            (samples[mid].s <= s ? lo : hi) = mid;
        }
        const double w = (s - samples[lo].s) / (samples[hi].s - samples[lo].s);
        return {(1 - w) * samples[lo].x + w * samples[hi].x,
                (1 - w) * samples[lo].v + w * samples[hi].v};
    };
    const Frame moved = parallel_transport(g_, interp, 0.0, 1.0, frame_, opts_);
    const Mat Einv = moved.basis.inverse();
    return Mat(Einv.transpose() * Einv);
}

MetricField AnchoredMetric::field() const {
    AnchoredMetric copy = *this;
    return MetricField(g_.dim(), 0, [copy](const Vec& x) { return copy(x); });
}

std::pair<Mat, double> frame_align(const Mat& A, int nu) {
    const int total = static_cast<int>(A.rows());
    if (A.cols() != total) throw ConfigError("frame_align: square matrix required");
    if (nu < 0 || nu > total) throw ConfigError("frame_align: bad index count");

    auto polar = [](const Mat& M) {
        Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
        if (svd.singularValues().minCoeff() < 1e-12 * std::max(1.0, svd.singularValues().maxCoeff()))
            throw NumericError("frame_align: singular block");
        return Mat(svd.matrixU() * svd.matrixV().transpose());
    };

    Mat Q = Mat::Zero(total, total);
    if (nu > 0) Q.topLeftCorner(nu, nu) = polar(A.topLeftCorner(nu, nu));
    if (total - nu > 0)
        Q.bottomRightCorner(total - nu, total - nu) =
            polar(A.bottomRightCorner(total - nu, total - nu));
    const double residual = (A - Q).norm();
    return {Q, residual};
}

} // namespace lgeo
