#include "lgeo/temporal.hpp"

#include "lgeo/ode.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace lgeo {

Vec TemporalField::differential(const Vec& p) const {
    if (dtau_) return dtau_(p);
    Vec d(dim_);
    for (int a = 0; a < dim_; ++a) {
        Vec e = Vec::Zero(dim_);
        e[a] = step_;
        d[a] = (tau_(p + e) - tau_(p - e)) / (2.0 * step_);
    }
    return d;
}

Mat TemporalField::hessian(const Vec& p) const {
    if (hess_) return hess_(p);
    Mat H(dim_, dim_);
    if (dtau_) {
        for (int b = 0; b < dim_; ++b) {
            Vec e = Vec::Zero(dim_);
            e[b] = step_;
            H.col(b) = (dtau_(p + e) - dtau_(p - e)) / (2.0 * step_);
        }
        return 0.5 * (H + H.transpose());
    }
    for (int a = 0; a < dim_; ++a) {
        Vec ea = Vec::Zero(dim_);
        ea[a] = step_;
        H(a, a) = (tau_(p + ea) - 2.0 * tau_(p) + tau_(p - ea)) / (step_ * step_);
        for (int b = a + 1; b < dim_; ++b) {
            Vec eb = Vec::Zero(dim_);
            eb[b] = step_;
            H(a, b) = (tau_(p + ea + eb) - tau_(p + ea - eb) - tau_(p - ea + eb) +
                       tau_(p - ea - eb)) /
                      (4.0 * step_ * step_);
            H(b, a) = H(a, b);
        }
    }
    return H;
}

TangentVector gradient_tau(const MetricField& g, const TemporalField& tau, const Vec& p) {
    const Mat gm = g(p);
    const Vec dt = tau.differential(p);
    const Vec grad = raise_index(gm, dt);
    const double norm2 = inner(gm, grad, grad);
    if (!(norm2 < 0.0))
        throw TemporalError("gradient_tau: grad tau not timelike at sampled point (g(grad,grad)=" +
                            std::to_string(norm2) + ")");
    return TangentVector{p, grad};
}

Lapse lapse(const MetricField& g, const TemporalField& tau, const Vec& p) {
    const TangentVector grad = gradient_tau(g, tau, p);
    const double norm2 = inner(g(p), grad.comp, grad.comp);
    return Lapse{-1.0 / norm2};
}

Mat canonical_rep(const MetricField& g, const TemporalField& tau, const Vec& p) {
    const Mat gm = g(p);
    const double lam = lapse(g, tau, p).value;
    Mat grep = gm / lam;
    // the tau-gradient of g^tau must be unit
    const Vec dt = tau.differential(p);
    const Vec grad = raise_index(grep, dt);
    const double check = inner(grep, grad, grad);
    if (std::abs(check + 1.0) > 1e-10)
        throw NumericError("canonical_rep: unit-gradient identity violated");
    return grep;
}

Mat wick_rotate(const MetricField& g, const TemporalField& tau, const Vec& p) {
    const Mat grep = canonical_rep(g, tau, p);
    const Vec dt = tau.differential(p);
    Mat w = grep + 2.0 * dt * dt.transpose();
    Eigen::LLT<Mat> llt(w);
    if (llt.info() != Eigen::Success)
        throw NumericError("wick_rotate: result not positive definite");
    return w;
}

MetricField wick_field(const MetricField& g, const TemporalField& tau) {
    MetricField w(g.dim(), 0, [g, tau](const Vec& p) { return wick_rotate(g, tau, p); });
    w.with_domain(g.domain()).with_step(g.step());
    if (g.analytic_order() >= 1 && tau.has_analytic()) {
        // d_a g_W = d_a (g / Lambda) + 2 d_a(dtau) dtau^T + 2 dtau d_a(dtau)^T,
        // with d_a Lambda obtained from the gradient formula. The Hessian of
        // tau enters; for the scenario fields it is analytic or cheap FD.
        w.with_analytic_d1([g, tau](const Vec& p, int a) -> Mat {
            const Mat gm = g(p);
            const Mat dg = g.d1(p, a);
            const Vec dt = tau.differential(p);
            const Mat H = tau.hessian(p);
            const Vec ddt = H.col(a);  // d_a of the differential
            const Vec grad = raise_index(gm, dt);
            const double q = inner(gm, grad, grad);  // -1/Lambda
            // d_a q = (d_a g^{-1})(dt,dt) + 2 g^{-1}(ddt, dt)
            //       = -grad^T dg grad + 2 ddt . grad
            const double dq = -grad.dot(dg * grad) + 2.0 * ddt.dot(grad);
            const double lam = -1.0 / q;
            const double dlam = dq / (q * q);
            Mat dgrep = dg / lam - gm * (dlam / (lam * lam));
            return dgrep + 2.0 * (ddt * dt.transpose() + dt * ddt.transpose());
        });
    }
    return w;
}

Mat wick_by_observer(const MetricField& g, const std::function<Vec(const Vec&)>& T, const Vec& p) {
    const Mat gm = g(p);
    const Vec t = T(p);
    const double n2 = inner(gm, t, t);
    if (std::abs(n2 + 1.0) > 1e-8)
        throw TemporalError("wick_by_observer: observer field not unit timelike (g(T,T)=" +
                            std::to_string(n2) + ")");
    const Vec flat = gm * t;
    Mat w = gm + 2.0 * flat * flat.transpose();
    Eigen::LLT<Mat> llt(w);
    if (llt.info() != Eigen::Success)
        throw NumericError("wick_by_observer: result not positive definite");
    return w;
}

std::pair<TangentVector, TangentVector> split(const MetricField& g, const TemporalField& tau,
                                              const TangentVector& v) {
    const TangentVector grad = gradient_tau(g, tau, v.base);
    const Mat gm = g(v.base);
    const double coeff = inner(gm, v.comp, grad.comp) / inner(gm, grad.comp, grad.comp);
    Vec vtau = coeff * grad.comp;
    Vec vperp = v.comp - vtau;  // reconstruction exact by construction
    return {TangentVector{v.base, vtau}, TangentVector{v.base, vperp}};
}

LemmaResiduals lemma_identities(const MetricField& g, const TemporalField& tau,
                                const TangentVector& v, double eps_null) {
    const Mat gm = g(v.base);
    const double gvv = inner(gm, v.comp, v.comp);
    const double ref = v.comp.squaredNorm();
    if (std::abs(gvv) > eps_null * std::max(ref, 1e-300))
        throw NumericError("lemma_identities: vector not null within tolerance");
    const auto [vtau, vperp] = split(g, tau, v);
    const Mat w = wick_rotate(g, tau, v.base);
    const Vec dt = tau.differential(v.base);
    const double lhs = dt.dot(v.comp) * dt.dot(v.comp);
    return LemmaResiduals{std::abs(lhs - inner(w, vtau.comp, vtau.comp)),
                          std::abs(lhs - inner(w, vperp.comp, vperp.comp))};
}

bool is_steep(const MetricField& g, const TemporalField& tau, const Vec& p, double c) {
    const TangentVector grad = gradient_tau(g, tau, p);
    return inner(g(p), grad.comp, grad.comp) <= -c;
}

double steep_infimum(const MetricField& g, const TemporalField& tau, const Box& box,
                     int per_axis) {
    double inf = std::numeric_limits<double>::infinity();
    for (const Vec& p : grid_points(box, per_axis)) {
        const TangentVector grad = gradient_tau(g, tau, p);
        inf = std::min(inf, -inner(g(p), grad.comp, grad.comp));
    }
    return inf;
}

double h_steep_margin(const MetricField& /*g*/, const TemporalField& tau, const MetricField& h,
                      const TangentVector& v) {
    const Mat hm = h(v.base);
    const double hnorm = std::sqrt(std::max(0.0, inner(hm, v.comp, v.comp)));
    if (hnorm <= 0.0) throw NumericError("h_steep_margin: zero direction");
    const Vec unit = v.comp / hnorm;
    return tau.differential(v.base).dot(unit) - 1.0;
}

namespace {

// Future causal sample directions at p: the exact null boundary for spatial
// unit directions plus an interior blend toward the future timelike axis.
// Returned vectors are un-normalized.
std::vector<Vec> causal_cone_samples(const Mat& gm, const Vec& dtau, int boundary_count,
                                     int interior_levels) {
    const int n = static_cast<int>(gm.rows());
    std::vector<Vec> dirs;

    // future timelike axis: -grad tau (grad tau is past-directed)
    Vec axis = -raise_index(gm, dtau);
    axis /= axis.norm();

    auto future = [&](Vec v) {
        if (dtau.dot(v) < 0) v = -v;
        return v;
    };

    // spatial unit directions (Euclidean) for the chart dimensions
    std::vector<Vec> spatial;
    if (n == 2) {
        Vec w(1);
        w[0] = 1.0;
        spatial.push_back(w);
        w[0] = -1.0;
        spatial.push_back(w);
    } else if (n == 3) {
        const int m = std::max(8, boundary_count / 16);
        for (int i = 0; i < m; ++i) {
            const double th = 2.0 * M_PI * i / m;
            Vec w(2);
            w[0] = std::cos(th);
            w[1] = std::sin(th);
            spatial.push_back(w);
        }
    } else {
        throw ConfigError("is_h_steep: chart dimensions 2 and 3 supported");
    }

    // null boundary: solve g_tt a^2 + 2 a g_tw + g_ww = 0 for a with v=(a, w)
    std::vector<Vec> boundary;
    for (const Vec& w : spatial) {
        const double gtt = gm(0, 0);
        double gtw = 0.0, gww = 0.0;
        for (int i = 1; i < n; ++i) {
            gtw += gm(0, i) * w[i - 1];
            for (int j = 1; j < n; ++j) gww += gm(i, j) * w[i - 1] * w[j - 1];
        }
        const double disc = gtw * gtw - gtt * gww;
        if (disc < 0.0) continue;
        for (const double sgn : {1.0, -1.0}) {
            const double a = (-gtw + sgn * std::sqrt(disc)) / gtt;
            Vec v(n);
            v[0] = a;
            for (int i = 1; i < n; ++i) v[i] = w[i - 1];
            boundary.push_back(future(v));
        }
    }
    if (boundary.empty())
        throw NumericError("causal cone sampling: no null directions found (metric degenerate?)");
    for (const Vec& b : boundary) dirs.push_back(b);

    // angular sweep across the cone (2D) resp. blend grid (3D): interior
    for (const Vec& b : boundary)
        for (int l = 1; l <= interior_levels; ++l) {
            const double lam = static_cast<double>(l) / (interior_levels + 1);
            dirs.push_back((1.0 - lam) * b + lam * axis * b.norm());
        }
    dirs.push_back(axis);

    // densify in 2D up to the requested resolution with cone-arc samples
    if (n == 2 && static_cast<int>(dirs.size()) < boundary_count) {
        const int extra = boundary_count - static_cast<int>(dirs.size());
        for (int i = 0; i < extra; ++i) {
            const double lam = static_cast<double>(i + 1) / (extra + 1);
            const Vec& b = boundary[i % boundary.size()];
            dirs.push_back((1.0 - lam) * b + lam * axis * b.norm());
        }
    }
    return dirs;
}

} // namespace

SteepReport is_h_steep(const MetricField& g, const TemporalField& tau, const MetricField& h,
                       const Vec& p, int resolution) {
    if (h.index() != 0) throw SignatureError("is_h_steep: h must be Riemannian");
    if (resolution <= 0) resolution = (g.dim() == 2) ? 720 : 10000;
    const Mat gm = g(p);
    const Mat hm = h(p);
    const Vec dt = tau.differential(p);

    const int interior = std::max(4, resolution / 64);
    auto dirs = causal_cone_samples(gm, dt, resolution, interior);

    auto margin_of = [&](const Vec& v) {
        const double hn = std::sqrt(std::max(1e-300, inner(hm, v, v)));
        return dt.dot(v) / hn - 1.0;
    };

    double best = std::numeric_limits<double>::infinity();
    Vec witness;
    for (const Vec& v : dirs) {
        const double m = margin_of(v);
        if (m < best) {
            best = m;
            witness = v;
        }
    }

    // one local refinement pass: perturb the best direction within the cone
    Vec axis = -raise_index(gm, dt);
    const double wn = witness.norm();
    for (int pass = 0; pass < 2; ++pass) {
        const double scale = 0.05 / (pass + 1);
        for (int i = 0; i < 64; ++i) {
            Vec cand = witness + scale * wn * Vec::Random(witness.size());
            // project back to the causal cone: blend toward the axis until causal
            double blend = 0.0;
            while (inner(gm, cand, cand) > 0.0 && blend < 1.0) {
                blend += 0.1;
                cand = (1.0 - blend) * cand + blend * axis * cand.norm() / axis.norm();
            }
            if (inner(gm, cand, cand) > 0.0 || dt.dot(cand) <= 0.0) continue;
            const double m = margin_of(cand);
            if (m < best) {
                best = m;
                witness = cand;
            }
        }
    }

    SteepReport rep;
    rep.point = p;
    rep.margin = best;
    const double hn = std::sqrt(std::max(1e-300, inner(hm, witness, witness)));
    rep.witness = witness / hn;
    rep.samples = static_cast<int>(dirs.size());
    rep.boundary_tight = std::abs(best) <= 1e-7;
    return rep;
}

TwoSidedReport weak_temporal_ratios(const MetricField& g, const TemporalField& tau,
                                    const MetricField& h, const Box& box, int per_axis,
                                    int directions) {
    if (h.index() != 0) throw SignatureError("weak_temporal_ratios: h must be Riemannian");
    TwoSidedReport rep;
    rep.ratio_min = std::numeric_limits<double>::infinity();
    for (const Vec& p : grid_points(box, per_axis)) {
        const Mat gm = g(p);
        const Mat hm = h(p);
        const Vec dt = tau.differential(p);
        const auto dirs = causal_cone_samples(gm, dt, directions, 6);
        for (const Vec& v : dirs) {
            const double hn = std::sqrt(std::max(1e-300, inner(hm, v, v)));
            const double ratio = dt.dot(v) / hn;
            rep.ratio_min = std::min(rep.ratio_min, ratio);
            rep.ratio_max = std::max(rep.ratio_max, ratio);
            ++rep.samples;
        }
    }
    return rep;
}

CompletenessProbe wick_completeness_probe(const MetricField& g, const TemporalField& tau,
                                          const Vec& basepoint, double length_budget,
                                          int directions) {
    const MetricField w = wick_field(g, tau);
    const Mat w0 = w(basepoint);
    CompletenessProbe probe;
    probe.rays = directions;
    probe.min_length_reached = length_budget;
    bool all = true;
    for (int i = 0; i < directions; ++i) {
        Vec u;
        if (g.dim() == 2) {
            const double th = 2.0 * M_PI * i / directions;
            u = Vec(2);
            u << std::cos(th), std::sin(th);
        } else {
            u = Vec::Random(g.dim());
        }
        u /= std::sqrt(inner(w0, u, u));  // unit Wick speed: arc length = parameter
        double reached = 0.0;
        try {
            // geodesic of the Wick metric; energy conservation keeps |.|_W = 1
            std::vector<double> state(2 * g.dim());
            for (int c = 0; c < g.dim(); ++c) {
                state[c] = basepoint[c];
                state[g.dim() + c] = u[c];
            }
            const int n = g.dim();
            integrate_adaptive(
                [&w, n](const std::vector<double>& s, std::vector<double>& ds, double) {
                    Vec x(n), v(n);
                    for (int c = 0; c < n; ++c) {
                        x[c] = s[c];
                        v[c] = s[n + c];
                    }
                    const auto gamma = christoffel(w, x);
                    for (int c = 0; c < n; ++c) ds[c] = v[c];
                    for (int k = 0; k < n; ++k) ds[n + k] = -v.dot(gamma[k] * v);
                },
                state, 0.0, length_budget, OdeOptions::defaults(),
                [&reached](const std::vector<double>&, double t) { reached = t; });
        } catch (const Error&) {
            all = false;  // left the domain or stalled before the budget
        }
        probe.min_length_reached = std::min(probe.min_length_reached, reached);
        if (reached < length_budget) all = false;
    }
    probe.all_rays_exceeded_budget = all;
    return probe;
}

MetricField widen_cones(const MetricField& g, const TemporalField& tau,
                        const std::function<double(const Vec&)>& alpha) {
    auto eval = [g, tau, alpha](const Vec& p) -> Mat {
        const double a = alpha(p);
        if (a < 0.0) throw ConeCollapseError("widen_cones: alpha must be nonnegative");
        if (a > 0.0) {
            const double lam = lapse(g, tau, p).value;
            if (a >= lam)
                throw ConeCollapseError("widen_cones: alpha >= lapse at sampled point");
        }
        const Vec dt = tau.differential(p);
        return Mat(g(p) - a * dt * dt.transpose());
    };
    MetricField out(g.dim(), 1, eval);
    out.with_domain(g.domain()).with_step(g.step());
    return out;
}

} // namespace lgeo
