#include "lgeo/convergence.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace lgeo {

// ---------------------------------------------------------------------------
// Diffeo
// ---------------------------------------------------------------------------

Mat Diffeo::jacobian(const Vec& p) const {
    if (const_jacobian) return *const_jacobian;
    if (jacobian_fn) return jacobian_fn(p);
    const int n = static_cast<int>(p.size());
    Mat J(n, n);
    for (int c = 0; c < n; ++c) {
        Vec pp = p, pm = p;
        pp[c] += fd_step;
        pm[c] -= fd_step;
        J.col(c) = (forward(pp) - forward(pm)) / (2.0 * fd_step);
    }
    return J;
}

Diffeo Diffeo::identity(int dim) {
    Diffeo d;
    d.forward = [](const Vec& p) { return p; };
    d.inverse = [](const Vec& p) { return p; };
    d.const_jacobian = Mat::Identity(dim, dim);
    return d;
}

Diffeo Diffeo::affine(const Mat& A, const Vec& b) {
    Eigen::FullPivLU<Mat> lu(A);
    if (!lu.isInvertible()) throw ConfigError("Diffeo::affine: singular linear part");
    const Mat Ainv = lu.inverse();
    Diffeo d;
    d.forward = [A, b](const Vec& p) { return Vec(A * p + b); };
    d.inverse = [Ainv, b](const Vec& p) { return Vec(Ainv * (p - b)); };
    d.const_jacobian = A;
    return d;
}

Diffeo Diffeo::after(const Diffeo& other) const {
    Diffeo d;
    const Diffeo self = *this;
    const Diffeo oth = other;
    d.forward = [self, oth](const Vec& p) { return self.forward(oth.forward(p)); };
    d.inverse = [self, oth](const Vec& p) { return oth.inverse(self.inverse(p)); };
    if (const_jacobian && other.const_jacobian)
        d.const_jacobian = Mat(*const_jacobian * *other.const_jacobian);
    return d;
}

double Diffeo::roundtrip_residual(const std::vector<Vec>& pts) const {
    double worst = 0.0;
    for (const Vec& p : pts)
        worst = std::max(worst, (forward(inverse(p)) - p).cwiseAbs().maxCoeff());
    return worst;
}

// ---------------------------------------------------------------------------
// Pullbacks
// ---------------------------------------------------------------------------

MetricField pullback_metric(const Diffeo& phi, const MetricField& g) {
    const int n = g.dim();
    const Diffeo ph = phi;
    MetricField out(n, g.index(), [ph, g](const Vec& x) {
        const Mat J = ph.jacobian(x);
        return Mat(J.transpose() * g(ph.forward(x)) * J);
    });
    out.with_step(g.step());
    if (phi.const_jacobian && g.analytic_order() >= 1) {
        const Mat J = *phi.const_jacobian;
        out.with_analytic_d1([ph, g, J](const Vec& x, int a) {
            const Vec y = ph.forward(x);
            Mat acc = Mat::Zero(J.rows(), J.cols());
            for (int c = 0; c < J.rows(); ++c)
                if (J(c, a) != 0.0) acc += J(c, a) * g.d1(y, c);
            return Mat(J.transpose() * acc * J);
        });
        if (g.analytic_order() >= 2) {
            out.with_analytic_d2([ph, g, J](const Vec& x, int a, int b) {
                const Vec y = ph.forward(x);
                Mat acc = Mat::Zero(J.rows(), J.cols());
                for (int c = 0; c < J.rows(); ++c)
                    for (int d = 0; d < J.rows(); ++d)
                        if (J(c, a) != 0.0 && J(d, b) != 0.0)
                            acc += J(c, a) * J(d, b) * g.d2(y, c, d);
                return Mat(J.transpose() * acc * J);
            });
        }
    }
    return out;
}

TemporalField pullback_temporal(const Diffeo& phi, const TemporalField& tau) {
    const Diffeo ph = phi;
    TemporalField out(tau.dim(), [ph, tau](const Vec& x) { return tau(ph.forward(x)); });
    out.with_step(tau.step());
    if (phi.const_jacobian && tau.has_analytic()) {
        const Mat J = *phi.const_jacobian;
        out.with_analytic_differential(
            [ph, tau, J](const Vec& x) { return Vec(J.transpose() * tau.differential(ph.forward(x))); });
        out.with_analytic_hessian(
            [ph, tau, J](const Vec& x) { return Mat(J.transpose() * tau.hessian(ph.forward(x)) * J); });
    }
    return out;
}

// ---------------------------------------------------------------------------
// C^k norms
// ---------------------------------------------------------------------------

Tensor2Field Tensor2Field::difference(const MetricField& a, const MetricField& b) {
    Tensor2Field t;
    t.dim = a.dim();
    t.eval = [a, b](const Vec& p) { return Mat(a(p) - b(p)); };
    t.d1 = [a, b](const Vec& p, int ax) { return Mat(a.d1(p, ax) - b.d1(p, ax)); };
    t.d2 = [a, b](const Vec& p, int ax, int bx) { return Mat(a.d2(p, ax, bx) - b.d2(p, ax, bx)); };
    return t;
}

Tensor2Field Tensor2Field::of(const MetricField& a) {
    Tensor2Field t;
    t.dim = a.dim();
    t.eval = [a](const Vec& p) { return a(p); };
    t.d1 = [a](const Vec& p, int ax) { return a.d1(p, ax); };
    t.d2 = [a](const Vec& p, int ax, int bx) { return a.d2(p, ax, bx); };
    return t;
}

namespace {

struct ConnData {
    std::vector<Mat> gamma;
    std::vector<std::vector<Mat>> dgamma;
};

// first covariant derivative of a (0,2) tensor
std::vector<Mat> cov1(const Tensor2Field& T, const std::vector<Mat>& gamma, const Mat& T0,
                      const Vec& p) {
    const int n = T.dim;
    std::vector<Mat> out(n, Mat::Zero(n, n));
    for (int a = 0; a < n; ++a) {
        Mat m = T.d1(p, a);
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) {
                double corr = 0.0;
                for (int d = 0; d < n; ++d)
                    corr += gamma[d](a, b) * T0(d, c) + gamma[d](a, c) * T0(b, d);
                m(b, c) -= corr;
            }
        out[a] = m;
    }
    return out;
}

// second covariant derivative, rank-4 indexed [e][a](b,c)
std::vector<std::vector<Mat>> cov2(const Tensor2Field& T, const ConnData& conn, const Mat& T0,
                                   const std::vector<Mat>& nT, const Vec& p) {
    const int n = T.dim;
    std::vector<std::vector<Mat>> out(n, std::vector<Mat>(n, Mat::Zero(n, n)));
    // partial of nabla T, using analytic/FD second partials of T and dGamma
    for (int e = 0; e < n; ++e) {
        std::vector<Mat> dnT(n, Mat::Zero(n, n));
        for (int a = 0; a < n; ++a) {
            Mat m = T.d2(p, e, a);
            const Mat dTe = T.d1(p, e);
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c) {
                    double corr = 0.0;
                    for (int d = 0; d < n; ++d) {
                        corr += conn.dgamma[e][d](a, b) * T0(d, c) + conn.gamma[d](a, b) * dTe(d, c);
                        corr += conn.dgamma[e][d](a, c) * T0(b, d) + conn.gamma[d](a, c) * dTe(b, d);
                    }
                    m(b, c) -= corr;
                }
            dnT[a] = m;
        }
        for (int a = 0; a < n; ++a) {
            Mat m = dnT[a];
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c) {
                    double corr = 0.0;
                    for (int f = 0; f < n; ++f) {
                        corr += conn.gamma[f](e, a) * nT[f](b, c);
                        corr += conn.gamma[f](e, b) * nT[a](f, c);
                        corr += conn.gamma[f](e, c) * nT[a](b, f);
                    }
                    m(b, c) -= corr;
                }
            out[e][a] = m;
        }
    }
    return out;
}

} // namespace

double ck_norm(const Tensor2Field& T, const MetricField& href, const Box& box, int k, int per_axis,
               const std::optional<MetricField>& conn) {
    if (k < 0 || k > 2) throw ConfigError("ck_norm: orders 0..2 supported");
    const MetricField& cmetric = conn ? *conn : href;
    double sup = 0.0;
    const auto pts = grid_points(box, per_axis);
    if (pts.empty()) throw ConfigError("ck_norm: empty grid");
    for (const Vec& p : pts) {
        const Mat hm = href(p);
        const Mat T0 = T.eval(p);
        sup = std::max(sup, std::sqrt(tensor_norm2(T0, hm)));
        if (k >= 1) {
            const auto gamma = christoffel(cmetric, p);
            const auto nT = cov1(T, gamma, T0, p);
            sup = std::max(sup, std::sqrt(tensor_norm3(nT, hm)));
            if (k >= 2) {
                ConnData cd{gamma, christoffel_d1(cmetric, p)};
                const auto nnT = cov2(T, cd, T0, nT, p);
                sup = std::max(sup, std::sqrt(tensor_norm4(nnT, hm)));
            }
        }
    }
    return sup;
}

double ck_norm_scalar(const std::function<double(const Vec&)>& f,
                      const std::function<Vec(const Vec&)>& df, const MetricField& href,
                      const Box& box, int k, int per_axis,
                      const std::optional<MetricField>& conn) {
    if (k < 0 || k > 3) throw ConfigError("ck_norm_scalar: orders 0..3 supported");
    const MetricField& cmetric = conn ? *conn : href;
    const int n = href.dim();
    const double h = 1e-5;

    auto hess = [&](const Vec& p) {
        Mat H(n, n);
        for (int b = 0; b < n; ++b) {
            Vec pp = p, pm = p;
            pp[b] += h;
            pm[b] -= h;
            H.col(b) = (df(pp) - df(pm)) / (2.0 * h);
        }
        return Mat(0.5 * (H + H.transpose()));
    };
    auto cov_hess = [&](const Vec& p) {
        const Mat H = hess(p);
        const Vec d = df(p);
        const auto gamma = christoffel(cmetric, p);
        Mat out = H;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                double corr = 0.0;
                for (int c = 0; c < n; ++c) corr += gamma[c](a, b) * d[c];
                out(a, b) -= corr;
            }
        return out;
    };

    double sup = 0.0;
    for (const Vec& p : grid_points(box, per_axis)) {
        const Mat hm = href(p);
        sup = std::max(sup, std::abs(f(p)));
        if (k >= 1) {
            const Vec d = df(p);
            const Mat hinv = hm.inverse();
            sup = std::max(sup, std::sqrt(std::max(0.0, d.dot(hinv * d))));
        }
        if (k >= 2) sup = std::max(sup, std::sqrt(tensor_norm2(cov_hess(p), hm)));
        if (k >= 3) {
            const auto gamma = christoffel(cmetric, p);
            const Mat cH = cov_hess(p);
            std::vector<Mat> third(n, Mat::Zero(n, n));
            for (int e = 0; e < n; ++e) {
                Vec pp = p, pm = p;
                pp[e] += h;
                pm[e] -= h;
                Mat m = (cov_hess(pp) - cov_hess(pm)) / (2.0 * h);
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b) {
                        double corr = 0.0;
                        for (int c = 0; c < n; ++c)
                            corr += gamma[c](e, a) * cH(c, b) + gamma[c](e, b) * cH(a, c);
                        m(a, b) -= corr;
                    }
                third[e] = m;
            }
            sup = std::max(sup, std::sqrt(tensor_norm3(third, hm)));
        }
    }
    return sup;
}

// ---------------------------------------------------------------------------
// Convergence reports
// ---------------------------------------------------------------------------

ConvergenceReport check_convergence(const MetricSequence& seq, const MetricField& limit,
                                    const Vec& limit_basepoint, const std::vector<Box>& boxes,
                                    int k, const std::vector<double>& eps_schedule,
                                    const MetricField& href,
                                    const std::optional<MetricField>& conn) {
    ConvergenceReport report;
    // covariant derivatives follow the limit metric's connection unless an
    // explicit one is supplied; norms are measured in href
    const MetricField conn_metric = conn ? *conn : limit;
    std::vector<double> norms_by_index;
    for (std::size_t i = 0; i < seq.members.size(); ++i) {
        const auto& m = seq.members[i];
        const MetricField pb = pullback_metric(m.phi, m.g);
        const Tensor2Field diff = Tensor2Field::difference(pb, limit);
        const double bp_dist = (m.phi.inverse(m.basepoint) - limit_basepoint).norm();
        double worst = 0.0;
        for (std::size_t b = 0; b < boxes.size(); ++b) {
            ConvergenceRow row;
            row.index = static_cast<int>(i) + 1;
            row.box_id = static_cast<int>(b);
            row.k = k;
            row.norm = ck_norm(diff, href, boxes[b], k, 41, conn_metric);
            row.basepoint_dist = bp_dist;
            report.rows.push_back(row);
            worst = std::max(worst, row.norm);
        }
        norms_by_index.push_back(std::max(worst, bp_dist));
    }

    for (const double eps : eps_schedule) {
        int first = -1;
        for (int i = static_cast<int>(norms_by_index.size()) - 1; i >= 0; --i) {
            if (norms_by_index[i] < eps)
                first = i + 1;
            else
                break;
        }
        report.first_index_at_eps[eps] = first;
    }

    const double max_eps =
        eps_schedule.empty() ? 0.0 : *std::max_element(eps_schedule.begin(), eps_schedule.end());
    int growth_run = 0;
    for (std::size_t i = 1; i < norms_by_index.size(); ++i) {
        if (norms_by_index[i] > norms_by_index[i - 1] && norms_by_index[i] > max_eps)
            ++growth_run;
        else
            growth_run = 0;
        if (growth_run >= 2) report.diverging = true;  // three consecutive growing indices
    }

    const bool converged =
        !eps_schedule.empty() &&
        report.first_index_at_eps.begin()->second > 0;  // smallest eps reached
    report.overall = report.diverging ? "diverges" : (converged ? "converges" : "inconclusive");

    // annotate rows with the per-eps verdict of their index
    for (auto& row : report.rows) {
        std::string v;
        for (const double eps : eps_schedule) {
            const int fi = report.first_index_at_eps[eps];
            if (fi > 0 && row.index >= fi) {
                v = "below " + std::to_string(eps);
                break;
            }
        }
        row.verdict = v.empty() ? report.overall : v;
    }
    return report;
}

std::vector<AnchoredRow> anchored_convergence(const MetricSequence& seq,
                                              const Frame& limit_anchor) {
    std::vector<AnchoredRow> rows;
    const int nu = limit_anchor.neg_count;
    for (std::size_t i = 0; i < seq.members.size(); ++i) {
        const auto& m = seq.members[i];
        if (!m.anchor) throw ConfigError("anchored_convergence: member missing anchor");

        Mat Jinv;
        if (m.phi.const_jacobian)
            Jinv = m.phi.const_jacobian->inverse();
        else {
            // Jacobian of the inverse map at the member basepoint
            const int n = seq.dim;
            Jinv = Mat(n, n);
            const double h = m.phi.fd_step;
            for (int c = 0; c < n; ++c) {
                Vec pp = m.basepoint, pm = m.basepoint;
                pp[c] += h;
                pm[c] -= h;
                Jinv.col(c) = (m.phi.inverse(pp) - m.phi.inverse(pm)) / (2.0 * h);
            }
        }
        const Mat mapped = Jinv * m.anchor->basis;
        const Mat A = limit_anchor.basis.fullPivLu().solve(mapped);

        AnchoredRow row;
        row.index = static_cast<int>(i) + 1;
        row.align_residual = frame_align(A, nu).second;

        // principal angles between the mapped anchor span and the limit span
        auto orth = [](const Mat& M) {
            Eigen::HouseholderQR<Mat> qr(M);
            Mat Q = qr.householderQ();
            return Mat(Q.leftCols(M.cols()));
        };
        const Mat Qm = orth(mapped.leftCols(nu));
        const Mat Ql = orth(limit_anchor.basis.leftCols(nu));
        Eigen::JacobiSVD<Mat> svd(Ql.transpose() * Qm);
        const double smin = std::clamp(svd.singularValues().minCoeff(), -1.0, 1.0);
        row.principal_angle = std::acos(smin);
        rows.push_back(row);
    }
    return rows;
}

double quasi_isometry_factor(const MetricField& g1, const MetricField& g2, const Box& box,
                             int per_axis) {
    double lambda = 1.0;
    for (const Vec& p : grid_points(box, per_axis)) {
        const Mat a = g2(p);
        const Mat b = g1(p);
        Eigen::GeneralizedSelfAdjointEigenSolver<Mat> ges(a, b);
        if (ges.info() != Eigen::Success)
            throw SignatureError("quasi_isometry_factor: eigen solve failed (inputs not PD?)");
        const double mu_min = ges.eigenvalues().minCoeff();
        const double mu_max = ges.eigenvalues().maxCoeff();
        if (!(mu_min > 0))
            throw SignatureError("quasi_isometry_factor: inputs must be positive definite");
        lambda = std::max({lambda, mu_max, 1.0 / mu_min});
    }
    return lambda;
}

ConformalResult conformal_check(const Diffeo& F, const MetricField& g, const MetricField& gprime,
                                const Box& box, int per_axis) {
    const MetricField pb = pullback_metric(F, gprime);
    ConformalResult res;
    bool seen_pos = false, seen_neg = false;
    for (const Vec& p : grid_points(box, per_axis)) {
        const Mat gm = g(p);
        const Mat P = pb(p);
        Eigen::FullPivLU<Mat> lu(gm);
        if (!lu.isInvertible()) throw NumericError("conformal_check: singular metric");
        const double omega = (lu.inverse() * P).trace() / g.dim();
        if (omega > 0) seen_pos = true;
        if (omega < 0) seen_neg = true;
        res.omega_samples.emplace_back(p, omega);
        const double denom = gm.norm();
        res.residual = std::max(res.residual, (P - omega * gm).norm() / denom);
    }
    if (seen_pos && seen_neg)
        throw NumericError("conformal_check: conformal factor changes sign across the box "
                           "(dimension-2 caveat)");
    return res;
}

// ---------------------------------------------------------------------------
// Wick pipeline
// ---------------------------------------------------------------------------

WickPipelineReport wick_pipeline(const MetricSequence& seq, const MetricField& h_limit,
                                 const TemporalField& tau_limit, const Box& box, int k, double tol,
                                 int per_axis) {
    WickPipelineReport rep;
    const auto pts = grid_points(box, per_axis);

    // reconstructed limit g = h - 2 dtau (x) dtau
    const MetricField h_copy = h_limit;
    const TemporalField tau_copy = tau_limit;
    MetricField grec(h_limit.dim(), 1, [h_copy, tau_copy](const Vec& p) {
        const Vec d = tau_copy.differential(p);
        return Mat(h_copy(p) - 2.0 * d * d.transpose());
    });
    grec.with_analytic_d1([h_copy, tau_copy](const Vec& p, int a) {
        const Vec d = tau_copy.differential(p);
        const Vec dd = tau_copy.hessian(p).col(a);
        return Mat(h_copy.d1(p, a) - 2.0 * (dd * d.transpose() + d * dd.transpose()));
    });

    for (std::size_t i = 0; i < seq.members.size(); ++i) {
        const auto& m = seq.members[i];
        if (!m.tau) throw ConfigError("wick_pipeline: member missing temporal function");

        // members must be canonical representatives
        for (size_t s = 0; s < pts.size(); s += std::max<size_t>(1, pts.size() / 9)) {
            const double lam = lapse(m.g, *m.tau, m.phi.forward(pts[s])).value;
            if (std::abs(lam - 1.0) > 1e-8)
                throw TemporalError("wick_pipeline: member lapse != 1; canonicalize first");
        }

        const MetricField wick = wick_field(m.g, *m.tau);
        const MetricField pw = pullback_metric(m.phi, wick);
        const MetricField pg = pullback_metric(m.phi, m.g);
        const TemporalField ptau = pullback_temporal(m.phi, *m.tau);

        WickPipelineRow row;
        row.index = static_cast<int>(i) + 1;
        row.wick_norm = ck_norm(Tensor2Field::difference(pw, h_limit), h_limit, box, k, 21);
        row.tau_norm = ck_norm_scalar(
            [&](const Vec& p) { return ptau(p) - tau_copy(p); },
            [&](const Vec& p) { return Vec(ptau.differential(p) - tau_copy.differential(p)); },
            h_limit, box, k + 1, 21);
        row.rec_norm = ck_norm(Tensor2Field::difference(pg, grec), h_limit, box, k, 21);

        double ident = 0.0;
        for (const Vec& p : pts) {
            const Vec y = m.phi.forward(p);
            const Vec d = m.tau->differential(y);
            const Mat lhs = wick(y) - 2.0 * d * d.transpose();
            ident = std::max(ident, (lhs - m.g(y)).cwiseAbs().maxCoeff());
        }
        row.identity_residual = ident;
        rep.rows.push_back(row);
    }

    // |dtau|_h = 1 for the limit
    double unit_res = 0.0;
    for (const Vec& p : pts) {
        const Vec d = tau_limit.differential(p);
        const Mat hm = h_limit(p);
        unit_res = std::max(unit_res, std::abs(std::sqrt(d.dot(hm.inverse() * d)) - 1.0));
    }
    rep.dtau_unit_residual = unit_res;

    // h/2 steepness of the limit temporal function for the reconstructed metric
    MetricField half_h(h_limit.dim(), 0,
                       [h_copy](const Vec& p) { return Mat(0.5 * h_copy(p)); });
    double margin_min = std::numeric_limits<double>::infinity();
    for (size_t s = 0; s < pts.size(); s += std::max<size_t>(1, pts.size() / 9)) {
        const auto repChk = is_h_steep(grec, tau_limit, half_h, pts[s], 360);
        margin_min = std::min(margin_min, repChk.margin);
    }
    rep.hsteep_margin_min = margin_min;

    double worst_ident = 0.0;
    for (const auto& r : rep.rows) worst_ident = std::max(worst_ident, r.identity_residual);
    rep.passed = rep.dtau_unit_residual <= tol && worst_ident <= 1e-9 &&
                 rep.hsteep_margin_min >= -1e-9;
    return rep;
}

CurvatureBoundReport curvature_bound_report(const std::vector<MetricField>& fields, const Box& box,
                                            int a_max, int per_axis) {
    if (a_max < 0 || a_max > 1) throw ConfigError("curvature_bound_report: a_max in {0,1}");
    CurvatureBoundReport rep;
    std::vector<double> sup0;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        for (int a = 0; a <= a_max; ++a) {
            double sup = 0.0;
            for (const Vec& p : grid_points(box, per_axis))
                sup = std::max(sup, riemann_norm(fields[i], fields[i], p, a));
            rep.rows.push_back({static_cast<int>(i) + 1, a, sup});
            if (a == 0) sup0.push_back(sup);
        }
    }
    if (sup0.size() >= 3) {
        const std::size_t n = sup0.size();
        const bool tail_growth = sup0[n - 1] > sup0[n - 2] && sup0[n - 2] > sup0[n - 3];
        const bool large = sup0[n - 1] > 2.0 * (sup0[0] + 1e-12);
        rep.bounded_trend = !(tail_growth && large);
    }
    rep.injectivity_radius_checked = false;  // outside scope, reported explicitly
    return rep;
}

} // namespace lgeo
