#include "lgeo/core.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace lgeo {

namespace {

constexpr double kSymmetryTol = 1e-12;

Mat symmetrize(const Mat& m) { return 0.5 * (m + m.transpose()); }

} // namespace

void MetricField::check_point(const Vec& p, double pad) const {
    if (p.size() != dim_)
        throw DomainError("MetricField: point dimension " + std::to_string(p.size()) +
                          " != chart dimension " + std::to_string(dim_));
    if (!domain_.contains(p, pad))
        throw DomainError("MetricField: point outside declared domain");
}

Mat MetricField::operator()(const Vec& p) const {
    check_point(p);
    Mat g = eval_(p);
    if (g.rows() != dim_ || g.cols() != dim_)
        throw NumericError("MetricField: evaluation returned wrong shape");
    if (!g.allFinite())
        throw NumericError("MetricField: non-finite metric entries");
    const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
    if ((g - g.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale)
        throw NumericError("MetricField: evaluation not symmetric");
    return symmetrize(g);
}

Mat MetricField::d1(const Vec& p, int a) const {
    if (d1_) return symmetrize(d1_(p, a));
    // central difference; stencil must stay inside the domain
    Vec e = Vec::Zero(dim_);
    e[a] = step_;
    check_point(p + e);
    check_point(p - e);
    return symmetrize((eval_(p + e) - eval_(p - e)) / (2.0 * step_));
}

Mat MetricField::d2(const Vec& p, int a, int b) const {
    if (d2_) return symmetrize(d2_(p, a, b));
    if (d1_) {
        // differentiate the analytic first partial
        Vec e = Vec::Zero(dim_);
        e[b] = step_;
        check_point(p + e);
        check_point(p - e);
        return symmetrize((d1_(p + e, a) - d1_(p - e, a)) / (2.0 * step_));
    }
    Vec ea = Vec::Zero(dim_), eb = Vec::Zero(dim_);
    ea[a] = step_;
    eb[b] = step_;
    if (a == b) {
        check_point(p + ea);
        check_point(p - ea);
        return symmetrize((eval_(p + ea) - 2.0 * eval_(p) + eval_(p - ea)) / (step_ * step_));
    }
    check_point(p + ea + eb);
    check_point(p - ea - eb);
    return symmetrize((eval_(p + ea + eb) - eval_(p + ea - eb) - eval_(p - ea + eb) +
                       eval_(p - ea - eb)) /
                      (4.0 * step_ * step_));
}

void MetricField::validate_signature(const Vec& p) const {
    const Mat g = (*this)(p);
    Eigen::SelfAdjointEigenSolver<Mat> es(g, Eigen::EigenvaluesOnly);
    int neg = 0, pos = 0;
    const double scale = std::max(1e-300, es.eigenvalues().cwiseAbs().maxCoeff());
    for (int i = 0; i < dim_; ++i) {
        const double ev = es.eigenvalues()[i];
        if (ev < -1e-12 * scale)
            ++neg;
        else if (ev > 1e-12 * scale)
            ++pos;
    }
    if (neg != index_ || pos != dim_ - index_)
        throw SignatureError("MetricField: signature (" + std::to_string(neg) + "," +
                             std::to_string(pos) + ") at sampled point, expected (" +
                             std::to_string(index_) + "," + std::to_string(dim_ - index_) + ")");
}

Jet jet(const MetricField& field, const Vec& p, int k) {
    if (k < 0 || k > 2) throw ConfigError("jet: only orders 0..2 supported");
    const int n = field.dim();
    Jet j;
    j.point = p;
    j.order = k;
    j.g = field(p);
    if (k >= 1) {
        j.d1.resize(n);
        for (int a = 0; a < n; ++a) j.d1[a] = field.d1(p, a);
    }
    if (k >= 2) {
        j.d2.assign(n, std::vector<Mat>(n));
        for (int a = 0; a < n; ++a)
            for (int b = a; b < n; ++b) {
                Mat m = field.d2(p, a, b);
                if (a != b) {
                    // mixed partials commute; enforce and cross-check
                    Mat m2 = field.d2(p, b, a);
                    const double scale =
                        std::max(1.0, std::max(m.cwiseAbs().maxCoeff(), m2.cwiseAbs().maxCoeff()));
                    if ((m - m2).cwiseAbs().maxCoeff() > 1e-3 * scale)
                        throw NumericError("jet: mixed partials disagree beyond tolerance");
                    m = 0.5 * (m + m2);
                }
                j.d2[a][b] = m;
                j.d2[b][a] = m;
            }
    }
    return j;
}

std::vector<Mat> christoffel(const Jet& j) {
    const int n = static_cast<int>(j.g.rows());
    if (j.order < 1) throw ConfigError("christoffel: order-1 jet required");
    Eigen::FullPivLU<Mat> lu(j.g);
    if (!lu.isInvertible())
        throw NumericError("christoffel: metric matrix singular");
    const Mat ginv = lu.inverse();
    std::vector<Mat> gamma(n, Mat::Zero(n, n));
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int jj = i; jj < n; ++jj) {
                double s = 0.0;
                for (int l = 0; l < n; ++l)
                    s += ginv(k, l) * (j.d1[i](jj, l) + j.d1[jj](i, l) - j.d1[l](i, jj));
                gamma[k](i, jj) = 0.5 * s;
                gamma[k](jj, i) = gamma[k](i, jj);
            }
    return gamma;
}

std::vector<Mat> christoffel(const MetricField& field, const Vec& p) {
    return christoffel(jet(field, p, 1));
}

std::vector<std::vector<Mat>> christoffel_d1(const MetricField& field, const Vec& p) {
    const int n = field.dim();
    const Jet j = jet(field, p, 2);
    Eigen::FullPivLU<Mat> lu(j.g);
    if (!lu.isInvertible()) throw NumericError("christoffel_d1: metric matrix singular");
    const Mat ginv = lu.inverse();

    // d_c g^{-1} = -g^{-1} (d_c g) g^{-1}
    std::vector<Mat> dginv(n);
    for (int c = 0; c < n; ++c) dginv[c] = -ginv * j.d1[c] * ginv;

    std::vector<std::vector<Mat>> dgamma(n, std::vector<Mat>(n, Mat::Zero(n, n)));
    for (int c = 0; c < n; ++c)
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int jj = i; jj < n; ++jj) {
                    double s = 0.0;
                    for (int l = 0; l < n; ++l) {
                        s += dginv[c](k, l) * (j.d1[i](jj, l) + j.d1[jj](i, l) - j.d1[l](i, jj));
                        s += ginv(k, l) *
                             (j.d2[c][i](jj, l) + j.d2[c][jj](i, l) - j.d2[c][l](i, jj));
                    }
                    dgamma[c][k](i, jj) = 0.5 * s;
                    dgamma[c][k](jj, i) = dgamma[c][k](i, jj);
                }
    return dgamma;
}

std::vector<std::vector<Mat>> riemann_up(const MetricField& field, const Vec& p) {
    const int n = field.dim();
    const auto gamma = christoffel(field, p);
    const auto dgamma = christoffel_d1(field, p);

    // R^a_{bcd} = d_c Gamma^a_{db} - d_d Gamma^a_{cb}
    //           + Gamma^a_{ce} Gamma^e_{db} - Gamma^a_{de} Gamma^e_{cb}
    std::vector<std::vector<Mat>> R(n, std::vector<Mat>(n, Mat::Zero(n, n)));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    double s = dgamma[c][a](d, b) - dgamma[d][a](c, b);
                    for (int e = 0; e < n; ++e)
                        s += gamma[a](c, e) * gamma[e](d, b) - gamma[a](d, e) * gamma[e](c, b);
                    R[a][b](c, d) = s;
                }
    return R;
}

namespace {

// Lowered Riemann tensor components R_{abcd} as a rank-4 array.
std::vector<std::vector<Mat>> riemann_down(const MetricField& field, const Vec& p) {
    const int n = field.dim();
    const Mat g = field(p);
    const auto Rup = riemann_up(field, p);
    std::vector<std::vector<Mat>> R(n, std::vector<Mat>(n, Mat::Zero(n, n)));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    double s = 0.0;
                    for (int e = 0; e < n; ++e) s += g(a, e) * Rup[e][b](c, d);
                    R[a][b](c, d) = s;
                }
    return R;
}

// Transform matrix to a ref-orthonormal frame: columns of L^{-T} for ref = L L^T.
Mat orthonormal_frame(const Mat& href) {
    Eigen::LLT<Mat> llt(href);
    if (llt.info() != Eigen::Success)
        throw SignatureError("reference metric not positive definite");
    Mat L = llt.matrixL();
    return L.transpose().inverse();
}

} // namespace

double tensor_norm2(const Mat& T, const Mat& href) {
    const Mat E = orthonormal_frame(href);
    const Mat Tf = E.transpose() * T * E;
    return Tf.squaredNorm();
}

double tensor_norm3(const std::vector<Mat>& T, const Mat& href) {
    const int n = static_cast<int>(T.size());
    const Mat E = orthonormal_frame(href);
    double total = 0.0;
    // transform the two trailing slots, then the leading one
    std::vector<Mat> Tt(n);
    for (int a = 0; a < n; ++a) Tt[a] = E.transpose() * T[a] * E;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double s = 0.0;
                for (int a = 0; a < n; ++a) s += E(a, i) * Tt[a](j, k);
                total += s * s;
            }
    return total;
}

double tensor_norm4(const std::vector<std::vector<Mat>>& T, const Mat& href) {
    const int n = static_cast<int>(T.size());
    const Mat E = orthonormal_frame(href);
    std::vector<std::vector<Mat>> Tt(n, std::vector<Mat>(n));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) Tt[a][b] = E.transpose() * T[a][b] * E;
    double total = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    double s = 0.0;
                    for (int a = 0; a < n; ++a)
                        for (int b = 0; b < n; ++b) s += E(a, i) * E(b, j) * Tt[a][b](k, l);
                    total += s * s;
                }
    return total;
}

double riemann_norm(const MetricField& field, const MetricField& ref, const Vec& p, int a) {
    if (a < 0 || a > 1) throw ConfigError("riemann_norm: only orders 0 and 1 supported");
    if (ref.index() != 0) throw SignatureError("riemann_norm: reference metric must be Riemannian");
    const Mat href = ref(p);
    if (a == 0) {
        return std::sqrt(tensor_norm4(riemann_down(field, p), href));
    }

    // nabla_e R_{abcd} = d_e R_{abcd} - Gamma^f_{ea} R_{fbcd} - Gamma^f_{eb} R_{afcd}
    //                  - Gamma^f_{ec} R_{abfd} - Gamma^f_{ed} R_{abcf}
    const int n = field.dim();
    const double h = field.step();
    const auto gamma = christoffel(field, p);
    const auto R0 = riemann_down(field, p);

    // rank-5 array indexed [e][a][b](c,d)
    std::vector<std::vector<std::vector<Mat>>> nR(
        n, std::vector<std::vector<Mat>>(n, std::vector<Mat>(n, Mat::Zero(n, n))));
    for (int e = 0; e < n; ++e) {
        Vec de = Vec::Zero(n);
        de[e] = h;
        const auto Rp = riemann_down(field, p + de);
        const auto Rm = riemann_down(field, p - de);
        for (int ia = 0; ia < n; ++ia)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c)
                    for (int d = 0; d < n; ++d) {
                        double s = (Rp[ia][b](c, d) - Rm[ia][b](c, d)) / (2.0 * h);
                        for (int f = 0; f < n; ++f) {
                            s -= gamma[f](e, ia) * R0[f][b](c, d);
                            s -= gamma[f](e, b) * R0[ia][f](c, d);
                            s -= gamma[f](e, c) * R0[ia][b](f, d);
                            s -= gamma[f](e, d) * R0[ia][b](c, f);
                        }
                        nR[e][ia][b](c, d) = s;
                    }
    }

    // norm: contract all five slots with href^{-1}
    const Mat E = orthonormal_frame(href);
    double total = 0.0;
    for (int i0 = 0; i0 < n; ++i0)
        for (int i1 = 0; i1 < n; ++i1)
            for (int i2 = 0; i2 < n; ++i2)
                for (int i3 = 0; i3 < n; ++i3)
                    for (int i4 = 0; i4 < n; ++i4) {
                        double s = 0.0;
                        for (int e = 0; e < n; ++e)
                            for (int ia = 0; ia < n; ++ia)
                                for (int b = 0; b < n; ++b)
                                    for (int c = 0; c < n; ++c)
                                        for (int d = 0; d < n; ++d)
                                            s += E(e, i0) * E(ia, i1) * E(b, i2) * E(c, i3) *
                                                 E(d, i4) * nR[e][ia][b](c, d);
                        total += s * s;
                    }
    return std::sqrt(total);
}

Vec raise_index(const Mat& g, const Vec& covec) {
    Eigen::FullPivLU<Mat> lu(g);
    if (!lu.isInvertible()) throw NumericError("raise_index: metric matrix singular");
    return lu.solve(covec);
}

std::vector<Vec> grid_points(const Box& box, int per_axis) {
    if (per_axis < 2) throw ConfigError("grid_points: need at least 2 points per axis");
    const int n = box.dim();
    for (int i = 0; i < n; ++i)
        if (!std::isfinite(box.lower[i]) || !std::isfinite(box.upper[i]))
            throw ConfigError("grid_points: box must be bounded");
    std::vector<Vec> pts;
    std::vector<int> idx(n, 0);
    const long total = static_cast<long>(std::pow(per_axis, n));
    pts.reserve(total);
    for (long t = 0; t < total; ++t) {
        Vec p(n);
        long rem = t;
        for (int i = 0; i < n; ++i) {
            const int k = rem % per_axis;
            rem /= per_axis;
            p[i] = box.lower[i] + (box.upper[i] - box.lower[i]) * k / (per_axis - 1);
        }
        pts.push_back(std::move(p));
    }
    return pts;
}

} // namespace lgeo
