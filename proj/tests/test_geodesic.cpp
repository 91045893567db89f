#include "lgeo/geodesic.hpp"
#include "lgeo/scenario.hpp"

#include <doctest.h>

#include <Eigen/Cholesky>
#include <cmath>
#include <random>

using namespace lgeo;

namespace {

Vec pt(double a, double b) {
    Vec p(2);
    p << a, b;
    return p;
}

MetricField unit_sphere() {
    MetricField m(2, 0, [](const Vec& p) {
        Mat g = Mat::Zero(2, 2);
        g(0, 0) = 1.0;
        g(1, 1) = std::sin(p[0]) * std::sin(p[0]);
        return g;
    });
    m.with_analytic_d1([](const Vec& p, int a) {
        Mat g = Mat::Zero(2, 2);
        if (a == 0) g(1, 1) = std::sin(2.0 * p[0]);
        return g;
    });
    return m;
}

} // namespace

TEST_CASE("geodesics in flat charts are straight lines") {
    const Scenario mink = build_scenario("minkowski2d");
    const Vec p = pt(0.1, -0.2);
    const Vec v = pt(0.4, 0.7);
    CHECK((exp_map(mink.g, p, v) - (p + v)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((exp_map(mink.g, p, Vec::Zero(2)) - p).norm() == 0.0);

    const auto samples = geodesic(mink.g, p, v, 2.0);
    for (const auto& s : samples)
        CHECK((s.x - (p + s.s * v)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("great circles close after one period") {
    const MetricField sphere = unit_sphere();
    const Vec start = pt(M_PI / 2, 0.0);
    const Vec v = pt(0.0, 1.0);
    const Vec end = exp_map(sphere, start, 2.0 * M_PI * v);
    CHECK(std::abs(end[0] - M_PI / 2) < 1e-6);
    CHECK(std::abs(end[1] - 2.0 * M_PI) < 1e-6);
}

TEST_CASE("comoving curves are geodesics of the warped product") {
    const Scenario grw = build_scenario("grw-cosh");
    // Gamma^x_tt = 0 for -dt^2 + f^2 dx^2, so the t-axis is geodesic
    const auto gam = christoffel(grw.g, pt(0.4, 0.5));
    CHECK(gam[1](0, 0) == 0.0);
    const Vec end = exp_map(grw.g, pt(0, 0.5), pt(1, 0));
    CHECK(std::abs(end[1] - 0.5) < 1e-9);
    CHECK(std::abs(end[0] - 1.0) < 1e-9);
}

TEST_CASE("energy is conserved along geodesics") {
    const MetricField sphere = unit_sphere();
    const Vec p = pt(1.2, 0.0);
    Vec v(2);
    v << 0.3, 0.8 / std::sin(1.2);
    const auto path = geodesic(sphere, p, v, 10.0);
    const double e0 = inner(sphere(p), v, v);
    for (const auto& s : path) CHECK(std::abs(inner(sphere(s.x), s.v, s.v) - e0) < 1e-8);
}

TEST_CASE("shooting inverse of the exponential map") {
    const MetricField sphere = unit_sphere();
    const Vec p = pt(1.0, 0.5);
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-0.2, 0.2);
    for (int i = 0; i < 10; ++i) {
        const Vec v = pt(u(rng), u(rng));
        const Vec q = exp_map(sphere, p, v);
        const Vec rec = log_map(sphere, p, q, 1e-9);
        CHECK((rec - v).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("parallel transport preserves inner products") {
    const Scenario mink = build_scenario("minkowski2d");
    Frame f;
    f.base = pt(0, 0);
    f.basis = Mat::Identity(2, 2);
    f.neg_count = 1;
    CHECK(frame_gram_residual(mink.g, f) == 0.0);

    auto wavy = [](double s) {
        Vec x(2), v(2);
        x << 0.3 * std::sin(s), s;
        v << 0.3 * std::cos(s), 1.0;
        return std::make_pair(x, v);
    };
    const Frame moved = parallel_transport(mink.g, wavy, 0.0, 3.0, f);
    CHECK((moved.basis - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);

    // on the sphere: Gram matrix preserved to integrator tolerance
    const MetricField sphere = unit_sphere();
    Frame sf;
    sf.base = pt(0.8, 0.0);
    sf.basis = Mat(2, 2);
    sf.basis << 1.0, 0.0, 0.0, 1.0 / std::sin(0.8);
    sf.neg_count = 0;
    auto latitude = [](double s) {
        Vec x(2), v(2);
        x << 0.8, s;
        v << 0.0, 1.0;
        return std::make_pair(x, v);
    };
    Frame sm = parallel_transport(sphere, latitude, 0.0, 2.0 * M_PI, sf);
    sm.base = sf.base;
    CHECK(frame_gram_residual(sphere, sm) < 1e-8);
}

TEST_CASE("anchored metric of a flat chart is constant Euclidean") {
    const Scenario mink = build_scenario("minkowski2d");
    Frame f;
    f.base = pt(0, 0);
    f.basis = Mat::Identity(2, 2);
    f.neg_count = 1;
    const AnchoredMetric ga(mink.g, f, 0.5);
    // center value flips the sign of the timelike block
    CHECK((ga(pt(0, 0)) - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
    for (const Vec& q : {pt(0.2, 0.1), pt(-0.3, 0.2), pt(0.1, -0.45)})
        CHECK((ga(q) - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-8);
    CHECK_THROWS_AS(ga(pt(0.7, 0.0)), DomainError);
}

TEST_CASE("anchored metric of the warped circle is positive definite") {
    const Scenario ds = build_scenario("de-sitter", {{"i", 0.0}});
    Frame f;
    f.base = pt(0, 0);
    f.basis = Mat::Identity(2, 2);  // g at the throat is diag(-1, 1)
    f.neg_count = 1;
    const AnchoredMetric ga(ds.g, f, 0.3);
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> ur(0.0, 0.28), ua(0.0, 2 * M_PI);
    for (int i = 0; i < 100; ++i) {
        const double r = ur(rng), th = ua(rng);
        const Vec q = pt(r * std::cos(th), r * std::sin(th));
        const Mat m = ga(q);
        Eigen::LLT<Mat> llt(m);
        CHECK(llt.info() == Eigen::Success);
    }
}

TEST_CASE("frame alignment") {
    // identity in, identity out
    const auto [qi, ri] = frame_align(Mat::Identity(3, 3), 1);
    CHECK(ri == 0.0);
    CHECK((qi - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);

    // idempotent on block-orthogonal input and equivariant under block actions
    Mat R = Mat::Zero(3, 3);
    R(0, 0) = -1;
    const double a = 0.9;
    R(1, 1) = std::cos(a);
    R(1, 2) = -std::sin(a);
    R(2, 1) = std::sin(a);
    R(2, 2) = std::cos(a);
    CHECK(frame_align(R, 1).second < 1e-14);

    Mat A = R;
    A(0, 1) = 2e-3;
    A(1, 0) = -1.5e-3;
    const auto [q, res] = frame_align(A, 1);
    CHECK(res <= 5e-3);
    CHECK((q - R).cwiseAbs().maxCoeff() < 1e-9);

    // equivariance: residual is invariant under left/right block-orthogonal factors
    const double b = 0.4;
    Mat Q2 = Mat::Identity(3, 3);
    Q2(1, 1) = std::cos(b);
    Q2(1, 2) = -std::sin(b);
    Q2(2, 1) = std::sin(b);
    Q2(2, 2) = std::cos(b);
    CHECK(frame_align(Mat(Q2 * A), 1).second == doctest::Approx(res).epsilon(1e-10));
    CHECK(frame_align(Mat(A * Q2), 1).second == doctest::Approx(res).epsilon(1e-10));

    // a Lorentz boost is eta-orthogonal but far from O(1) x O(1)
    Mat boost(2, 2);
    boost << std::cosh(1.0), std::sinh(1.0), std::sinh(1.0), std::cosh(1.0);
    Mat eta = Mat::Identity(2, 2);
    eta(0, 0) = -1.0;
    CHECK((boost.transpose() * eta * boost - eta).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(frame_align(boost, 1).second > 0.5);

    CHECK_THROWS_AS(frame_align(Mat(Mat::Zero(2, 2)), 1), NumericError);
}
