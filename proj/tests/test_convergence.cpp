#include "lgeo/convergence.hpp"
#include "lgeo/scenario.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace lgeo;

namespace {

Vec pt(double a, double b) {
    Vec p(2);
    p << a, b;
    return p;
}

MetricField euclid2() {
    MetricField m(2, 0, [](const Vec&) { return Mat(Mat::Identity(2, 2)); });
    m.with_analytic_d1([](const Vec&, int) { return Mat(Mat::Zero(2, 2)); })
        .with_analytic_d2([](const Vec&, int, int) { return Mat(Mat::Zero(2, 2)); });
    return m;
}

Box box2(double a, double b, double c, double d) { return Box(pt(a, b), pt(c, d)); }

} // namespace

TEST_CASE("pullbacks") {
    const Scenario grw = build_scenario("grw-cosh");
    const MetricField same = pullback_metric(Diffeo::identity(2), grw.g);
    CHECK((same(pt(0.4, 0.2)) - grw.g(pt(0.4, 0.2))).cwiseAbs().maxCoeff() < 1e-14);

    // the boost is an isometry of the flat null-coordinate plane
    MetricField flat(2, 1, [](const Vec&) {
        Mat m(2, 2);
        m << 0, -1, -1, 0;
        return m;
    });
    Mat B = Mat::Zero(2, 2);
    B(0, 0) = 2.0;
    B(1, 1) = 0.5;
    const MetricField boosted = pullback_metric(Diffeo::affine(B, Vec::Zero(2)), flat);
    CHECK((boosted(pt(0.3, -0.8)) - flat(pt(0.3, -0.8))).cwiseAbs().maxCoeff() < 1e-14);

    // functoriality: (phi o psi)^* g = psi^* (phi^* g)
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    Mat A(2, 2);
    A << 1.1, 0.2, -0.1, 0.9;
    const Diffeo phi = Diffeo::affine(A, pt(0.1, -0.2));
    Mat C(2, 2);
    C << 0.8, -0.3, 0.2, 1.2;
    const Diffeo psi = Diffeo::affine(C, pt(-0.05, 0.3));
    const MetricField lhs = pullback_metric(phi.after(psi), grw.g);
    const MetricField rhs = pullback_metric(psi, pullback_metric(phi, grw.g));
    for (int i = 0; i < 20; ++i) {
        const Vec p = pt(u(rng), u(rng));
        CHECK((lhs(p) - rhs(p)).cwiseAbs().maxCoeff() < 1e-10);
    }

    // temporal pullback carries the analytic differential
    Vec shift(2);
    shift << -3.0, 0.0;
    const Scenario ds = build_scenario("de-sitter", {{"i", 3.0}});
    const TemporalField pulled =
        pullback_temporal(Diffeo::affine(Mat::Identity(2, 2), shift), ds.tau);
    CHECK(pulled(pt(0.4, 1.0)) == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(pulled.has_analytic());
}

TEST_CASE("diffeo inverse consistency") {
    Mat A(2, 2);
    A << 2, 0, 0, 0.5;
    const Diffeo d = Diffeo::affine(A, pt(1, -1));
    CHECK(d.roundtrip_residual({pt(0, 0), pt(2, 3), pt(-1, 5)}) < 1e-12);
    CHECK_THROWS_AS(Diffeo::affine(Mat::Zero(2, 2), Vec::Zero(2)), ConfigError);
}

TEST_CASE("ck_norm basics") {
    const MetricField e = euclid2();
    const Scenario mink = build_scenario("minkowski2d");
    const Box box = box2(0, 0, 1, 1);

    // zero difference
    CHECK(ck_norm(Tensor2Field::difference(mink.g, mink.g), e, box, 2) == 0.0);

    // monotone in k and in box inclusion
    const Scenario g1 = build_scenario("de-sitter", {{"i", 1.0}});
    const Scenario g0 = build_scenario("de-sitter", {{"i", 0.0}});
    const Tensor2Field diff = Tensor2Field::difference(g1.g, g0.g);
    const Box small = box2(-0.5, 0, 0.5, 2);
    const Box large = box2(-1, 0, 1, 2);
    const double k0 = ck_norm(diff, e, large, 0, 21);
    const double k1 = ck_norm(diff, e, large, 1, 21);
    const double k2 = ck_norm(diff, e, large, 2, 21);
    CHECK(k0 <= k1);
    CHECK(k1 <= k2);
    CHECK(ck_norm(diff, e, small, 1, 21) <= k1);

    // scalar norms: linear function against the flat connection
    const double s1 = ck_norm_scalar([](const Vec& p) { return 0.25 * p[0]; },
                                     [](const Vec&) { return Vec(pt(0.25, 0.0)); }, e, box, 3, 9);
    CHECK(s1 == doctest::Approx(0.25).epsilon(1e-10));  // sup|f| = sup|df| = 0.25, rest 0
}

TEST_CASE("covariant derivatives annihilate the connection metric") {
    // metric compatibility: nabla g = 0 and nabla^2 g = 0 in g's own
    // connection; exercises the first and second covariant derivative paths
    // including the Christoffel-derivative terms
    const Scenario grw = build_scenario("grw-cosh");
    const MetricField e = euclid2();
    const Box box = box2(-0.8, -0.8, 0.8, 0.8);
    const Tensor2Field T = Tensor2Field::of(grw.g);
    const double k0 = ck_norm(T, e, box, 0, 9, grw.g);
    const double k2 = ck_norm(T, e, box, 2, 9, grw.g);
    CHECK(k0 > 1.0);              // |g| itself is bounded away from zero
    CHECK(k2 == doctest::Approx(k0).epsilon(1e-10));  // derivative orders add nothing

    const Scenario ds = build_scenario("de-sitter", {{"i", 2.0}});
    const Tensor2Field Td = Tensor2Field::of(ds.g);
    const double d0 = ck_norm(Td, e, box, 0, 7, ds.g);
    const double d2 = ck_norm(Td, e, box, 2, 7, ds.g);
    CHECK(d2 == doctest::Approx(d0).epsilon(1e-8));
}

TEST_CASE("check_convergence verdicts") {
    const Scenario base = build_scenario("de-sitter", {{"i", 0.0}});
    const Box box = box2(-1, 0, 1, 2.0 * M_PI);
    const std::vector<double> eps = {1e-2, 1e-8};

    // constant sequence
    {
        MetricSequence seq;
        seq.dim = 2;
        for (int i = 0; i < 4; ++i)
            seq.members.push_back({base.g, base.tau, Diffeo::identity(2), pt(0, 0), {}});
        const auto rep = check_convergence(seq, base.g, pt(0, 0), {box}, 0, eps, euclid2());
        CHECK(rep.overall == "converges");
        CHECK(rep.first_index_at_eps.at(1e-8) == 1);
        for (const auto& row : rep.rows) CHECK(row.norm == 0.0);
    }

    // shifted members compared through the identifying diffeomorphisms
    {
        MetricSequence seq;
        seq.dim = 2;
        for (int i = 1; i <= 5; ++i) {
            const Scenario mem = build_scenario("de-sitter", {{"i", static_cast<double>(i)}});
            Vec shift(2);
            shift << -static_cast<double>(i), 0.0;
            seq.members.push_back({mem.g, mem.tau,
                                   Diffeo::affine(Mat::Identity(2, 2), shift),
                                   pt(-static_cast<double>(i), 0), {}});
        }
        const auto rep = check_convergence(seq, base.g, pt(0, 0), {box}, 2, eps, euclid2());
        CHECK(rep.overall == "converges");
        CHECK(rep.first_index_at_eps.at(1e-8) == 1);
    }

    // without the diffeomorphisms the same members diverge
    {
        MetricSequence seq;
        seq.dim = 2;
        for (int i = 1; i <= 5; ++i) {
            const Scenario mem = build_scenario("de-sitter", {{"i", static_cast<double>(i)}});
            seq.members.push_back({mem.g, mem.tau, Diffeo::identity(2), pt(0, 0), {}});
        }
        const auto rep = check_convergence(seq, base.g, pt(0, 0), {box}, 0, eps, euclid2());
        CHECK(rep.overall == "diverges");
        CHECK(rep.diverging);
        for (size_t i = 1; i < 5; ++i)
            CHECK(rep.rows[i].norm > rep.rows[i - 1].norm);  // strictly increasing
    }
}

TEST_CASE("anchored convergence diagnostics") {
    MetricField flat(2, 1, [](const Vec&) {
        Mat m(2, 2);
        m << 0, -1, -1, 0;
        return m;
    });
    const double s = 1.0 / std::sqrt(2.0);
    Mat adapted(2, 2);
    adapted << s, -s, s, s;
    Frame limit;
    limit.base = pt(0, 0);
    limit.basis = adapted;
    limit.neg_count = 1;

    // constant sequence, constant anchor
    {
        MetricSequence seq;
        seq.dim = 2;
        for (int i = 0; i < 3; ++i) {
            SequenceMember m{flat, {}, Diffeo::identity(2), pt(0, 0), {}};
            m.anchor = limit;
            seq.members.push_back(std::move(m));
        }
        for (const auto& row : anchored_convergence(seq, limit)) {
            CHECK(row.align_residual < 1e-12);
            CHECK(row.principal_angle < 1e-7);
        }
    }

    // boost iterates: mapped anchors diverge in norm, alignment fails
    {
        MetricSequence seq;
        seq.dim = 2;
        for (int k = 1; k <= 6; ++k) {
            Mat B = Mat::Zero(2, 2);
            B(0, 0) = std::pow(2.0, k);
            B(1, 1) = std::pow(2.0, -k);
            SequenceMember m{flat, {}, Diffeo::affine(B, Vec::Zero(2)), pt(0, 0), {}};
            m.anchor = limit;
            seq.members.push_back(std::move(m));
        }
        const auto rows = anchored_convergence(seq, limit);
        for (size_t i = 1; i < rows.size(); ++i)
            CHECK(rows[i].align_residual > rows[i - 1].align_residual);
        CHECK(rows.back().align_residual > 10.0);
    }

    // perturbed anchors at angle 1/i: principal angles decay to zero
    {
        MetricSequence seq;
        seq.dim = 2;
        for (int i = 1; i <= 8; ++i) {
            const double a = 1.0 / i;
            Mat R(2, 2);
            R << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
            SequenceMember m{flat, {}, Diffeo::identity(2), pt(0, 0), {}};
            Frame f;
            f.base = pt(0, 0);
            f.basis = R * adapted;
            f.neg_count = 1;
            m.anchor = f;
            seq.members.push_back(std::move(m));
        }
        const auto rows = anchored_convergence(seq, limit);
        for (size_t i = 0; i < rows.size(); ++i)
            CHECK(rows[i].principal_angle == doctest::Approx(1.0 / (i + 1)).epsilon(1e-6));
    }
}

TEST_CASE("quasi-isometry factors") {
    const MetricField e = euclid2();
    const Box box = box2(0, 0, 1, 1);
    CHECK(quasi_isometry_factor(e, e, box, 5) == doctest::Approx(1.0));

    MetricField twice(2, 0, [](const Vec&) { return Mat(2.0 * Mat::Identity(2, 2)); });
    CHECK(quasi_isometry_factor(e, twice, box, 5) == doctest::Approx(2.0));
    CHECK(quasi_isometry_factor(twice, e, box, 5) == doctest::Approx(2.0));

    // exact pullback: the Wick companions agree to machine precision
    const Scenario mem = build_scenario("de-sitter", {{"i", 2.0}});
    const Scenario base = build_scenario("de-sitter", {{"i", 0.0}});
    Vec shift(2);
    shift << -2.0, 0.0;
    const MetricField pulled = pullback_metric(Diffeo::affine(Mat::Identity(2, 2), shift),
                                               wick_field(mem.g, mem.tau));
    const MetricField wick0 = wick_field(base.g, base.tau);
    CHECK(quasi_isometry_factor(wick0, pulled, box2(-1, 0, 1, 6.28), 9) - 1.0 < 1e-10);

    // submultiplicative under composition
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    for (int trial = 0; trial < 10; ++trial) {
        const double a = u(rng), b = u(rng);
        MetricField g2(2, 0, [a](const Vec& p) {
            Mat m = Mat::Identity(2, 2);
            m(0, 0) = a + 0.1 * std::sin(p[0]);
            return m;
        });
        MetricField g3(2, 0, [b](const Vec& p) {
            Mat m = Mat::Identity(2, 2);
            m(1, 1) = b + 0.1 * std::cos(p[1]);
            return m;
        });
        const double l12 = quasi_isometry_factor(e, g2, box, 7);
        const double l23 = quasi_isometry_factor(g2, g3, box, 7);
        const double l13 = quasi_isometry_factor(e, g3, box, 7);
        CHECK(l13 <= l12 * l23 + 1e-10);
    }

    const Scenario mink = build_scenario("minkowski2d");
    CHECK_THROWS_AS(quasi_isometry_factor(e, mink.g, box, 3), SignatureError);
}

TEST_CASE("conformal factor fits") {
    const Scenario mink = build_scenario("minkowski2d");
    const Box box = box2(0, 0, 1, 1);

    MetricField four(2, 1, [&mink](const Vec& p) { return Mat(4.0 * mink.g(p)); });
    const auto res = conformal_check(Diffeo::identity(2), mink.g, four, box, 9);
    CHECK(res.residual < 1e-12);
    for (const auto& [p, omega] : res.omega_samples) CHECK(omega == doctest::Approx(4.0));

    // a non-conformal perturbation is flagged by the residual
    MetricField bumped(2, 1, [&mink](const Vec& p) {
        Mat m = mink.g(p);
        m(1, 1) += 0.3 * std::exp(-10.0 * (p[0] - 0.5) * (p[0] - 0.5));
        return m;
    });
    CHECK(conformal_check(Diffeo::identity(2), mink.g, bumped, box, 9).residual > 0.01);

    // conformal rescale with a smooth factor
    const Scenario grw = build_scenario("grw-cosh");
    MetricField rescaled(2, 1, [&grw](const Vec& p) {
        return Mat(std::exp(p[0]) * grw.g(p));
    });
    const auto rc = conformal_check(Diffeo::identity(2), grw.g, rescaled, box, 9);
    CHECK(rc.residual < 1e-10);
    for (const auto& [p, omega] : rc.omega_samples)
        CHECK(omega == doctest::Approx(std::exp(p[0])).epsilon(1e-10));

    // sign-changing factors are rejected (dimension-2 caveat)
    MetricField flipping(2, 1, [&mink](const Vec& p) {
        return Mat((p[0] - 0.5) * mink.g(p));
    });
    CHECK_THROWS_AS(conformal_check(Diffeo::identity(2), mink.g, flipping, box, 9),
                    NumericError);
}

TEST_CASE("wick pipeline rejects non-canonical members") {
    const Scenario mink = build_scenario("minkowski2d");
    TemporalField fast(2, [](const Vec& p) { return 2.0 * p[0]; });
    fast.with_analytic_differential([](const Vec&) {
        Vec d(2);
        d << 2, 0;
        return d;
    });
    MetricSequence seq;
    seq.dim = 2;
    seq.members.push_back({mink.g, fast, Diffeo::identity(2), pt(0, 0), {}});
    CHECK_THROWS_AS(
        wick_pipeline(seq, euclid2(), mink.tau, box2(0, 0, 1, 1), 0), TemporalError);
}

TEST_CASE("pipeline identity holds pointwise for every member") {
    // g_W - 2 dtau (x) dtau recovers the canonical representative exactly
    const Scenario grw = build_scenario("grw-cosh");
    const MetricField w = wick_field(grw.g, grw.tau);
    std::mt19937_64 rng(67);
    std::uniform_real_distribution<double> u(-0.9, 0.9);
    for (int i = 0; i < 40; ++i) {
        const Vec p = pt(u(rng), u(rng));
        const Vec d = grw.tau.differential(p);
        const Mat lhs = w(p) - 2.0 * d * d.transpose();
        CHECK((lhs - grw.g(p)).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("curvature bound reports") {
    const MetricField e = euclid2();
    const Box box = box2(-0.5, -0.5, 0.5, 0.5);

    const auto flat_rep = curvature_bound_report({e, e, e}, box, 1, 5);
    for (const auto& row : flat_rep.rows) CHECK(row.sup_norm < 1e-10);
    CHECK(flat_rep.bounded_trend);
    CHECK(!flat_rep.injectivity_radius_checked);

    // growing warp: Gauss curvature -f''/f = -i^2, so |Rm| = 2 i^2
    std::vector<MetricField> grow;
    for (int i = 1; i <= 3; ++i) {
        MetricField m(2, 0, [i](const Vec& p) {
            Mat g = Mat::Zero(2, 2);
            g(0, 0) = 1.0;
            const double c = std::cosh(i * p[0]);
            g(1, 1) = c * c;
            return g;
        });
        m.with_analytic_d1([i](const Vec& p, int a) {
            Mat g = Mat::Zero(2, 2);
            if (a == 0) g(1, 1) = i * std::sinh(2.0 * i * p[0]);
            return g;
        });
        grow.push_back(m);
    }
    const auto grow_rep = curvature_bound_report(grow, box, 0, 5);
    CHECK(!grow_rep.bounded_trend);
    for (int i = 1; i <= 3; ++i)
        CHECK(grow_rep.rows[i - 1].sup_norm == doctest::Approx(2.0 * i * i).epsilon(1e-6));
}

TEST_CASE("travelling-bump members stay isometric to the bump metric") {
    const Scenario bump0 = build_scenario("boost-bump", {{"k", 0.0}});
    for (int k = 1; k <= 4; ++k) {
        const Scenario mk = build_scenario("boost-bump", {{"k", static_cast<double>(k)}});
        // the member bakes in the pullback by diag(2^-k, 2^k); undo it
        Mat B = Mat::Zero(2, 2);
        B(0, 0) = std::pow(2.0, k);
        B(1, 1) = std::pow(2.0, -k);
        const MetricField undone = pullback_metric(Diffeo::affine(B, Vec::Zero(2)), mk.g);
        double worst = 0.0;
        for (double u = 0.9; u <= 1.6; u += 0.1)
            for (double v = 0.7; v <= 1.3; v += 0.1)
                worst = std::max(worst,
                                 (undone(pt(u, v)) - bump0.g(pt(u, v))).cwiseAbs().maxCoeff());
        CHECK(worst < 1e-12);
    }
}
