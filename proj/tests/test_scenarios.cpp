#include "lgeo/scenario.hpp"
#include "lgeo/temporal.hpp"

#include <doctest.h>

#include <cmath>

using namespace lgeo;

namespace {

Vec pt(double t, double x) {
    Vec p(2);
    p << t, x;
    return p;
}

} // namespace

TEST_CASE("scenario registry") {
    const Scenario mink = build_scenario("minkowski2d");
    CHECK(mink.dim == 2);
    CHECK(mink.g(pt(0, 0))(0, 0) == -1.0);
    CHECK(mink.tau(pt(0.7, 0.1)) == 0.7);

    const Scenario ds = build_scenario("de-sitter", {{"i", 3.0}, {"n", 2.0}});
    CHECK(ds.periodic[1]);
    CHECK(ds.tau(pt(0.2, 1.0)) == doctest::Approx(3.2));
    CHECK(ds.g(pt(0.2, 1.0))(1, 1) == doctest::Approx(std::pow(std::cosh(3.2), 2)));

    const Scenario apdx = build_scenario("appendixD");
    CHECK(apdx.default_box.contains(pt(1.0, 1.2)));

    CHECK_THROWS_AS(build_scenario("nope"), ConfigError);
    CHECK_THROWS_AS(build_scenario("de-sitter", {{"n", 3.0}}), ConfigError);
    CHECK_THROWS_AS(build_scenario("boost-bump", {{"u0", -1.0}}), ConfigError);
}

TEST_CASE("every scenario validates signature and temporality") {
    for (const char* name :
         {"minkowski2d", "grw-cosh", "de-sitter", "appendixB", "appendixD", "boost-bump"}) {
        const Scenario sc = build_scenario(name);
        CHECK_NOTHROW(sc.validate(7));
    }
}

TEST_CASE("smoothed step") {
    CHECK(smooth_step(-1.0) == 0.0);
    CHECK(smooth_step(0.0) == 0.0);
    CHECK(smooth_step(1.0) == 1.0);
    CHECK(smooth_step(2.0) == 1.0);
    CHECK(smooth_step(0.5) == doctest::Approx(0.5).epsilon(1e-15));
    for (const double t : {0.1, 0.25, 0.4, 0.6, 0.9})
        CHECK(smooth_step(t) + smooth_step(1.0 - t) == doctest::Approx(1.0).epsilon(1e-14));
    // derivative positive inside, zero at the edges
    CHECK(smooth_step_d1(0.5) > 0.0);
    CHECK(smooth_step_d1(0.0) == 0.0);
    CHECK(smooth_step_d1(1.0) == 0.0);
    // finite-difference agreement
    const double h = 1e-6;
    for (const double t : {0.2, 0.5, 0.8})
        CHECK(smooth_step_d1(t) ==
              doctest::Approx((smooth_step(t + h) - smooth_step(t - h)) / (2 * h)).epsilon(1e-6));
}

TEST_CASE("band time function") {
    // identity away from the bands
    CHECK(appendixB_phi(2.5).phi == 2.5);
    CHECK(appendixB_phi(2.5).dphi == 1.0);
    CHECK(appendixB_phi(15.0).dphi == 1.0);

    // exact slope at the band centers
    for (int k = 1; k <= 5; ++k) {
        const double k2 = static_cast<double>(k) * k;
        CHECK(appendixB_phi(k2).dphi == doctest::Approx(1.0 / k2).epsilon(1e-14));
        CHECK(appendixB_phi(k2).phi == doctest::Approx(k2).epsilon(1e-12));
    }

    // slope bounds 1/k^2 <= phi' <= 3 across the bands, continuity at edges
    for (int k = 2; k <= 5; ++k) {
        const double k2 = static_cast<double>(k) * k;
        const double half = 1.0 / k2;
        double prev = appendixB_phi(k2 - half - 1e-9).phi;
        for (int s = 0; s <= 400; ++s) {
            const double t = k2 - half + 2.0 * half * s / 400;
            const auto [phi, dphi] = appendixB_phi(t);
            CHECK(dphi >= 1.0 / k2 - 1e-12);
            CHECK(dphi <= 3.0 + 1e-12);
            CHECK(phi >= prev - 1e-12);  // increasing
            prev = phi;
        }
        CHECK(appendixB_phi(k2 + half + 1e-9).phi ==
              doctest::Approx(k2 + half + 1e-9).epsilon(1e-9));
    }
}

TEST_CASE("thin-band factor") {
    // pinned values
    CHECK(appendixD_f(0.0, 0.5) == doctest::Approx(1e-3).epsilon(1e-12));
    CHECK(appendixD_f(0.05, 1.0) == doctest::Approx(1e-3).epsilon(1e-12));
    // outside the printed strip the factor is exactly one
    CHECK(appendixD_f(0.15, 0.5) == 1.0);
    CHECK(appendixD_f(0.0, 0.1) == 1.0);
    CHECK(appendixD_f(-0.2, 1.0) == 1.0);
    CHECK(appendixD_f(0.5, 0.5) == 1.0);
    // smooth positive interpolation in between
    const double mid = appendixD_f(0.08, 0.5);
    CHECK(mid > 1e-3);
    CHECK(mid < 1.0);
    const double h = 1e-6;
    for (const auto& [t, x] : std::vector<std::pair<double, double>>{
             {0.08, 0.5}, {-0.07, 0.9}, {0.0, 0.205}, {0.03, 1.245}}) {
        CHECK(appendixD_f_dt(t, x) ==
              doctest::Approx((appendixD_f(t + h, x) - appendixD_f(t - h, x)) / (2 * h))
                  .epsilon(1e-4));
        CHECK(appendixD_f_dx(t, x) ==
              doctest::Approx((appendixD_f(t, x + h) - appendixD_f(t, x - h)) / (2 * h))
                  .epsilon(1e-4));
    }
}

TEST_CASE("explicit witness curve") {
    const AlphaCurve alpha = appendixD_alpha();
    CHECK((alpha.points.front() - pt(0, 0)).norm() == 0.0);
    CHECK((alpha.points.back() - pt(1, 1.2)).norm() == 0.0);

    // first segment: null chord in the flat region, Wick length 0.1 sqrt(2)
    CHECK((alpha.points[1] - pt(0.1, 0.1)).norm() == 0.0);
    const Scenario sc = build_scenario("appendixD");
    const MetricField w = wick_field(sc.g, sc.tau);
    const Vec d = alpha.points[1] - alpha.points[0];
    double first = 0.0;
    const int n = 64;
    for (int j = 0; j < n; ++j) {
        const Vec x = alpha.points[0] + d * ((j + 0.5) / n);
        first += std::sqrt(inner(w(x), d, d)) / n;
    }
    CHECK(first == doctest::Approx(0.1 * std::sqrt(2.0)).epsilon(1e-10));

    CHECK(alpha.wick_length <= 1.33);
    const double bound = 0.2 * std::sqrt(2.0) + std::sqrt(2.0 / 1000.0) + 1.0;
    CHECK(std::abs(alpha.wick_length - bound) / bound <= 0.02);
}

TEST_CASE("travelling bump support arithmetic") {
    const Scenario m0 = build_scenario("boost-bump", {{"k", 0.0}});
    // perturbed at the bump center, flat far away
    const Mat at_center = m0.g(pt(1.25, 1.0));
    CHECK(at_center(0, 0) != 0.0);
    const Mat far = m0.g(pt(-2.0, 3.0));
    CHECK(far(0, 0) == 0.0);
    CHECK(far(0, 1) == -1.0);

    // member k: support slides to u in 2^k [1, 1.5]
    for (int k = 1; k <= 4; ++k) {
        const Scenario mk = build_scenario("boost-bump", {{"k", static_cast<double>(k)}});
        const double sk = std::pow(2.0, k);
        CHECK(mk.g(pt(sk * 1.25, 1.0 / sk))(0, 0) != 0.0);
        CHECK(mk.g(pt(sk * 0.99, 1.0 / sk))(0, 0) == 0.0);
        CHECK(mk.g(pt(sk * 1.51, 1.0 / sk))(0, 0) == 0.0);
    }

    // flat on {u <= U0} exactly once k >= log2(U0 / u0)
    const double U0 = 4.0;
    const int k_flat = static_cast<int>(std::ceil(std::log2(U0 / 1.0)));
    const Scenario mflat = build_scenario("boost-bump", {{"k", static_cast<double>(k_flat)}});
    for (double u = -U0; u <= U0; u += 0.5)
        for (double v = -U0; v <= U0; v += 0.5) {
            const Mat g = mflat.g(pt(u, v));
            CHECK(g(0, 0) == 0.0);
            CHECK(g(1, 1) == 0.0);
        }
}

TEST_CASE("shifted warp pullback identity") {
    const Scenario base = build_scenario("de-sitter", {{"i", 0.0}});
    for (int i = 1; i <= 4; ++i) {
        const Scenario mem = build_scenario("de-sitter", {{"i", static_cast<double>(i)}});
        double worst = 0.0;
        for (double t = -1.0; t <= 1.0; t += 0.25)
            for (double th = 0.0; th < 6.28; th += 0.7) {
                // F_i(t, x) = (t - i, x) applied by hand
                const Mat pulled = mem.g(pt(t - i, th));
                worst = std::max(worst,
                                 (pulled - base.g(pt(t, th))).cwiseAbs().maxCoeff());
            }
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("h candidates") {
    const Scenario mink = build_scenario("minkowski2d");
    const Mat he = mink.h_candidate("half-euclidean")(pt(0, 0));
    CHECK((he - 0.5 * Mat::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
    const Mat hw = mink.h_candidate("half-wick")(pt(0.3, 0.4));
    CHECK((hw - 0.5 * Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK_THROWS_AS(mink.h_candidate("nope"), ConfigError);

    const Scenario apdxB = build_scenario("appendixB");
    const Mat hb = apdxB.h_candidate("half-phi2-euclidean")(pt(4.0, 0.0));
    CHECK(hb(0, 0) == doctest::Approx(0.5 / 16.0));  // phi'(4) = 1/4, so (phi')^2 / 2 = 1/32
}

TEST_CASE("scenario config parsing") {
    const std::string text = R"(# sample
[scenario]
name = de-sitter
params = i=3, n=2
box = -1, 0, 1, 6.283185307179586
spacing = 0.05
stencil = 3
)";
    const ScenarioConfig cfg = parse_scenario_config(text);
    CHECK(cfg.name == "de-sitter");
    CHECK(cfg.params.at("i") == 3.0);
    CHECK(cfg.params.at("n") == 2.0);
    CHECK(cfg.box.has_value());
    CHECK(cfg.box->lower[0] == -1.0);
    CHECK(cfg.box->upper[1] == doctest::Approx(2 * M_PI));
    CHECK((*cfg.spacing)[0] == 0.05);
    CHECK(cfg.stencil.value() == 3);

    CHECK_THROWS_AS(parse_scenario_config("[scenario]\nbox = 1,2,3\n"), ConfigError);
    CHECK_THROWS_AS(parse_scenario_config("[scenario]\nspacing = 0.1\n"), ConfigError);
    CHECK_THROWS_AS(parse_scenario_config("[scenario]\nname = x\nwhat = 3\n"), ConfigError);
}
