#pragma once

#include "lgeo/core.hpp"
#include "lgeo/temporal.hpp"

#include <map>
#include <string>

namespace lgeo {

// ---------------------------------------------------------------------------
// Built-in scenarios
// ---------------------------------------------------------------------------

/// A fully wired chart + metric + temporal function, in product form with tau
/// the first projection wherever applicable.
struct Scenario {
    enum class Completeness { Yes, No, Unknown };

    std::string name;
    int dim = 2;
    Box default_box;                 // working box for lattices and grids
    std::vector<bool> periodic;      // per-axis wrap flags
    MetricField g;
    TemporalField tau;
    std::function<Vec(const Vec&)> time_orientation;  // future timelike field
    Completeness wick_complete = Completeness::Unknown;
    std::string citation;

    /// Auxiliary Riemannian metrics accepted by name: "half-euclidean",
    /// "half-wick", or a scenario-specific named field.
    MetricField h_candidate(const std::string& spec) const;

    std::map<std::string, std::function<MetricField()>> h_named;

    /// Samples signature and temporal validity across the default box.
    void validate(int per_axis = 9) const;
};

/// Construct a scenario by name. Known names: minkowski2d, grw-cosh,
/// de-sitter (params i, n=2), appendixB (param kmax), appendixD,
/// boost-bump (params k, u0, width, amplitude).
Scenario build_scenario(const std::string& name,
                        const std::map<std::string, double>& params = {});

// ---------------------------------------------------------------------------
// Explicit constructions
// ---------------------------------------------------------------------------

/// C-infinity step: 0 for t <= 0, 1 for t >= 1, strictly increasing between.
double smooth_step(double t);
double smooth_step_d1(double t);

/// The band-modified time function: phi(t) = t away from the bands around
/// t = k^2; inside band k the slope dips to exactly 1/k^2 at t = k^2 and
/// stays within [1/k^2, 3].
struct PhiEval {
    double phi;
    double dphi;
};
PhiEval appendixB_phi(double t, int k_max = 8);

/// The thin-band metric factor: f = 1 outside U = [-0.1,0.1] x [0.2,1.25],
/// f = 1e-3 on the pinned inner band, smooth positive interpolation between.
double appendixD_f(double t, double x);
double appendixD_f_dt(double t, double x);
double appendixD_f_dx(double t, double x);

/// The explicit piecewise causal witness curve from (0,0) to (1,1.2) together
/// with its Wick length (fine quadrature along the polyline).
struct AlphaCurve {
    std::vector<Vec> points;
    double wick_length = 0.0;
};
AlphaCurve appendixD_alpha();

/// Flat-plus-bump member composed with the k-th boost iterate. The bump
/// support starts at u = u0 > 0 and the basepoint is the origin.
Scenario boost_bump(int k, double u0 = 1.0, double width = 0.5, double amplitude = 0.5);

// ---------------------------------------------------------------------------
// Scenario config files
// ---------------------------------------------------------------------------

/// Plain-text config: a [scenario] section with keys name, params
/// (comma-separated key=value), box, spacing, stencil.
struct ScenarioConfig {
    std::string name;
    std::map<std::string, double> params;
    std::optional<Box> box;
    std::optional<Vec> spacing;
    std::optional<int> stencil;
};

ScenarioConfig parse_scenario_config(const std::string& text);
ScenarioConfig load_scenario_config(const std::string& path);

} // namespace lgeo
