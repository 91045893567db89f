#include "lgeo/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace lgeo {

// ---------------------------------------------------------------------------
// Smoothed step
// ---------------------------------------------------------------------------

double smooth_step(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / t);
    const double b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

double smooth_step_d1(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double a = std::exp(-1.0 / t);
    const double b = std::exp(-1.0 / (1.0 - t));
    const double sum = a + b;
    const double inv_t2 = 1.0 / (t * t);
    const double inv_1mt2 = 1.0 / ((1.0 - t) * (1.0 - t));
    return a * b * (inv_t2 + inv_1mt2) / (sum * sum);
}

// ---------------------------------------------------------------------------
// Band construction around t = k^2
// ---------------------------------------------------------------------------

PhiEval appendixB_phi(double t, int k_max) {
    for (int k = 1; k <= k_max; ++k) {
        const double k2 = static_cast<double>(k) * k;
        const double half = 1.0 / k2;
        if (t < k2 - half || t > k2 + half) continue;
        const double lk = t / k2 + k2 - 1.0;  // slope-1/k^2 line through (k^2, k^2)
        if (t < k2) {
            const double u = (t - (k2 - half)) * k2;
            const double s = smooth_step(u);
            const double ds = smooth_step_d1(u);
            return {t + (lk - t) * s, 1.0 + (1.0 / k2 - 1.0) * s + (lk - t) * ds * k2};
        }
        const double u = (t - k2) * k2;
        const double s = smooth_step(u);
        const double ds = smooth_step_d1(u);
        return {lk + (t - lk) * s, 1.0 / k2 + (1.0 - 1.0 / k2) * s + (t - lk) * ds * k2};
    }
    return {t, 1.0};
}

// ---------------------------------------------------------------------------
// Thin-band metric factor
// ---------------------------------------------------------------------------

namespace {

// Plateau windows: w_t = 1 on |t| <= 0.06, 0 outside |t| >= 0.1;
// w_x = 1 on [0.21, 1.24], 0 outside [0.2, 1.25]. The x window sits strictly
// inside the printed strip so that f is smooth while f = 1 holds exactly
// outside U, keeping the extreme null curve from the origin on x = t.
constexpr double kInnerF = 1e-3;

double wt(double t) { return smooth_step((t + 0.1) / 0.04) * smooth_step((0.1 - t) / 0.04); }
double wt_d(double t) {
    return smooth_step_d1((t + 0.1) / 0.04) / 0.04 * smooth_step((0.1 - t) / 0.04) -
           smooth_step((t + 0.1) / 0.04) * smooth_step_d1((0.1 - t) / 0.04) / 0.04;
}
double wx(double x) { return smooth_step((x - 0.2) / 0.01) * smooth_step((1.25 - x) / 0.01); }
double wx_d(double x) {
    return smooth_step_d1((x - 0.2) / 0.01) / 0.01 * smooth_step((1.25 - x) / 0.01) -
           smooth_step((x - 0.2) / 0.01) * smooth_step_d1((1.25 - x) / 0.01) / 0.01;
}

} // namespace

double appendixD_f(double t, double x) { return 1.0 - (1.0 - kInnerF) * wt(t) * wx(x); }
double appendixD_f_dt(double t, double x) { return -(1.0 - kInnerF) * wt_d(t) * wx(x); }
double appendixD_f_dx(double t, double x) { return -(1.0 - kInnerF) * wt(t) * wx_d(x); }

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

namespace {

std::function<Vec(const Vec&)> coordinate_time_orientation(int dim) {
    return [dim](const Vec&) {
        Vec t = Vec::Zero(dim);
        t[0] = 1.0;
        return t;
    };
}

Scenario make_minkowski2d() {
    Scenario sc;
    sc.name = "minkowski2d";
    sc.dim = 2;
    sc.periodic = {false, false};
    sc.citation = "flat 2D model plane";
    sc.wick_complete = Scenario::Completeness::Yes;
    sc.g = MetricField(2, 1, [](const Vec&) {
        Mat m(2, 2);
        m << -1, 0, 0, 1;
        return m;
    });
    sc.g.with_analytic_d1([](const Vec&, int) { return Mat::Zero(2, 2); })
        .with_analytic_d2([](const Vec&, int, int) { return Mat::Zero(2, 2); });
    sc.tau = TemporalField(2, [](const Vec& p) { return p[0]; });
    sc.tau.with_analytic_differential([](const Vec&) {
          Vec d(2);
          d << 1, 0;
          return d;
      }).with_analytic_hessian([](const Vec&) { return Mat::Zero(2, 2); });
    sc.time_orientation = coordinate_time_orientation(2);
    Vec lo(2), hi(2);
    lo << 0, 0;
    hi << 1, 1;
    sc.default_box = Box(lo, hi);
    return sc;
}

// warped product -dt^2 + f(t)^2 dx^2 with analytic jets
Scenario make_warped(const std::string& name, std::function<double(double)> f,
                     std::function<double(double)> fp, std::function<double(double)> fpp,
                     double tau_shift, bool periodic_fiber) {
    Scenario sc;
    sc.name = name;
    sc.dim = 2;
    sc.periodic = {false, periodic_fiber};
    sc.wick_complete = Scenario::Completeness::Yes;
    sc.g = MetricField(2, 1, [f](const Vec& p) {
        Mat m = Mat::Zero(2, 2);
        m(0, 0) = -1.0;
        const double w = f(p[0]);
        m(1, 1) = w * w;
        return m;
    });
    sc.g.with_analytic_d1([f, fp](const Vec& p, int a) {
          Mat m = Mat::Zero(2, 2);
          if (a == 0) m(1, 1) = 2.0 * f(p[0]) * fp(p[0]);
          return m;
      })
        .with_analytic_d2([f, fp, fpp](const Vec& p, int a, int b) {
            Mat m = Mat::Zero(2, 2);
            if (a == 0 && b == 0)
                m(1, 1) = 2.0 * (fp(p[0]) * fp(p[0]) + f(p[0]) * fpp(p[0]));
            return m;
        });
    sc.tau = TemporalField(2, [tau_shift](const Vec& p) { return p[0] + tau_shift; });
    sc.tau.with_analytic_differential([](const Vec&) {
          Vec d(2);
          d << 1, 0;
          return d;
      }).with_analytic_hessian([](const Vec&) { return Mat::Zero(2, 2); });
    sc.time_orientation = coordinate_time_orientation(2);
    return sc;
}

Scenario make_grw_cosh() {
    auto sc = make_warped(
        "grw-cosh", [](double t) { return std::cosh(t); }, [](double t) { return std::sinh(t); },
        [](double t) { return std::cosh(t); }, 0.0, false);
    sc.citation = "warped product with cosh scale factor";
    Vec lo(2), hi(2);
    lo << 0, 0;
    hi << 1, 1;
    sc.default_box = Box(lo, hi);
    return sc;
}

Scenario make_de_sitter(double i, int n) {
    if (n != 2) throw ConfigError("de-sitter: only n = 2 (circle fiber) is wired");
    auto sc = make_warped(
        "de-sitter", [i](double t) { return std::cosh(t + i); },
        [i](double t) { return std::sinh(t + i); }, [i](double t) { return std::cosh(t + i); },
        i, true);
    sc.citation = "shifted hyperbolic-cosine warped circle";
    Vec lo(2), hi(2);
    lo << -1, 0;
    hi << 1, 2.0 * M_PI;
    sc.default_box = Box(lo, hi);
    return sc;
}

Scenario make_appendixB(int kmax) {
    Scenario sc = make_minkowski2d();
    sc.name = "appendixB";
    sc.citation = "band-slowed time function on the flat plane";
    sc.tau = TemporalField(2, [kmax](const Vec& p) { return appendixB_phi(p[0], kmax).phi; });
    sc.tau.with_analytic_differential([kmax](const Vec& p) {
        Vec d(2);
        d << appendixB_phi(p[0], kmax).dphi, 0.0;
        return d;
    });
    Vec lo(2), hi(2);
    lo << 0, -1;
    hi << 30, 1;
    sc.default_box = Box(lo, hi);
    sc.h_named["half-phi2-euclidean"] = [kmax]() {
        MetricField h(2, 0, [kmax](const Vec& p) {
            const double dp = appendixB_phi(p[0], kmax).dphi;
            return Mat(0.5 * dp * dp * Mat::Identity(2, 2));
        });
        return h;
    };
    return sc;
}

Scenario make_appendixD() {
    Scenario sc;
    sc.name = "appendixD";
    sc.dim = 2;
    sc.periodic = {false, false};
    sc.citation = "thin anisotropic band inside the flat plane";
    sc.wick_complete = Scenario::Completeness::Yes;
    sc.g = MetricField(2, 1, [](const Vec& p) {
        Mat m = Mat::Zero(2, 2);
        m(0, 0) = -1.0;
        const double f = appendixD_f(p[0], p[1]);
        m(1, 1) = f * f;
        return m;
    });
    sc.g.with_analytic_d1([](const Vec& p, int a) {
        Mat m = Mat::Zero(2, 2);
        const double f = appendixD_f(p[0], p[1]);
        m(1, 1) = 2.0 * f *
                  (a == 0 ? appendixD_f_dt(p[0], p[1]) : appendixD_f_dx(p[0], p[1]));
        return m;
    });
    sc.tau = TemporalField(2, [](const Vec& p) { return p[0]; });
    sc.tau.with_analytic_differential([](const Vec&) {
          Vec d(2);
          d << 1, 0;
          return d;
      }).with_analytic_hessian([](const Vec&) { return Mat::Zero(2, 2); });
    sc.time_orientation = coordinate_time_orientation(2);
    Vec lo(2), hi(2);
    lo << -0.2, -0.3;
    hi << 1.2, 1.5;
    sc.default_box = Box(lo, hi);
    return sc;
}

} // namespace

Scenario boost_bump(int k, double u0, double width, double amplitude) {
    if (u0 <= 0.0) throw ConfigError("boost-bump: bump support must avoid the basepoint");
    if (!(amplitude > -1.0 && amplitude < 1.0))
        throw ConfigError("boost-bump: |amplitude| must stay below 1 to keep the metric Lorentzian");

    // smooth bump supported on [u0, u0+width] x [1 - width/2, 1 + width/2]
    const double uc = u0 + 0.5 * width;
    const double vc = 1.0;
    const double r = 0.5 * width;
    auto bump1d = [r](double z) {
        const double q = z / r;
        if (std::abs(q) >= 1.0) return 0.0;
        return std::exp(1.0 - 1.0 / (1.0 - q * q));
    };
    auto bump1d_d = [r, bump1d](double z) {
        const double q = z / r;
        if (std::abs(q) >= 1.0) return 0.0;
        const double den = 1.0 - q * q;
        return bump1d(z) * (-2.0 * q / (den * den)) / r;
    };
    auto b = [=](double u, double v) { return amplitude * bump1d(u - uc) * bump1d(v - vc); };
    auto b_du = [=](double u, double v) { return amplitude * bump1d_d(u - uc) * bump1d(v - vc); };
    auto b_dv = [=](double u, double v) { return amplitude * bump1d(u - uc) * bump1d_d(v - vc); };

    // member k = pullback of the bump metric by the k-th inverse boost iterate,
    // so the perturbation support slides to u in 2^k [u0, u0+width]
    const double su = std::pow(2.0, -static_cast<double>(k));
    const double sv = std::pow(2.0, static_cast<double>(k));

    Scenario sc;
    sc.name = "boost-bump";
    sc.dim = 2;
    sc.periodic = {false, false};
    sc.citation = "flat null-coordinate plane with a travelling bump";
    sc.wick_complete = Scenario::Completeness::Yes;
    sc.g = MetricField(2, 1, [=](const Vec& p) {
        const double u = su * p[0], v = sv * p[1];
        const double bb = b(u, v);
        Mat m(2, 2);
        m(0, 0) = bb * su * su;
        m(0, 1) = -1.0;
        m(1, 0) = -1.0;
        m(1, 1) = bb * sv * sv;
        return m;
    });
    sc.g.with_analytic_d1([=](const Vec& p, int a) {
        const double u = su * p[0], v = sv * p[1];
        const double db = (a == 0) ? b_du(u, v) * su : b_dv(u, v) * sv;
        Mat m = Mat::Zero(2, 2);
        m(0, 0) = db * su * su;
        m(1, 1) = db * sv * sv;
        return m;
    });
    // tau = (u + v) / sqrt(2): the flat-plane time coordinate
    sc.tau = TemporalField(2, [](const Vec& p) { return (p[0] + p[1]) / std::sqrt(2.0); });
    sc.tau.with_analytic_differential([](const Vec&) {
          Vec d(2);
          d << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
          return d;
      }).with_analytic_hessian([](const Vec&) { return Mat::Zero(2, 2); });
    sc.time_orientation = [](const Vec&) {
        Vec t(2);
        t << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
        return t;
    };
    Vec lo(2), hi(2);
    lo << -4, -4;
    hi << 4, 4;
    sc.default_box = Box(lo, hi);
    return sc;
}

AlphaCurve appendixD_alpha() {
    const Scenario sc = build_scenario("appendixD");
    const MetricField w = wick_field(sc.g, sc.tau);

    AlphaCurve curve;
    auto pt = [](double t, double x) {
        Vec p(2);
        p << t, x;
        return p;
    };
    const double t3 = 0.495 / std::sqrt(1000.0);
    curve.points = {pt(0, 0),        pt(0.1, 0.1), pt(0, 0.2), pt(0.005, 0.205),
                    pt(0, 0.21),     pt(t3, 0.705), pt(0, 1.2), pt(1, 1.2)};

    // composite Simpson per segment, fine enough that quadrature error is
    // far below the quoted tolerances
    double total = 0.0;
    for (size_t i = 0; i + 1 < curve.points.size(); ++i) {
        const Vec a = curve.points[i];
        const Vec d = curve.points[i + 1] - a;
        const int n = 4096;
        double acc = 0.0;
        for (int j = 0; j <= n; ++j) {
            const double s = static_cast<double>(j) / n;
            const double val = std::sqrt(std::max(0.0, inner(w(a + s * d), d, d)));
            const double coef = (j == 0 || j == n) ? 1.0 : (j % 2 ? 4.0 : 2.0);
            acc += coef * val;
        }
        total += acc / (3.0 * n);
    }
    curve.wick_length = total;
    return curve;
}

MetricField Scenario::h_candidate(const std::string& spec) const {
    if (spec == "half-euclidean") {
        const int n = dim;
        return MetricField(n, 0, [n](const Vec&) { return Mat(0.5 * Mat::Identity(n, n)); });
    }
    if (spec == "half-wick") {
        MetricField w = wick_field(g, tau);
        MetricField h(dim, 0, [w](const Vec& p) { return Mat(0.5 * w(p)); });
        return h;
    }
    auto it = h_named.find(spec);
    if (it == h_named.end()) throw ConfigError("unknown h specification: " + spec);
    return it->second();
}

void Scenario::validate(int per_axis) const {
    for (const Vec& p : grid_points(default_box, per_axis)) {
        g.validate_signature(p);
        gradient_tau(g, tau, p);  // throws unless temporal at p
    }
}

Scenario build_scenario(const std::string& name, const std::map<std::string, double>& params) {
    auto get = [&params](const std::string& key, double fallback) {
        auto it = params.find(key);
        return it == params.end() ? fallback : it->second;
    };
    if (name == "minkowski2d") return make_minkowski2d();
    if (name == "grw-cosh") return make_grw_cosh();
    if (name == "de-sitter")
        return make_de_sitter(get("i", 1.0), static_cast<int>(get("n", 2.0)));
    if (name == "appendixB") return make_appendixB(static_cast<int>(get("kmax", 8.0)));
    if (name == "appendixD") return make_appendixD();
    if (name == "boost-bump")
        return boost_bump(static_cast<int>(get("k", 0.0)), get("u0", 1.0), get("width", 0.5),
                          get("amplitude", 0.5));
    throw ConfigError("unknown scenario: " + name);
}

// ---------------------------------------------------------------------------
// Config parsing
// ---------------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<double> parse_numbers(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        size_t pos = 0;
        const double v = std::stod(item, &pos);
        if (pos != item.size()) throw ConfigError("bad number in config: " + item);
        out.push_back(v);
    }
    return out;
}

} // namespace

ScenarioConfig parse_scenario_config(const std::string& text) {
    ScenarioConfig cfg;
    std::stringstream ss(text);
    std::string line;
    bool in_section = false;
    while (std::getline(ss, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[') {
            in_section = (line == "[scenario]");
            continue;
        }
        if (!in_section) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("config line missing '=': " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "name") {
            cfg.name = value;
        } else if (key == "params") {
            std::stringstream ps(value);
            std::string kv;
            while (std::getline(ps, kv, ',')) {
                kv = trim(kv);
                if (kv.empty()) continue;
                const auto peq = kv.find('=');
                if (peq == std::string::npos)
                    throw ConfigError("bad params entry: " + kv);
                cfg.params[trim(kv.substr(0, peq))] = std::stod(trim(kv.substr(peq + 1)));
            }
        } else if (key == "box") {
            const auto nums = parse_numbers(value);
            if (nums.size() % 2 != 0 || nums.empty())
                throw ConfigError("box needs an even number of values (lo..., hi...)");
            const int n = static_cast<int>(nums.size()) / 2;
            Vec lo(n), hi(n);
            for (int i = 0; i < n; ++i) {
                lo[i] = nums[i];
                hi[i] = nums[n + i];
            }
            cfg.box = Box(lo, hi);
        } else if (key == "spacing") {
            const auto nums = parse_numbers(value);
            Vec sp(nums.size());
            for (size_t i = 0; i < nums.size(); ++i) sp[i] = nums[i];
            cfg.spacing = sp;
        } else if (key == "stencil") {
            cfg.stencil = std::stoi(value);
        } else {
            throw ConfigError("unknown config key: " + key);
        }
    }
    if (cfg.name.empty()) throw ConfigError("config missing scenario name");
    return cfg;
}

ScenarioConfig load_scenario_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario_config(buf.str());
}

} // namespace lgeo
