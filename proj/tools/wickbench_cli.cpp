// Command-line front end: distances on scenario lattices, named verification
// suites, and convergence reports with machine-readable output.

#include "lgeo/convergence.hpp"
#include "lgeo/io.hpp"
#include "lgeo/lattice.hpp"
#include "lgeo/scenario.hpp"
#include "lgeo/verify.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using lgeo::Box;
using lgeo::Mat;
using lgeo::Vec;
using ordered_json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitSuiteFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

Vec parse_point(const std::string& text) {
    std::vector<double> vals;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) vals.push_back(std::stod(item));
    Vec p(vals.size());
    for (size_t i = 0; i < vals.size(); ++i) p[i] = vals[i];
    return p;
}

void write_output(const std::string& content, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw lgeo::ConfigError("cannot open output file: " + out_path);
    out << content;
}

struct DistanceArgs {
    std::string scenario = "minkowski2d";
    std::string config_path;
    std::string params_text;
    std::string from_text, to_text;
    std::vector<std::string> kinds{"null"};
    double spacing = 0.0;
    int stencil = 0;
    std::string box_text;
    bool simpson = false;
    bool strict = false;
    std::string format = "csv";
    std::string out_path;
    unsigned seed = 1;
};

int cmd_distance(const DistanceArgs& args) {
    std::srand(args.seed);
    std::map<std::string, double> params;
    lgeo::ScenarioConfig cfg;
    if (!args.config_path.empty()) {
        cfg = lgeo::load_scenario_config(args.config_path);
        params = cfg.params;
    }
    std::string name = cfg.name.empty() ? args.scenario : cfg.name;
    if (!args.params_text.empty()) {
        std::stringstream ps(args.params_text);
        std::string kv;
        while (std::getline(ps, kv, ',')) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw lgeo::ConfigError("bad --params entry: " + kv);
            params[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
        }
    }
    const lgeo::Scenario sc = lgeo::build_scenario(name, params);

    lgeo::LatticeParams lp;
    lp.box = cfg.box ? *cfg.box : sc.default_box;
    if (!args.box_text.empty()) {
        const Vec b = parse_point(args.box_text);
        if (b.size() != 2 * sc.dim) throw lgeo::ConfigError("--box needs lo...,hi... values");
        lp.box = Box(b.head(sc.dim), b.tail(sc.dim));
    }
    double spacing = args.spacing > 0 ? args.spacing
                     : cfg.spacing    ? (*cfg.spacing)[0]
                                      : 0.02;
    lp.spacing = Vec::Constant(sc.dim, spacing);
    lp.stencil_radius = args.stencil > 0 ? args.stencil : cfg.stencil.value_or(3);
    lp.periodic = sc.periodic;
    lp.simpson = args.simpson;
    lp.strict_edges = args.strict;

    const lgeo::Lattice lat = lgeo::Lattice::build(sc.g, sc.tau, lp);
    const Vec p = parse_point(args.from_text);
    const Vec q = parse_point(args.to_text);
    const int a = lat.node_near(p);
    const int b = lat.node_near(q);

    std::vector<lgeo::DistanceRecord> records;
    for (const std::string& kind : args.kinds) {
        lgeo::DistanceResult res;
        if (kind == "null") res = lat.null_distance(a, b);
        else if (kind == "wick") res = lat.wick_distance(a, b);
        else if (kind == "nullwick") res = lat.null_wick_distance(a, b);
        else throw lgeo::ConfigError("unknown --kind: " + kind);
        records.push_back(lgeo::make_record(name, lat.coords(a), lat.coords(b), res));
    }
    write_output(args.format == "json" ? lgeo::distance_json(records)
                                       : lgeo::distance_csv(records),
                 args.out_path);
    return kExitOk;
}

int cmd_verify(const std::string& suite, unsigned seed, const std::string& out_path) {
    const auto& suites = lgeo::verify_suites();
    const auto it = suites.find(suite);
    if (it == suites.end()) {
        std::string known;
        for (const auto& [k, v] : suites) known += k + " ";
        throw lgeo::ConfigError("unknown suite '" + suite + "'; known: " + known);
    }
    std::srand(seed);
    ordered_json out;
    out["suite"] = suite;
    ordered_json criteria = ordered_json::array();
    bool all_pass = true;
    for (const int id : it->second) {
        const lgeo::CriterionResult res = lgeo::run_criterion(id, seed);
        all_pass = all_pass && res.pass;
        ordered_json jc;
        jc["id"] = res.id;
        jc["name"] = res.name;
        jc["pass"] = res.pass;
        jc["seconds"] = res.seconds;
        ordered_json checks = ordered_json::array();
        for (const auto& c : res.checks) {
            ordered_json jk;
            jk["name"] = c.name;
            jk["measured"] = c.measured;
            jk["cmp"] = c.cmp;
            jk["tolerance"] = c.bound;
            jk["pass"] = c.pass;
            checks.push_back(jk);
        }
        jc["checks"] = checks;
        criteria.push_back(jc);
        std::cerr << (res.pass ? "[PASS] " : "[FAIL] ") << res.name << " ("
                  << lgeo::format_double(res.seconds) << " s)\n";
    }
    out["pass"] = all_pass;
    out["criteria"] = criteria;
    write_output(out.dump(2) + "\n", out_path);
    return all_pass ? kExitOk : kExitSuiteFailure;
}

struct ConvergeArgs {
    std::string family = "de-sitter";
    int count = 6;
    int k = 2;
    bool no_diffeo = false;
    bool pipeline = false;
    bool anchored = false;
    std::string format = "csv";
    std::string out_path;
    unsigned seed = 1;
};

int cmd_converge(const ConvergeArgs& args) {
    std::srand(args.seed);
    auto pt2 = [](double a, double b) {
        Vec p(2);
        p << a, b;
        return p;
    };
    lgeo::MetricField euclid(2, 0, [](const Vec&) { return Mat(Mat::Identity(2, 2)); });
    euclid.with_analytic_d1([](const Vec&, int) { return Mat(Mat::Zero(2, 2)); })
        .with_analytic_d2([](const Vec&, int, int) { return Mat(Mat::Zero(2, 2)); });
    const std::vector<double> eps = {1e-2, 1e-6, 1e-10};

    if (args.family == "de-sitter") {
        lgeo::MetricSequence seq;
        seq.dim = 2;
        lgeo::Frame limit_anchor;
        for (int i = 1; i <= args.count; ++i) {
            const lgeo::Scenario mem =
                lgeo::build_scenario("de-sitter", {{"i", static_cast<double>(i)}});
            lgeo::Diffeo phi = args.no_diffeo
                                   ? lgeo::Diffeo::identity(2)
                                   : lgeo::Diffeo::affine(Mat::Identity(2, 2),
                                                          pt2(-static_cast<double>(i), 0));
            lgeo::SequenceMember m{mem.g, mem.tau, phi,
                                   args.no_diffeo ? pt2(0, 0) : pt2(-static_cast<double>(i), 0),
                                   {}};
            if (args.anchored) {
                lgeo::Frame f;
                f.base = m.basepoint;
                f.basis = Mat::Identity(2, 2);
                f.neg_count = 1;
                m.anchor = f;
            }
            seq.members.push_back(std::move(m));
        }
        const lgeo::Scenario base = lgeo::build_scenario("de-sitter", {{"i", 0.0}});
        const Box box = Box(pt2(-1, 0), pt2(1, 2.0 * M_PI));

        if (args.pipeline) {
            const lgeo::MetricField h = lgeo::wick_field(base.g, base.tau);
            const auto rep = lgeo::wick_pipeline(seq, h, base.tau, box, std::min(args.k, 1));
            ordered_json rows = ordered_json::array();
            for (const auto& row : rep.rows)
                rows.push_back({{"index", row.index},
                                {"wick_norm", row.wick_norm},
                                {"tau_norm", row.tau_norm},
                                {"rec_norm", row.rec_norm},
                                {"identity_residual", row.identity_residual}});
            ordered_json out{{"family", args.family},
                             {"dtau_unit_residual", rep.dtau_unit_residual},
                             {"hsteep_margin_min", rep.hsteep_margin_min},
                             {"passed", rep.passed},
                             {"rows", rows}};
            write_output(out.dump(2) + "\n", args.out_path);
            return rep.passed ? kExitOk : kExitSuiteFailure;
        }

        auto report = lgeo::check_convergence(seq, base.g, pt2(0, 0), {box}, args.k, eps, euclid);
        if (args.anchored) {
            lgeo::Frame limit;
            limit.base = pt2(0, 0);
            limit.basis = Mat::Identity(2, 2);
            limit.neg_count = 1;
            const auto anch = lgeo::anchored_convergence(seq, limit);
            for (auto& row : report.rows)
                for (const auto& ar : anch)
                    if (ar.index == row.index) row.anchor_residual = ar.align_residual;
        }
        write_output(args.format == "json" ? lgeo::convergence_json(report)
                                           : lgeo::convergence_csv(report),
                     args.out_path);
        return kExitOk;
    }

    if (args.family == "boost-bump") {
        lgeo::MetricSequence seq;
        seq.dim = 2;
        for (int k = 0; k < args.count; ++k) {
            const lgeo::Scenario mem =
                lgeo::build_scenario("boost-bump", {{"k", static_cast<double>(k)}});
            seq.members.push_back({mem.g, mem.tau, lgeo::Diffeo::identity(2), pt2(0, 0), {}});
        }
        lgeo::MetricField flat(2, 1, [](const Vec&) {
            Mat m(2, 2);
            m << 0, -1, -1, 0;
            return m;
        });
        flat.with_analytic_d1([](const Vec&, int) { return Mat(Mat::Zero(2, 2)); })
            .with_analytic_d2([](const Vec&, int, int) { return Mat(Mat::Zero(2, 2)); });
        const Box box = Box(pt2(-4, -4), pt2(4, 4));
        auto report =
            lgeo::check_convergence(seq, flat, pt2(0, 0), {box}, std::min(args.k, 1), eps, euclid);
        // side by side: each member stays quasi-isometric to the bump metric on
        // the travelled support box
        const lgeo::TemporalField flat_tau = seq.members.front().tau.value();
        const lgeo::MetricField flat_wick = lgeo::wick_field(flat, flat_tau);
        for (auto& row : report.rows) {
            const int k = row.index - 1;
            const double sk = std::pow(2.0, k);
            const Box bump_box = Box(pt2(sk * 1.0, 0.75 / sk), pt2(sk * 1.5, 1.25 / sk));
            const lgeo::MetricField mem_wick =
                lgeo::wick_field(seq.members[k].g, *seq.members[k].tau);
            row.lambda = lgeo::quasi_isometry_factor(flat_wick, mem_wick, bump_box, 15);
        }
        write_output(args.format == "json" ? lgeo::convergence_json(report)
                                           : lgeo::convergence_csv(report),
                     args.out_path);
        return kExitOk;
    }

    if (args.family == "boost-anchored") {
        // flat members pulled back by boost iterates: metrics converge but the
        // anchors diverge
        lgeo::MetricSequence seq;
        seq.dim = 2;
        lgeo::MetricField flat(2, 1, [](const Vec&) {
            Mat m(2, 2);
            m << 0, -1, -1, 0;
            return m;
        });
        flat.with_analytic_d1([](const Vec&, int) { return Mat(Mat::Zero(2, 2)); })
            .with_analytic_d2([](const Vec&, int, int) { return Mat(Mat::Zero(2, 2)); });
        const double s = 1.0 / std::sqrt(2.0);
        Mat adapted(2, 2);
        adapted << s, -s, s, s;  // columns: the t- and x-axis directions in (u,v)
        for (int k = 0; k < args.count; ++k) {
            Mat Bk = Mat::Identity(2, 2);
            Bk(0, 0) = std::pow(2.0, k);
            Bk(1, 1) = std::pow(2.0, -k);
            lgeo::SequenceMember m{flat, {}, lgeo::Diffeo::affine(Bk, Vec::Zero(2)), pt2(0, 0),
                                   {}};
            lgeo::Frame f;
            f.base = pt2(0, 0);
            f.basis = adapted;
            f.neg_count = 1;
            m.anchor = f;
            seq.members.push_back(std::move(m));
        }
        auto report = lgeo::check_convergence(seq, flat, pt2(0, 0),
                                              {Box(pt2(-4, -4), pt2(4, 4))}, 0, eps, euclid);
        lgeo::Frame limit;
        limit.base = pt2(0, 0);
        limit.basis = adapted;
        limit.neg_count = 1;
        const auto anch = lgeo::anchored_convergence(seq, limit);
        for (auto& row : report.rows)
            for (const auto& ar : anch)
                if (ar.index == row.index) row.anchor_residual = ar.align_residual;
        write_output(args.format == "json" ? lgeo::convergence_json(report)
                                           : lgeo::convergence_csv(report),
                     args.out_path);
        return kExitOk;
    }

    throw lgeo::ConfigError("unknown --family: " + args.family);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical workbench for null distances, Wick rotations and "
                 "convergence of Lorentzian metrics"};
    app.require_subcommand(1);

    DistanceArgs dargs;
    auto* dist = app.add_subcommand("distance", "lattice distances between chart points");
    dist->add_option("--scenario", dargs.scenario, "scenario name");
    dist->add_option("--config", dargs.config_path, "scenario config file");
    dist->add_option("--params", dargs.params_text, "scenario params, key=value[,key=value]");
    dist->add_option("--from", dargs.from_text, "source point t,x")->required();
    dist->add_option("--to", dargs.to_text, "target point t,x")->required();
    dist->add_option("--kind", dargs.kinds, "null | wick | nullwick")->delimiter(',');
    dist->add_option("--spacing", dargs.spacing, "lattice spacing");
    dist->add_option("--stencil", dargs.stencil, "stencil radius");
    dist->add_option("--box", dargs.box_text, "lattice box lo...,hi...");
    dist->add_flag("--simpson", dargs.simpson, "3-point Simpson edge weights");
    dist->add_flag("--strict", dargs.strict, "strict edge classification");
    dist->add_option("--format", dargs.format, "csv | json");
    dist->add_option("--out", dargs.out_path, "output path (stdout when omitted)");
    dist->add_option("--seed", dargs.seed, "seed for sampled checks");

    std::string suite;
    unsigned vseed = 20250810;
    std::string vout;
    auto* verify = app.add_subcommand("verify", "run a named verification suite");
    verify->add_option("suite", suite, "suite name")->required();
    verify->add_option("--seed", vseed, "seed for sampled checks");
    verify->add_option("--out", vout, "output path for the JSON summary");

    ConvergeArgs cargs;
    auto* conv = app.add_subcommand("converge", "convergence reports for metric families");
    conv->add_option("--family", cargs.family, "de-sitter | boost-bump | boost-anchored");
    conv->add_option("--count", cargs.count, "number of members");
    conv->add_option("--k", cargs.k, "derivative order for the norms");
    conv->add_flag("--no-diffeo", cargs.no_diffeo, "compare members without the diffeomorphisms");
    conv->add_flag("--pipeline", cargs.pipeline, "run the Wick reconstruction pipeline");
    conv->add_flag("--anchored", cargs.anchored, "include anchor-alignment residuals");
    conv->add_option("--format", cargs.format, "csv | json");
    conv->add_option("--out", cargs.out_path, "output path (stdout when omitted)");
    conv->add_option("--seed", cargs.seed, "seed for sampled checks");

    try {
        app.parse(argc, argv);
        if (dist->parsed()) return cmd_distance(dargs);
        if (verify->parsed()) return cmd_verify(suite, vseed, vout);
        if (conv->parsed()) return cmd_converge(cargs);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    } catch (const lgeo::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const lgeo::DomainError& e) {
        // bad user coordinates are a configuration problem, not a numeric one
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const lgeo::Error& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitOk;
}
