// End-to-end checks of the command-line surface: exit codes, column layout
// and byte-stable outputs. The binary path arrives as argv[1].

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

int failures = 0;

void expect(bool ok, const std::string& what) {
    if (!ok) {
        ++failures;
        std::cerr << "[FAIL] " << what << "\n";
    } else {
        std::cerr << "[ ok ] " << what << "\n";
    }
}

int run(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: test_cli <wickbench binary>\n";
        return 2;
    }
    const std::string bin = argv[1];
    const std::string tmp = "/tmp/wickbench_cli_test";
    (void)run("mkdir -p " + tmp);

    // distance: exact header, quoted points, deterministic bytes
    const std::string dist_cmd = bin +
                                 " distance --scenario minkowski2d --from 0,0 --to 0,1"
                                 " --kind null,wick,nullwick --spacing 0.1 --stencil 2"
                                 " --box 0,0,1,1 --seed 7 --out ";
    expect(run(dist_cmd + tmp + "/a.csv") == 0, "distance exits 0");
    expect(run(dist_cmd + tmp + "/b.csv") == 0, "distance exits 0 (re-run)");
    const std::string a = slurp(tmp + "/a.csv");
    expect(a == slurp(tmp + "/b.csv"), "identical config and seed give identical bytes");
    expect(a.rfind("scenario,kind,p,q,spacing,stencil,value,tau_p,tau_q,path_len_nodes\n", 0) ==
               0,
           "csv header names the interface columns");
    expect(a.find("\"0,0\"") != std::string::npos, "points are csv-quoted");
    expect(a.find("nullwick") != std::string::npos, "all requested kinds appear");

    // json mirror carries the same fields
    expect(run(bin + " distance --scenario minkowski2d --from 0,0 --to 1,0 --kind null"
                     " --spacing 0.25 --box 0,0,1,1 --format json --out " +
               tmp + "/a.json") == 0,
           "json output exits 0");
    const std::string js = slurp(tmp + "/a.json");
    expect(js.find("\"path_len_nodes\"") != std::string::npos, "json mirrors csv fields");

    // scenario config file parsed identically by the CLI
    {
        std::ofstream cfg(tmp + "/scenario.cfg");
        cfg << "[scenario]\nname = appendixD\nbox = -0.2,-0.3,1.2,1.5\nspacing = "
               "0.02\nstencil = 3\n";
    }
    expect(run(bin + " distance --config " + tmp + "/scenario.cfg --from 0,0 --to 1,1.2"
                     " --kind wick --simpson --out " +
               tmp + "/d.csv") == 0,
           "config-file driven distance exits 0");
    expect(slurp(tmp + "/d.csv").find("appendixD,wick") != std::string::npos,
           "config scenario name lands in the record");

    // exit codes: config errors vs numeric failures
    expect(run(bin + " distance --scenario nosuch --from 0,0 --to 1,1 >/dev/null 2>&1") == 2,
           "unknown scenario exits 2");
    expect(run(bin + " distance --scenario minkowski2d --from 0,0 --to 9,9 --box 0,0,1,1"
                     " >/dev/null 2>&1") == 2,
           "target outside the box exits 2");
    expect(run(bin + " verify nosuch >/dev/null 2>&1") == 2, "unknown suite exits 2");
    expect(run(bin + " distance --scenario minkowski2d --from 0,0 --to 1,1 --kind bogus"
                     " >/dev/null 2>&1") == 2,
           "unknown kind exits 2");

    // environment caps: a starved node budget turns into a numeric failure
    expect(run("WICKBENCH_MAX_LATTICE_NODES=10 " + bin +
               " distance --scenario minkowski2d --from 0,0 --to 1,1 --spacing 0.05"
               " --box 0,0,1,1 >/dev/null 2>&1") == 3,
           "node budget override exits 3");

    // verify: a fast suite passes and reports sub-checks
    expect(run(bin + " verify appendixB --out " + tmp + "/vb.json 2>/dev/null") == 0,
           "verify appendixB exits 0");
    const std::string vb = slurp(tmp + "/vb.json");
    expect(vb.find("\"pass\": true") != std::string::npos, "suite summary reports pass");
    expect(vb.find("\"measured\"") != std::string::npos, "sub-checks carry measured values");
    expect(vb.find("\"tolerance\"") != std::string::npos, "sub-checks carry tolerances");

    // converge: family reports in both formats
    expect(run(bin + " converge --family de-sitter --count 3 --k 1 --out " + tmp +
               "/conv.csv") == 0,
           "converge de-sitter exits 0");
    const std::string conv = slurp(tmp + "/conv.csv");
    expect(conv.rfind("index,box_id,k,norm,lambda,anchor_residual,verdict\n", 0) == 0,
           "convergence csv header");
    expect(run(bin + " converge --family de-sitter --count 4 --k 0 --no-diffeo --format json"
                     " --out " +
               tmp + "/conv.json") == 0,
           "converge --no-diffeo exits 0");
    expect(slurp(tmp + "/conv.json").find("diverges") != std::string::npos,
           "raw shifted members diverge");
    expect(run(bin + " converge --family boost-bump --count 4 --k 0 --out " + tmp +
               "/boost.csv") == 0,
           "converge boost-bump exits 0");
    const std::string boost = slurp(tmp + "/boost.csv");
    expect(boost.find("converges") != std::string::npos, "boost family converges to flat");
    expect(run(bin + " converge --family boost-anchored --count 5 --k 0 --format json --out " +
               tmp + "/banch.json") == 0,
           "converge boost-anchored exits 0");
    expect(slurp(tmp + "/banch.json").find("anchor_residual") != std::string::npos,
           "anchored report carries residuals");
    expect(run(bin + " converge --family de-sitter --count 3 --k 1 --pipeline --out " + tmp +
               "/pipe.json") == 0,
           "pipeline report exits 0");
    expect(slurp(tmp + "/pipe.json").find("\"passed\": true") != std::string::npos,
           "pipeline passes for the shifted warped family");

    std::cerr << (failures == 0 ? "CLI checks passed\n" : "CLI checks FAILED\n");
    return failures == 0 ? 0 : 1;
}
