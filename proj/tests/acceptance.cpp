// Acceptance suite: every criterion at its pinned tolerance, one line each.

#include "lgeo/verify.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

int main(int argc, char** argv) {
    unsigned seed = 20250810;
    bool detail = false;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc) seed = std::atoi(argv[++i]);
        if (std::strcmp(argv[i], "--detail") == 0) detail = true;
    }
    std::srand(seed);

    int failures = 0;
    double total = 0.0;
    for (int id = 1; id <= lgeo::criterion_count(); ++id) {
        lgeo::CriterionResult r;
        try {
            r = lgeo::run_criterion(id, seed);
        } catch (const std::exception& e) {
            std::printf("[FAIL] %02d %-28s exception: %s\n", id,
                        lgeo::criterion_name(id).c_str(), e.what());
            ++failures;
            continue;
        }
        total += r.seconds;
        std::printf("%s %02d %-28s (%.2f s)\n", r.pass ? "[PASS]" : "[FAIL]", r.id,
                    r.name.c_str(), r.seconds);
        if (!r.pass || detail)
            for (const auto& c : r.checks)
                std::printf("       %s %-60s measured=%.9g %s %.9g\n", c.pass ? "ok  " : "FAIL",
                            c.name.c_str(), c.measured, c.cmp.c_str(), c.bound);
        if (!r.pass) ++failures;
    }
    std::printf("%d/%d criteria passed (%.1f s)\n", lgeo::criterion_count() - failures,
                lgeo::criterion_count(), total);
    return failures == 0 ? 0 : 1;
}
