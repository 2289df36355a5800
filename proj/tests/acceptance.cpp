// Acceptance battery: one PASS/FAIL line per criterion.
#include <cstdio>
#include <cstring>

#include "cusp/verify.hpp"

int main(int argc, char** argv) {
    cusp::VerifyConfig cfg;
    std::vector<std::string> names;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--corrupt-sign") == 0)
            cfg.corrupt_sign = true;  // negative control
        else
            names.emplace_back(argv[i]);
    }
    int failed = 0;
    for (const auto& name : names.empty() ? cusp::battery_names() : names) {
        const auto r = cusp::run_check(name, cfg);
        std::printf("CRITERION %d %-18s %s  %s  (%.1f s)\n", r.criterion, r.name.c_str(), r.pass ? "PASS" : "FAIL",
                    r.detail.c_str(), r.seconds);
        std::fflush(stdout);
        failed += r.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
