// Acceptance gate: runs every verification suite at its stated tolerance
// and prints one PASS/FAIL line per check, grouped by criterion.

#include <chrono>
#include <cstdio>

#include "mmot/validate.hpp"

int main() {
    using namespace mmot::validate;
    int failures = 0;
    int criterion = 0;
    auto total_start = std::chrono::steady_clock::now();
    for (const auto& suite : suites()) {
        ++criterion;
        std::printf("criterion %d (%s): %s\n", criterion, suite.name.c_str(), suite.description.c_str());
        auto t0 = std::chrono::steady_clock::now();
        std::vector<CheckResult> results;
        try {
            results = suite.run();
        } catch (const std::exception& e) {
            results.push_back({std::string("suite threw: ") + e.what(), false, ""});
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        for (const auto& r : results) {
            std::printf("  %s  %s%s%s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                        r.detail.empty() ? "" : " -- ", r.detail.c_str());
            if (!r.pass) ++failures;
        }
        std::printf("  (%.1f s)\n", secs);
        std::fflush(stdout);
    }
    double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - total_start).count();
    std::printf("%s: %d failing check(s), %.1f s total\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures, total);
    return failures == 0 ? 0 : 1;
}
