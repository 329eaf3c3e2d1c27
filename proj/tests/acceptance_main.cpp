// Runs the acceptance checks, one line per criterion; exit 0 iff all pass.
#include <cstdio>

#include "paircorr/acceptance.hpp"

int main() {
    paircorr::acceptance::Suite suite;
    int failed = 0;
    suite.run_all([&](const paircorr::acceptance::CriterionResult& r) {
        std::printf("%s\n", paircorr::acceptance::format_line(r).c_str());
        std::fflush(stdout);
        failed += !r.pass;
    });
    std::printf("%d/%d criteria passed\n", paircorr::acceptance::Suite::count - failed,
                paircorr::acceptance::Suite::count);
    return failed == 0 ? 0 : 1;
}
