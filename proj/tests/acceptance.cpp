#include <cstdio>

#include "nsfix/oracles.hpp"

int main()
{
    int failed = 0;
    for (const auto& r : nsfix::run_acceptance()) {
        std::printf("%s\n", nsfix::format_result(r).c_str());
        std::fflush(stdout);
        failed += r.pass ? 0 : 1;
    }
    std::printf("%d of 9 criteria passed\n", 9 - failed);
    return failed == 0 ? 0 : 1;
}
