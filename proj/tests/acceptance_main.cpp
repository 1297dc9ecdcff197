// Runs every numbered acceptance check, one line per check.

#include <iostream>

#include "mzi/acceptance.hpp"

int main() {
    int failed = 0;
    for (int id = 1; id <= mzi::acceptance::kCheckCount; ++id) {
        const auto result = mzi::acceptance::run_check(id);
        std::cout << mzi::acceptance::format_line(result) << std::endl;
        failed += result.passed ? 0 : 1;
    }
    std::cout << (mzi::acceptance::kCheckCount - failed) << " of " << mzi::acceptance::kCheckCount
              << " checks passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
