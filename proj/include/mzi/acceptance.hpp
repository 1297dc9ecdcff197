#pragma once

// Numbered acceptance checks shared by `mzi reproduce` and the acceptance
// suite binary.

#include <string>
#include <vector>

namespace mzi::acceptance {

struct CheckResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
};

inline constexpr int kCheckCount = 15;

CheckResult run_check(int id);

std::vector<CheckResult> run_all();

/// Check ids attached to a figure (fig1..fig4); empty for unknown ids.
std::vector<int> checks_for_figure(const std::string& figure);

std::string format_line(const CheckResult& result);

}  // namespace mzi::acceptance
