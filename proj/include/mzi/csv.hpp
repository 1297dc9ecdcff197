#pragma once

// Minimal CSV emission: comma separated, LF line endings, header row,
// doubles printed with 17 significant digits.

#include <ostream>
#include <string>
#include <vector>

namespace mzi::csv {

/// "%.17g", with "inf", "-inf" and "nan" for non-finite values.
std::string format_number(double value);

class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}

    void header(const std::vector<std::string>& names);
    void row(const std::vector<double>& values);
    void row(const std::vector<std::string>& cells);

private:
    std::ostream& out_;
};

}  // namespace mzi::csv
