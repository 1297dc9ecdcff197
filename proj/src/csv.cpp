#include "mzi/csv.hpp"

#include <cmath>
#include <cstdio>

namespace mzi::csv {

std::string format_number(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void Writer::header(const std::vector<std::string>& names) { row(names); }

void Writer::row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) {
            out_ << ',';
        }
        out_ << format_number(values[i]);
    }
    out_ << '\n';
}

void Writer::row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) {
            out_ << ',';
        }
        out_ << cells[i];
    }
    out_ << '\n';
}

}  // namespace mzi::csv
