#pragma once

// Command-line front end: run configuration, dataset emitters and the
// `mzi` entry point.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mzi/interferometer.hpp"
#include "mzi/metrics.hpp"

namespace mzi::cli {

/// Exit codes of `mzi`.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitInvalidConfig = 2;

struct RunConfig {
    std::optional<double> nbar;
    std::optional<double> alpha0;
    double a = 0.5;
    double b = 3.8;
    std::optional<int> kf;
    std::string eigenvalues = "ones";  // ones | alternating | regression | comma list
    double mu_minus = 0.0;
    double phi_min = -3.14159265358979323846;
    double phi_max = 3.14159265358979323846;
    int steps = 2001;
    std::int64_t shots = 200;
    int replicas = 10;
    std::uint64_t seed = 2019;
    std::string out;
    std::vector<double> nbar_axis;
    std::vector<double> a_axis;
};

/// RunConfig after validation, with derived objects built.
struct Resolved {
    InterferometerConfig cfg;
    BinningScheme scheme;
    Observable obs;
    std::vector<double> phi_grid;
};

/// Throws InvalidConfig or InvalidScheme naming the violated constraint.
Resolved resolve(const RunConfig& rc);

/// Parses "1.5, -2, 3e-1" into numbers; throws InvalidConfig on junk.
std::vector<double> parse_number_list(const std::string& text);

std::vector<double> linspace(double lo, double hi, int count);

void write_probs(const Resolved& r, std::ostream& out);
void write_signal(const Resolved& r, std::ostream& out);
void write_sweep(const std::vector<double>& nbar_axis, const std::vector<double>& a_axis,
                 std::ostream& out);
void write_calibration(const Resolved& r, std::int64_t shots, int replicas, std::uint64_t seed,
                       std::ostream& out);
void write_estimation(const Resolved& r, std::int64_t shots, int replicas, std::uint64_t seed,
                      std::ostream& out);

/// Writes <prefix>_calibration.csv and <prefix>_estimation.csv.
void run_simulate(const RunConfig& rc, const std::string& prefix);

/// Writes the datasets of one figure into `dir`, runs its checks and prints a
/// summary. Returns true when every check passes.
bool reproduce(const std::string& figure, const std::filesystem::path& dir, std::ostream& log);

/// Full command line; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mzi::cli
