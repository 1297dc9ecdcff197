#include "mzi/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mzi/error.hpp"

namespace mzi {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kBranchSlopeTolerance = 1e-10;

double signal_mean(const InterferometerConfig& cfg, const BinningScheme& scheme,
                   const Observable& obs, double phi) {
    return signal(outcome_distribution(cfg, scheme, phi), obs).mean;
}

double signal_slope(const InterferometerConfig& cfg, const BinningScheme& scheme,
                    const Observable& obs, double phi) {
    return signal(outcome_distribution(cfg, scheme, phi), obs).slope;
}

void require_positive(std::int64_t value, const char* what) {
    if (value < 1) {
        std::ostringstream msg;
        msg << what << " must be positive, got " << value;
        throw InvalidConfig(msg.str());
    }
}

// Walks from phi_true in direction dir until the slope changes sign or the
// walk leaves [-pi, pi]; returns the end of the monotone stretch.
double branch_end(const InterferometerConfig& cfg, const BinningScheme& scheme,
                  const Observable& obs, double phi_true, double sign, int dir,
                  double resolution) {
    auto slope = [&](double phi) { return signal_slope(cfg, scheme, obs, phi); };
    const double limit = dir > 0 ? kPi : -kPi;
    double prev = phi_true;
    for (int i = 1;; ++i) {
        double phi = phi_true + dir * i * resolution;
        const bool last = dir > 0 ? phi >= limit : phi <= limit;
        if (last) {
            phi = limit;
        }
        if (slope(phi) * sign < 0.0) {
            const double lo = std::min(prev, phi);
            const double hi = std::max(prev, phi);
            return numerics::find_root(slope, numerics::Interval(lo, hi));
        }
        if (last) {
            return limit;
        }
        prev = phi;
    }
}

void check_monotone(const InterferometerConfig& cfg, const BinningScheme& scheme,
                    const Observable& obs, const numerics::Interval& branch) {
    // Cell midpoints only: refined branch ends sit on stationary points, where
    // root-finding error alone can flip the slope sign.
    const int samples = std::max(2, static_cast<int>(std::ceil(branch.width() / 1e-3)));
    bool rising = false;
    bool falling = false;
    for (int i = 0; i < samples; ++i) {
        const double phi = branch.lo() + branch.width() * (i + 0.5) / samples;
        const double s = signal_slope(cfg, scheme, obs, phi);
        rising = rising || s > kBranchSlopeTolerance;
        falling = falling || s < -kBranchSlopeTolerance;
    }
    if (rising && falling) {
        std::ostringstream msg;
        msg << "signal is not monotone on [" << branch.lo() << ", " << branch.hi() << "]";
        throw NonMonotoneBranch(msg.str());
    }
}

Inversion invert_on_branch(const InterferometerConfig& cfg, const BinningScheme& scheme,
                           const Observable& obs, double measured,
                           const numerics::Interval& branch) {
    const double g_lo = signal_mean(cfg, scheme, obs, branch.lo());
    const double g_hi = signal_mean(cfg, scheme, obs, branch.hi());
    const double g_min = std::min(g_lo, g_hi);
    const double g_max = std::max(g_lo, g_hi);
    if (measured < g_min || measured > g_max) {
        const bool nearer_lo = std::fabs(measured - g_lo) <= std::fabs(measured - g_hi);
        return {nearer_lo ? branch.lo() : branch.hi(), true};
    }
    auto residual = [&](double phi) { return signal_mean(cfg, scheme, obs, phi) - measured; };
    return {numerics::find_root(residual, branch, 1e-13), false};
}

}  // namespace

CountsRecord sample_outcomes(const InterferometerConfig& cfg, const BinningScheme& scheme,
                             double phi, std::int64_t shots, numerics::RandomStream& stream) {
    require_positive(shots, "number of shots N");
    const OutcomeDistribution dist = outcome_distribution(cfg, scheme, phi);

    std::vector<double> cumulative(scheme.bin_count());
    double running = 0.0;
    for (int j = 0; j < scheme.bin_count(); ++j) {
        running += dist.probs[j];
        cumulative[j] = running;
    }

    CountsRecord record;
    record.phi_true = phi;
    record.shots = shots;
    record.counts.assign(scheme.outcome_count(), 0);
    for (std::int64_t i = 0; i < shots; ++i) {
        const double xi = numerics::uniform_sample(stream);
        const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), xi);
        ++record.counts[it - cumulative.begin()];  // end() maps to the leftover slot
    }
    return record;
}

ReplicaSet run_replicas(const InterferometerConfig& cfg, const BinningScheme& scheme, double phi,
                        std::int64_t shots, int replicas, std::uint64_t master_seed) {
    require_positive(shots, "number of shots N");
    require_positive(replicas, "number of replicas M");
    ReplicaSet set;
    set.master_seed = master_seed;
    set.records.reserve(replicas);
    for (int i = 0; i < replicas; ++i) {
        numerics::RandomStream stream(master_seed, static_cast<std::uint64_t>(i));
        set.records.push_back(sample_outcomes(cfg, scheme, phi, shots, stream));
    }
    return set;
}

numerics::Interval monotone_branch(const InterferometerConfig& cfg, const BinningScheme& scheme,
                                   const Observable& obs, double phi_true, double resolution) {
    obs.check_alphabet(scheme);
    const double s0 = signal_slope(cfg, scheme, obs, phi_true);
    if (!(std::fabs(s0) > 1e-14)) {
        std::ostringstream msg;
        msg << "signal is stationary at phi = " << phi_true << "; no monotone branch";
        throw NonMonotoneBranch(msg.str());
    }
    const double sign = s0 > 0.0 ? 1.0 : -1.0;
    const double lo = branch_end(cfg, scheme, obs, phi_true, sign, -1, resolution);
    const double hi = branch_end(cfg, scheme, obs, phi_true, sign, +1, resolution);
    return numerics::Interval(lo, hi);
}

Inversion invert_signal(const InterferometerConfig& cfg, const BinningScheme& scheme,
                        const Observable& obs, double measured, const numerics::Interval& branch) {
    obs.check_alphabet(scheme);
    check_monotone(cfg, scheme, obs, branch);
    return invert_on_branch(cfg, scheme, obs, measured, branch);
}

double measured_signal(const CountsRecord& record, const Observable& obs) {
    if (static_cast<int>(record.counts.size()) != obs.outcome_count()) {
        throw AlphabetMismatch("counts record and observable have different alphabets");
    }
    double total = 0.0;
    for (int k = 0; k < obs.outcome_count(); ++k) {
        total += obs.values()[k] * record.frequency(k);
    }
    return total;
}

EstimationReport invert_measurements(const InterferometerConfig& cfg, const BinningScheme& scheme,
                                     const Observable& obs, double phi_true, std::int64_t shots,
                                     std::span<const double> measured) {
    require_positive(shots, "number of shots N");
    require_positive(static_cast<std::int64_t>(measured.size()), "number of replicas M");

    EstimationReport report;
    report.phi_true = phi_true;
    report.shots = shots;
    report.branch = monotone_branch(cfg, scheme, obs, phi_true);
    check_monotone(cfg, scheme, obs, report.branch);

    report.measured_signals.assign(measured.begin(), measured.end());
    report.estimates.reserve(measured.size());
    for (double value : measured) {
        const Inversion inv = invert_on_branch(cfg, scheme, obs, value, report.branch);
        report.estimates.push_back(inv.phi);
        report.clamp_count += inv.clamped ? 1 : 0;
    }

    const double m = static_cast<double>(measured.size());
    double signal_sum = 0.0;
    double estimate_sum = 0.0;
    double squared_error = 0.0;
    for (std::size_t i = 0; i < measured.size(); ++i) {
        signal_sum += report.measured_signals[i];
        estimate_sum += report.estimates[i];
        const double err = report.estimates[i] - phi_true;
        squared_error += err * err;
    }
    report.mean_signal = signal_sum / m;
    report.mean_estimate = estimate_sum / m;
    report.bias = report.mean_estimate - phi_true;
    if (measured.size() > 1) {
        double spread = 0.0;
        for (double e : report.estimates) {
            spread += (e - report.mean_estimate) * (e - report.mean_estimate);
        }
        report.std_dev = std::sqrt(spread / (m - 1.0));
    }
    report.sigma = std::sqrt(static_cast<double>(shots)) * std::sqrt(squared_error / m);
    return report;
}

EstimationReport estimate(const InterferometerConfig& cfg, const BinningScheme& scheme,
                          const Observable& obs, const ReplicaSet& replicas) {
    if (replicas.records.empty()) {
        throw InvalidConfig("replica set is empty");
    }
    const double phi_true = replicas.records.front().phi_true;
    const std::int64_t shots = replicas.records.front().shots;
    std::vector<double> measured;
    measured.reserve(replicas.records.size());
    for (const auto& record : replicas.records) {
        measured.push_back(measured_signal(record, obs));
    }
    return invert_measurements(cfg, scheme, obs, phi_true, shots, measured);
}

std::uint64_t grid_point_seed(std::uint64_t master_seed, std::size_t index) {
    return numerics::derive_seed(master_seed, index);
}

CalibrationPoint summarize_frequencies(const ReplicaSet& replicas) {
    if (replicas.records.empty()) {
        throw InvalidConfig("replica set is empty");
    }
    const auto& first = replicas.records.front();
    const int outcomes = static_cast<int>(first.counts.size());
    const double m = static_cast<double>(replicas.records.size());

    CalibrationPoint point;
    point.phi = first.phi_true;
    point.mean_frequency.assign(outcomes, 0.0);
    point.std_dev.assign(outcomes, 0.0);
    for (const auto& record : replicas.records) {
        for (int k = 0; k < outcomes; ++k) {
            point.mean_frequency[k] += record.frequency(k) / m;
        }
    }
    if (replicas.records.size() > 1) {
        for (int k = 0; k < outcomes; ++k) {
            double spread = 0.0;
            for (const auto& record : replicas.records) {
                const double d = record.frequency(k) - point.mean_frequency[k];
                spread += d * d;
            }
            point.std_dev[k] = std::sqrt(spread / (m - 1.0));
        }
    }
    return point;
}

std::vector<CalibrationPoint> calibration_curve(const InterferometerConfig& cfg,
                                                const BinningScheme& scheme,
                                                std::span<const double> phi_grid,
                                                std::int64_t shots, int replicas,
                                                std::uint64_t master_seed) {
    if (phi_grid.empty()) {
        throw InvalidConfig("phase grid is empty");
    }
    std::vector<CalibrationPoint> curve;
    curve.reserve(phi_grid.size());
    for (std::size_t j = 0; j < phi_grid.size(); ++j) {
        const ReplicaSet set = run_replicas(cfg, scheme, phi_grid[j], shots, replicas,
                                            grid_point_seed(master_seed, j));
        curve.push_back(summarize_frequencies(set));
    }
    return curve;
}

}  // namespace mzi
