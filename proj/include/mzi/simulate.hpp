#pragma once

// Monte Carlo simulation of repeated binned-homodyne measurements and the
// inversion phase estimator built on an observable's signal.

#include <cstdint>
#include <span>
#include <vector>

#include "mzi/interferometer.hpp"
#include "mzi/metrics.hpp"
#include "mzi/numerics.hpp"

namespace mzi {

/// Outcome counts of N shots at one phase; counts in dense outcome order.
struct CountsRecord {
    double phi_true = 0.0;
    std::int64_t shots = 0;
    std::vector<std::int64_t> counts;

    double frequency(int index) const { return static_cast<double>(counts[index]) / shots; }
};

/// M independent records at the same phase; record i used stream index i.
struct ReplicaSet {
    std::uint64_t master_seed = 0;
    std::vector<CountsRecord> records;
};

struct EstimationReport {
    double phi_true = 0.0;
    std::int64_t shots = 0;
    numerics::Interval branch{0.0, 1.0};
    std::vector<double> measured_signals;  // Pi_exp per replica
    std::vector<double> estimates;         // phi_inv per replica
    double mean_signal = 0.0;
    double mean_estimate = 0.0;
    double bias = 0.0;     // mean_estimate - phi_true
    double std_dev = 0.0;  // sample standard deviation of the estimates
    double sigma = 0.0;    // sqrt(N) * RMS(phi_inv - phi_true)
    int clamp_count = 0;
};

/// Draws N uniforms and classifies each by the cumulative partition
/// (0, P(-k_f)], (P(-k_f), P(-k_f) + P(-k_f+1)], ..., remainder -> leftover.
CountsRecord sample_outcomes(const InterferometerConfig& cfg, const BinningScheme& scheme,
                             double phi, std::int64_t shots, numerics::RandomStream& stream);

ReplicaSet run_replicas(const InterferometerConfig& cfg, const BinningScheme& scheme, double phi,
                        std::int64_t shots, int replicas, std::uint64_t master_seed);

struct Inversion {
    double phi = 0.0;
    bool clamped = false;
};

/// Largest interval around phi_true, within [-pi, pi], on which the signal
/// slope keeps one sign. The slope is sampled every `resolution` radians and
/// the ends are refined to the stationary points. Throws NonMonotoneBranch
/// when the slope vanishes at phi_true.
numerics::Interval monotone_branch(const InterferometerConfig& cfg, const BinningScheme& scheme,
                                   const Observable& obs, double phi_true,
                                   double resolution = 1e-3);

/// Solves signal(phi) = measured on the branch; values beyond the branch's
/// range clamp to the endpoint with the nearer signal value.
Inversion invert_signal(const InterferometerConfig& cfg, const BinningScheme& scheme,
                        const Observable& obs, double measured, const numerics::Interval& branch);

/// Sum over outcomes of mu_k N_k / N.
double measured_signal(const CountsRecord& record, const Observable& obs);

/// Inverts each measured signal on the branch around phi_true and aggregates.
EstimationReport invert_measurements(const InterferometerConfig& cfg, const BinningScheme& scheme,
                                     const Observable& obs, double phi_true, std::int64_t shots,
                                     std::span<const double> measured);

EstimationReport estimate(const InterferometerConfig& cfg, const BinningScheme& scheme,
                          const Observable& obs, const ReplicaSet& replicas);

struct CalibrationPoint {
    double phi = 0.0;
    std::vector<double> mean_frequency;  // per outcome, averaged over replicas
    std::vector<double> std_dev;         // sample standard deviation over replicas
};

/// Seed used for grid point `index` of a calibration or simulation grid.
std::uint64_t grid_point_seed(std::uint64_t master_seed, std::size_t index);

CalibrationPoint summarize_frequencies(const ReplicaSet& replicas);

std::vector<CalibrationPoint> calibration_curve(const InterferometerConfig& cfg,
                                                const BinningScheme& scheme,
                                                std::span<const double> phi_grid,
                                                std::int64_t shots, int replicas,
                                                std::uint64_t master_seed);

}  // namespace mzi
