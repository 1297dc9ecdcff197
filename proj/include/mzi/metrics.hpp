#pragma once

// Signals of binned-homodyne observables and the estimation-theoretic figures
// of merit derived from them: error-propagation sensitivity, classical Fisher
// information, Cramer-Rao bound, visibility and fringe width.

#include <optional>
#include <vector>

#include "mzi/interferometer.hpp"
#include "mzi/numerics.hpp"

namespace mzi {

/// Eigenvalue assignment: mu_k for every bin k and mu_minus for the leftover.
class Observable {
public:
    /// bin_eigenvalues are ordered k = -k_f..k_f; their count fixes k_f.
    Observable(std::vector<double> bin_eigenvalues, double leftover_eigenvalue);

    /// mu_k = 1 for all k.
    static Observable ones(int cutoff, double leftover_eigenvalue = 0.0);
    /// mu_k = (-1)^k, so mu_0 = +1 and neighbours alternate.
    static Observable alternating(int cutoff, double leftover_eigenvalue = 0.0);
    /// Two-valued observable of the single-bin scheme.
    static Observable binary(double inside, double outside);
    /// Fixed mixed-sign eigenvalues {-0.715, 0.068, 0.839, -0.102, 0.392} (k_f = 2).
    static Observable regression_vector(double leftover_eigenvalue = 0.0);

    int cutoff() const { return (static_cast<int>(values_.size()) - 2) / 2; }
    int outcome_count() const { return static_cast<int>(values_.size()); }

    /// Eigenvalues in dense outcome order (bins, then leftover).
    const std::vector<double>& values() const { return values_; }
    double eigenvalue(const OutcomeId& id) const;

    /// Exactly two distinct eigenvalues (exact comparison).
    bool is_binary() const;

    /// Throws AlphabetMismatch unless the observable covers exactly the scheme's outcomes.
    void check_alphabet(const BinningScheme& scheme) const;

private:
    std::vector<double> values_;
};

struct SignalPoint {
    double phi = 0.0;
    double mean = 0.0;           // <Pi>
    double second_moment = 0.0;  // <Pi^2>
    double variance = 0.0;       // sum_{j<k} P_j P_k (mu_j - mu_k)^2, free of cancellation
    double slope = 0.0;          // d<Pi>/dphi
};

SignalPoint signal(const OutcomeDistribution& dist, const Observable& obs);
SignalPoint signal(const InterferometerConfig& cfg, const BinningScheme& scheme,
                   const Observable& obs, double phi);

/// Delta Pi / |slope|; +infinity where |slope| < 1e-14.
double error_propagation_sensitivity(const SignalPoint& point);
double error_propagation_sensitivity(const InterferometerConfig& cfg, const BinningScheme& scheme,
                                     const Observable& obs, double phi);

/// Terms with P < kCfiProbabilityFloor are dropped from the Fisher sum.
inline constexpr double kCfiProbabilityFloor = 1e-15;

/// sum_k P'(k)^2 / P(k) over the full alphabet.
double cfi(const OutcomeDistribution& dist);
double cfi(const InterferometerConfig& cfg, const BinningScheme& scheme, double phi);

/// Fisher information after merging outcomes that share an eigenvalue.
double binarized_cfi(const OutcomeDistribution& dist, const Observable& obs);

/// 1 / sqrt(F); +infinity where F < 1e-20.
double crb_from_cfi(double fisher);
double crb(const InterferometerConfig& cfg, const BinningScheme& scheme, double phi);

/// sqrt(P(+)(1 - P(+))) / |P'(+)| for the single-bin scheme; throws SchemeNotBinary.
double binary_sensitivity(const InterferometerConfig& cfg, const BinningScheme& scheme,
                          double phi);

/// (<Pi>_0 - <Pi>_{pi/2}) / (<Pi>_0 + <Pi>_{pi/2}); throws DegenerateSignal.
double visibility(const InterferometerConfig& cfg, const BinningScheme& scheme,
                  const Observable& obs);

/// Smallest nbar in [1e-6, 1e4] whose single-bin visibility reaches target;
/// throws NoSolution when nbar = 1e4 still falls short.
double visibility_boundary(double half_width, double target_visibility);

/// -(alpha0 / 2) sin(phi): mean of the unbinned p quadrature.
double continuous_signal(const InterferometerConfig& cfg, double phi);

/// Full width at half maximum of the continuous signal's fringe around -pi/2,
/// measured from its zero level.
double continuous_fwhm(const InterferometerConfig& cfg);

/// Width of the central fringe (around phi = 0) between the two half-maximum
/// crossings. The baseline on each side is the signal at the nearest
/// stationary point; throws NoFringe when no crossing exists in (-pi/2, pi/2).
double fwhm(const InterferometerConfig& cfg, const BinningScheme& scheme, const Observable& obs);

/// Fringe-peak phases arcsin(2 b_k / alpha0) and pi - arcsin(2 b_k / alpha0),
/// sorted, over bins with |2 b_k / alpha0| <= 1.
///
/// The individual P(k|phi) from quadrature_pdf peak at -arcsin(2 b_k / alpha0)
/// (see outcome_peak_phase); the set is the same because k is symmetric, but
/// per-outcome labels carry opposite signs.
std::vector<double> signal_peaks(const InterferometerConfig& cfg, const BinningScheme& scheme);

struct BestSensitivity {
    double phi = 0.0;
    double delta_phi = 0.0;
};

/// Guard band kept away from phi = 0 and phi = pi/2 when searching optima.
inline constexpr double kBestSensitivityGuard = 1e-4;

/// Minimum of the error-propagation sensitivity over (1e-4, pi/2 - 1e-4).
BestSensitivity best_sensitivity(const InterferometerConfig& cfg, const BinningScheme& scheme,
                                 const Observable& obs);
/// Minimum of the Cramer-Rao bound over the same range.
BestSensitivity best_crb(const InterferometerConfig& cfg, const BinningScheme& scheme);

/// Single-bin figures of merit on an (nbar, a) grid. Matrices are indexed
/// [nbar index][a index]; failed cells hold NaN.
struct SweepGrid {
    std::vector<double> nbar_axis;
    std::vector<double> a_axis;
    std::vector<std::vector<double>> resolution_ratio;   // (2 pi / 3) / FWHM
    std::vector<std::vector<double>> sensitivity_ratio;  // (1 / sqrt(nbar)) / delta_phi_min
    std::vector<std::vector<double>> visibility;
};

struct SweepCell {
    double resolution_ratio;
    double sensitivity_ratio;
    double visibility;
};

/// One grid cell, using mu_+ = 1 / erf(sqrt(2) a), mu_- = 0.
SweepCell sweep_cell(double nbar, double half_width);

/// Throws InvalidConfig unless both axes are nonempty and strictly ascending.
SweepGrid sweep(const std::vector<double>& nbar_axis, const std::vector<double>& a_axis);

}  // namespace mzi
