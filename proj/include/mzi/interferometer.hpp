#pragma once

// Coherent-state Mach-Zehnder interferometer read out by homodyne detection of
// the p quadrature at one output port, and the binning scheme that turns the
// continuous quadrature into a finite set of outcomes.
//
// Quadrature convention: p = (a - a^dagger) / (2i), vacuum variance 1/4.

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace mzi {

/// Coherent amplitude alpha0 > 0 (real) of the input laser; nbar = alpha0^2.
class InterferometerConfig {
public:
    static InterferometerConfig from_alpha0(double alpha0);
    static InterferometerConfig from_nbar(double nbar);

    double alpha0() const { return alpha0_; }
    double nbar() const { return alpha0_ * alpha0_; }

private:
    explicit InterferometerConfig(double alpha0) : alpha0_(alpha0) {}
    double alpha0_;
};

/// One outcome of a binned measurement: bin k (|k| <= k_f) or the leftover "-".
class OutcomeId {
public:
    static OutcomeId bin(int k) { return OutcomeId(k, false); }
    static OutcomeId leftover() { return OutcomeId(0, true); }

    bool is_leftover() const { return leftover_; }
    /// Bin index k; meaningless for the leftover outcome.
    int k() const { return k_; }

    friend bool operator==(const OutcomeId&, const OutcomeId&) = default;

private:
    OutcomeId(int k, bool leftover) : k_(k), leftover_(leftover) {}
    int k_;
    bool leftover_;
};

/// Bins [k*b - a, k*b + a] for k = -k_f..k_f; everything else is "leftover".
///
/// Outcomes are stored densely: index k + k_f for bins, 2*k_f + 1 for leftover.
class BinningScheme {
public:
    /// Throws InvalidScheme unless a > 0, b > 2a and k_f >= 0.
    BinningScheme(double half_width, double spacing, int cutoff);

    /// Single bin [-a, a]; the spacing is irrelevant and set to +infinity.
    static BinningScheme binary(double half_width);

    double half_width() const { return half_width_; }
    double spacing() const { return spacing_; }
    int cutoff() const { return cutoff_; }
    bool is_binary() const { return cutoff_ == 0; }

    double center(int k) const { return k == 0 ? 0.0 : k * spacing_; }

    /// 2*k_f + 2.
    int outcome_count() const { return 2 * cutoff_ + 2; }
    int bin_count() const { return 2 * cutoff_ + 1; }
    int leftover_index() const { return 2 * cutoff_ + 1; }

    bool is_valid(const OutcomeId& id) const;
    /// Dense index of an outcome; throws InvalidOutcome for |k| > k_f.
    int index_of(const OutcomeId& id) const;
    OutcomeId outcome_at(int index) const;

    /// Outcome alphabet in dense order: -k_f, ..., k_f, leftover.
    std::vector<OutcomeId> alphabet() const;

private:
    double half_width_;
    double spacing_;
    int cutoff_;
};

/// Probabilities and phase derivatives of every outcome at one phase.
struct OutcomeDistribution {
    double phi = 0.0;
    std::vector<double> probs;   // dense outcome order
    std::vector<double> derivs;  // dP/dphi, same order

    int size() const { return static_cast<int>(probs.size()); }
};

/// Four-mode-quadrature Gaussian (x, p, X, P) of modes a and b; vacuum
/// covariance is Identity / 4.
struct GaussianState {
    Eigen::Vector4d mean;
    Eigen::Matrix4d cov;
};

/// P(p | phi) = sqrt(2/pi) exp[-2 (p + alpha0 sin(phi) / 2)^2].
double quadrature_pdf(const InterferometerConfig& cfg, double phi, double p);

/// Coherent state |alpha0> in mode a, vacuum in mode b.
GaussianState input_state(const InterferometerConfig& cfg);

/// Real 4x4 form of the map (alpha, beta) -> (alpha~, beta~) for which the
/// output Wigner function is W_out(alpha, beta) = W_in(alpha~, beta~).
Eigen::Matrix4d wigner_mode_map(double phi);

/// Output state obtained by pulling the input Gaussian back through the mode map.
GaussianState output_state(const InterferometerConfig& cfg, double phi);

/// Marginal density of the p quadrature of mode a, computed from output_state.
/// Serves as an independent cross-check of quadrature_pdf.
double wigner_oracle_pdf(const InterferometerConfig& cfg, double phi, double p);

/// (g-, g+) = sqrt(2) (alpha0 sin(phi) / 2 -+ a).
std::pair<double, double> g_plus_minus(const InterferometerConfig& cfg,
                                       const BinningScheme& scheme, double phi);

double bin_probability(const InterferometerConfig& cfg, const BinningScheme& scheme,
                       const OutcomeId& outcome, double phi);

double bin_probability_derivative(const InterferometerConfig& cfg, const BinningScheme& scheme,
                                  const OutcomeId& outcome, double phi);

OutcomeDistribution outcome_distribution(const InterferometerConfig& cfg,
                                         const BinningScheme& scheme, double phi);

/// Number of bins per side: alpha0 / (2b) rounded to nearest, ties away from zero.
int default_cutoff(const InterferometerConfig& cfg, double half_width, double spacing);

/// Phase at which P(k|phi) is largest on the branch |phi| <= pi/2:
/// -arcsin(2 b_k / alpha0). Only defined for |2 b_k / alpha0| <= 1.
double outcome_peak_phase(const InterferometerConfig& cfg, const BinningScheme& scheme, int k);

}  // namespace mzi
