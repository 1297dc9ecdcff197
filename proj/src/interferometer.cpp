#include "mzi/interferometer.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "mzi/error.hpp"
#include "mzi/numerics.hpp"

namespace mzi {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

// Shift of the quadrature Gaussian: P(p|phi) is centered at -c.
double center_shift(const InterferometerConfig& cfg, double phi) {
    return 0.5 * cfg.alpha0() * std::sin(phi);
}

// d/dphi of the scaled bin edges sqrt(2) (c + edge).
double edge_velocity(const InterferometerConfig& cfg, double phi) {
    return cfg.alpha0() * std::cos(phi) / kSqrt2;
}

// Probability mass of the quadrature Gaussian on [lo, hi] in the scaled
// coordinate t = sqrt(2) (p + c); +-infinity selects a tail.
double gaussian_mass(double t_lo, double t_hi) {
    if (std::isinf(t_lo) && std::isinf(t_hi)) {
        return 1.0;
    }
    if (std::isinf(t_lo)) {
        return 0.5 * numerics::erfc(-t_hi);
    }
    if (std::isinf(t_hi)) {
        return 0.5 * numerics::erfc(t_lo);
    }
    return 0.5 * numerics::erf_diff(t_lo, t_hi);
}

double bin_probability_unchecked(const BinningScheme& scheme, double shift, int k) {
    const double center = scheme.center(k) + shift;
    const double a = scheme.half_width();
    return gaussian_mass(kSqrt2 * (center - a), kSqrt2 * (center + a));
}

// dP(k|phi)/dphi = (1/sqrt(pi)) [exp(-u+^2) - exp(-u-^2)] alpha0 cos(phi) / sqrt(2),
// u-+ = sqrt(2) (c + b_k -+ a): the fundamental theorem of calculus applied to
// (1/2) erf evaluated at the two moving edges.
double bin_derivative_unchecked(const BinningScheme& scheme, double shift, double velocity, int k) {
    const double center = scheme.center(k) + shift;
    const double a = scheme.half_width();
    const double u_minus = kSqrt2 * (center - a);
    const double u_plus = kSqrt2 * (center + a);
    return (std::exp(-u_plus * u_plus) - std::exp(-u_minus * u_minus)) * velocity /
           std::sqrt(std::numbers::pi);
}

// Mass outside every bin, summed from the two tails and the gaps between
// neighbouring bins. Equal to 1 - sum of bin masses without the cancellation.
double leftover_probability(const BinningScheme& scheme, double shift) {
    const int kf = scheme.cutoff();
    const double a = scheme.half_width();
    const double inf = std::numeric_limits<double>::infinity();
    auto t = [&](double edge) { return kSqrt2 * (edge + shift); };

    double total = gaussian_mass(-inf, t(scheme.center(-kf) - a));
    for (int k = -kf; k < kf; ++k) {
        total += gaussian_mass(t(scheme.center(k) + a), t(scheme.center(k + 1) - a));
    }
    total += gaussian_mass(t(scheme.center(kf) + a), inf);
    return total;
}

void require_valid(const BinningScheme& scheme, const OutcomeId& outcome) {
    if (!scheme.is_valid(outcome)) {
        std::ostringstream msg;
        msg << "outcome bin " << outcome.k() << " outside alphabet with k_f = " << scheme.cutoff();
        throw InvalidOutcome(msg.str());
    }
}

}  // namespace

InterferometerConfig InterferometerConfig::from_alpha0(double alpha0) {
    if (!(alpha0 > 0.0) || !std::isfinite(alpha0)) {
        std::ostringstream msg;
        msg << "coherent amplitude alpha0 must be positive and finite, got " << alpha0;
        throw InvalidConfig(msg.str());
    }
    return InterferometerConfig(alpha0);
}

InterferometerConfig InterferometerConfig::from_nbar(double nbar) {
    if (!(nbar > 0.0) || !std::isfinite(nbar)) {
        std::ostringstream msg;
        msg << "mean photon number nbar must be positive and finite, got " << nbar;
        throw InvalidConfig(msg.str());
    }
    return InterferometerConfig(std::sqrt(nbar));
}

BinningScheme::BinningScheme(double half_width, double spacing, int cutoff)
    : half_width_(half_width), spacing_(spacing), cutoff_(cutoff) {
    if (!(half_width > 0.0) || !std::isfinite(half_width)) {
        std::ostringstream msg;
        msg << "bin half-width a must be positive, got " << half_width;
        throw InvalidScheme(msg.str());
    }
    if (!(spacing > 2.0 * half_width)) {
        std::ostringstream msg;
        msg << "bin spacing b must exceed 2a (non-overlapping bins), got b = " << spacing
            << ", a = " << half_width;
        throw InvalidScheme(msg.str());
    }
    if (cutoff < 0) {
        std::ostringstream msg;
        msg << "cutoff k_f must be non-negative, got " << cutoff;
        throw InvalidScheme(msg.str());
    }
}

BinningScheme BinningScheme::binary(double half_width) {
    return BinningScheme(half_width, std::numeric_limits<double>::infinity(), 0);
}

bool BinningScheme::is_valid(const OutcomeId& id) const {
    return id.is_leftover() || (id.k() >= -cutoff_ && id.k() <= cutoff_);
}

int BinningScheme::index_of(const OutcomeId& id) const {
    require_valid(*this, id);
    return id.is_leftover() ? leftover_index() : id.k() + cutoff_;
}

OutcomeId BinningScheme::outcome_at(int index) const {
    if (index < 0 || index > leftover_index()) {
        std::ostringstream msg;
        msg << "outcome index " << index << " outside [0, " << leftover_index() << "]";
        throw InvalidOutcome(msg.str());
    }
    return index == leftover_index() ? OutcomeId::leftover() : OutcomeId::bin(index - cutoff_);
}

std::vector<OutcomeId> BinningScheme::alphabet() const {
    std::vector<OutcomeId> out;
    out.reserve(outcome_count());
    for (int i = 0; i < outcome_count(); ++i) {
        out.push_back(outcome_at(i));
    }
    return out;
}

double quadrature_pdf(const InterferometerConfig& cfg, double phi, double p) {
    const double d = p + center_shift(cfg, phi);
    return std::sqrt(2.0 / std::numbers::pi) * std::exp(-2.0 * d * d);
}

GaussianState input_state(const InterferometerConfig& cfg) {
    GaussianState s;
    s.mean << cfg.alpha0(), 0.0, 0.0, 0.0;
    s.cov = 0.25 * Eigen::Matrix4d::Identity();
    return s;
}

Eigen::Matrix4d wigner_mode_map(double phi) {
    // Complex coefficients (e^{i phi} -+ 1) / 2 as 2x2 real blocks acting on (x, p).
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    auto block = [](double re, double im) {
        Eigen::Matrix2d m;
        m << re, -im, im, re;
        return m;
    };
    const Eigen::Matrix2d minus = block(0.5 * (c - 1.0), 0.5 * s);
    const Eigen::Matrix2d plus = block(0.5 * (c + 1.0), 0.5 * s);

    Eigen::Matrix4d map;
    map.block<2, 2>(0, 0) = minus;
    map.block<2, 2>(0, 2) = plus;
    map.block<2, 2>(2, 0) = -plus;
    map.block<2, 2>(2, 2) = -minus;
    return map;
}

GaussianState output_state(const InterferometerConfig& cfg, double phi) {
    // W_out(z) = W_in(M z): if z_in ~ N(m, C) then z_out = M^{-1} z_in.
    const GaussianState in = input_state(cfg);
    const Eigen::Matrix4d pullback = wigner_mode_map(phi).inverse();
    GaussianState out;
    out.mean = pullback * in.mean;
    out.cov = pullback * in.cov * pullback.transpose();
    return out;
}

double wigner_oracle_pdf(const InterferometerConfig& cfg, double phi, double p) {
    const GaussianState out = output_state(cfg, phi);
    const double mean = out.mean(1);
    const double var = out.cov(1, 1);
    const double d = p - mean;
    return std::exp(-0.5 * d * d / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

std::pair<double, double> g_plus_minus(const InterferometerConfig& cfg,
                                       const BinningScheme& scheme, double phi) {
    const double shift = center_shift(cfg, phi);
    const double a = scheme.half_width();
    return {kSqrt2 * (shift - a), kSqrt2 * (shift + a)};
}

double bin_probability(const InterferometerConfig& cfg, const BinningScheme& scheme,
                       const OutcomeId& outcome, double phi) {
    require_valid(scheme, outcome);
    const double shift = center_shift(cfg, phi);
    if (outcome.is_leftover()) {
        return leftover_probability(scheme, shift);
    }
    return bin_probability_unchecked(scheme, shift, outcome.k());
}

double bin_probability_derivative(const InterferometerConfig& cfg, const BinningScheme& scheme,
                                  const OutcomeId& outcome, double phi) {
    require_valid(scheme, outcome);
    const double shift = center_shift(cfg, phi);
    const double velocity = edge_velocity(cfg, phi);
    if (!outcome.is_leftover()) {
        return bin_derivative_unchecked(scheme, shift, velocity, outcome.k());
    }
    double sum = 0.0;
    for (int k = -scheme.cutoff(); k <= scheme.cutoff(); ++k) {
        sum += bin_derivative_unchecked(scheme, shift, velocity, k);
    }
    return -sum;
}

OutcomeDistribution outcome_distribution(const InterferometerConfig& cfg,
                                         const BinningScheme& scheme, double phi) {
    const double shift = center_shift(cfg, phi);
    const double velocity = edge_velocity(cfg, phi);
    const int kf = scheme.cutoff();

    OutcomeDistribution dist;
    dist.phi = phi;
    dist.probs.resize(scheme.outcome_count());
    dist.derivs.resize(scheme.outcome_count());
    double deriv_sum = 0.0;
    for (int k = -kf; k <= kf; ++k) {
        dist.probs[k + kf] = bin_probability_unchecked(scheme, shift, k);
        dist.derivs[k + kf] = bin_derivative_unchecked(scheme, shift, velocity, k);
        deriv_sum += dist.derivs[k + kf];
    }
    dist.probs[scheme.leftover_index()] = leftover_probability(scheme, shift);
    dist.derivs[scheme.leftover_index()] = -deriv_sum;
    return dist;
}

int default_cutoff(const InterferometerConfig& cfg, double half_width, double spacing) {
    if (!(spacing > 2.0 * half_width)) {
        std::ostringstream msg;
        msg << "bin spacing b must exceed 2a (non-overlapping bins), got b = " << spacing
            << ", a = " << half_width;
        throw InvalidScheme(msg.str());
    }
    return static_cast<int>(std::round(cfg.alpha0() / (2.0 * spacing)));
}

double outcome_peak_phase(const InterferometerConfig& cfg, const BinningScheme& scheme, int k) {
    require_valid(scheme, OutcomeId::bin(k));
    const double ratio = 2.0 * scheme.center(k) / cfg.alpha0();
    if (std::fabs(ratio) > 1.0) {
        std::ostringstream msg;
        msg << "bin " << k << " is never centered on the quadrature peak (2 b_k / alpha0 = "
            << ratio << ")";
        throw InvalidOutcome(msg.str());
    }
    return -std::asin(ratio);
}

}  // namespace mzi
