#include "mzi/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "mzi/error.hpp"

namespace mzi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFlatSlope = 1e-14;
constexpr double kPi = std::numbers::pi;

}  // namespace

// ---------------------------------------------------------------------------
// Observable

Observable::Observable(std::vector<double> bin_eigenvalues, double leftover_eigenvalue)
    : values_(std::move(bin_eigenvalues)) {
    if (values_.empty() || values_.size() % 2 == 0) {
        std::ostringstream msg;
        msg << "observable needs 2 k_f + 1 bin eigenvalues, got " << values_.size();
        throw AlphabetMismatch(msg.str());
    }
    values_.push_back(leftover_eigenvalue);
}

Observable Observable::ones(int cutoff, double leftover_eigenvalue) {
    return Observable(std::vector<double>(2 * cutoff + 1, 1.0), leftover_eigenvalue);
}

Observable Observable::alternating(int cutoff, double leftover_eigenvalue) {
    std::vector<double> mu;
    mu.reserve(2 * cutoff + 1);
    for (int k = -cutoff; k <= cutoff; ++k) {
        mu.push_back(k % 2 == 0 ? 1.0 : -1.0);
    }
    return Observable(std::move(mu), leftover_eigenvalue);
}

Observable Observable::binary(double inside, double outside) {
    return Observable({inside}, outside);
}

Observable Observable::regression_vector(double leftover_eigenvalue) {
    return Observable({-0.715, 0.068, 0.839, -0.102, 0.392}, leftover_eigenvalue);
}

double Observable::eigenvalue(const OutcomeId& id) const {
    const int kf = cutoff();
    if (id.is_leftover()) {
        return values_.back();
    }
    if (id.k() < -kf || id.k() > kf) {
        std::ostringstream msg;
        msg << "observable has no eigenvalue for bin " << id.k();
        throw InvalidOutcome(msg.str());
    }
    return values_[id.k() + kf];
}

bool Observable::is_binary() const {
    return std::set<double>(values_.begin(), values_.end()).size() == 2;
}

void Observable::check_alphabet(const BinningScheme& scheme) const {
    if (outcome_count() != scheme.outcome_count()) {
        std::ostringstream msg;
        msg << "observable has " << outcome_count() << " eigenvalues but the scheme has "
            << scheme.outcome_count() << " outcomes";
        throw AlphabetMismatch(msg.str());
    }
}

// ---------------------------------------------------------------------------
// Signal and sensitivity

SignalPoint signal(const OutcomeDistribution& dist, const Observable& obs) {
    if (obs.outcome_count() != dist.size()) {
        std::ostringstream msg;
        msg << "observable has " << obs.outcome_count() << " eigenvalues but the distribution has "
            << dist.size() << " outcomes";
        throw AlphabetMismatch(msg.str());
    }
    const auto& mu = obs.values();
    const int n = dist.size();
    const double mu_leftover = mu.back();

    SignalPoint point;
    point.phi = dist.phi;
    for (int j = 0; j < n; ++j) {
        point.mean += mu[j] * dist.probs[j];
        point.second_moment += mu[j] * mu[j] * dist.probs[j];
    }
    for (int j = 0; j < n; ++j) {
        for (int k = j + 1; k < n; ++k) {
            const double gap = mu[j] - mu[k];
            point.variance += dist.probs[j] * dist.probs[k] * gap * gap;
        }
    }
    // The leftover derivative is minus the sum of the others, so measuring the
    // eigenvalues from mu_minus gives the same slope without the offset term.
    for (int j = 0; j + 1 < n; ++j) {
        point.slope += (mu[j] - mu_leftover) * dist.derivs[j];
    }
    return point;
}

SignalPoint signal(const InterferometerConfig& cfg, const BinningScheme& scheme,
                   const Observable& obs, double phi) {
    obs.check_alphabet(scheme);
    return signal(outcome_distribution(cfg, scheme, phi), obs);
}

double error_propagation_sensitivity(const SignalPoint& point) {
    if (!(std::fabs(point.slope) >= kFlatSlope)) {
        return kInf;
    }
    return std::sqrt(point.variance) / std::fabs(point.slope);
}

double error_propagation_sensitivity(const InterferometerConfig& cfg, const BinningScheme& scheme,
                                     const Observable& obs, double phi) {
    return error_propagation_sensitivity(signal(cfg, scheme, obs, phi));
}

// ---------------------------------------------------------------------------
// Fisher information

double cfi(const OutcomeDistribution& dist) {
    double total = 0.0;
    for (int k = 0; k < dist.size(); ++k) {
        if (dist.probs[k] >= kCfiProbabilityFloor) {
            total += dist.derivs[k] * dist.derivs[k] / dist.probs[k];
        }
    }
    return total;
}

double cfi(const InterferometerConfig& cfg, const BinningScheme& scheme, double phi) {
    return cfi(outcome_distribution(cfg, scheme, phi));
}

double binarized_cfi(const OutcomeDistribution& dist, const Observable& obs) {
    if (obs.outcome_count() != dist.size()) {
        throw AlphabetMismatch("observable and distribution sizes differ");
    }
    std::map<double, std::pair<double, double>> groups;  // eigenvalue -> (P, P')
    for (int k = 0; k < dist.size(); ++k) {
        auto& g = groups[obs.values()[k]];
        g.first += dist.probs[k];
        g.second += dist.derivs[k];
    }
    double total = 0.0;
    for (const auto& [mu, g] : groups) {
        if (g.first >= kCfiProbabilityFloor) {
            total += g.second * g.second / g.first;
        }
    }
    return total;
}

double crb_from_cfi(double fisher) {
    return fisher < 1e-20 ? kInf : 1.0 / std::sqrt(fisher);
}

double crb(const InterferometerConfig& cfg, const BinningScheme& scheme, double phi) {
    return crb_from_cfi(cfi(cfg, scheme, phi));
}

double binary_sensitivity(const InterferometerConfig& cfg, const BinningScheme& scheme,
                          double phi) {
    if (!scheme.is_binary()) {
        std::ostringstream msg;
        msg << "binary sensitivity needs a single-bin scheme, got k_f = " << scheme.cutoff();
        throw SchemeNotBinary(msg.str());
    }
    const OutcomeDistribution dist = outcome_distribution(cfg, scheme, phi);
    const double inside = dist.probs[0];
    const double outside = dist.probs[1];
    const double slope = dist.derivs[0];
    if (!(std::fabs(slope) >= kFlatSlope)) {
        return kInf;
    }
    return std::sqrt(inside * outside) / std::fabs(slope);
}

// ---------------------------------------------------------------------------
// Visibility

double visibility(const InterferometerConfig& cfg, const BinningScheme& scheme,
                  const Observable& obs) {
    const double bright = signal(cfg, scheme, obs, 0.0).mean;
    const double dark = signal(cfg, scheme, obs, 0.5 * kPi).mean;
    const double denom = bright + dark;
    if (!(std::fabs(denom) >= 1e-14)) {
        throw DegenerateSignal("visibility undefined: signal at 0 and pi/2 sums to zero");
    }
    return (bright - dark) / denom;
}

double visibility_boundary(double half_width, double target_visibility) {
    if (!(target_visibility >= 0.0 && target_visibility < 1.0)) {
        std::ostringstream msg;
        msg << "target visibility must lie in [0, 1), got " << target_visibility;
        throw InvalidConfig(msg.str());
    }
    const BinningScheme scheme = BinningScheme::binary(half_width);
    const Observable obs = Observable::binary(1.0, 0.0);
    auto shortfall = [&](double log_nbar) {
        const auto cfg = InterferometerConfig::from_nbar(std::exp(log_nbar));
        return visibility(cfg, scheme, obs) - target_visibility;
    };
    const double lo = std::log(1e-6);
    const double hi = std::log(1e4);
    if (shortfall(lo) >= 0.0) {
        return 1e-6;
    }
    if (shortfall(hi) < 0.0) {
        std::ostringstream msg;
        msg << "visibility " << target_visibility << " not reached for nbar <= 1e4 at a = "
            << half_width;
        throw NoSolution(msg.str());
    }
    return std::exp(numerics::find_root(shortfall, numerics::Interval(lo, hi), 1e-13));
}

// ---------------------------------------------------------------------------
// Fringe width

double continuous_signal(const InterferometerConfig& cfg, double phi) {
    return -0.5 * cfg.alpha0() * std::sin(phi);
}

double continuous_fwhm(const InterferometerConfig& cfg) {
    const double half = 0.25 * cfg.alpha0();
    auto excess = [&](double phi) { return continuous_signal(cfg, phi) - half; };
    const double right = numerics::find_root(excess, numerics::Interval(-0.5 * kPi, 0.0));
    const double left = numerics::find_root(excess, numerics::Interval(-kPi, -0.5 * kPi));
    return right - left;
}

namespace {

// First stationary point of the signal when walking from 0 in direction
// `dir`, stopping at +-pi/2.
double nearest_stationary_point(const std::function<double(double)>& slope, int dir) {
    constexpr double step = 1e-3;
    const double limit = 0.5 * kPi;
    double initial_sign = 0.0;
    double prev = 0.0;
    for (int i = 1;; ++i) {
        const double phi = std::min(i * step, limit);
        const double s = slope(dir * phi);
        if (initial_sign == 0.0) {
            if (s != 0.0) {
                initial_sign = s > 0.0 ? 1.0 : -1.0;
            }
        } else if (s * initial_sign < 0.0) {
            auto f = [&](double x) { return slope(dir * x); };
            return dir * numerics::find_root(f, numerics::Interval(prev, phi));
        }
        prev = phi;
        if (phi >= limit) {
            return dir * limit;
        }
    }
}

}  // namespace

double fwhm(const InterferometerConfig& cfg, const BinningScheme& scheme, const Observable& obs) {
    obs.check_alphabet(scheme);
    auto mean = [&](double phi) { return signal(cfg, scheme, obs, phi).mean; };
    auto slope = [&](double phi) { return signal(cfg, scheme, obs, phi).slope; };

    const double peak = mean(0.0);
    double crossings[2];
    for (int side = 0; side < 2; ++side) {
        const int dir = side == 0 ? -1 : 1;
        const double stationary = nearest_stationary_point(slope, dir);
        const double half = 0.5 * (peak + mean(stationary));
        auto excess = [&](double phi) { return mean(phi) - half; };
        const double lo = std::min(0.0, stationary);
        const double hi = std::max(0.0, stationary);
        if (!(excess(lo) * excess(hi) < 0.0)) {
            throw NoFringe("no half-maximum crossing of the central fringe in (-pi/2, pi/2)");
        }
        crossings[side] = numerics::find_root(excess, numerics::Interval(lo, hi));
    }
    return crossings[1] - crossings[0];
}

std::vector<double> signal_peaks(const InterferometerConfig& cfg, const BinningScheme& scheme) {
    std::vector<double> peaks;
    for (int k = -scheme.cutoff(); k <= scheme.cutoff(); ++k) {
        const double ratio = 2.0 * scheme.center(k) / cfg.alpha0();
        if (std::fabs(ratio) > 1.0) {
            continue;
        }
        const double phi = std::asin(ratio);
        double mirrored = kPi - phi;
        if (mirrored > kPi) {
            mirrored -= 2.0 * kPi;
        }
        peaks.push_back(phi);
        peaks.push_back(mirrored);
    }
    std::sort(peaks.begin(), peaks.end());
    return peaks;
}

// ---------------------------------------------------------------------------
// Optimal operating point

namespace {

const numerics::Interval& search_range() {
    static const numerics::Interval range(kBestSensitivityGuard,
                                          0.5 * kPi - kBestSensitivityGuard);
    return range;
}

constexpr int kSearchGrid = 4096;

}  // namespace

BestSensitivity best_sensitivity(const InterferometerConfig& cfg, const BinningScheme& scheme,
                                 const Observable& obs) {
    obs.check_alphabet(scheme);
    auto f = [&](double phi) { return error_propagation_sensitivity(cfg, scheme, obs, phi); };
    const auto m = numerics::minimize_scalar(f, search_range(), 1e-10, kSearchGrid);
    return {m.x, m.value};
}

BestSensitivity best_crb(const InterferometerConfig& cfg, const BinningScheme& scheme) {
    auto f = [&](double phi) { return crb(cfg, scheme, phi); };
    const auto m = numerics::minimize_scalar(f, search_range(), 1e-10, kSearchGrid);
    return {m.x, m.value};
}

// ---------------------------------------------------------------------------
// Sweeps

SweepCell sweep_cell(double nbar, double half_width) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    SweepCell cell{nan, nan, nan};
    try {
        const auto cfg = InterferometerConfig::from_nbar(nbar);
        const auto scheme = BinningScheme::binary(half_width);
        const auto obs = Observable::binary(1.0 / numerics::erf(std::numbers::sqrt2 * half_width), 0.0);
        try {
            cell.resolution_ratio = (2.0 * kPi / 3.0) / fwhm(cfg, scheme, obs);
        } catch (const Error&) {
        }
        try {
            cell.sensitivity_ratio =
                (1.0 / std::sqrt(nbar)) / best_sensitivity(cfg, scheme, obs).delta_phi;
        } catch (const Error&) {
        }
        try {
            cell.visibility = visibility(cfg, scheme, obs);
        } catch (const Error&) {
        }
    } catch (const Error&) {
    }
    return cell;
}

namespace {

void require_ascending(const std::vector<double>& axis, const char* name) {
    if (axis.empty()) {
        throw InvalidConfig(std::string(name) + " axis is empty");
    }
    for (std::size_t i = 1; i < axis.size(); ++i) {
        if (!(axis[i] > axis[i - 1])) {
            throw InvalidConfig(std::string(name) + " axis must be strictly ascending");
        }
    }
}

}  // namespace

SweepGrid sweep(const std::vector<double>& nbar_axis, const std::vector<double>& a_axis) {
    require_ascending(nbar_axis, "nbar");
    require_ascending(a_axis, "a");
    SweepGrid grid;
    grid.nbar_axis = nbar_axis;
    grid.a_axis = a_axis;
    const std::vector<double> row(a_axis.size(), 0.0);
    grid.resolution_ratio.assign(nbar_axis.size(), row);
    grid.sensitivity_ratio.assign(nbar_axis.size(), row);
    grid.visibility.assign(nbar_axis.size(), row);
    for (std::size_t i = 0; i < nbar_axis.size(); ++i) {
        for (std::size_t j = 0; j < a_axis.size(); ++j) {
            const SweepCell cell = sweep_cell(nbar_axis[i], a_axis[j]);
            grid.resolution_ratio[i][j] = cell.resolution_ratio;
            grid.sensitivity_ratio[i][j] = cell.sensitivity_ratio;
            grid.visibility[i][j] = cell.visibility;
        }
    }
    return grid;
}

}  // namespace mzi
