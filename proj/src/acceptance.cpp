#include "mzi/acceptance.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <sstream>

#include "mzi/cli.hpp"
#include "mzi/error.hpp"
#include "mzi/interferometer.hpp"
#include "mzi/metrics.hpp"
#include "mzi/numerics.hpp"
#include "mzi/simulate.hpp"

namespace mzi::acceptance {

namespace {

constexpr double kPi = std::numbers::pi;

using numerics::Interval;
using numerics::RandomStream;

std::string fmt(const char* pattern, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

// Grid of `count` interior points: -pi + (i + 1/2) * 2pi / count.
std::vector<double> offset_grid(int count) {
    std::vector<double> g(count);
    for (int i = 0; i < count; ++i) {
        g[i] = -kPi + (i + 0.5) * 2.0 * kPi / count;
    }
    return g;
}

Observable random_observable(RandomStream& rng, int cutoff) {
    std::vector<double> mu(2 * cutoff + 1);
    for (auto& m : mu) {
        m = -1.0 + 2.0 * rng.uniform();
    }
    return Observable(mu, -1.0 + 2.0 * rng.uniform());
}

struct Setup {
    InterferometerConfig cfg;
    BinningScheme scheme;
};

std::vector<Setup> three_setups() {
    return {
        {InterferometerConfig::from_nbar(200.0), BinningScheme(0.5, 3.8, 2)},
        {InterferometerConfig::from_nbar(1000.0), BinningScheme(0.5, 3.2, 5)},
        {InterferometerConfig::from_nbar(10.0), BinningScheme(0.25, 1.0, 2)},
    };
}

CheckResult binary_saturation() {
    double worst = 0.0;
    int points = 0;
    for (double nbar : {10.0, 200.0, 1000.0}) {
        const auto cfg = InterferometerConfig::from_nbar(nbar);
        for (double a : {0.25, 0.5, 1.0}) {
            const auto scheme = BinningScheme::binary(a);
            const Observable obs = Observable::binary(1.0, 0.0);
            for (double phi : offset_grid(500)) {
                const auto dist = outcome_distribution(cfg, scheme, phi);
                const auto s = signal(dist, obs);
                if (std::fabs(s.slope) < 1e-10) {
                    continue;
                }
                ++points;
                worst = std::max(worst, std::fabs(error_propagation_sensitivity(s) * std::sqrt(cfi(dist)) - 1.0));
            }
        }
    }
    return {1, "binary saturation identity", worst <= 1e-10,
            fmt("max |dphi*sqrt(F) - 1| = %.3g over %d points", worst, points)};
}

CheckResult eigenvalue_independence() {
    const auto cfg = InterferometerConfig::from_nbar(200.0);
    const auto scheme = BinningScheme::binary(0.5);
    RandomStream rng(2019, 2);
    std::vector<Observable> pairs;
    while (pairs.size() < 10) {
        const double hi = -5.0 + 10.0 * rng.uniform();
        const double lo = -5.0 + 10.0 * rng.uniform();
        if (hi != lo) {
            pairs.push_back(Observable::binary(hi, lo));
        }
    }
    double worst = 0.0;
    for (double phi : offset_grid(500)) {
        if (std::fabs(outcome_distribution(cfg, scheme, phi).derivs[0]) < 1e-10) {
            continue;
        }
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        for (const auto& obs : pairs) {
            const double d = error_propagation_sensitivity(cfg, scheme, obs, phi);
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
        worst = std::max(worst, (hi - lo) / lo);
    }
    return {2, "eigenvalue independence", worst <= 1e-12, fmt("max relative spread = %.3g", worst)};
}

CheckResult best_sensitivity_constant() {
    bool ok = true;
    std::string detail;
    for (double nbar : {200.0, 1000.0}) {
        const auto best = best_sensitivity(InterferometerConfig::from_nbar(nbar), BinningScheme::binary(0.5),
                                           Observable::binary(1.0, 0.0));
        const double c = best.delta_phi * std::sqrt(nbar);
        ok = ok && std::fabs(c / 1.37 - 1.0) <= 0.05;
        detail += fmt("nbar=%g: dphi_min*sqrt(nbar)=%.4f at phi=%.4f; ", nbar, c, best.phi);
    }
    return {3, "best sensitivity 1.37/sqrt(nbar)", ok, detail};
}

CheckResult rayleigh_reference() {
    const double w = continuous_fwhm(InterferometerConfig::from_nbar(200.0));
    const double err = std::fabs(w - 2.0 * kPi / 3.0);
    return {4, "continuous FWHM 2pi/3", err <= 1e-9, fmt("FWHM = %.15f, |error| = %.3g", w, err)};
}

CheckResult super_resolution() {
    const auto cfg = InterferometerConfig::from_nbar(200.0);
    const double w = fwhm(cfg, BinningScheme::binary(0.05), Observable::binary(1.0, 0.0));
    const double target = kPi / std::sqrt(200.0);
    return {5, "narrow-bin FWHM pi/sqrt(nbar)", std::fabs(w / target - 1.0) <= 0.10,
            fmt("FWHM = %.5f, pi/sqrt(200) = %.5f, ratio = %.3f", w, target, w / target)};
}

CheckResult visibility_threshold() {
    const double n = visibility_boundary(0.5, 0.9);
    return {6, "visibility 0.9 boundary at a=1/2", n >= 5.6 && n <= 6.0,
            fmt("boundary nbar = %.4f (window [5.6, 6.0])", n)};
}

CheckResult dark_point() {
    const auto cfg = InterferometerConfig::from_nbar(200.0);
    const BinningScheme scheme(0.5, 3.8, 2);
    const Observable ones = Observable::ones(2);
    auto slope = [&](double phi) { return signal(cfg, scheme, ones, phi).slope; };
    const double step = 1e-4;
    double dark = std::numeric_limits<double>::quiet_NaN();
    for (double x = step; x < kPi; x += step) {
        if (slope(x) == 0.0) {
            dark = x;
            break;
        }
        if (std::signbit(slope(x)) != std::signbit(slope(x + step))) {
            dark = numerics::find_root(slope, Interval(x, x + step));
            break;
        }
    }
    const double ref = 3.8 / std::sqrt(200.0);
    return {7, "first dark point b/sqrt(nbar)", std::fabs(dark / ref - 1.0) <= 0.10,
            fmt("dark point = %.4f, b/sqrt(nbar) = %.4f", dark, ref)};
}

CheckResult crb_dominance() {
    RandomStream rng(2019, 8);
    const auto setups = three_setups();
    int violations = 0;
    int compared = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto& s = setups[i % setups.size()];
        const Observable obs = random_observable(rng, s.scheme.cutoff());
        const double phi = -kPi + 2.0 * kPi * rng.uniform();
        const double bound = crb(s.cfg, s.scheme, phi);
        const double d = error_propagation_sensitivity(s.cfg, s.scheme, obs, phi);
        if (std::isfinite(bound) && std::isfinite(d)) {
            ++compared;
            violations += bound > d + 1e-12 ? 1 : 0;
        }
    }
    return {8, "Cramer-Rao dominance", violations == 0,
            fmt("%d violations in %d finite comparisons", violations, compared)};
}

CheckResult data_processing() {
    int violations = 0;
    int compared = 0;
    for (const auto& s : three_setups()) {
        const int kf = s.scheme.cutoff();
        std::vector<double> central(2 * kf + 1, 0.0);
        central[kf] = 1.0;
        const std::vector<Observable> groupings = {Observable::ones(kf), Observable::alternating(kf),
                                                   Observable(central, 0.0)};
        for (double phi : offset_grid(500)) {
            const auto dist = outcome_distribution(s.cfg, s.scheme, phi);
            const double full = cfi(dist);
            for (const auto& g : groupings) {
                ++compared;
                violations += full * (1.0 + 1e-12) < binarized_cfi(dist, g) ? 1 : 0;
            }
        }
    }
    return {9, "data-processing inequality", violations == 0,
            fmt("%d violations in %d comparisons", violations, compared)};
}

CheckResult alternating_near_optimal() {
    const auto cfg = InterferometerConfig::from_nbar(200.0);
    const BinningScheme scheme(0.5, 3.8, 2);
    const Observable alt = Observable::alternating(2);
    const double cap = 10.0 * 1.37 / std::sqrt(200.0);
    int kept = 0;
    int good = 0;
    for (int i = 0; i < 2000; ++i) {
        const double phi = -kPi + 0.05 + (2.0 * kPi - 0.1) * i / 1999.0;
        const auto dist = outcome_distribution(cfg, scheme, phi);
        const double bound = crb_from_cfi(cfi(dist));
        if (bound > cap) {
            continue;
        }
        ++kept;
        good += error_propagation_sensitivity(signal(dist, alt)) / bound <= 1.25 ? 1 : 0;
    }
    const double fraction = kept > 0 ? double(good) / kept : 0.0;
    return {10, "alternating signs near the bound", fraction >= 0.90,
            fmt("%d of %d kept points (%.2f%%) within 1.25x", good, kept, 100.0 * fraction)};
}

CheckResult wigner_equivalence() {
    RandomStream rng(2019, 11);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const auto cfg = InterferometerConfig::from_nbar(std::array{10.0, 200.0, 1000.0}[i % 3]);
        const double phi = -kPi + 2.0 * kPi * rng.uniform();
        const double span = cfg.alpha0() / 2.0 + 4.0;
        const double p = -span + 2.0 * span * rng.uniform();
        worst = std::max(worst, std::fabs(wigner_oracle_pdf(cfg, phi, p) - quadrature_pdf(cfg, phi, p)));
    }
    return {11, "Wigner propagation matches quadrature density", worst <= 1e-10,
            fmt("max |difference| = %.3g over 1000 points", worst)};
}

CheckResult monte_carlo_calibration() {
    const auto cfg = InterferometerConfig::from_nbar(200.0);
    const BinningScheme scheme(0.5, 3.8, 2);
    const std::int64_t shots = 200;
    const int replicas = 10;
    std::vector<double> grid(41);
    for (int j = 0; j < 41; ++j) {
        grid[j] = -kPi + 2.0 * kPi * j / 40.0;
    }
    const auto curve = calibration_curve(cfg, scheme, grid, shots, replicas, 2019);
    int cells = 0;
    int inside = 0;
    for (const auto& point : curve) {
        const auto dist = outcome_distribution(cfg, scheme, point.phi);
        for (int k = 0; k < dist.size(); ++k) {
            const double p = dist.probs[k];
            const double se = std::sqrt(p * (1.0 - p) / double(shots * replicas));
            ++cells;
            inside += std::fabs(point.mean_frequency[k] - p) <= 3.0 * se ? 1 : 0;
        }
    }
    const double fraction = double(inside) / cells;
    return {12, "Monte Carlo calibration", fraction >= 0.95,
            fmt("%d of %d cells (%.2f%%) within 3 standard errors", inside, cells, 100.0 * fraction)};
}

CheckResult estimator_tracks_bound() {
    const auto cfg = InterferometerConfig::from_nbar(1000.0);
    const BinningScheme scheme(0.5, 3.2, 5);
    const Observable alt = Observable::alternating(5);
    const Interval branch = monotone_branch(cfg, scheme, alt, 0.1);
    int close = 0;
    int biased = 0;
    double worst = 0.0;
    for (int j = 0; j < 21; ++j) {
        const double phi = branch.lo() + branch.width() * (j + 1) / 22.0;
        const auto set = run_replicas(cfg, scheme, phi, 200, 400, grid_point_seed(2019, j));
        const auto rep = estimate(cfg, scheme, alt, set);
        const double ratio = rep.sigma / crb(cfg, scheme, phi);
        worst = std::max(worst, std::fabs(ratio - 1.0));
        close += std::fabs(ratio - 1.0) <= 0.25 ? 1 : 0;
        biased += std::fabs(rep.bias) < rep.std_dev ? 0 : 1;
    }
    return {13, "inversion estimator tracks the bound", close >= 17 && biased == 0,
            fmt("branch (%.4f, %.4f): %d of 21 points within 25%% (worst %.3f), %d biased points",
                branch.lo(), branch.hi(), close, worst, biased)};
}

CheckResult derivative_accuracy() {
    double worst = 0.0;
    int terms = 0;
    const std::vector<Setup> setups = {
        {InterferometerConfig::from_nbar(200.0), BinningScheme(0.5, 3.8, 2)},
        {InterferometerConfig::from_nbar(1000.0), BinningScheme(0.5, 3.2, 5)},
    };
    for (const auto& s : setups) {
        for (double phi : offset_grid(200)) {
            const auto dist = outcome_distribution(s.cfg, s.scheme, phi);
            for (int k = 0; k < dist.size(); ++k) {
                if (std::fabs(dist.probs[k]) < 1e-12) {
                    continue;
                }
                const auto id = s.scheme.outcome_at(k);
                const double fd = numerics::central_diff(
                    [&](double x) { return bin_probability(s.cfg, s.scheme, id, x); }, phi, 1e-5);
                ++terms;
                worst = std::max(worst, std::fabs(fd - dist.derivs[k]) / std::fabs(dist.derivs[k]));
            }
        }
    }
    return {14, "analytic derivatives match finite differences", worst <= 1e-6,
            fmt("max relative error = %.3g over %d terms", worst, terms)};
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

CheckResult simulate_determinism() {
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    const auto dir = std::filesystem::temp_directory_path() / ("mzi_determinism_" + std::to_string(stamp));
    std::filesystem::create_directories(dir);
    cli::RunConfig rc;
    rc.nbar = 200.0;
    rc.eigenvalues = "alternating";
    rc.steps = 41;
    rc.shots = 200;
    rc.replicas = 10;
    rc.seed = 2019;
    cli::run_simulate(rc, (dir / "first").string());
    cli::run_simulate(rc, (dir / "second").string());
    bool same = true;
    std::size_t bytes = 0;
    for (const std::string part : {"_calibration.csv", "_estimation.csv"}) {
        const std::string a = slurp(dir / ("first" + part));
        const std::string b = slurp(dir / ("second" + part));
        same = same && !a.empty() && a == b;
        bytes += a.size();
    }
    std::filesystem::remove_all(dir);
    return {15, "simulate output is byte-identical", same, fmt("%zu bytes compared", bytes)};
}

}  // namespace

CheckResult run_check(int id) {
    static const std::vector<std::function<CheckResult()>> checks = {
        binary_saturation,      eigenvalue_independence, best_sensitivity_constant, rayleigh_reference,
        super_resolution,       visibility_threshold,    dark_point,                crb_dominance,
        data_processing,        alternating_near_optimal, wigner_equivalence,       monte_carlo_calibration,
        estimator_tracks_bound, derivative_accuracy,     simulate_determinism,
    };
    if (id < 1 || id > kCheckCount) {
        throw InvalidConfig("no check with id " + std::to_string(id));
    }
    try {
        return checks[id - 1]();
    } catch (const std::exception& e) {
        return {id, "check " + std::to_string(id), false, std::string("threw: ") + e.what()};
    }
}

std::vector<CheckResult> run_all() {
    std::vector<CheckResult> results;
    for (int id = 1; id <= kCheckCount; ++id) {
        results.push_back(run_check(id));
    }
    return results;
}

std::vector<int> checks_for_figure(const std::string& figure) {
    if (figure == "fig1") return {1, 2, 3, 4, 5, 6};
    if (figure == "fig2") return {11, 12, 14};
    if (figure == "fig3") return {7, 8, 9, 10};
    if (figure == "fig4") return {13, 15};
    return {};
}

std::string format_line(const CheckResult& result) {
    return fmt("[%s] %2d %s: ", result.passed ? "PASS" : "FAIL", result.id, result.name.c_str()) +
           result.detail;
}

}  // namespace mzi::acceptance
