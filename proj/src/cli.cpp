#include "mzi/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "mzi/acceptance.hpp"
#include "mzi/csv.hpp"
#include "mzi/error.hpp"
#include "mzi/simulate.hpp"

namespace mzi::cli {

namespace {

constexpr double kPi = std::numbers::pi;

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos) {
        return "";
    }
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

Observable make_observable(const RunConfig& rc, int cutoff) {
    const int bins = 2 * cutoff + 1;
    if (rc.eigenvalues == "ones") {
        return Observable::ones(cutoff, rc.mu_minus);
    }
    if (rc.eigenvalues == "alternating") {
        return Observable::alternating(cutoff, rc.mu_minus);
    }
    std::vector<double> values;
    if (rc.eigenvalues == "regression") {
        values = Observable::regression_vector().values();
        values.pop_back();
    } else {
        values = parse_number_list(rc.eigenvalues);
    }
    if (static_cast<int>(values.size()) != bins) {
        throw InvalidConfig("eigenvalue list has " + std::to_string(values.size()) +
                            " entries but the scheme has " + std::to_string(bins) +
                            " bins (2*kf+1)");
    }
    return Observable(values, rc.mu_minus);
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        throw Error("cannot open " + path.string() + " for writing");
    }
    return file;
}

std::vector<std::string> outcome_labels(const BinningScheme& scheme, const std::string& prefix,
                                        const std::string& suffix) {
    std::vector<std::string> names;
    for (const auto& id : scheme.alphabet()) {
        names.push_back(prefix + (id.is_leftover() ? std::string("leftover")
                                                   : std::to_string(id.k())) + suffix);
    }
    return names;
}

std::vector<double> default_nbar_axis() {
    std::vector<double> axis;
    for (int i = 0; i < 40; ++i) {
        axis.push_back(std::pow(10.0, std::log10(400.0) * i / 39.0));
    }
    return axis;
}

std::vector<double> default_a_axis() { return linspace(0.05, 1.5, 30); }

}  // namespace

std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (item.empty() || used != item.size()) {
            throw InvalidConfig("not a number list: '" + text + "'");
        }
        values.push_back(v);
    }
    if (values.empty()) {
        throw InvalidConfig("empty number list");
    }
    return values;
}

std::vector<double> linspace(double lo, double hi, int count) {
    if (count == 1) {
        return {lo};
    }
    std::vector<double> v(count);
    for (int i = 0; i < count; ++i) {
        v[i] = lo + (hi - lo) * i / (count - 1);
    }
    v.back() = hi;
    return v;
}

Resolved resolve(const RunConfig& rc) {
    if (rc.nbar && rc.alpha0) {
        throw InvalidConfig("give either --nbar or --alpha0, not both");
    }
    const InterferometerConfig cfg = rc.alpha0 ? InterferometerConfig::from_alpha0(*rc.alpha0)
                                               : InterferometerConfig::from_nbar(rc.nbar.value_or(200.0));
    if (!(rc.a > 0.0)) {
        throw InvalidScheme("bin half-width a must be positive");
    }
    if (!(rc.b > 2.0 * rc.a)) {
        throw InvalidScheme("bin spacing b must exceed 2a so bins do not overlap");
    }
    if (rc.kf && *rc.kf < 0) {
        throw InvalidScheme("cutoff kf must be non-negative");
    }
    if (rc.shots <= 0) {
        throw InvalidConfig("shots N must be positive");
    }
    if (rc.replicas <= 0) {
        throw InvalidConfig("replicas M must be positive");
    }
    if (rc.steps < 1) {
        throw InvalidConfig("steps must be at least 1");
    }
    if (rc.steps > 1 && !(rc.phi_min < rc.phi_max)) {
        throw InvalidConfig("phi-min must be below phi-max");
    }
    const int cutoff = rc.kf.value_or(default_cutoff(cfg, rc.a, rc.b));
    const BinningScheme scheme(rc.a, rc.b, cutoff);
    return Resolved{cfg, scheme, make_observable(rc, cutoff), linspace(rc.phi_min, rc.phi_max, rc.steps)};
}

void write_probs(const Resolved& r, std::ostream& out) {
    csv::Writer w(out);
    std::vector<std::string> names{"phi"};
    for (const auto& n : outcome_labels(r.scheme, "P(", ")")) {
        names.push_back(n);
    }
    w.header(names);
    for (double phi : r.phi_grid) {
        const auto dist = outcome_distribution(r.cfg, r.scheme, phi);
        std::vector<double> row{phi};
        row.insert(row.end(), dist.probs.begin(), dist.probs.end());
        w.row(row);
    }
}

void write_signal(const Resolved& r, std::ostream& out) {
    csv::Writer w(out);
    w.header({"phi", "signal_mean", "delta_phi", "crb"});
    for (double phi : r.phi_grid) {
        const auto dist = outcome_distribution(r.cfg, r.scheme, phi);
        const auto s = signal(dist, r.obs);
        w.row({phi, s.mean, error_propagation_sensitivity(s), crb_from_cfi(cfi(dist))});
    }
}

void write_sweep(const std::vector<double>& nbar_axis, const std::vector<double>& a_axis,
                 std::ostream& out) {
    const SweepGrid grid = sweep(nbar_axis, a_axis);
    csv::Writer w(out);
    w.header({"nbar", "a", "resolution_ratio", "sensitivity_ratio", "visibility"});
    for (std::size_t i = 0; i < nbar_axis.size(); ++i) {
        for (std::size_t j = 0; j < a_axis.size(); ++j) {
            w.row({nbar_axis[i], a_axis[j], grid.resolution_ratio[i][j], grid.sensitivity_ratio[i][j],
                   grid.visibility[i][j]});
        }
    }
}

void write_calibration(const Resolved& r, std::int64_t shots, int replicas, std::uint64_t seed,
                       std::ostream& out) {
    const auto curve = calibration_curve(r.cfg, r.scheme, r.phi_grid, shots, replicas, seed);
    csv::Writer w(out);
    std::vector<std::string> names{"phi"};
    const auto freq = outcome_labels(r.scheme, "freq(", ")");
    const auto sd = outcome_labels(r.scheme, "std(", ")");
    names.insert(names.end(), freq.begin(), freq.end());
    names.insert(names.end(), sd.begin(), sd.end());
    w.header(names);
    for (const auto& point : curve) {
        std::vector<double> row{point.phi};
        row.insert(row.end(), point.mean_frequency.begin(), point.mean_frequency.end());
        row.insert(row.end(), point.std_dev.begin(), point.std_dev.end());
        w.row(row);
    }
}

void write_estimation(const Resolved& r, std::int64_t shots, int replicas, std::uint64_t seed,
                      std::ostream& out) {
    csv::Writer w(out);
    w.header({"phi", "mean_signal", "sigma", "crb", "bias", "std_dev", "mean_estimate", "clamped",
              "error"});
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t j = 0; j < r.phi_grid.size(); ++j) {
        const double phi = r.phi_grid[j];
        const auto set = run_replicas(r.cfg, r.scheme, phi, shots, replicas, grid_point_seed(seed, j));
        const double bound = crb(r.cfg, r.scheme, phi);
        std::vector<double> values;
        std::string clamped = "0";
        std::string error;
        try {
            const auto rep = estimate(r.cfg, r.scheme, r.obs, set);
            values = {phi, rep.mean_signal, rep.sigma, bound, rep.bias, rep.std_dev, rep.mean_estimate};
            clamped = std::to_string(rep.clamp_count);
        } catch (const NonMonotoneBranch&) {
            double mean = 0.0;
            for (const auto& rec : set.records) {
                mean += measured_signal(rec, r.obs);
            }
            values = {phi, mean / replicas, nan, bound, nan, nan, nan};
            error = "non_monotone_branch";
        }
        std::vector<std::string> cells;
        for (double v : values) {
            cells.push_back(csv::format_number(v));
        }
        cells.push_back(clamped);
        cells.push_back(error);
        w.row(cells);
    }
}

void run_simulate(const RunConfig& rc, const std::string& prefix) {
    const Resolved r = resolve(rc);
    auto cal = open_output(prefix + "_calibration.csv");
    write_calibration(r, rc.shots, rc.replicas, rc.seed, cal);
    auto est = open_output(prefix + "_estimation.csv");
    write_estimation(r, rc.shots, rc.replicas, rc.seed, est);
}

bool reproduce(const std::string& figure, const std::filesystem::path& dir, std::ostream& log) {
    const auto ids = acceptance::checks_for_figure(figure);
    if (ids.empty()) {
        throw InvalidConfig("unknown figure '" + figure + "' (expected fig1, fig2, fig3 or fig4)");
    }
    std::filesystem::create_directories(dir);
    auto emit = [&](const std::string& name, auto&& writer) {
        auto file = open_output(dir / name);
        writer(file);
        log << "wrote " << (dir / name).string() << '\n';
    };

    if (figure == "fig1") {
        RunConfig rc;
        rc.nbar = 200.0;
        rc.a = 0.5;
        rc.kf = 0;
        rc.eigenvalues = csv::format_number(1.0 / numerics::erf(std::numbers::sqrt2 * rc.a));
        const Resolved r = resolve(rc);
        emit("fig1_binary.csv", [&](std::ostream& o) { write_signal(r, o); });
        emit("fig1_sweep.csv", [&](std::ostream& o) { write_sweep(default_nbar_axis(), default_a_axis(), o); });
    } else if (figure == "fig2") {
        RunConfig rc;
        rc.nbar = 200.0;
        const Resolved dense = resolve(rc);
        emit("fig2_probabilities.csv", [&](std::ostream& o) { write_probs(dense, o); });
        rc.steps = 41;
        const Resolved coarse = resolve(rc);
        emit("fig2_calibration.csv", [&](std::ostream& o) { write_calibration(coarse, 200, 10, rc.seed, o); });
    } else if (figure == "fig3") {
        for (const std::string spec : {"ones", "regression", "alternating"}) {
            RunConfig rc;
            rc.nbar = 200.0;
            rc.eigenvalues = spec;
            const Resolved r = resolve(rc);
            emit("fig3_" + spec + ".csv", [&](std::ostream& o) { write_signal(r, o); });
        }
    } else {
        RunConfig rc;
        rc.nbar = 1000.0;
        rc.b = 3.2;
        rc.kf = 5;
        rc.eigenvalues = "alternating";
        rc.shots = 200;
        rc.replicas = 400;
        rc.steps = 81;
        rc.phi_min = -kPi / 2;
        rc.phi_max = kPi / 2;
        const Resolved r = resolve(rc);
        emit("fig4_calibration.csv", [&](std::ostream& o) { write_calibration(r, rc.shots, rc.replicas, rc.seed, o); });
        emit("fig4_estimation.csv", [&](std::ostream& o) { write_estimation(r, rc.shots, rc.replicas, rc.seed, o); });
    }

    bool all = true;
    std::ostringstream summary;
    for (int id : ids) {
        const auto result = acceptance::run_check(id);
        all = all && result.passed;
        summary << acceptance::format_line(result) << '\n';
    }
    auto file = open_output(dir / (figure + "_summary.txt"));
    file << summary.str();
    log << summary.str();
    return all;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Phase estimation with binned homodyne detection in a coherent-light interferometer"};
    app.set_config("--config", "", "TOML configuration file; command-line flags override it");
    app.require_subcommand(1);
    app.fallthrough();

    RunConfig rc;
    double nbar = 0.0;
    double alpha0 = 0.0;
    int kf = 0;
    std::string nbar_axis;
    std::string a_axis;
    std::string figure;

    auto* nbar_opt = app.add_option("--nbar", nbar, "mean photon number (default 200)");
    auto* alpha_opt = app.add_option("--alpha0", alpha0, "coherent amplitude");
    nbar_opt->excludes(alpha_opt);
    app.add_option("--a", rc.a, "bin half-width")->capture_default_str();
    app.add_option("--b", rc.b, "bin spacing")->capture_default_str();
    auto* kf_opt = app.add_option("--kf", kf, "cutoff index (default: round(alpha0 / 2b))");
    app.add_option("--eigenvalues", rc.eigenvalues, "ones, alternating, regression or a comma list")
        ->capture_default_str();
    app.add_option("--mu-minus", rc.mu_minus, "eigenvalue of the leftover outcome")->capture_default_str();
    app.add_option("--phi-min", rc.phi_min)->capture_default_str();
    app.add_option("--phi-max", rc.phi_max)->capture_default_str();
    app.add_option("--steps", rc.steps, "phase grid points")->capture_default_str();
    app.add_option("--shots", rc.shots, "shots N per replica")->capture_default_str();
    app.add_option("--replicas", rc.replicas, "replicas M")->capture_default_str();
    app.add_option("--seed", rc.seed, "master seed")->capture_default_str();
    app.add_option("--out", rc.out, "output file, prefix (simulate) or directory (reproduce)");
    app.add_option("--nbar-axis", nbar_axis, "sweep: comma list of nbar values");
    app.add_option("--a-axis", a_axis, "sweep: comma list of bin half-widths");

    auto* probs = app.add_subcommand("probs", "outcome probabilities on the phase grid");
    auto* sig = app.add_subcommand("signal", "signal, sensitivity and Cramer-Rao bound on the phase grid");
    auto* swp = app.add_subcommand("sweep", "resolution, sensitivity and visibility over (nbar, a)");
    auto* sim = app.add_subcommand("simulate", "Monte Carlo calibration and inversion estimates");
    auto* rep = app.add_subcommand("reproduce", "write a figure's datasets and run its checks");
    rep->add_option("figure", figure, "fig1, fig2, fig3 or fig4")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInvalidConfig;
    }
    if (nbar_opt->count() > 0) {
        rc.nbar = nbar;
    }
    if (alpha_opt->count() > 0) {
        rc.alpha0 = alpha0;
    }
    if (kf_opt->count() > 0) {
        rc.kf = kf;
    }

    try {
        if (*rep) {
            const std::filesystem::path dir = rc.out.empty() ? std::string("reproduce_out") : rc.out;
            return reproduce(figure, dir, out) ? kExitOk : kExitCheckFailed;
        }
        if (*swp) {
            const auto n_axis = nbar_axis.empty() ? default_nbar_axis() : parse_number_list(nbar_axis);
            const auto w_axis = a_axis.empty() ? default_a_axis() : parse_number_list(a_axis);
            resolve(rc);
            if (rc.out.empty()) {
                write_sweep(n_axis, w_axis, out);
            } else {
                auto file = open_output(rc.out);
                write_sweep(n_axis, w_axis, file);
            }
            return kExitOk;
        }
        if (*sim) {
            run_simulate(rc, rc.out.empty() ? "simulate" : rc.out);
            return kExitOk;
        }
        const Resolved r = resolve(rc);
        auto write = [&](std::ostream& o) { *probs ? write_probs(r, o) : write_signal(r, o); };
        if (rc.out.empty()) {
            write(out);
        } else {
            auto file = open_output(rc.out);
            write(file);
        }
        (void)sig;
        return kExitOk;
    } catch (const InvalidConfig& e) {
        err << "invalid config: " << e.what() << '\n';
    } catch (const InvalidScheme& e) {
        err << "invalid scheme: " << e.what() << '\n';
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
    }
    return kExitInvalidConfig;
}

}  // namespace mzi::cli
