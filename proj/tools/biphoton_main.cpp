// Command-line front end: simulate patterns, synthesize counts, check the
// validity conditions, fit, and compare quantum vs classical datasets.
// Exit codes: 0 ok, 1 input or condition failure, 2 numerical failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "biphoton/errors.hpp"
#include "biphoton/io.hpp"
#include "biphoton/patterns.hpp"
#include "biphoton/phase_matching.hpp"
#include "biphoton/propagator.hpp"
#include "biphoton/synth.hpp"
#include "biphoton/types.hpp"
#include "biphoton/version.hpp"

namespace fs = std::filesystem;
using namespace biphoton;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNumerical = 2;

fs::path out_dir() {
    if (const char* env = std::getenv("BIPHOTON_OUT_DIR")) return fs::path(env);
    return fs::path(".");
}

fs::path resolve_out(const std::string& out_flag, const std::string& fallback_name) {
    if (!out_flag.empty()) return fs::path(out_flag);
    return out_dir() / fallback_name;
}

fs::path with_extension(fs::path p, const char* ext) { return p.replace_extension(ext); }

fs::path manifest_path(const fs::path& primary) {
    fs::path p = primary;
    p.replace_extension();
    p += "_manifest.json";
    return p;
}

std::string joined_argv(int argc, char** argv) {
    std::ostringstream ss;
    for (int i = 0; i < argc; ++i) {
        if (i) ss << ' ';
        ss << argv[i];
    }
    return ss.str();
}

void finish_manifest(const fs::path& primary, const std::string& command,
                     const OpticalSetup& setup, std::optional<std::uint64_t> seed,
                     std::vector<std::string> artifacts) {
    io::RunManifest m;
    m.command = command;
    m.config_digest = io::config_digest(setup);
    m.seed = seed;
    const fs::path mp = manifest_path(primary);
    artifacts.push_back(mp.string());
    m.artifacts = std::move(artifacts);
    m.tool_version = kToolVersion;
    io::write_manifest(mp, m);
}

struct SimulateArgs {
    std::string config;
    std::string mode;
    std::string out;
    int n = 2;
    std::uint64_t samples = 1000000;
    std::uint64_t seed = 12345;
};

Pattern closed_form_pattern(const OpticalSetup& setup, const std::string& mode, int n) {
    const auto& grid = setup.detection.theta_grid;
    const double a = setup.mask.slit_width;
    const double b = setup.mask.slit_separation;
    const double lambda = setup.source.signal_wavelength;
    if (mode == "classical") {
        if (setup.mask.n_slits == 1) return patterns::single_slit_pattern(grid, a, lambda);
        return patterns::classical_pattern(grid, a, b, lambda);
    }
    if (mode == "biphoton") return patterns::biphoton_pattern(grid, a, b, lambda);
    return patterns::nphoton_pattern(grid, n, a, b, lambda);
}

int run_simulate(const SimulateArgs& args, const std::string& command) {
    const OpticalSetup setup = io::load_config(args.config);
    ensure_valid(setup);
    const fs::path csv = resolve_out(args.out, "pattern_" + args.mode + ".csv");
    const fs::path sidecar = with_extension(csv, ".json");
    std::optional<std::uint64_t> seed;

    if (args.mode == "numeric") {
        const auto res = propagator::coincidence_pattern_numeric(setup);
        io::write_pattern_csv(csv, res.pattern);
        io::write_pattern_sidecar(sidecar, res.pattern, nullptr, res.quadrature_order,
                                  res.estimated_error);
    } else if (args.mode == "monte-carlo") {
        const auto res = propagator::monte_carlo_pattern(setup, args.samples, args.seed);
        seed = args.seed;
        io::write_pattern_csv(csv, res.pattern);
        io::write_pattern_sidecar(sidecar, res.pattern, &res.standard_error);
    } else {
        const Pattern p = closed_form_pattern(setup, args.mode, args.n);
        io::write_pattern_csv(csv, p);
        io::write_pattern_sidecar(sidecar, p);
    }
    finish_manifest(csv, command, setup, seed, {csv.string(), sidecar.string()});
    std::cout << "wrote " << csv.string() << "\n";
    return kExitOk;
}

int run_check(const std::string& config, const std::string& out, const std::string& command) {
    const OpticalSetup setup = io::load_config(config);
    const ValidationReport validation = validate_setup(setup);
    const double dtheta = setup.source.emission_spread;
    const std::vector<phasematch::ConditionReport> conditions{
        phasematch::check_same_slit(dtheta, setup.mask.slit_separation,
                                    setup.mask.distance_from_crystal),
        phasematch::check_diffraction(dtheta, setup.mask.slit_width,
                                      setup.mask.distance_from_crystal),
        phasematch::check_erasure(dtheta, setup.source.signal_wavelength,
                                  setup.mask.slit_separation)};

    const std::string text = io::condition_reports_json(conditions, validation);
    const fs::path path = resolve_out(out, "check.json");
    {
        std::ofstream f(path);
        f << text << '\n';
    }
    std::cout << text << "\n";
    finish_manifest(path, command, setup, std::nullopt, {path.string()});

    bool ok = validation.passed();
    for (const auto& c : conditions) ok = ok && c.passed;
    return ok ? kExitOk : kExitInput;
}

struct SynthArgs {
    std::string config;
    std::string mode = "biphoton";
    std::string out;
    int n = 2;
    std::uint64_t samples = 1000000;
    std::uint64_t seed = 12345;
    double peak_rate = 100.0;
    double background_rate = 0.0;
    double integration_time = 1.0;
};

int run_synth(const SynthArgs& args, const std::string& command) {
    const OpticalSetup setup = io::load_config(args.config);
    ensure_valid(setup);
    Pattern p;
    if (args.mode == "numeric") {
        p = propagator::coincidence_pattern_numeric(setup).pattern;
    } else if (args.mode == "monte-carlo") {
        p = propagator::monte_carlo_pattern(setup, args.samples, args.seed).pattern;
    } else {
        p = closed_form_pattern(setup, args.mode, args.n);
    }
    const auto counts = synth::simulate_counts(p, args.peak_rate, args.background_rate,
                                               args.integration_time, args.seed);
    const fs::path csv = resolve_out(args.out, "counts_" + args.mode + ".csv");
    io::write_counts_csv(csv, counts);
    finish_manifest(csv, command, setup, args.seed, {csv.string()});
    std::cout << "wrote " << csv.string() << "\n";
    return kExitOk;
}

std::set<std::string> parse_fix(const std::string& fix) {
    std::set<std::string> out;
    std::stringstream ss(fix);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.insert(item);
    return out;
}

int run_fit(const std::string& data_path, const std::string& config, const std::string& out,
            const std::string& fix, const std::string& command) {
    const OpticalSetup setup = io::load_config(config);
    const auto data = io::read_counts_csv(data_path);
    const auto fit = synth::fit_pattern(data, setup.mask, parse_fix(fix));
    const std::string text = io::fit_result_json(fit);
    const fs::path path = resolve_out(out, "fit.json");
    {
        std::ofstream f(path);
        f << text << '\n';
    }
    std::cout << text << "\n";
    finish_manifest(path, command, setup, std::nullopt, {path.string()});
    return fit.converged ? kExitOk : kExitNumerical;
}

int run_compare(const std::string& quantum_path, const std::string& classical_path,
                const std::string& config, const std::string& out,
                const std::string& command) {
    const OpticalSetup setup = io::load_config(config);
    const auto quantum = io::read_counts_csv(quantum_path);
    const auto classical = io::read_counts_csv(classical_path);
    const auto report = synth::quantum_classical_comparison(quantum, classical, setup.mask);
    const std::string text = io::comparison_report_json(report);
    const fs::path path = resolve_out(out, "compare.json");
    {
        std::ofstream f(path);
        f << text << '\n';
    }
    std::cout << text << "\n";
    finish_manifest(path, command, setup, std::nullopt, {path.string()});
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Entangled-pair slit diffraction simulator and analysis toolkit"};
    app.require_subcommand(1);
    const std::string command = joined_argv(argc, argv);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Compute a pattern and write CSV + JSON");
    simulate->add_option("--config", sim.config, "Config JSON path")->required();
    simulate->add_option("--mode", sim.mode, "Pattern engine")
        ->required()
        ->check(CLI::IsMember({"classical", "biphoton", "nphoton", "numeric", "monte-carlo"}));
    simulate->add_option("--n", sim.n, "Photon number for mode=nphoton");
    simulate->add_option("--samples", sim.samples, "Sample count for mode=monte-carlo");
    simulate->add_option("--seed", sim.seed, "RNG seed for mode=monte-carlo");
    simulate->add_option("--out", sim.out, "Output CSV path");

    std::string check_config, check_out;
    auto* check = app.add_subcommand("check", "Validate setup and the validity conditions");
    check->add_option("--config", check_config, "Config JSON path")->required();
    check->add_option("--out", check_out, "Output JSON path");

    SynthArgs syn;
    auto* synth_cmd = app.add_subcommand("synth", "Generate Poisson counts from a pattern");
    synth_cmd->add_option("--config", syn.config, "Config JSON path")->required();
    synth_cmd->add_option("--mode", syn.mode, "Pattern engine")
        ->check(CLI::IsMember({"classical", "biphoton", "nphoton", "numeric", "monte-carlo"}));
    synth_cmd->add_option("--n", syn.n, "Photon number for mode=nphoton");
    synth_cmd->add_option("--samples", syn.samples, "Sample count for mode=monte-carlo");
    synth_cmd->add_option("--seed", syn.seed, "RNG seed");
    synth_cmd->add_option("--peak-rate", syn.peak_rate, "Counts per second at the peak");
    synth_cmd->add_option("--background-rate", syn.background_rate, "Counts per second offset");
    synth_cmd->add_option("--time", syn.integration_time, "Integration time per bin, s");
    synth_cmd->add_option("--out", syn.out, "Output counts CSV path");

    std::string fit_data, fit_config, fit_out, fit_fix = "a,b";
    auto* fit = app.add_subcommand("fit", "Fit the classical model to a counts CSV");
    fit->add_option("data", fit_data, "Counts CSV path")->required();
    fit->add_option("--config", fit_config, "Config JSON path")->required();
    fit->add_option("--fix", fit_fix, "Comma list of fixed parameters (default a,b)");
    fit->add_option("--out", fit_out, "Output JSON path");

    std::string cmp_q, cmp_c, cmp_config, cmp_out;
    auto* compare = app.add_subcommand("compare", "Quantum vs classical counts comparison");
    compare->add_option("quantum", cmp_q, "Quantum counts CSV")->required();
    compare->add_option("classical", cmp_c, "Classical counts CSV")->required();
    compare->add_option("--config", cmp_config, "Config JSON path")->required();
    compare->add_option("--out", cmp_out, "Output JSON path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (simulate->parsed()) return run_simulate(sim, command);
        if (check->parsed()) return run_check(check_config, check_out, command);
        if (synth_cmd->parsed()) return run_synth(syn, command);
        if (fit->parsed()) return run_fit(fit_data, fit_config, fit_out, fit_fix, command);
        if (compare->parsed()) return run_compare(cmp_q, cmp_c, cmp_config, cmp_out, command);
    } catch (const propagator::ConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const synth::FitNotConverged& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const InvalidParameter& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const UnphysicalKinematics& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitInput;
}
