#include "lyapcert/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "lyapcert/report.hpp"
#include "lyapcert/systemfile.hpp"

namespace lyapcert::cli {

namespace {

/// Flags shared by every subcommand; std::nullopt means "not given".
struct CommonFlags {
    std::string file;
    std::optional<std::uint64_t> seed;
    std::optional<double> quad_tol;
    std::optional<double> margin;
    std::optional<double> horizon;
    std::optional<int> samples;
    std::string out_path;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("file", flags.file,
                    "system file (JSON), or the name of a builtin system")
        ->required();
    cmd->add_option("--seed", flags.seed, "sampling/simulation seed (also: LYAPCERT_SEED)");
    cmd->add_option("--quad-tol", flags.quad_tol, "ray quadrature tolerance (default 1e-10)");
    cmd->add_option("--margin", flags.margin, "strict-negativity safety margin (default 1e-9)");
    cmd->add_option("--horizon", flags.horizon,
                    "sampled radius standing in for unbounded domains (default 100)");
    cmd->add_option("--samples", flags.samples, "approximate sample-count target per shell");
    cmd->add_option("--out", flags.out_path, "write the JSON report to this path");
}

SystemFile resolve_file(const std::string& arg) {
    for (const std::string& name : builtin_names()) {
        if (arg == name) return builtin_system_file(name);
    }
    if (!std::filesystem::exists(arg)) {
        throw InputError("no such file or builtin: '" + arg + "' (builtins: example-2.1, "
                         "example-2.2, hopfield-2)");
    }
    return load_system_file(arg);
}

AnalysisConfig make_config(const SystemFile& file, const CommonFlags& flags) {
    AnalysisConfig cfg;
    // precedence: defaults < environment < file overrides < flags
    if (const char* env = std::getenv("LYAPCERT_SEED")) {
        try {
            std::size_t used = 0;
            const std::string text(env);
            const unsigned long long v = std::stoull(text, &used);
            if (used != text.size()) throw std::invalid_argument(text);
            cfg.seed = v;
        } catch (const std::exception&) {
            throw InputError(std::string("LYAPCERT_SEED is not a non-negative integer: '") +
                             env + "'");
        }
    }
    apply_overrides(cfg, file.overrides);
    if (flags.seed) cfg.seed = *flags.seed;
    if (flags.quad_tol) {
        if (!(*flags.quad_tol > 0.0)) throw InputError("--quad-tol must be positive");
        cfg.quad_tol = *flags.quad_tol;
    }
    if (flags.margin) {
        if (*flags.margin < 0.0) throw InputError("--margin must be non-negative");
        cfg.margin = *flags.margin;
    }
    if (flags.horizon) {
        if (!(*flags.horizon > 0.0)) throw InputError("--horizon must be positive");
        cfg.horizon = *flags.horizon;
    }
    if (flags.samples) {
        if (*flags.samples < 1) throw InputError("--samples must be positive");
        cfg.samples = *flags.samples;
    }
    return cfg;
}

void write_output(const std::string& text, const CommonFlags& flags, std::ostream& out) {
    if (flags.out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(flags.out_path);
    if (!file) {
        throw Error("cannot write report to " + flags.out_path);
    }
    file << text;
}

Vec parse_x0(const std::string& text) {
    Vec values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(item, &used));
            while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) {
                ++used;
            }
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw InputError("--x0 component '" + item + "' is not a number");
        }
    }
    if (values.empty()) {
        throw InputError("--x0 must list comma-separated coordinates");
    }
    for (double v : values) {
        if (!std::isfinite(v)) throw InputError("--x0 must be finite");
    }
    return values;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"stability certification for nonlinear autonomous systems"};
    app.name(k_tool_name);
    app.require_subcommand(1);

    CommonFlags analyze_flags;
    auto* analyze = app.add_subcommand(
        "analyze", "classify stability and write the full JSON report");
    add_common(analyze, analyze_flags);

    CommonFlags region_flags;
    double rmax = 10.0;
    double rtol = 1e-2;
    auto* region = app.add_subcommand(
        "region", "search for the largest certifiable ball radius");
    add_common(region, region_flags);
    region->add_option("--rmax", rmax, "search upper bound (default 10)");
    region->add_option("--tol", rtol, "radius tolerance (default 0.01)");

    CommonFlags sim_flags;
    std::string x0_text;
    int random_count = 0;
    double tend = 20.0;
    double sim_radius = -1.0;
    std::string csv_prefix;
    std::string integrator_name = "rkf45";
    auto* simulate = app.add_subcommand(
        "simulate", "integrate trajectories and summarize convergence");
    add_common(simulate, sim_flags);
    simulate->add_option("--x0", x0_text, "initial state, comma separated (e.g. 2,2)");
    simulate->add_option("--random", random_count, "number of seeded-random initial states");
    simulate->add_option("--tend", tend, "integration end time (default 20)");
    simulate->add_option("--radius", sim_radius,
                         "ball radius for --random states (default: system ball or 5)");
    simulate->add_option("--csv", csv_prefix, "write one <prefix>NNN.csv per trajectory");
    simulate->add_option("--integrator", integrator_name, "rk4 or rkf45 (default rkf45)");

    CommonFlags beta_flags;
    int grid = 0;
    double extent = -1.0;
    std::string beta_csv_path;
    auto* beta_field = app.add_subcommand(
        "beta-field", "export the beta bounds as CSV for external plotting");
    add_common(beta_field, beta_flags);
    beta_field->add_option("--grid", grid, "N x N grid export (2-dimensional systems)");
    beta_field->add_option("--extent", extent,
                           "half-width of the grid box (default: ball radius or horizon)");
    beta_field->add_option("--csv", beta_csv_path, "write the CSV to this path");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return k_exit_certified;
    } catch (const CLI::ParseError& e) {
        err << "input error: " << e.what() << "\n";
        return k_exit_input_error;
    }

    try {
        if (analyze->parsed()) {
            const SystemFile file = resolve_file(analyze_flags.file);
            const AnalysisConfig cfg = make_config(file, analyze_flags);
            const LoadedSystem loaded = instantiate(file);
            const AnalyzeOutcome outcome = run_analyze(loaded, cfg);
            write_output(outcome.report_json, analyze_flags, out);
            const bool certified =
                outcome.classification == Classification::asymptotically_stable ||
                outcome.classification == Classification::globally_asymptotically_stable;
            return certified ? k_exit_certified : k_exit_inconclusive;
        }

        if (region->parsed()) {
            if (!(rmax > 0.0)) throw InputError("--rmax must be positive");
            if (!(rtol > 0.0)) throw InputError("--tol must be positive");
            const SystemFile file = resolve_file(region_flags.file);
            const AnalysisConfig cfg = make_config(file, region_flags);
            const LoadedSystem loaded = instantiate(file);
            const RegionOutcome outcome = run_region(loaded, cfg, rmax, rtol);
            out << format_double(outcome.radius) << "\n";
            if (!region_flags.out_path.empty()) {
                std::ofstream report(region_flags.out_path);
                if (!report) throw Error("cannot write report to " + region_flags.out_path);
                report << outcome.report_json;
            }
            return k_exit_certified;
        }

        if (simulate->parsed()) {
            const SystemFile file = resolve_file(sim_flags.file);
            const AnalysisConfig cfg = make_config(file, sim_flags);
            const LoadedSystem loaded = instantiate(file);

            SimulateRequest request;
            if (!x0_text.empty()) request.x0 = parse_x0(x0_text);
            request.random_count = random_count;
            if (simulate->count("--radius") > 0) {
                if (!(sim_radius > 0.0)) throw InputError("--radius must be positive");
                request.radius = sim_radius;
            }
            if (!(tend > 0.0)) throw InputError("--tend must be positive");
            request.t_end = tend;
            if (!csv_prefix.empty()) request.csv_prefix = csv_prefix;
            if (integrator_name == "rk4") {
                request.integrator = IntegratorKind::rk4;
            } else if (integrator_name == "rkf45") {
                request.integrator = IntegratorKind::rkf45;
            } else {
                throw InputError("--integrator must be rk4 or rkf45");
            }

            const SimulateOutcome outcome = run_simulate(loaded, cfg, request);
            write_output(outcome.summary_json, sim_flags, out);
            return k_exit_certified;
        }

        if (beta_field->parsed()) {
            const SystemFile file = resolve_file(beta_flags.file);
            const AnalysisConfig cfg = make_config(file, beta_flags);
            const LoadedSystem loaded = instantiate(file);

            std::string csv;
            if (beta_field->count("--grid") > 0) {
                if (grid < 2) throw InputError("--grid needs at least 2 points per axis");
                double half = extent;
                if (beta_field->count("--extent") > 0 && !(extent > 0.0)) {
                    throw InputError("--extent must be positive");
                }
                if (half <= 0.0) {
                    half = loaded.system.ball_radius().value_or(cfg.horizon);
                }
                csv = beta_field_grid_csv(loaded, cfg, grid, half);
            } else {
                csv = beta_field_samples_csv(loaded, cfg);
            }
            if (beta_csv_path.empty()) {
                out << csv;
            } else {
                std::ofstream file_out(beta_csv_path);
                if (!file_out) throw Error("cannot write CSV to " + beta_csv_path);
                file_out << csv;
            }
            return k_exit_certified;
        }

        err << "error: no subcommand selected\n";
        return k_exit_input_error;
    } catch (const InputError& e) {
        err << "input error: " << e.what() << "\n";
        return k_exit_input_error;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return k_exit_internal_error;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return k_exit_internal_error;
    }
}

} // namespace lyapcert::cli
