#include "lyapcert/report.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <random>

#include "json.hpp"

namespace lyapcert {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

json radius_json(double r) {
    if (std::isinf(r)) return json("unbounded");
    return json(r);
}

json vec_json(const Vec& v) {
    json a = json::array();
    for (double x : v) a.push_back(x);
    return a;
}

json evidence_json(const BetaEvidence& ev) {
    json j;
    j["sample_count"] = ev.sample_count;
    j["margin"] = ev.margin;
    j["beta_sup"] = vec_json(ev.sup_beta);
    json arg = json::array();
    for (const Vec& p : ev.argmax) arg.push_back(vec_json(p));
    j["argmax"] = arg;
    return j;
}

json witness_json(const Witness& w) {
    json j;
    j["point"] = vec_json(w.point);
    j["component"] = w.component + 1; // 1-based, matching x1..xn
    j["beta"] = w.beta;
    return j;
}

json verdict_json(const StabilityVerdict& v) {
    json j;
    j["classification"] = to_string(v.classification);
    j["certified_radius"] = radius_json(v.certified_radius);
    if (v.horizon) j["horizon"] = *v.horizon;
    j["conditions"] = {{"a", v.condition_a}, {"b", v.condition_b}, {"c", v.condition_c}};
    j["evidence"] = evidence_json(v.evidence);
    if (v.violation_witness) j["violation_witness"] = witness_json(*v.violation_witness);
    return j;
}

json lakshmikantham_json(const LakshmikanthamVerdict& v) {
    json j;
    j["classification"] = to_string(v.classification);
    if (v.horizon) j["horizon"] = *v.horizon;
    j["evidence"] = evidence_json(v.evidence);
    if (v.witness) j["witness"] = witness_json(*v.witness);
    if (!v.note.empty()) j["note"] = v.note;
    return j;
}

json krasovskii_json(const KrasovskiiReport& r) {
    json j;
    j["outcome"] = to_string(r.outcome);
    j["max_eig_field"] = r.max_eig_field;
    j["sample_count"] = r.sample_count;
    json rows = json::array();
    for (int i = 0; i < r.p.rows; ++i) {
        json row = json::array();
        for (int c = 0; c < r.p.cols; ++c) row.push_back(r.p(i, c));
        rows.push_back(row);
    }
    j["P"] = rows;
    if (r.witness) j["witness"] = vec_json(*r.witness);
    return j;
}

json summary_json(const ExperimentSummary& s) {
    json j;
    j["count"] = s.count;
    j["converged"] = s.converged;
    j["diverged"] = s.diverged;
    j["max_terminal_norm"] = s.max_terminal_norm;
    j["v_monotonicity_violations"] = s.v_violations;
    j["convergence_threshold"] = s.convergence_threshold;
    return j;
}

json system_echo(const LoadedSystem& loaded) {
    json j;
    j["input"] = json::parse(loaded.file.canonical_json);
    j["label"] = loaded.system.label();
    j["n"] = loaded.system.dim();
    j["ball_radius"] = loaded.system.ball_radius() ? json(*loaded.system.ball_radius())
                                                   : json("unbounded");
    return j;
}

} // namespace

void apply_overrides(AnalysisConfig& cfg, const AnalysisOverrides& o) {
    if (o.quad_tol) cfg.quad_tol = *o.quad_tol;
    if (o.margin) cfg.margin = *o.margin;
    if (o.horizon) cfg.horizon = *o.horizon;
    if (o.seed) cfg.seed = *o.seed;
    if (o.samples) cfg.samples = *o.samples;
}

SamplingPlan make_plan(const AnalysisConfig& cfg) {
    SamplingPlan plan;
    plan.seed = cfg.seed;
    plan.margin = cfg.margin;
    plan.horizon = cfg.horizon;
    if (cfg.samples) {
        const int target = *cfg.samples;
        plan.polar_radii = std::max(4, static_cast<int>(std::round(std::sqrt(target / 2.0))));
        plan.polar_directions = 2 * plan.polar_radii;
        plan.halton_per_shell = std::max(16, target);
    }
    return plan;
}

QuadratureOptions make_quad(const AnalysisConfig& cfg) {
    QuadratureOptions q;
    q.tol = cfg.quad_tol;
    return q;
}

AnalyzeOutcome run_analyze(const LoadedSystem& loaded, const AnalysisConfig& cfg) {
    const SamplingPlan plan = make_plan(cfg);
    const QuadratureOptions quad = make_quad(cfg);
    const SystemDef& sys = loaded.system;

    json timings;
    const auto t_total = Clock::now();

    auto t0 = Clock::now();
    const StabilityVerdict theorem2 = classify(sys, plan, quad);
    timings["theorem2_ms"] = elapsed_ms(t0);

    t0 = Clock::now();
    const LakshmikanthamVerdict laks = lakshmikantham_classify(sys, plan, quad);
    timings["lakshmikantham_ms"] = elapsed_ms(t0);

    t0 = Clock::now();
    const KrasovskiiReport kras = krasovskii_check(sys, std::nullopt, plan);
    timings["krasovskii_ms"] = elapsed_ms(t0);

    json report;
    report["tool_version"] = std::string(k_tool_name) + " " + k_tool_version;
    report["seed"] = cfg.seed;
    report["system"] = system_echo(loaded);
    report["verdicts"] = {{"theorem2", verdict_json(theorem2)},
                          {"lakshmikantham", lakshmikantham_json(laks)},
                          {"krasovskii", krasovskii_json(kras)}};
    report["certified_radius"] = radius_json(theorem2.certified_radius);

    t0 = Clock::now();
    const bool certified =
        theorem2.classification == Classification::asymptotically_stable ||
        theorem2.classification == Classification::globally_asymptotically_stable;
    if (certified && cfg.sim_count > 0) {
        const double radius = std::isinf(theorem2.certified_radius)
                                  ? 5.0
                                  : theorem2.certified_radius;
        const ExperimentSummary sim =
            convergence_experiment(sys, radius, cfg.sim_count, cfg.sim_tend, cfg.seed);
        json s = summary_json(sim);
        s["radius"] = radius;
        s["t_end"] = cfg.sim_tend;
        report["simulation"] = s;
    } else {
        report["simulation"] = {{"skipped", "no certified region to sample"}};
    }
    timings["simulation_ms"] = elapsed_ms(t0);

    timings["total_ms"] = elapsed_ms(t_total);
    report["timings"] = timings;

    return AnalyzeOutcome{report.dump(2) + "\n", theorem2.classification};
}

RegionOutcome run_region(const LoadedSystem& loaded, const AnalysisConfig& cfg, double r_max,
                         double tol) {
    const SamplingPlan plan = make_plan(cfg);
    const QuadratureOptions quad = make_quad(cfg);

    const auto t0 = Clock::now();
    const RadiusSearch search = certified_radius_search(loaded.system, r_max, tol, plan, quad);

    json report;
    report["tool_version"] = std::string(k_tool_name) + " " + k_tool_version;
    report["seed"] = cfg.seed;
    report["system"] = system_echo(loaded);
    report["certified_radius"] = search.radius;
    report["r_max"] = r_max;
    report["tol"] = tol;
    report["any_passed"] = search.any_passed;
    report["samples_evaluated"] = search.samples_evaluated;
    if (!search.diagnostic.empty()) report["diagnostic"] = search.diagnostic;
    if (search.first_violation) report["first_violation"] = witness_json(*search.first_violation);
    report["timings"] = {{"total_ms", elapsed_ms(t0)}};

    return RegionOutcome{search.radius, report.dump(2) + "\n"};
}

SimulateOutcome run_simulate(const LoadedSystem& loaded, const AnalysisConfig& cfg,
                             const SimulateRequest& request) {
    const SystemDef& sys = loaded.system;
    const int n = sys.dim();

    std::vector<Vec> starts;
    if (request.x0) {
        if (static_cast<int>(request.x0->size()) != n) {
            throw InputError("--x0 needs " + std::to_string(n) + " comma-separated values");
        }
        starts.push_back(*request.x0);
    } else {
        const int count = request.random_count;
        if (count < 1) {
            throw InputError("either --x0 or --random N is required");
        }
        const double radius =
            request.radius.value_or(sys.ball_radius() ? *sys.ball_radius() : 5.0);
        std::mt19937_64 rng(cfg.seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (int t = 0; t < count; ++t) {
            Vec x0(static_cast<std::size_t>(n), 0.0);
            double norm = 0.0;
            for (int i = 0; i < n; ++i) {
                x0[i] = normal(rng);
                norm += x0[i] * x0[i];
            }
            norm = std::sqrt(norm);
            const double r = radius * std::pow(unit(rng), 1.0 / n);
            if (norm > 0.0) {
                for (int i = 0; i < n; ++i) x0[i] *= r / norm;
            }
            starts.push_back(std::move(x0));
        }
    }

    IntegratorConfig icfg;
    icfg.kind = request.integrator;

    const auto t0 = Clock::now();
    SimulateOutcome outcome;
    json trajectories = json::array();
    int converged = 0;
    int diverged = 0;
    int v_violations = 0;
    double max_terminal = 0.0;
    constexpr double k_threshold = 1e-6;

    for (std::size_t idx = 0; idx < starts.size(); ++idx) {
        const TrajectoryRecord rec = integrate(sys, starts[idx], request.t_end, icfg);
        json tj;
        tj["x0"] = vec_json(starts[idx]);
        tj["terminal_norm"] = rec.terminal_norm;
        tj["steps"] = rec.times.size() - 1;
        tj["status"] = rec.status == TrajectoryStatus::diverged ? "diverged" : "completed";

        if (rec.status == TrajectoryStatus::diverged) {
            ++diverged;
        } else if (rec.terminal_norm < k_threshold) {
            ++converged;
        }
        max_terminal = std::max(max_terminal, rec.terminal_norm);
        int violations = 0;
        for (std::size_t k = 1; k < rec.v_values.size(); ++k) {
            if (rec.v_values[k] > rec.v_values[k - 1] + 1e-9) ++violations;
        }
        v_violations += violations;
        tj["v_monotonicity_violations"] = violations;

        if (request.csv_prefix) {
            char suffix[32];
            std::snprintf(suffix, sizeof suffix, "%03u.csv", static_cast<unsigned>(idx));
            const std::string path = *request.csv_prefix + suffix;
            std::ofstream out(path);
            if (!out) {
                throw Error("cannot write trajectory CSV: " + path);
            }
            out << trajectory_csv(rec);
            outcome.csv_files.push_back(path);
            tj["csv"] = path;
        }
        trajectories.push_back(tj);
    }

    json report;
    report["tool_version"] = std::string(k_tool_name) + " " + k_tool_version;
    report["seed"] = cfg.seed;
    report["system"] = system_echo(loaded);
    report["integrator"] = to_string(request.integrator);
    report["t_end"] = request.t_end;
    report["summary"] = {{"count", starts.size()},
                         {"converged", converged},
                         {"diverged", diverged},
                         {"max_terminal_norm", max_terminal},
                         {"v_monotonicity_violations", v_violations},
                         {"convergence_threshold", k_threshold}};
    report["trajectories"] = trajectories;
    report["timings"] = {{"total_ms", elapsed_ms(t0)}};

    outcome.summary_json = report.dump(2) + "\n";
    return outcome;
}

namespace {

std::string beta_csv_header(int n) {
    std::string header;
    for (int i = 1; i <= n; ++i) header += "x" + std::to_string(i) + ",";
    for (int i = 1; i <= n; ++i) {
        header += "beta" + std::to_string(i);
        if (i < n) header += ",";
    }
    header += "\n";
    return header;
}

void beta_csv_row(const SystemDef& sys, const Vec& point, const QuadratureOptions& quad,
                  std::string& out) {
    const BetaProfile profile = beta_profile(sys, point, BetaVariant::theorem2, quad);
    for (double x : point) out += format_double(x) + ",";
    for (std::size_t i = 0; i < profile.values.size(); ++i) {
        out += format_double(profile.values[i]);
        if (i + 1 < profile.values.size()) out += ",";
    }
    out += "\n";
}

} // namespace

std::string beta_field_grid_csv(const LoadedSystem& loaded, const AnalysisConfig& cfg,
                                int grid, double extent) {
    const SystemDef& sys = loaded.system;
    if (sys.dim() != 2) {
        throw InputError("--grid requires a 2-dimensional system (n = " +
                         std::to_string(sys.dim()) + "); use --samples instead");
    }
    if (grid < 2) throw InputError("--grid needs at least 2 points per axis");
    if (!(extent > 0.0)) throw InputError("--extent must be positive");

    const QuadratureOptions quad = make_quad(cfg);
    std::string out = beta_csv_header(2);
    for (int iy = 0; iy < grid; ++iy) {
        for (int ix = 0; ix < grid; ++ix) {
            const double x = -extent + 2.0 * extent * ix / (grid - 1);
            const double y = -extent + 2.0 * extent * iy / (grid - 1);
            beta_csv_row(sys, {x, y}, quad, out);
        }
    }
    return out;
}

std::string beta_field_samples_csv(const LoadedSystem& loaded, const AnalysisConfig& cfg) {
    const SystemDef& sys = loaded.system;
    const SamplingPlan plan = make_plan(cfg);
    const QuadratureOptions quad = make_quad(cfg);
    const SampleSet set = sample_domain(plan, sys.dim(), sys.ball_radius());
    std::string out = beta_csv_header(sys.dim());
    for (const Vec& p : set.points) {
        beta_csv_row(sys, p, quad, out);
    }
    return out;
}

std::string trajectory_csv(const TrajectoryRecord& record) {
    std::string out = "t,";
    const std::size_t n = record.states.empty() ? 0 : record.states.front().size();
    for (std::size_t i = 1; i <= n; ++i) out += "x" + std::to_string(i) + ",";
    out += "V\n";
    for (std::size_t k = 0; k < record.times.size(); ++k) {
        out += format_double(record.times[k]) + ",";
        for (double x : record.states[k]) out += format_double(x) + ",";
        out += format_double(record.v_values[k]) + "\n";
    }
    return out;
}

} // namespace lyapcert
