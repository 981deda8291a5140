#include "alignlab/cli.hpp"

#include "alignlab/errors.hpp"
#include "alignlab/plot.hpp"
#include "alignlab/results.hpp"
#include "alignlab/scenario.hpp"
#include "alignlab/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cstring>
#include <cmath>
#include <filesystem>
#include <mutex>
#include <sstream>
#include <thread>

namespace alignlab {

namespace fs = std::filesystem;

namespace {

struct CommandSpec {
    std::string subcommand;
    std::string scenario;
    std::string out_dir = "out";
    std::vector<std::string> overrides;
    std::string suite;
    std::string axis;
    std::vector<double> values;
    int jobs = 1;
    bool seed_set = false;
    std::uint64_t seed = 0;
};

const char* kUsage =
    "usage: alignlab <solve|verify|sweep|plot> [options]\n"
    "  --scenario PATH   scenario file (for plot: results directory or csv)\n"
    "  --out DIR         output directory (default: out)\n"
    "  --set K=V         override a scenario key (repeatable), e.g. solver.rho=0.1\n"
    "  --suite FILTER    verify: run matching certificates only ('=name' exact)\n"
    "  --axis KEY        sweep: numeric scenario key, e.g. ideation.lambda\n"
    "  --values CSV      sweep: comma-separated axis values\n"
    "  --jobs N          sweep: concurrent runs (default 1)\n"
    "  --seed U64        override the scenario seed\n"
    "exit codes: 0 ok, 1 usage/io error, 2 not converged, 3 certificate failed\n";

bool parse_args(const std::vector<std::string>& args, CommandSpec& spec,
                std::ostream& err) {
    if (args.empty()) {
        err << kUsage;
        return false;
    }
    spec.subcommand = args[0];
    if (spec.subcommand != "solve" && spec.subcommand != "verify" &&
        spec.subcommand != "sweep" && spec.subcommand != "plot") {
        err << "unknown subcommand '" << spec.subcommand << "'\n" << kUsage;
        return false;
    }
    for (std::size_t i = 1; i < args.size(); ++i) {
        auto need_value = [&](const char* flag) -> const std::string* {
            if (i + 1 >= args.size()) {
                err << flag << " requires a value\n";
                return nullptr;
            }
            return &args[++i];
        };
        if (args[i] == "--scenario") {
            auto v = need_value("--scenario");
            if (!v) return false;
            spec.scenario = *v;
        } else if (args[i] == "--out") {
            auto v = need_value("--out");
            if (!v) return false;
            spec.out_dir = *v;
        } else if (args[i] == "--set") {
            auto v = need_value("--set");
            if (!v) return false;
            spec.overrides.push_back(*v);
        } else if (args[i] == "--suite") {
            auto v = need_value("--suite");
            if (!v) return false;
            spec.suite = *v;
        } else if (args[i] == "--axis") {
            auto v = need_value("--axis");
            if (!v) return false;
            spec.axis = *v;
        } else if (args[i] == "--values") {
            auto v = need_value("--values");
            if (!v) return false;
            std::istringstream is(*v);
            std::string cell;
            while (std::getline(is, cell, ',')) {
                char* end = nullptr;
                double d = std::strtod(cell.c_str(), &end);
                if (end == cell.c_str() || *end != '\0') {
                    err << "--values: '" << cell << "' is not a number\n";
                    return false;
                }
                spec.values.push_back(d);
            }
        } else if (args[i] == "--jobs") {
            auto v = need_value("--jobs");
            if (!v) return false;
            spec.jobs = std::max(1, std::atoi(v->c_str()));
        } else if (args[i] == "--seed") {
            auto v = need_value("--seed");
            if (!v) return false;
            char* end = nullptr;
            spec.seed = std::strtoull(v->c_str(), &end, 10);
            if (end == v->c_str() || *end != '\0') {
                err << "--seed: '" << *v << "' is not an unsigned integer\n";
                return false;
            }
            spec.seed_set = true;
        } else if (args[i] == "--help" || args[i] == "-h") {
            err << kUsage;
            return false;
        } else {
            err << "unknown option '" << args[i] << "'\n" << kUsage;
            return false;
        }
    }
    return true;
}

// Loads and validates the scenario file named on the command line.
// Returns nullopt after printing diagnostics.
std::optional<ScenarioConfig> load_scenario(const CommandSpec& spec,
                                            std::ostream& err) {
    if (spec.scenario.empty()) {
        err << "--scenario is required\n";
        return std::nullopt;
    }
    std::string text;
    try {
        text = read_text_file(spec.scenario);
    } catch (const IoError& e) {
        err << e.what() << "\n";
        return std::nullopt;
    }
    auto overrides = spec.overrides;
    if (spec.seed_set)
        overrides.push_back("scenario.seed=" + std::to_string(spec.seed));
    auto parsed = parse_scenario(text, overrides);
    if (!parsed.ok()) {
        err << "scenario validation failed:\n" << parsed.issues_text();
        return std::nullopt;
    }
    return parsed.config;
}

int run_solve(const CommandSpec& spec, std::ostream& out, std::ostream& err) {
    auto cfg = load_scenario(spec, err);
    if (!cfg) return kExitUsage;
    try {
        auto model = cfg->model();
        auto bundle = fbsm_solve(cfg->initial_state(), model, cfg->solver);
        auto delivered = delivered_path(bundle.state_path, *cfg);
        auto gap = sup_gap_series(bundle.state_path, delivered);
        write_results(bundle, cfg->weights(), gap, {}, spec.out_dir,
                      emit_scenario(*cfg), cfg->seed);
        out << "scenario '" << cfg->name << "': "
            << (bundle.converged ? "converged" : "did not converge") << " after "
            << bundle.iterations << " iteration(s), utility integral "
            << bundle.utility_integral << ", results in " << spec.out_dir << "\n";
        return bundle.converged ? kExitOk : kExitNonConverged;
    } catch (const Error& e) {
        err << e.what() << "\n";
        return kExitUsage;
    }
}

int run_verify(const CommandSpec& spec, std::ostream& out, std::ostream& err) {
    auto cfg = load_scenario(spec, err);
    if (!cfg) return kExitUsage;
    try {
        auto outcome = run_verification(*cfg, spec.suite);
        write_results(outcome.bundle, cfg->weights(), outcome.sup_gap,
                      outcome.certificates, spec.out_dir, emit_scenario(*cfg),
                      cfg->seed);
        for (const auto& cert : outcome.certificates) {
            out << (cert.passed ? "[PASS] " : "[FAIL] ") << cert.name;
            if (!cert.notes.empty()) out << "  (" << cert.notes << ")";
            out << "\n";
        }
        out << (outcome.all_passed ? "all certificates passed"
                                   : "certificate failure")
            << "; report in " << spec.out_dir << "\n";
        if (!outcome.bundle.converged) {
            err << "solver did not converge\n";
            return kExitNonConverged;
        }
        return outcome.all_passed ? kExitOk : kExitCertificateFailed;
    } catch (const Error& e) {
        err << e.what() << "\n";
        return kExitUsage;
    }
}

// Least-squares decay rate of the sup-gap tail, as reported in sweeps.
double fitted_decay_rate(const std::vector<double>& times,
                         const std::vector<double>& gap) {
    std::vector<double> ts, logs;
    double t_half = times.front() + 0.5 * (times.back() - times.front());
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t_half || gap[i] <= 0.0) continue;
        ts.push_back(times[i]);
        logs.push_back(std::log(gap[i]));
    }
    if (ts.size() < 2) return 0.0;
    double n = static_cast<double>(ts.size());
    double st = 0.0, sl = 0.0, stt = 0.0, stl = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        st += ts[i];
        sl += logs[i];
        stt += ts[i] * ts[i];
        stl += ts[i] * logs[i];
    }
    double slope = (n * stl - st * sl) / (n * stt - st * st);
    return -slope;
}

int run_sweep(const CommandSpec& spec, std::ostream& out, std::ostream& err) {
    if (spec.axis.empty()) {
        err << "--axis is required for sweep\n";
        return kExitUsage;
    }
    if (spec.values.empty()) {
        err << "--values is required and may not be empty\n";
        return kExitUsage;
    }
    for (const char* text_key : {".name", ".share", ".costate_mode",
                                 ".control_mode", ".mask", ".meaning"}) {
        if (spec.axis.size() > std::strlen(text_key) &&
            spec.axis.rfind(text_key) == spec.axis.size() - std::strlen(text_key)) {
            err << "--axis " << spec.axis << " is not a numeric scenario key\n";
            return kExitUsage;
        }
    }
    {
        // Validate the axis once against the base scenario.
        CommandSpec probe = spec;
        probe.overrides.push_back(spec.axis + "=" +
                                  std::to_string(spec.values.front()));
        if (!load_scenario(probe, err)) return kExitUsage;
    }

    struct Row {
        double value = 0.0;
        bool converged = false;
        double utility = 0.0;
        double rate = 0.0;
        bool failed = false;
        std::string error;
    };
    std::vector<Row> rows(spec.values.size());
    std::atomic<std::size_t> cursor{0};
    std::mutex io_mutex;

    auto worker = [&]() {
        for (;;) {
            std::size_t idx = cursor.fetch_add(1);
            if (idx >= spec.values.size()) return;
            Row row;
            row.value = spec.values[idx];
            try {
                CommandSpec one = spec;
                char val[64];
                std::snprintf(val, sizeof val, "%.17g", spec.values[idx]);
                one.overrides.push_back(spec.axis + "=" + std::string(val));
                std::ostringstream silent;
                auto cfg = load_scenario(one, silent);
                if (!cfg) {
                    row.failed = true;
                    row.error = silent.str();
                } else {
                    auto model = cfg->model();
                    auto bundle = fbsm_solve(cfg->initial_state(), model, cfg->solver);
                    auto delivered = delivered_path(bundle.state_path, *cfg);
                    auto gap = sup_gap_series(bundle.state_path, delivered);
                    fs::path run_dir =
                        fs::path(spec.out_dir) / ("run_" + std::to_string(idx));
                    write_results(bundle, cfg->weights(), gap, {}, run_dir,
                                  emit_scenario(*cfg), cfg->seed);
                    row.converged = bundle.converged;
                    row.utility = bundle.utility_integral;
                    row.rate = fitted_decay_rate(bundle.state_path.times, gap);
                }
            } catch (const Error& e) {
                row.failed = true;
                row.error = e.what();
            }
            std::lock_guard<std::mutex> lock(io_mutex);
            rows[idx] = std::move(row);
        }
    };

    std::size_t n_threads =
        std::min<std::size_t>(spec.jobs, spec.values.size());
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    std::ostringstream table;
    table << "value,converged,utility_integral,fitted_rate\n";
    bool any_failed = false;
    char buf[160];
    for (const auto& row : rows) {
        if (row.failed) {
            any_failed = true;
            err << "sweep value " << row.value << " failed: " << row.error << "\n";
            continue;
        }
        std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g,%.17g\n", row.value,
                      row.converged ? 1 : 0, row.utility, row.rate);
        table << buf;
    }
    try {
        fs::create_directories(spec.out_dir);
        write_text_file(fs::path(spec.out_dir) / "summary.csv", table.str());
    } catch (const Error& e) {
        err << e.what() << "\n";
        return kExitUsage;
    }
    out << "sweep over " << spec.axis << " finished; summary in " << spec.out_dir
        << "/summary.csv\n";
    return any_failed ? kExitUsage : kExitOk;
}

int run_plot(const CommandSpec& spec, std::ostream& out, std::ostream& err) {
    if (spec.scenario.empty()) {
        err << "--scenario must point at a results directory or trajectories.csv\n";
        return kExitUsage;
    }
    fs::path input(spec.scenario);
    fs::path table_path = input;
    fs::path gap_path;
    if (fs::is_directory(input)) {
        table_path = input / "trajectories.csv";
        gap_path = input / "gap.csv";
    } else {
        gap_path = input.parent_path() / "gap.csv";
    }

    try {
        ResultTable table = read_result_table(table_path);
        if (table.rows.empty()) {
            err << "result table has no rows\n";
            return kExitUsage;
        }
        std::size_t t_col = table.column("t");
        std::vector<double> times;
        for (const auto& r : table.rows) times.push_back(r[t_col]);

        fs::create_directories(spec.out_dir);

        // Satisfaction trajectories.
        std::vector<PlotSeries> sat_series;
        for (std::size_t c = 0; c < table.header.size(); ++c) {
            if (table.header[c].rfind("x_", 0) != 0) continue;
            PlotSeries s;
            s.label = table.header[c];
            s.x = times;
            for (const auto& r : table.rows) s.y.push_back(r[c]);
            sat_series.push_back(std::move(s));
        }
        if (sat_series.empty()) {
            err << "result table carries no satisfaction columns\n";
            return kExitUsage;
        }
        write_svg_plot(fs::path(spec.out_dir) / "satisfaction.svg",
                       "satisfaction trajectories", "t", "x_i(t)", sat_series);

        // Utility over time.
        {
            std::size_t u_col = table.column("discounted_utility");
            PlotSeries s;
            s.label = "running discounted utility";
            s.x = times;
            for (const auto& r : table.rows) s.y.push_back(r[u_col]);
            write_svg_plot(fs::path(spec.out_dir) / "utility.svg",
                           "running discounted utility", "t", "integral", {s});
        }

        // Log-scale alignment gap.
        {
            ResultTable gap = read_result_table(gap_path);
            std::size_t gt = gap.column("t"), gv = gap.column("sup_gap");
            PlotSeries s;
            s.label = "ln sup gap";
            for (const auto& r : gap.rows) {
                if (r[gv] <= 0.0) continue; // log scale skips exact zeros
                s.x.push_back(r[gt]);
                s.y.push_back(std::log(r[gv]));
            }
            if (s.x.size() < 2) {
                err << "gap series has fewer than two positive entries\n";
                return kExitUsage;
            }
            write_svg_plot(fs::path(spec.out_dir) / "error_log.svg",
                           "sup-norm alignment gap (natural log)", "t", "ln gap",
                           {s});
        }
        out << "plots written to " << spec.out_dir << "\n";
        return kExitOk;
    } catch (const Error& e) {
        err << e.what() << "\n";
        return kExitUsage;
    }
}

} // namespace

int cli_run(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
    CommandSpec spec;
    if (!parse_args(args, spec, err)) return kExitUsage;
    if (spec.subcommand == "solve") return run_solve(spec, out, err);
    if (spec.subcommand == "verify") return run_verify(spec, out, err);
    if (spec.subcommand == "sweep") return run_sweep(spec, out, err);
    return run_plot(spec, out, err);
}

} // namespace alignlab
