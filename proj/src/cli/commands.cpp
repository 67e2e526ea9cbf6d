#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "jumprl/cli.hpp"
#include "jumprl/error.hpp"
#include "jumprl/estimators.hpp"
#include "jumprl/oracles.hpp"
#include "jumprl/portfolio.hpp"
#include "jumprl/sde.hpp"
#include "jumprl/time_grid.hpp"
#include "jumprl/value_model.hpp"

namespace jumprl::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

// Defaults used when neither a preset, a config file nor a flag sets a key.
constexpr double kDefaultDt = 0.01;
constexpr std::int64_t kDefaultEpisodes = 20000;

fs::path output_dir(const ExperimentConfig& c) {
    fs::path dir = c.get_string("out", ".");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "'");
    return dir;
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream f(p);
    if (!f) throw ConfigError("cannot write '" + p.string() + "'");
    return f;
}

void write_json(const fs::path& p, const Json& j) {
    auto f = open_out(p);
    f << j.dump(2) << '\n';
}

Json config_json(const ExperimentConfig& c) {
    Json j = Json::object();
    for (const auto& [k, v] : c.values()) j[k] = v;
    return j;
}

std::size_t positive_size(const ExperimentConfig& c, const std::string& key,
                          std::int64_t fallback) {
    const std::int64_t v = c.get_int(key, fallback);
    if (v <= 0) throw ConfigError("'" + key + "' must be positive, got " + std::to_string(v));
    return static_cast<std::size_t>(v);
}

TimeGrid grid_from(const ExperimentConfig& c) {
    const double horizon = c.get_double("horizon", 1.0);
    if (c.has("n-steps")) {
        return build_grid(horizon, positive_size(c, "n-steps", 0));
    }
    const double dt = c.get_double("dt", kDefaultDt);
    if (!(dt > 0.0) || !(horizon > 0.0)) throw ConfigError("dt and horizon must be positive");
    const double n = std::round(horizon / dt);
    if (n < 2.0 || n > 1e9) throw ConfigError("dt gives an unusable number of steps");
    return build_grid(horizon, static_cast<std::size_t>(n));
}

JumpDiffusionSpec spec_from(const ExperimentConfig& c) {
    const std::string sde = c.get_string("sde", "paper-sim");
    if (sde == "paper-sim") return paper_sim_spec();
    if (sde != "constant") {
        throw ConfigError("unknown sde '" + sde + "'; expected paper-sim or constant");
    }
    const std::string law_name = c.get_string("jump-law", "none");
    JumpLaw law = NoJumps{};
    if (law_name == "single") {
        law = SingleUniformJump{};
    } else if (law_name == "poisson") {
        law = PoissonRate{c.get_double("jump-rate", 1.0)};
    } else if (law_name != "none") {
        throw ConfigError("unknown jump-law '" + law_name + "'; expected none, single or poisson");
    }
    return constant_spec(c.get_double("drift", 0.0), c.get_double("sigma", 1.0),
                         c.get_double("x0", 0.0), law, c.get_double("jump-size", 0.0));
}

TrainConfig train_config_from(const ExperimentConfig& c) {
    TrainConfig t;
    t.loss_kind = parse_loss_kind(c.get_string("loss", "msbve"));
    t.learning_rate = c.get_double("alpha", t.learning_rate);
    t.episodes = positive_size(c, "episodes", kDefaultEpisodes);
    t.paths_per_episode = positive_size(c, "paths", static_cast<std::int64_t>(t.paths_per_episode));
    t.theta0 = c.get_double("theta0", t.theta0);
    t.master_seed = c.get_u64("seed", t.master_seed);
    t.record_every = positive_size(c, "record-every", 1);
    t.grad_clip = c.get_double("grad-clip", 0.0);
    t.plateau_tol = c.get_double("plateau-tol", 0.0);
    t.plateau_window = positive_size(c, "plateau-window", 1000);
    t.validate();
    return t;
}

Json trace_json(const std::vector<TracePoint>& trace) {
    Json arr = Json::array();
    for (const auto& p : trace) arr.push_back(Json::array({p.episode, p.theta, p.loss}));
    return arr;
}

Json train_config_json(const TrainConfig& t, const TimeGrid& grid, std::string_view family) {
    Json j;
    j["family"] = family;
    j["loss"] = loss_name(t.loss_kind);
    j["alpha"] = t.learning_rate;
    j["episodes"] = t.episodes;
    j["paths"] = t.paths_per_episode;
    j["theta0"] = t.theta0;
    j["seed"] = t.master_seed;
    j["horizon"] = grid.horizon();
    j["n_steps"] = grid.n_steps();
    j["dt"] = grid.dt();
    j["record_every"] = t.record_every;
    j["grad_clip"] = t.grad_clip;
    return j;
}

Json train_result_json(const TrainResult& r, const TimeGrid& grid, std::string_view family) {
    Json j;
    j["theta_final"] = r.theta_final;
    j["episodes_run"] = r.episodes_run;
    j["clip_events"] = r.clip_events;
    j["stopped_on_plateau"] = r.stopped_on_plateau;
    j["trace"] = trace_json(r.trace);
    j["config"] = train_config_json(r.config, grid, family);
    return j;
}

void write_trace_csv(const fs::path& p, const std::vector<TracePoint>& trace) {
    auto f = open_out(p);
    f << "episode,theta,loss\n";
    for (const auto& pt : trace) {
        f << pt.episode << ',' << format_double(pt.theta) << ',' << format_double(pt.loss) << '\n';
    }
}

Json minimizers_json(const MinimizerTable& table) {
    Json j = Json::object();
    for (const auto& [key, theta] : table.entries()) {
        j[std::string(family_name(key.first))][std::string(method_name(key.second))] = theta;
    }
    return j;
}

Method method_of(LossKind k) { return k == LossKind::MSTDE ? Method::MSTDE : Method::MSBVE; }

bool has_reference(ValueFamily f) {
    return f == ValueFamily::Linear || f == ValueFamily::Quadratic ||
           f == ValueFamily::Exponential;
}

}  // namespace

int cmd_simulate(const ExperimentConfig& c, std::ostream& out, std::ostream&) {
    const TimeGrid grid = grid_from(c);
    const JumpDiffusionSpec spec = spec_from(c);
    spec.validate(grid);
    const std::int64_t requested = c.get_int("paths", 1);
    if (requested < 0) throw ConfigError("'paths' must be non-negative");
    const auto n_paths = static_cast<std::size_t>(requested);
    const std::uint64_t seed = c.get_u64("seed", 0);
    const fs::path dir = output_dir(c);

    Json files = Json::array();
    for (std::size_t p = 0; p < n_paths; ++p) {
        const PathSample path = simulate_path(spec, grid, CounterRng(seed, 0, p));
        char name[32];
        std::snprintf(name, sizeof name, "path_%05zu.csv", p);
        auto f = open_out(dir / name);
        write_path_csv(f, path);
        Json jumps = Json::array();
        for (const auto& e : path.jumps) {
            jumps.push_back({{"time", e.time}, {"grid_index", e.grid_index},
                             {"pre_state", e.pre_state}, {"size", e.size}});
        }
        files.push_back({{"file", name}, {"terminal", path.observed.back()}, {"jumps", jumps}});
    }
    Json manifest;
    manifest["command"] = "simulate";
    manifest["seed"] = seed;
    manifest["horizon"] = grid.horizon();
    manifest["n_steps"] = grid.n_steps();
    manifest["paths"] = files;
    manifest["settings"] = config_json(c);
    write_json(dir / "manifest.json", manifest);
    out << "wrote " << n_paths << " path(s) to " << dir.string() << '\n';
    return kExitOk;
}

int cmd_train(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
    const std::string family_str = c.get_string("family", "linear");
    const ValueModel model = ValueModel::from_name(family_str);
    const TimeGrid grid = grid_from(c);
    const JumpDiffusionSpec spec = spec_from(c);
    spec.validate(grid);
    const TrainConfig tc = train_config_from(c);
    const fs::path dir = output_dir(c);
    const std::string family(family_name(model.family()));

    TrainResult result;
    int code = kExitOk;
    try {
        result = train(model, spec, grid, tc);
    } catch (const DivergenceError& e) {
        err << "error: " << e.what() << '\n';
        result = e.partial();
        code = kExitDivergence;
    }
    Json j = train_result_json(result, grid, family);
    std::optional<std::pair<Method, double>> nearest;
    if (code == kExitOk && has_reference(model.family()) &&
        c.get_string("sde", "paper-sim") == "paper-sim") {
        const MinimizerTable refs = reference_minimizers();
        for (Method m : {Method::MSTDE, Method::MSBVE, Method::Oracle}) {
            const double ref = refs.at(model.family(), m);
            if (!nearest || std::abs(result.theta_final - ref) <
                                std::abs(result.theta_final - nearest->second)) {
                nearest = {m, ref};
            }
        }
        const double own = refs.at(model.family(), method_of(tc.loss_kind));
        j["theta_reference"] = own;
        j["gap"] = std::abs(result.theta_final - own);
        j["nearest_reference"] = {{"method", method_name(nearest->first)},
                                  {"theta", nearest->second},
                                  {"gap", std::abs(result.theta_final - nearest->second)}};
    }
    j["diverged"] = code == kExitDivergence;
    write_json(dir / "train_result.json", j);
    write_trace_csv(dir / "trace.csv", result.trace);

    if (code == kExitOk) {
        out << family << ' ' << loss_name(tc.loss_kind) << " theta_final "
            << format_double(result.theta_final);
        if (nearest) {
            out << " nearest reference " << method_name(nearest->first) << ' '
                << format_double(nearest->second) << " gap "
                << format_double(std::abs(result.theta_final - nearest->second));
        }
        out << '\n';
    }
    return code;
}

int cmd_compare(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
    const std::vector<std::string> families =
        c.get_list("families", {"linear", "quadratic", "exponential"});
    const TimeGrid grid = grid_from(c);
    const JumpDiffusionSpec spec = spec_from(c);
    spec.validate(grid);
    TrainConfig base = train_config_from(c);
    const bool scan = c.get_bool("oracle-scan", false);
    const std::size_t scan_paths = positive_size(c, "oracle-paths", 2000);
    const double scan_lo = c.get_double("scan-lo", -2.5);
    const double scan_hi = c.get_double("scan-hi", 0.5);
    const double scan_step = c.get_double("scan-step", 0.05);
    const fs::path dir = output_dir(c);
    const MinimizerTable refs = reference_minimizers();

    Json cells = Json::array();
    Json scans = Json::array();
    Json traces = Json::object();
    int code = kExitOk;
    for (const auto& name : families) {
        const ValueModel model = ValueModel::from_name(name);
        const std::string family(family_name(model.family()));
        Json fam_traces = Json::object();
        for (LossKind kind : {LossKind::MSTDE, LossKind::MSBVE}) {
            TrainConfig tc = base;
            tc.loss_kind = kind;
            Json cell;
            cell["family"] = family;
            cell["method"] = loss_name(kind);
            try {
                const TrainResult r = train(model, spec, grid, tc);
                cell["theta_final"] = r.theta_final;
                fam_traces[std::string(loss_name(kind))] = trace_json(r.trace);
            } catch (const DivergenceError& e) {
                err << "error: " << family << ' ' << loss_name(kind) << ": " << e.what() << '\n';
                cell["theta_final"] = nullptr;
                cell["diverged_at"] = e.episode();
                fam_traces[std::string(loss_name(kind))] = trace_json(e.partial().trace);
                code = kExitDivergence;
            }
            if (refs.contains(model.family(), method_of(kind))) {
                const double ref = refs.at(model.family(), method_of(kind));
                cell["theta_reference"] = ref;
                if (cell["theta_final"].is_number()) {
                    cell["gap"] = std::abs(cell["theta_final"].get<double>() - ref);
                }
            }
            cells.push_back(cell);
            out << family << ' ' << loss_name(kind) << ' '
                << (cell["theta_final"].is_number()
                        ? format_double(cell["theta_final"].get<double>())
                        : std::string("diverged"))
                << '\n';
        }
        traces[family] = fam_traces;
        if (scan) {
            for (Method m : {Method::MSTDE, Method::MSBVE, Method::Oracle}) {
                const ScanResult s = scan_mc_minimizer(model, m, spec, grid, scan_paths,
                                                       base.master_seed, scan_lo, scan_hi,
                                                       scan_step, 1e-3);
                Json row;
                row["family"] = family;
                row["method"] = method_name(m);
                row["argmin"] = s.argmin;
                row["value"] = s.value;
                if (refs.contains(model.family(), m)) {
                    row["theta_reference"] = refs.at(model.family(), m);
                }
                scans.push_back(row);
            }
        }
    }
    Json report;
    report["families"] = families;
    report["cells"] = cells;
    report["mc_scans"] = scans;
    report["reference_minimizers"] = minimizers_json(refs);
    report["config"] = train_config_json(base, grid, "");
    report["config"].erase("family");
    report["config"].erase("loss");
    report["traces"] = traces;
    write_json(dir / "compare_report.json", report);
    return code;
}

int cmd_backtest(const ExperimentConfig& c, std::ostream& out, std::ostream&) {
    BacktestConfig bc;
    bc.train_days = positive_size(c, "train-days", static_cast<std::int64_t>(bc.train_days));
    bc.steps_per_day =
        positive_size(c, "steps-per-day", static_cast<std::int64_t>(bc.steps_per_day));
    bc.horizon = c.get_double("horizon", bc.horizon);
    bc.target = c.get_double("z", bc.target);
    bc.initial_wealth = c.get_double("x0", bc.initial_wealth);
    bc.risk_free = c.get_double("rf", bc.risk_free);
    bc.learning.learning_rate = c.get_double("alpha", bc.learning.learning_rate);
    bc.learning.episodes = positive_size(c, "episodes",
                                         static_cast<std::int64_t>(bc.learning.episodes));
    bc.learning.theta0 = c.get_double("theta0", bc.learning.theta0);
    bc.path_gradient = c.get_bool("path-gradient", bc.path_gradient);
    bc.normalized_step = c.get_bool("normalized-step", bc.normalized_step);

    PriceSeries series;
    if (c.has("data")) {
        series = read_price_csv_file(c.get_string("data", ""), bc.steps_per_day);
    } else {
        SyntheticMarket m;
        m.bars_per_day = bc.steps_per_day;
        m.days = positive_size(c, "synthetic-days", static_cast<std::int64_t>(m.days));
        m.seed = c.get_u64("seed", m.seed);
        series = synthetic_series(m);
    }

    std::vector<ThresholdMode> modes;
    const std::string mode = c.get_string("mode", "both");
    if (mode == "both") {
        modes = {ThresholdMode::Raw, ThresholdMode::Thresholded};
    } else {
        modes = {parse_threshold_mode(mode)};
    }
    std::vector<LossKind> kinds;
    const std::string loss = c.get_string("loss", "both");
    if (loss == "both") {
        kinds = {LossKind::MSTDE, LossKind::MSBVE};
    } else {
        kinds = {parse_loss_kind(loss)};
    }

    const fs::path dir = output_dir(c);
    Json cells = Json::array();
    for (ThresholdMode tm : modes) {
        for (LossKind lk : kinds) {
            BacktestConfig cfg = bc;
            cfg.threshold_mode = tm;
            cfg.validate();
            const BacktestResult r = rolling_backtest(series, cfg, lk);
            Json cell;
            cell["loss"] = loss_name(lk);
            cell["mode"] = threshold_mode_name(tm);
            cell["test_days"] = r.test_days.size();
            if (r.sharpe_annualized) {
                cell["sharpe"] = *r.sharpe_annualized;
            } else {
                cell["sharpe"] = nullptr;
            }
            cells.push_back(cell);

            const std::string stem = "backtest_" + std::string(loss_name(lk)) + "_" +
                                     std::string(threshold_mode_name(tm)) + ".csv";
            auto f = open_out(dir / stem);
            f << "date,theta,terminal_wealth,daily_return\n";
            for (std::size_t i = 0; i < r.test_days.size(); ++i) {
                f << r.test_days[i] << ',' << format_double(r.theta_per_day[i]) << ','
                  << format_double(r.terminal_wealth[i]) << ','
                  << format_double(r.daily_return[i]) << '\n';
            }
            out << loss_name(lk) << ' ' << threshold_mode_name(tm) << " sharpe "
                << (r.sharpe_annualized ? format_double(*r.sharpe_annualized)
                                        : std::string("degenerate"))
                << '\n';
        }
    }
    Json report;
    report["cells"] = cells;
    report["days_available"] = series.days.size();
    report["warnings"] = series.warnings;
    report["settings"] = config_json(c);
    write_json(dir / "backtest_report.json", report);
    return kExitOk;
}

namespace {

struct FlagSink {
    std::map<std::string, std::string> values;

    void add(CLI::App* app, const std::string& name, const std::string& help) {
        app->add_option("--" + name, values[name], help);
    }
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Jump-robust policy evaluation: simulation, training and backtests"};
    app.require_subcommand(1);

    struct Command {
        const char* name;
        const char* help;
        std::vector<std::pair<const char*, const char*>> flags;
        int (*fn)(const ExperimentConfig&, std::ostream&, std::ostream&);
    };
    const std::vector<std::pair<const char*, const char*>> shared = {
        {"seed", "master seed"},
        {"out", "output directory"},
        {"preset", "named settings bundle"},
    };
    const std::vector<std::pair<const char*, const char*>> sim_flags = {
        {"sde", "paper-sim | constant"}, {"drift", "constant drift"},
        {"sigma", "constant volatility"}, {"x0", "initial state"},
        {"jump-law", "none | single | poisson"}, {"jump-rate", "Poisson intensity"},
        {"jump-size", "constant jump size"}, {"dt", "grid step"},
        {"n-steps", "grid steps (overrides dt)"}, {"horizon", "time horizon"},
    };
    const std::vector<std::pair<const char*, const char*>> train_flags = {
        {"family", "linear | quadratic | exponential"},
        {"loss", "mstde | msbve"},
        {"episodes", "SGD episodes"},
        {"paths", "paths per episode"},
        {"alpha", "learning rate"},
        {"theta0", "initial parameter"},
        {"record-every", "trace stride"},
        {"grad-clip", "per-path gradient cap (0 = off)"},
        {"plateau-tol", "early-stop tolerance (0 = off)"},
        {"plateau-window", "early-stop window"},
    };
    std::vector<Command> commands;
    {
        Command sim{"simulate", "simulate sample paths", sim_flags, &cmd_simulate};
        sim.flags.push_back({"paths", "number of paths"});
        commands.push_back(sim);

        Command tr{"train", "fit theta by SGD", sim_flags, &cmd_train};
        tr.flags.insert(tr.flags.end(), train_flags.begin(), train_flags.end());
        commands.push_back(tr);

        Command cmp{"compare", "train both losses per family against reference minimizers",
                    sim_flags, &cmd_compare};
        cmp.flags.insert(cmp.flags.end(), train_flags.begin(), train_flags.end());
        cmp.flags.push_back({"families", "comma-separated families"});
        cmp.flags.push_back({"oracle-scan", "also scan Monte-Carlo objectives (true/false)"});
        cmp.flags.push_back({"oracle-paths", "paths per Monte-Carlo scan"});
        cmp.flags.push_back({"scan-lo", "scan lower bound"});
        cmp.flags.push_back({"scan-hi", "scan upper bound"});
        cmp.flags.push_back({"scan-step", "coarse scan step"});
        commands.push_back(cmp);

        commands.push_back(Command{
            "backtest",
            "rolling mean-variance backtest",
            {{"data", "timestamp,price CSV (synthetic data when omitted)"},
             {"mode", "raw | thresholded | both"},
             {"loss", "mstde | msbve | both"},
             {"train-days", "training window in days"},
             {"steps-per-day", "bars per day"},
             {"horizon", "horizon per day"},
             {"z", "target wealth"},
             {"x0", "initial wealth"},
             {"rf", "risk-free rate per day"},
             {"alpha", "learning rate"},
             {"episodes", "gradient steps per day"},
             {"theta0", "initial parameter"},
             {"path-gradient", "differentiate through the wealth path (true/false)"},
             {"normalized-step", "step along grad / loss (true/false)"},
             {"synthetic-days", "days of synthetic data"}},
            &cmd_backtest});
    }

    std::string config_path;
    std::vector<FlagSink> sinks(commands.size());
    std::vector<CLI::App*> subs;
    for (std::size_t i = 0; i < commands.size(); ++i) {
        CLI::App* sub = app.add_subcommand(commands[i].name, commands[i].help);
        sub->add_option("--config", config_path, "key = value settings file");
        for (const auto& [name, help] : shared) sinks[i].add(sub, name, help);
        for (const auto& [name, help] : commands[i].flags) sinks[i].add(sub, name, help);
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    for (std::size_t i = 0; i < commands.size(); ++i) {
        if (!subs[i]->parsed()) continue;
        try {
            ExperimentConfig flags;
            for (const auto& [name, value] : sinks[i].values) {
                if (subs[i]->count("--" + name) > 0) flags.set(name, value);
            }
            ExperimentConfig file;
            if (!config_path.empty()) file = load_config_file(config_path);

            std::string preset_name = file.get_string("preset", "");
            preset_name = flags.get_string("preset", preset_name);
            ExperimentConfig effective;
            if (!preset_name.empty()) effective = preset(preset_name);
            effective.merge(file);
            effective.merge(flags);
            return commands[i].fn(effective, out, err);
        } catch (const DivergenceError& e) {
            err << "error: " << e.what() << '\n';
            return kExitDivergence;
        } catch (const ConfigError& e) {
            err << "error: " << e.what() << '\n';
            return kExitConfig;
        } catch (const IngestError& e) {
            err << "error: " << e.what() << '\n';
            return kExitConfig;
        } catch (const InsufficientDataError& e) {
            err << "error: " << e.what() << '\n';
            return kExitConfig;
        } catch (const NumericalError& e) {
            err << "error: " << e.what() << '\n';
            return kExitDivergence;
        } catch (const std::exception& e) {
            err << "error: " << e.what() << '\n';
            return 1;
        }
    }
    return kExitConfig;
}

}  // namespace jumprl::cli
