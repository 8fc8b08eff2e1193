// strbf: generate Mackey-Glass data, train a single RBF/STRBF model, or run
// the full Monte-Carlo comparison and render its charts.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "strbf/config.hpp"
#include "strbf/errors.hpp"
#include "strbf/experiment.hpp"
#include "strbf/io.hpp"
#include "strbf/plot.hpp"

namespace fs = std::filesystem;
using namespace strbf;

namespace {

struct GlobalArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::vector<std::string> sets;
    bool quiet = false;
};

struct GenerateArgs {
    std::optional<double> a, b, delay, len, step, initial;
    std::string output;
};

struct TrainArgs {
    std::string model;
    std::optional<double> eta;
    std::size_t run = 0;
    bool eval_only = false;
    std::string checkpoint;
};

struct CompareArgs {
    std::optional<std::size_t> runs;
    bool plot = false;
    bool serial = false;
};

CliConfig resolve(const GlobalArgs& g) {
    CliConfig cfg;
    if (!g.config_path.empty()) apply_config_text(cfg, read_text_file(g.config_path));
    for (const std::string& kv : g.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ContractViolation("--set expects key=value, got '" + kv + "'");
        apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (g.seed) cfg.experiment.base_seed = *g.seed;
    if (g.out) cfg.out_dir = *g.out;
    return cfg;
}

void ensure_dir(const fs::path& p) {
    if (p.empty()) return;
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw IoError("cannot create directory '" + p.string() + "': " + ec.message());
}

int cmd_generate(const GlobalArgs& g, const GenerateArgs& a) {
    CliConfig cfg = resolve(g);
    MackeyGlassParams& p = cfg.experiment.series;
    if (a.a) p.a = *a.a;
    if (a.b) p.b = *a.b;
    if (a.delay) p.delay = *a.delay;
    if (a.len) p.horizon = *a.len;
    if (a.step) p.integration_step = *a.step;
    if (a.initial) p.initial_value = *a.initial;

    const TimeSeries s = generate_mackey_glass(p);
    const fs::path out = a.output.empty() ? cfg.out_dir / "series.csv" : fs::path(a.output);
    ensure_dir(out.parent_path());
    write_text_file(out, series_to_csv(s));
    write_text_file(out.parent_path() / "config.txt", config_to_text(cfg));

    const auto [mn, mx] = std::minmax_element(s.values.begin(), s.values.end());
    if (!g.quiet)
        std::cout << "samples=" << s.size() << " min=" << format_double(*mn) << " max=" << format_double(*mx)
                  << " file=" << out.string() << "\n";
    return 0;
}

void print_metrics(const char* label, ModelKind kind, double train_mse, double test_mse) {
    std::cout << label << " model=" << to_string(kind) << " train_mse=" << format_double(train_mse)
              << " train_mse_db=" << format_double(mse_to_db(train_mse)) << " test_mse=" << format_double(test_mse)
              << " test_mse_db=" << format_double(mse_to_db(test_mse)) << "\n";
}

std::string metrics_csv(ModelKind kind, double train_mse, double test_mse) {
    CsvTable t;
    t.header = {"model", "train_mse", "train_mse_db", "test_mse", "test_mse_db"};
    t.rows.push_back({std::string(to_string(kind)), format_double(train_mse), format_double(mse_to_db(train_mse)),
                      format_double(test_mse), format_double(mse_to_db(test_mse))});
    return to_csv(t);
}

int cmd_train(const GlobalArgs& g, const TrainArgs& a) {
    CliConfig cfg = resolve(g);
    const ExperimentConfig& ec = cfg.experiment;
    const ModelKind kind = parse_model_kind(a.model);
    const bool is_rbf = kind == ModelKind::Rbf;
    double eta = is_rbf ? ec.eta_rbf : ec.eta_strbf;
    if (a.eta) eta = *a.eta;
    if (!(eta >= 0.0)) throw ContractViolation("--eta must be >= 0");

    ExperimentConfig check = ec;
    check.runs = std::max(check.runs, a.run + 1);
    check.prediction_run = 0;
    check.validate();

    // Same data path as one Monte-Carlo run with this run index.
    const std::uint64_t seed = derive_seed(ec.base_seed, a.run);
    const TimeSeries clean = clean_series(ec);
    Rng noise_rng = make_stream(seed, Stream::Noise);
    const IndexRange noise_range =
        ec.noise_scope == NoiseScope::TrainOnly ? ec.train_range : IndexRange{0, clean.size() - 1};
    const TimeSeries noisy = add_awgn(clean, ec.snr_db, noise_rng, noise_range);
    const WindowedDataset train = make_windows(noisy, ec.lag_count, ec.train_range);
    const WindowedDataset test = make_windows(noisy, ec.lag_count, ec.test_range);

    const fs::path checkpoint =
        a.checkpoint.empty() ? cfg.out_dir / (std::string(to_string(kind)) + "_checkpoint.csv") : fs::path(a.checkpoint);

    NetworkState state;
    if (a.eval_only) {
        state = checkpoint_from_csv(read_text_file(checkpoint));
        if (state.topology.kind != kind) throw ContractViolation("checkpoint holds a different model kind");
    } else {
        Rng rng = make_stream(seed, is_rbf ? Stream::RbfInit : Stream::StrbfInit);
        state = init_network(is_rbf ? ec.rbf_topology() : ec.strbf_topology(), train,
                             ec.init_options(kind, Exec::Parallel), rng);
        train_online(state, train, eta, ec.epochs);
    }
    const double train_mse = evaluate(state, train).mse;
    const double test_mse = evaluate(state, test).mse;

    ensure_dir(cfg.out_dir);
    if (!a.eval_only) {
        ensure_dir(checkpoint.parent_path());
        write_text_file(checkpoint, checkpoint_to_csv(state));
    }
    const char* metrics_name = a.eval_only ? "metrics_eval.csv" : "metrics.csv";
    write_text_file(cfg.out_dir / metrics_name, metrics_csv(kind, train_mse, test_mse));
    write_text_file(cfg.out_dir / "config.txt", config_to_text(cfg));
    if (!g.quiet) print_metrics(a.eval_only ? "eval" : "trained", kind, train_mse, test_mse);
    return 0;
}

int cmd_compare(const GlobalArgs& g, const CompareArgs& a) {
    CliConfig cfg = resolve(g);
    if (a.runs) cfg.experiment.runs = *a.runs;
    if (a.plot) cfg.plot = true;
    if (cfg.experiment.prediction_run >= cfg.experiment.runs) cfg.experiment.prediction_run = 0;
    cfg.experiment.validate();

    // Outputs are staged next to the target and moved in only on success.
    const fs::path out = cfg.out_dir;
    const fs::path stage = fs::path(out.string() + ".partial");
    fs::remove_all(stage);
    ensure_dir(stage);
    try {
        const MonteCarloResult result =
            run_monte_carlo(cfg.experiment, a.serial ? Exec::Serial : Exec::Parallel);
        write_artifacts(stage, cfg.experiment, result);
        write_text_file(stage / "config.txt", config_to_text(cfg));
        if (cfg.plot) render_plots(stage);

        ensure_dir(out);
        for (const auto& entry : fs::directory_iterator(stage))
            fs::rename(entry.path(), out / entry.path().filename());
        fs::remove_all(stage);

        if (!g.quiet) {
            const ComparisonTable t = summarize(result.rbf, result.strbf);
            std::printf("%-14s %16s %16s\n", "configuration", "train MSE (dB)", "test MSE (dB)");
            std::printf("%-14s %16.2f %16.2f\n", "RBF", t.rbf.train_mse_db, t.rbf.test_mse_db);
            std::printf("%-14s %16.2f %16.2f\n", "STRBF", t.strbf.train_mse_db, t.strbf.test_mse_db);
            std::printf("%-14s %16.2f %16.2f\n", "gap", t.train_gap_db, t.test_gap_db);
            std::printf("runs=%zu out=%s\n", cfg.experiment.runs, out.string().c_str());
        }
    } catch (...) {
        std::error_code ec;
        fs::remove_all(stage, ec);
        throw;
    }
    return 0;
}

int cmd_plot(const GlobalArgs& g) {
    const CliConfig cfg = resolve(g);
    render_plots(cfg.out_dir);
    if (!g.quiet) std::cout << "rendered charts in " << cfg.out_dir.string() << "\n";
    return 0;
}

std::string keys_help() {
    std::ostringstream ss;
    ss << "Configuration keys (key = value files, or --set key=value):\n";
    for (const ConfigKey& k : config_keys()) ss << "  " << k.name << "  " << k.help << "\n";
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spatio-temporal RBF vs RBF on Mackey-Glass prediction"};
    app.require_subcommand(1);
    app.fallthrough();
    app.footer(keys_help());

    GlobalArgs g;
    app.add_option("--config", g.config_path, "key = value configuration file");
    app.add_option("--seed", g.seed, "base seed");
    app.add_option("--out", g.out, "output directory");
    app.add_option("--set", g.sets, "override a configuration key (key=value), repeatable");
    app.add_flag("--quiet", g.quiet, "suppress normal output");

    GenerateArgs ga;
    auto* gen = app.add_subcommand("generate", "write the Mackey-Glass series as CSV");
    gen->add_option("--a", ga.a, "production coefficient");
    gen->add_option("--b", ga.b, "decay coefficient");
    gen->add_option("--delay", ga.delay, "delay (s)");
    gen->add_option("--len", ga.len, "horizon (s)");
    gen->add_option("--step", ga.step, "integration step (s)");
    gen->add_option("--initial", ga.initial, "u(0)");
    gen->add_option("--output,-o", ga.output, "CSV path (default OUT/series.csv)");

    TrainArgs ta;
    auto* train = app.add_subcommand("train", "train one model on one noise realization");
    train->add_option("--model", ta.model, "rbf | strbf")->required()->check(CLI::IsMember({"rbf", "strbf"}));
    train->add_option("--eta", ta.eta, "learning rate (default from config)");
    train->add_option("--run", ta.run, "run index used for seed derivation");
    train->add_flag("--eval-only", ta.eval_only, "load the checkpoint and evaluate without training");
    train->add_option("--checkpoint", ta.checkpoint, "checkpoint CSV (default OUT/<model>_checkpoint.csv)");

    CompareArgs ca;
    auto* compare = app.add_subcommand("compare", "Monte-Carlo comparison of RBF and STRBF");
    compare->add_option("--runs", ca.runs, "Monte-Carlo runs");
    compare->add_flag("--plot", ca.plot, "also render SVG charts");
    compare->add_flag("--serial", ca.serial, "use the serial reference path");

    auto* plot = app.add_subcommand("plot", "re-render SVG charts from CSVs in OUT");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*gen) return cmd_generate(g, ga);
        if (*train) return cmd_train(g, ta);
        if (*compare) return cmd_compare(g, ca);
        if (*plot) return cmd_plot(g);
    } catch (const TrainingDivergence& e) {
        std::cerr << "error: " << e.kind() << ": iteration=" << e.iteration();
        if (e.run()) std::cerr << " run=" << *e.run();
        std::cerr << ": " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.kind() << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
