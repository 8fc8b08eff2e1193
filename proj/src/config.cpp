#include "strbf/config.hpp"

#include <charconv>
#include <functional>

#include "strbf/errors.hpp"
#include "strbf/io.hpp"

namespace strbf {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

template <class T>
T parse_unsigned(std::string_view key, std::string_view v) {
    T x{};
    const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
        throw ContractViolation("config: '" + std::string(key) + "' expects a non-negative integer, got '" +
                                std::string(v) + "'");
    return x;
}

double parse_real(std::string_view key, std::string_view v) {
    try {
        return parse_double(v);
    } catch (const IoError&) {
        throw ContractViolation("config: '" + std::string(key) + "' expects a number, got '" + std::string(v) + "'");
    }
}

bool parse_bool(std::string_view key, std::string_view v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ContractViolation("config: '" + std::string(key) + "' expects true/false, got '" + std::string(v) + "'");
}

std::string_view to_string(Seeding s) { return s == Seeding::RandomPoints ? "random_points" : "kmeans++"; }

Seeding parse_seeding(std::string_view s) {
    if (s == "random_points") return Seeding::RandomPoints;
    if (s == "kmeans++") return Seeding::PlusPlus;
    throw ContractViolation("unknown k-means seeding '" + std::string(s) + "'");
}

struct Entry {
    ConfigKey key;
    std::function<void(CliConfig&, std::string_view)> set;
    std::function<std::string(const CliConfig&)> get;
};

#define REAL_ENTRY(name, field, help)                                                      \
    Entry{{name, help},                                                                    \
          [](CliConfig& c, std::string_view v) { c.field = parse_real(name, v); },         \
          [](const CliConfig& c) { return format_double(c.field); }}

#define SIZE_ENTRY(name, field, help)                                                              \
    Entry{{name, help},                                                                            \
          [](CliConfig& c, std::string_view v) { c.field = parse_unsigned<std::size_t>(name, v); }, \
          [](const CliConfig& c) { return std::to_string(c.field); }}

#define ENUM_ENTRY(name, field, parse, help)                                        \
    Entry{{name, help}, [](CliConfig& c, std::string_view v) { c.field = parse(v); }, \
          [](const CliConfig& c) { return std::string(to_string(c.field)); }}

const std::vector<Entry>& entries() {
    static const std::vector<Entry> table = {
        REAL_ENTRY("a", experiment.series.a, "Mackey-Glass production coefficient"),
        REAL_ENTRY("b", experiment.series.b, "Mackey-Glass decay coefficient"),
        REAL_ENTRY("delay", experiment.series.delay, "Mackey-Glass delay in seconds"),
        REAL_ENTRY("exponent", experiment.series.exponent, "power in the Mackey-Glass denominator"),
        REAL_ENTRY("initial_value", experiment.series.initial_value, "u(0)"),
        REAL_ENTRY("horizon", experiment.series.horizon, "last sample time in seconds"),
        REAL_ENTRY("integration_step", experiment.series.integration_step, "RK4 step in seconds"),
        REAL_ENTRY("sample_interval", experiment.series.sample_interval, "seconds between samples"),
        REAL_ENTRY("snr_db", experiment.snr_db, "training noise SNR in dB (inf disables noise)"),
        ENUM_ENTRY("noise_scope", experiment.noise_scope, parse_noise_scope, "train_only | everywhere"),
        SIZE_ENTRY("train_begin", experiment.train_range.first, "first training sample index"),
        SIZE_ENTRY("train_end", experiment.train_range.last, "last training sample index"),
        SIZE_ENTRY("test_begin", experiment.test_range.first, "first test sample index"),
        SIZE_ENTRY("test_end", experiment.test_range.last, "last test sample index"),
        SIZE_ENTRY("lag_count", experiment.lag_count, "samples per input window"),
        SIZE_ENTRY("rbf_neurons", experiment.rbf_neurons, "RBF hidden neurons"),
        SIZE_ENTRY("strbf_neurons", experiment.strbf_neurons, "STRBF neurons per temporal branch"),
        ENUM_ENTRY("branch_input", experiment.branch_input, parse_branch_input, "per_lag | full_vector"),
        ENUM_ENTRY("kernel", experiment.kernel, parse_kernel_kind,
                   "gaussian | multiquadric | inverse_multiquadric"),
        REAL_ENTRY("eta_rbf", experiment.eta_rbf, "RBF learning rate"),
        REAL_ENTRY("eta_strbf", experiment.eta_strbf, "STRBF learning rate"),
        REAL_ENTRY("spread_scale_rbf", experiment.spread_scale_rbf, "RBF kernel width multiplier"),
        REAL_ENTRY("spread_scale_strbf", experiment.spread_scale_strbf, "STRBF kernel width multiplier"),
        ENUM_ENTRY("spread_rule", experiment.spread_rule, parse_spread_rule, "cluster_rms | nearest_centroid"),
        ENUM_ENTRY("kmeans_seeding", experiment.kmeans_seeding, parse_seeding, "random_points | kmeans++"),
        SIZE_ENTRY("kmeans_max_iters", experiment.kmeans_max_iters, "Lloyd iteration cap"),
        REAL_ENTRY("kmeans_tol", experiment.kmeans_tol, "Lloyd stop on max centroid displacement"),
        REAL_ENTRY("spread_min", experiment.spread_min, "kernel width floor"),
        REAL_ENTRY("init_range", experiment.init_range, "weights/bias ~ U[-init_range, init_range]"),
        SIZE_ENTRY("runs", experiment.runs, "Monte-Carlo runs"),
        Entry{{"seed", "base seed; run seeds derive from it"},
              [](CliConfig& c, std::string_view v) { c.experiment.base_seed = parse_unsigned<std::uint64_t>("seed", v); },
              [](const CliConfig& c) { return std::to_string(c.experiment.base_seed); }},
        SIZE_ENTRY("epochs", experiment.epochs, "passes over the training windows"),
        SIZE_ENTRY("smoothing_window", experiment.smoothing_window, "moving-average width for curve export"),
        SIZE_ENTRY("prediction_run", experiment.prediction_run, "run exported to predictions.csv"),
        Entry{{"out", "output directory"},
              [](CliConfig& c, std::string_view v) { c.out_dir = std::string(v); },
              [](const CliConfig& c) { return c.out_dir.string(); }},
        Entry{{"plot", "render SVG charts after compare"},
              [](CliConfig& c, std::string_view v) { c.plot = parse_bool("plot", v); },
              [](const CliConfig& c) { return std::string(c.plot ? "true" : "false"); }},
    };
    return table;
}

#undef REAL_ENTRY
#undef SIZE_ENTRY
#undef ENUM_ENTRY

const Entry& find_entry(std::string_view key) {
    for (const Entry& e : entries())
        if (e.key.name == key) return e;
    throw ContractViolation("config: unknown key '" + std::string(key) + "'");
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys = [] {
        std::vector<ConfigKey> k;
        for (const Entry& e : entries()) k.push_back(e.key);
        return k;
    }();
    return keys;
}

void apply_setting(CliConfig& cfg, std::string_view key, std::string_view value) {
    find_entry(trim(key)).set(cfg, trim(value));
}

void apply_config_text(CliConfig& cfg, std::string_view text) {
    std::size_t start = 0, line_no = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) {
            if (end == text.size()) break;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ContractViolation("config line " + std::to_string(line_no) + ": expected key = value");
        apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
        if (end == text.size()) break;
    }
}

std::string config_to_text(const CliConfig& cfg) {
    std::string out;
    for (const Entry& e : entries()) out += e.key.name + " = " + e.get(cfg) + "\n";
    return out;
}

std::string get_setting(const CliConfig& cfg, std::string_view key) { return find_entry(key).get(cfg); }

}  // namespace strbf
