#include "strbf/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <exception>
#include <sstream>

#include "strbf/errors.hpp"
#include "strbf/io.hpp"
#include "strbf/random.hpp"

namespace strbf {

std::string_view to_string(NoiseScope s) noexcept {
    return s == NoiseScope::TrainOnly ? "train_only" : "everywhere";
}

NoiseScope parse_noise_scope(std::string_view s) {
    if (s == "train_only") return NoiseScope::TrainOnly;
    if (s == "everywhere") return NoiseScope::Everywhere;
    throw ContractViolation("unknown noise scope '" + std::string(s) + "'");
}

Topology ExperimentConfig::rbf_topology() const { return Topology::rbf(rbf_neurons, lag_count); }

Topology ExperimentConfig::strbf_topology() const {
    return Topology::strbf(strbf_neurons, lag_count, branch_input);
}

NetworkInitOptions ExperimentConfig::init_options(ModelKind kind, Exec exec) const {
    NetworkInitOptions o;
    o.kernel = kernel;
    o.spread_scale = kind == ModelKind::Rbf ? spread_scale_rbf : spread_scale_strbf;
    o.kernel_init.spread_rule = spread_rule;
    o.kernel_init.kmeans.max_iters = kmeans_max_iters;
    o.kernel_init.kmeans.tol = kmeans_tol;
    o.kernel_init.kmeans.spread_min = spread_min;
    o.kernel_init.kmeans.seeding = kmeans_seeding;
    o.kernel_init.kmeans.exec = exec;
    o.init_range = init_range;
    return o;
}

void ExperimentConfig::validate() const {
    series.validate();
    auto fail = [](const std::string& m) { throw ContractViolation("config: " + m); };
    if (runs < 1) fail("runs must be >= 1");
    if (!(eta_rbf >= 0.0) || !(eta_strbf >= 0.0) || !std::isfinite(eta_rbf) || !std::isfinite(eta_strbf))
        fail("learning rates must be finite and >= 0");
    if (!(spread_scale_rbf > 0.0) || !(spread_scale_strbf > 0.0)) fail("spread scales must be > 0");
    if (train_range.first > train_range.last || test_range.first > test_range.last)
        fail("ranges must satisfy first <= last");
    if (train_range.overlaps(test_range)) fail("train and test ranges must be disjoint");
    const std::size_t n = static_cast<std::size_t>(std::floor(series.horizon / series.sample_interval + 1e-9)) + 1;
    if (train_range.last >= n || test_range.last >= n) fail("ranges exceed the generated series");
    if (lag_count < 1) fail("lag_count must be >= 1");
    if (smoothing_window < 1) fail("smoothing_window must be >= 1");
    if (prediction_run >= runs) fail("prediction_run must be < runs");
    if (std::isnan(snr_db)) fail("snr_db must be a number");
    rbf_topology();
    strbf_topology();
}

std::uint64_t series_checksum(const TimeSeries& s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (double v : s.values) {
        unsigned char bytes[sizeof(double)];
        std::memcpy(bytes, &v, sizeof v);
        for (unsigned char b : bytes) {
            h ^= b;
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

TimeSeries clean_series(const ExperimentConfig& config) { return generate_mackey_glass(config.series); }

namespace {

ModelRun train_and_test(const ExperimentConfig& cfg, ModelKind kind, const WindowedDataset& train,
                        const WindowedDataset& test, std::uint64_t checksum, std::uint64_t seed, Exec exec) {
    const bool is_rbf = kind == ModelKind::Rbf;
    Rng rng = make_stream(seed, is_rbf ? Stream::RbfInit : Stream::StrbfInit);
    NetworkState state = init_network(is_rbf ? cfg.rbf_topology() : cfg.strbf_topology(), train,
                                      cfg.init_options(kind, exec), rng);

    ModelRun out;
    out.series_checksum = checksum;
    out.train_trace = train_online(state, train, is_rbf ? cfg.eta_rbf : cfg.eta_strbf, cfg.epochs);
    out.train_mse = evaluate(state, train, exec).mse;

    Evaluation ev = evaluate(state, test, exec);
    out.test_mse = ev.mse;
    out.test_squared_errors.resize(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) {
        const double e = test.targets[i] - ev.predictions[i];
        out.test_squared_errors[i] = e * e;
    }
    out.test_predictions = std::move(ev.predictions);
    return out;
}

}  // namespace

RunRecord run_single(const ExperimentConfig& config, const TimeSeries& clean, std::size_t run_index,
                     Exec exec) {
    RunRecord rec;
    rec.run_index = run_index;
    rec.seed = derive_seed(config.base_seed, run_index);

    Rng noise_rng = make_stream(rec.seed, Stream::Noise);
    const IndexRange noise_range = config.noise_scope == NoiseScope::TrainOnly
                                       ? config.train_range
                                       : IndexRange{0, clean.size() - 1};
    const TimeSeries noisy = add_awgn(clean, config.snr_db, noise_rng, noise_range);
    const std::uint64_t checksum = series_checksum(noisy);

    const WindowedDataset train = make_windows(noisy, config.lag_count, config.train_range);
    const WindowedDataset test = make_windows(noisy, config.lag_count, config.test_range);
    rec.test_indices = test.source_indices;
    rec.test_targets = test.targets;

    try {
        rec.rbf = train_and_test(config, ModelKind::Rbf, train, test, checksum, rec.seed, exec);
        rec.strbf = train_and_test(config, ModelKind::Strbf, train, test, checksum, rec.seed, exec);
    } catch (const TrainingDivergence& e) {
        std::ostringstream msg;
        msg << "run " << run_index << ": " << e.what();
        throw TrainingDivergence(e.iteration(), msg.str(), run_index);
    }
    return rec;
}

RunRecord run_single(const ExperimentConfig& config, std::size_t run_index, Exec exec) {
    config.validate();
    return run_single(config, clean_series(config), run_index, exec);
}

double mse_to_db(double mse) {
    if (!(mse > 0.0)) throw DomainError("mse_to_db: mse must be > 0");
    return 10.0 * std::log10(mse);
}

namespace {

// Pointwise mean of equally long sequences, summed in record order.
std::vector<double> mean_curve(const std::vector<RunRecord>& records,
                               const std::vector<double>& (*pick)(const RunRecord&)) {
    std::vector<double> acc(pick(records.front()).size(), 0.0);
    for (const RunRecord& r : records) {
        const auto& c = pick(r);
        if (c.size() != acc.size()) throw ContractViolation("aggregate: runs have unequal curve lengths");
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += c[i];
    }
    for (double& v : acc) v /= static_cast<double>(records.size());
    return acc;
}

RunStats stats_for(const std::vector<RunRecord>& records, ModelKind kind) {
    const bool is_rbf = kind == ModelKind::Rbf;
    RunStats s;
    for (const RunRecord& r : records) {
        const ModelRun& m = is_rbf ? r.rbf : r.strbf;
        s.per_run_train_mse.push_back(m.train_mse);
        s.per_run_test_mse.push_back(m.test_mse);
        s.run_seeds.push_back(r.seed);
        s.mean_train_mse += m.train_mse;
        s.mean_test_mse += m.test_mse;
    }
    const auto n = static_cast<double>(records.size());
    s.mean_train_mse /= n;
    s.mean_test_mse /= n;
    s.mean_train_mse_db = mse_to_db(s.mean_train_mse);
    s.mean_test_mse_db = mse_to_db(s.mean_test_mse);
    if (is_rbf) {
        s.train_curve = mean_curve(records, [](const RunRecord& r) -> const std::vector<double>& { return r.rbf.train_trace; });
        s.test_curve = mean_curve(records, [](const RunRecord& r) -> const std::vector<double>& { return r.rbf.test_squared_errors; });
    } else {
        s.train_curve = mean_curve(records, [](const RunRecord& r) -> const std::vector<double>& { return r.strbf.train_trace; });
        s.test_curve = mean_curve(records, [](const RunRecord& r) -> const std::vector<double>& { return r.strbf.test_squared_errors; });
    }
    return s;
}

}  // namespace

MonteCarloResult aggregate(std::vector<RunRecord> records) {
    if (records.empty()) throw ContractViolation("aggregate: no runs");
    MonteCarloResult out;
    out.rbf = stats_for(records, ModelKind::Rbf);
    out.strbf = stats_for(records, ModelKind::Strbf);
    out.records = std::move(records);
    return out;
}

MonteCarloResult run_monte_carlo(const ExperimentConfig& config, std::span<const std::size_t> run_indices,
                                 Exec exec) {
    config.validate();
    if (run_indices.empty()) throw ContractViolation("run_monte_carlo: no runs requested");
    const TimeSeries clean = clean_series(config);

    std::vector<RunRecord> records(run_indices.size());
    if (exec == Exec::Parallel) {
        // Runs own all of their state. The first failure (lowest slot) is
        // rethrown after the loop so the reported context is deterministic.
        std::vector<std::exception_ptr> errors(run_indices.size());
        const auto n = static_cast<std::ptrdiff_t>(run_indices.size());
#pragma omp parallel for schedule(dynamic, 1)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            try {
                records[i] = run_single(config, clean, run_indices[i], Exec::Serial);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
        for (const auto& e : errors)
            if (e) std::rethrow_exception(e);
    } else {
        for (std::size_t i = 0; i < run_indices.size(); ++i)
            records[i] = run_single(config, clean, run_indices[i], Exec::Serial);
    }
    return aggregate(std::move(records));
}

MonteCarloResult run_monte_carlo(const ExperimentConfig& config, Exec exec) {
    std::vector<std::size_t> idx(config.runs);
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return run_monte_carlo(config, idx, exec);
}

std::vector<double> smooth_curve(std::span<const double> trace, std::size_t window) {
    if (window < 1) throw ContractViolation("smooth_curve: window must be >= 1");
    const std::size_t n = trace.size();
    std::vector<double> out(n);
    const std::size_t left = window / 2;
    const std::size_t right = (window - 1) / 2;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= left ? i - left : 0;
        const std::size_t hi = std::min(n - 1, i + right);
        double sum = 0.0;
        for (std::size_t j = lo; j <= hi; ++j) sum += trace[j];
        out[i] = sum / static_cast<double>(hi - lo + 1);
    }
    return out;
}

ComparisonTable summarize(const RunStats& rbf, const RunStats& strbf) {
    ComparisonTable t;
    t.rbf = {"rbf", rbf.mean_train_mse_db, rbf.mean_test_mse_db};
    t.strbf = {"strbf", strbf.mean_train_mse_db, strbf.mean_test_mse_db};
    t.train_gap_db = rbf.mean_train_mse_db - strbf.mean_train_mse_db;
    t.test_gap_db = rbf.mean_test_mse_db - strbf.mean_test_mse_db;
    return t;
}

std::string summary_to_csv(const ComparisonTable& t) {
    CsvTable csv;
    csv.header = {"configuration", "train_mse_db", "test_mse_db", "gap_db"};
    csv.rows.push_back({t.rbf.configuration, format_double(t.rbf.train_mse_db),
                        format_double(t.rbf.test_mse_db), format_double(0.0)});
    csv.rows.push_back({t.strbf.configuration, format_double(t.strbf.train_mse_db),
                        format_double(t.strbf.test_mse_db), format_double(t.test_gap_db)});
    csv.rows.push_back({"gap", format_double(t.train_gap_db), format_double(t.test_gap_db),
                        format_double(t.test_gap_db)});
    return to_csv(csv);
}

ComparisonTable summary_from_csv(std::string_view text) {
    const CsvTable csv = parse_csv(text);
    const std::size_t c_name = csv.column("configuration");
    const std::size_t c_train = csv.column("train_mse_db");
    const std::size_t c_test = csv.column("test_mse_db");
    ComparisonTable t;
    bool have_rbf = false, have_strbf = false, have_gap = false;
    for (const auto& r : csv.rows) {
        const double tr = parse_double(r[c_train]);
        const double te = parse_double(r[c_test]);
        if (r[c_name] == "rbf") {
            t.rbf = {"rbf", tr, te};
            have_rbf = true;
        } else if (r[c_name] == "strbf") {
            t.strbf = {"strbf", tr, te};
            have_strbf = true;
        } else if (r[c_name] == "gap") {
            t.train_gap_db = tr;
            t.test_gap_db = te;
            have_gap = true;
        }
    }
    if (!have_rbf || !have_strbf || !have_gap) throw IoError("summary csv: expected rbf, strbf and gap rows");
    return t;
}

void write_artifacts(const std::filesystem::path& dir, const ExperimentConfig& config,
                     const MonteCarloResult& result) {
    write_text_file(dir / "summary.csv", summary_to_csv(summarize(result.rbf, result.strbf)));

    auto curve_csv = [&](const std::vector<double>& rbf, const std::vector<double>& strbf) {
        const auto rs = smooth_curve(rbf, config.smoothing_window);
        const auto ss = smooth_curve(strbf, config.smoothing_window);
        CsvTable t;
        t.header = {"iteration", "rbf_mse", "strbf_mse", "rbf_mse_smoothed", "strbf_mse_smoothed"};
        for (std::size_t i = 0; i < rbf.size(); ++i)
            t.rows.push_back({std::to_string(i), format_double(rbf[i]), format_double(strbf[i]),
                              format_double(rs[i]), format_double(ss[i])});
        return to_csv(t);
    };
    write_text_file(dir / "train_curve.csv", curve_csv(result.rbf.train_curve, result.strbf.train_curve));
    write_text_file(dir / "test_curve.csv", curve_csv(result.rbf.test_curve, result.strbf.test_curve));

    const RunRecord* shown = nullptr;
    for (const RunRecord& r : result.records)
        if (r.run_index == config.prediction_run) shown = &r;
    if (shown == nullptr) shown = &result.records.front();
    {
        CsvTable t;
        t.header = {"t", "actual", "rbf_pred", "strbf_pred"};
        const double dt = config.series.sample_interval;
        for (std::size_t i = 0; i < shown->test_targets.size(); ++i)
            t.rows.push_back({format_double(static_cast<double>(shown->test_indices[i]) * dt),
                              format_double(shown->test_targets[i]),
                              format_double(shown->rbf.test_predictions[i]),
                              format_double(shown->strbf.test_predictions[i])});
        write_text_file(dir / "predictions.csv", to_csv(t));
    }
    {
        CsvTable t;
        t.header = {"run_index", "seed", "rbf_train_mse", "rbf_test_mse", "strbf_train_mse", "strbf_test_mse"};
        for (const RunRecord& r : result.records)
            t.rows.push_back({std::to_string(r.run_index), std::to_string(r.seed),
                              format_double(r.rbf.train_mse), format_double(r.rbf.test_mse),
                              format_double(r.strbf.train_mse), format_double(r.strbf.test_mse)});
        write_text_file(dir / "runs.csv", to_csv(t));
    }
}

}  // namespace strbf
