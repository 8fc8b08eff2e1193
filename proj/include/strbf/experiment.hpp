#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "strbf/exec.hpp"
#include "strbf/kernels.hpp"
#include "strbf/network.hpp"
#include "strbf/series.hpp"

namespace strbf {

/// Where training-time noise goes.
enum class NoiseScope { TrainOnly, Everywhere };

std::string_view to_string(NoiseScope s) noexcept;
NoiseScope parse_noise_scope(std::string_view s);

/// Every knob of the comparison. Defaults are the reference setup:
/// Mackey-Glass (0.2, 0.1, 20), 30 dB noise on the training range,
/// train t in [100, 2500], test t in (2500, 3000], two-sample lag window,
/// RBF with 20 neurons at eta 0.01, STRBF with 2 x 10 neurons at eta 0.05
/// and half-width kernels, 100 Monte-Carlo runs.
struct ExperimentConfig {
    MackeyGlassParams series;
    double snr_db = 30.0;
    NoiseScope noise_scope = NoiseScope::TrainOnly;
    IndexRange train_range{100, 2500};
    IndexRange test_range{2501, 3000};
    std::size_t lag_count = 2;

    std::size_t rbf_neurons = 20;
    std::size_t strbf_neurons = 10;
    BranchInput branch_input = BranchInput::PerLag;
    KernelKind kernel = KernelKind::Gaussian;

    double eta_rbf = 1e-2;
    double eta_strbf = 5e-2;
    double spread_scale_rbf = 1.0;
    double spread_scale_strbf = 0.5;
    SpreadRule spread_rule = SpreadRule::NearestCentroid;

    Seeding kmeans_seeding = Seeding::RandomPoints;
    std::size_t kmeans_max_iters = 100;
    double kmeans_tol = 1e-6;
    double spread_min = 1e-3;
    double init_range = 0.5;

    std::size_t runs = 100;
    std::uint64_t base_seed = 1;
    std::size_t epochs = 1;
    std::size_t smoothing_window = 50;
    std::size_t prediction_run = 0;

    Topology rbf_topology() const;
    Topology strbf_topology() const;
    NetworkInitOptions init_options(ModelKind kind, Exec exec) const;
    void validate() const;
};

/// FNV-1a over the raw bytes of the samples.
std::uint64_t series_checksum(const TimeSeries& s) noexcept;

struct ModelRun {
    std::vector<double> train_trace;        // e^2(k) while learning
    double train_mse = 0.0;                 // trained model over the training windows
    double test_mse = 0.0;
    std::vector<double> test_squared_errors;
    std::vector<double> test_predictions;
    std::uint64_t series_checksum = 0;      // the noisy series this model saw
};

struct RunRecord {
    std::size_t run_index = 0;
    std::uint64_t seed = 0;
    ModelRun rbf;
    ModelRun strbf;
    std::vector<std::size_t> test_indices;  // series index of each test target
    std::vector<double> test_targets;
};

/// Clean series for the config (deterministic; shared by all runs).
TimeSeries clean_series(const ExperimentConfig& config);

/// One paired run: both networks see the same noisy realization.
RunRecord run_single(const ExperimentConfig& config, std::size_t run_index,
                     Exec exec = Exec::Parallel);
RunRecord run_single(const ExperimentConfig& config, const TimeSeries& clean, std::size_t run_index,
                     Exec exec = Exec::Parallel);

double mse_to_db(double mse);

struct RunStats {
    std::vector<double> per_run_train_mse;
    std::vector<double> per_run_test_mse;
    double mean_train_mse = 0.0;
    double mean_test_mse = 0.0;
    double mean_train_mse_db = 0.0;
    double mean_test_mse_db = 0.0;
    std::vector<double> train_curve;
    std::vector<double> test_curve;
    std::vector<std::uint64_t> run_seeds;
};

struct MonteCarloResult {
    RunStats rbf;
    RunStats strbf;
    std::vector<RunRecord> records;  // in aggregation order
};

/// Aggregates records in the order given: linear means, then dB.
MonteCarloResult aggregate(std::vector<RunRecord> records);

/// Runs 0 .. config.runs-1. Parallel mode spreads runs over OpenMP threads;
/// aggregation is serial in ascending run index either way.
MonteCarloResult run_monte_carlo(const ExperimentConfig& config, Exec exec = Exec::Parallel);

/// Same, over an explicit list of run indices aggregated in list order.
MonteCarloResult run_monte_carlo(const ExperimentConfig& config,
                                 std::span<const std::size_t> run_indices,
                                 Exec exec = Exec::Parallel);

/// Centered moving average, truncated at the edges; length preserved.
/// Sample i averages [i - w/2, i + (w-1)/2].
std::vector<double> smooth_curve(std::span<const double> trace, std::size_t window);

struct ComparisonRow {
    std::string configuration;
    double train_mse_db = 0.0;
    double test_mse_db = 0.0;
};

/// Two-row table plus per-phase gaps, gap = rbf_db - strbf_db (positive
/// when the STRBF is better).
struct ComparisonTable {
    ComparisonRow rbf;
    ComparisonRow strbf;
    double train_gap_db = 0.0;
    double test_gap_db = 0.0;
};

ComparisonTable summarize(const RunStats& rbf, const RunStats& strbf);

/// summary.csv: configuration,train_mse_db,test_mse_db,gap_db with rows
/// rbf, strbf and gap. gap_db is the validation gap relative to the RBF;
/// the gap row carries the per-phase gaps in the two MSE columns.
std::string summary_to_csv(const ComparisonTable& t);
ComparisonTable summary_from_csv(std::string_view text);

/// Writes summary.csv, train_curve.csv, test_curve.csv, predictions.csv and
/// runs.csv into `dir` (which must exist).
void write_artifacts(const std::filesystem::path& dir, const ExperimentConfig& config,
                     const MonteCarloResult& result);

}  // namespace strbf
