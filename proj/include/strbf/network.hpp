#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "strbf/exec.hpp"
#include "strbf/kernels.hpp"
#include "strbf/random.hpp"

namespace strbf {

struct WindowedDataset;

enum class ModelKind { Rbf, Strbf };

/// What a temporal branch of the STRBF sees.
///   PerLag      branch t gets the scalar lag component u[t]
///   FullVector  every branch gets the whole lag vector
enum class BranchInput { PerLag, FullVector };

std::string_view to_string(ModelKind k) noexcept;
std::string_view to_string(BranchInput b) noexcept;
ModelKind parse_model_kind(std::string_view s);
BranchInput parse_branch_input(std::string_view s);

struct Topology {
    ModelKind kind = ModelKind::Rbf;
    std::size_t spatial_size = 1;    // neurons per branch
    std::size_t temporal_depth = 1;  // branches
    std::size_t input_dim = 1;       // lag vector length
    BranchInput branch_input = BranchInput::PerLag;

    static Topology rbf(std::size_t neurons, std::size_t input_dim);
    static Topology strbf(std::size_t neurons_per_branch, std::size_t input_dim,
                          BranchInput branch = BranchInput::PerLag,
                          std::size_t branches = 0);

    std::size_t neuron_count() const noexcept { return spatial_size * temporal_depth; }
    /// Dimension of the vector each kernel is evaluated on.
    std::size_t kernel_dim() const noexcept {
        return kind == ModelKind::Strbf && branch_input == BranchInput::PerLag ? 1 : input_dim;
    }
    void validate() const;

    bool operator==(const Topology&) const = default;
};

/// Parameters of either network. Grids are S x T, row-major: neuron i of
/// branch t lives at i * T + t.
struct NetworkState {
    Topology topology;
    std::vector<KernelSpec> kernels;
    std::vector<double> weights;
    double bias = 0.0;

    std::size_t slot(std::size_t neuron, std::size_t branch) const noexcept {
        return neuron * topology.temporal_depth + branch;
    }
    void validate() const;

    bool operator==(const NetworkState&) const = default;
};

struct Forward {
    double prediction = 0.0;
    std::vector<double> activations;  // S x T, same layout as weights
};

struct StepResult {
    double prediction = 0.0;
    double error = 0.0;  // target - prediction
    std::vector<double> activations;
};

/// y = sum_i w_i psi_i(|u - c_i|) + p.
Forward forward_rbf(const NetworkState& state, std::span<const double> u);

/// y = sum_i sum_t w_(i,t) psi_(i,t)(branch_input(t), c_(i,t)) + p.
Forward forward_strbf(const NetworkState& state, std::span<const double> u);

/// Dispatches on state.topology.kind.
Forward forward(const NetworkState& state, std::span<const double> u);

inline constexpr double kDivergenceLimit = 1e6;

/// One online gradient step on O = e^2 / 2. Only weights and bias move:
///   w_(i,t) += eta * psi_(i,t) * e,   p += eta * e.
/// Throws TrainingDivergence (tagged with `iteration`) if |e| exceeds
/// kDivergenceLimit or any updated parameter is non-finite.
StepResult sgd_step(NetworkState& state, std::span<const double> u, double target, double eta,
                    std::size_t iteration = 0);

/// Sequential passes over the dataset in temporal order. Returns e^2(k)
/// for every step taken.
std::vector<double> train_online(NetworkState& state, const WindowedDataset& dataset, double eta,
                                 std::size_t epochs);

struct Evaluation {
    std::vector<double> predictions;
    double mse = 0.0;
};

/// Forward passes only; the MSE reduction is serial in window order.
Evaluation evaluate(const NetworkState& state, const WindowedDataset& dataset,
                    Exec exec = Exec::Parallel);

struct NetworkInitOptions {
    KernelKind kernel = KernelKind::Gaussian;
    double spread_scale = 1.0;
    KernelInitOptions kernel_init;
    /// Weights and bias are drawn uniformly from [-init_range, init_range].
    double init_range = 0.5;
};

/// RBF: one k-means fit over the full lag vectors, k = S.
/// STRBF: one independent fit per branch (per lag column, or the full
/// vectors for BranchInput::FullVector), k = S each.
/// Weights and bias are drawn after all kernels, from the same source.
NetworkState init_network(const Topology& topology, const WindowedDataset& dataset,
                          const NetworkInitOptions& opts, Rng& rng);

}  // namespace strbf
