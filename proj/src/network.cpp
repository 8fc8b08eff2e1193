#include "strbf/network.hpp"

#include <cmath>
#include <sstream>

#include "strbf/errors.hpp"
#include "strbf/series.hpp"

namespace strbf {

std::string_view to_string(ModelKind k) noexcept { return k == ModelKind::Rbf ? "rbf" : "strbf"; }

std::string_view to_string(BranchInput b) noexcept {
    return b == BranchInput::PerLag ? "per_lag" : "full_vector";
}

ModelKind parse_model_kind(std::string_view s) {
    if (s == "rbf") return ModelKind::Rbf;
    if (s == "strbf") return ModelKind::Strbf;
    throw ContractViolation("unknown model kind '" + std::string(s) + "'");
}

BranchInput parse_branch_input(std::string_view s) {
    if (s == "per_lag") return BranchInput::PerLag;
    if (s == "full_vector") return BranchInput::FullVector;
    throw ContractViolation("unknown branch input '" + std::string(s) + "'");
}

Topology Topology::rbf(std::size_t neurons, std::size_t input_dim) {
    Topology t{ModelKind::Rbf, neurons, 1, input_dim, BranchInput::FullVector};
    t.validate();
    return t;
}

Topology Topology::strbf(std::size_t neurons_per_branch, std::size_t input_dim, BranchInput branch,
                         std::size_t branches) {
    const std::size_t depth = branch == BranchInput::PerLag || branches == 0 ? input_dim : branches;
    Topology t{ModelKind::Strbf, neurons_per_branch, depth, input_dim, branch};
    t.validate();
    return t;
}

void Topology::validate() const {
    if (spatial_size < 1) throw ContractViolation("topology: spatial_size must be >= 1");
    if (temporal_depth < 1) throw ContractViolation("topology: temporal_depth must be >= 1");
    if (input_dim < 1) throw ContractViolation("topology: input_dim must be >= 1");
    if (kind == ModelKind::Rbf && temporal_depth != 1)
        throw ContractViolation("topology: rbf requires temporal_depth = 1");
    if (kind == ModelKind::Strbf && branch_input == BranchInput::PerLag && temporal_depth != input_dim)
        throw ContractViolation("topology: per-lag strbf requires temporal_depth = input_dim");
}

void NetworkState::validate() const {
    topology.validate();
    const std::size_t n = topology.neuron_count();
    if (kernels.size() != n || weights.size() != n)
        throw ContractViolation("network: kernel/weight grids must be spatial_size x temporal_depth");
    for (const KernelSpec& k : kernels) {
        if (k.center.size() != topology.kernel_dim())
            throw ContractViolation("network: kernel center dimension mismatch");
        if (!(k.spread > 0.0) || !std::isfinite(k.spread))
            throw ContractViolation("network: kernel spreads must be positive");
    }
    for (double w : weights)
        if (!std::isfinite(w)) throw ContractViolation("network: non-finite weight");
    if (!std::isfinite(bias)) throw ContractViolation("network: non-finite bias");
}

namespace {

void check_input(const NetworkState& s, std::span<const double> u, ModelKind expected) {
    if (s.topology.kind != expected)
        throw ContractViolation(std::string("forward: state is not an ") + std::string(to_string(expected)));
    if (u.size() != s.topology.input_dim)
        throw ContractViolation("forward: input has " + std::to_string(u.size()) +
                                " components, topology expects " + std::to_string(s.topology.input_dim));
}

}  // namespace

Forward forward_rbf(const NetworkState& state, std::span<const double> u) {
    check_input(state, u, ModelKind::Rbf);
    const std::size_t n = state.topology.spatial_size;
    Forward f;
    f.activations.resize(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const KernelSpec& k = state.kernels[i];
        const double psi = radial_profile(k.kind, squared_distance(u, k.center), k.spread);
        f.activations[i] = psi;
        acc += state.weights[i] * psi;
    }
    f.prediction = acc + state.bias;
    return f;
}

Forward forward_strbf(const NetworkState& state, std::span<const double> u) {
    check_input(state, u, ModelKind::Strbf);
    const Topology& topo = state.topology;
    const bool per_lag = topo.branch_input == BranchInput::PerLag;
    Forward f;
    f.activations.resize(topo.neuron_count());
    double acc = 0.0;
    for (std::size_t i = 0; i < topo.spatial_size; ++i) {
        for (std::size_t t = 0; t < topo.temporal_depth; ++t) {
            const std::size_t s = state.slot(i, t);
            const KernelSpec& k = state.kernels[s];
            const std::span<const double> branch = per_lag ? u.subspan(t, 1) : u;
            const double psi = radial_profile(k.kind, squared_distance(branch, k.center), k.spread);
            f.activations[s] = psi;
            acc += state.weights[s] * psi;
        }
    }
    f.prediction = acc + state.bias;
    return f;
}

Forward forward(const NetworkState& state, std::span<const double> u) {
    return state.topology.kind == ModelKind::Rbf ? forward_rbf(state, u) : forward_strbf(state, u);
}

StepResult sgd_step(NetworkState& state, std::span<const double> u, double target, double eta,
                    std::size_t iteration) {
    if (!(eta >= 0.0) || !std::isfinite(eta)) throw ContractViolation("sgd_step: eta must be >= 0");

    Forward f = forward(state, u);
    const double e = target - f.prediction;
    if (!std::isfinite(e) || std::abs(e) > kDivergenceLimit) {
        std::ostringstream msg;
        msg << "training diverged at iteration " << iteration << ": error " << e;
        throw TrainingDivergence(iteration, msg.str());
    }

    const double step = eta * e;
    for (std::size_t s = 0; s < state.weights.size(); ++s) state.weights[s] += step * f.activations[s];
    state.bias += step;

    for (double w : state.weights) {
        if (!std::isfinite(w)) {
            std::ostringstream msg;
            msg << "training diverged at iteration " << iteration << ": non-finite weight";
            throw TrainingDivergence(iteration, msg.str());
        }
    }
    return StepResult{f.prediction, e, std::move(f.activations)};
}

std::vector<double> train_online(NetworkState& state, const WindowedDataset& dataset, double eta,
                                 std::size_t epochs) {
    if (dataset.size() == 0) throw EmptyDatasetError("train_online: empty dataset");
    if (dataset.lag_count != state.topology.input_dim)
        throw ContractViolation("train_online: dataset lag_count does not match topology input_dim");

    std::vector<double> trace;
    trace.reserve(dataset.size() * epochs);
    std::size_t k = 0;
    for (std::size_t ep = 0; ep < epochs; ++ep) {
        for (std::size_t i = 0; i < dataset.size(); ++i, ++k) {
            const StepResult r = sgd_step(state, {dataset.input(i), dataset.lag_count},
                                          dataset.targets[i], eta, k);
            trace.push_back(r.error * r.error);
        }
    }
    return trace;
}

Evaluation evaluate(const NetworkState& state, const WindowedDataset& dataset, Exec exec) {
    if (dataset.size() == 0) throw EmptyDatasetError("evaluate: empty dataset");
    if (dataset.lag_count != state.topology.input_dim)
        throw ContractViolation("evaluate: dataset lag_count does not match topology input_dim");

    Evaluation ev;
    ev.predictions.resize(dataset.size());
    const auto n = static_cast<std::ptrdiff_t>(dataset.size());
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i)
            ev.predictions[i] = forward(state, {dataset.input(i), dataset.lag_count}).prediction;
    } else {
        for (std::ptrdiff_t i = 0; i < n; ++i)
            ev.predictions[i] = forward(state, {dataset.input(i), dataset.lag_count}).prediction;
    }

    double sum = 0.0;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const double e = dataset.targets[i] - ev.predictions[i];
        sum += e * e;
    }
    ev.mse = sum / static_cast<double>(dataset.size());
    return ev;
}

NetworkState init_network(const Topology& topology, const WindowedDataset& dataset,
                          const NetworkInitOptions& opts, Rng& rng) {
    topology.validate();
    if (dataset.size() == 0) throw EmptyDatasetError("init_network: empty dataset");
    if (dataset.lag_count != topology.input_dim)
        throw ContractViolation("init_network: dataset lag_count does not match topology input_dim");
    if (!(opts.init_range >= 0.0)) throw ContractViolation("init_network: init_range must be >= 0");

    NetworkState state;
    state.topology = topology;
    const std::size_t S = topology.spatial_size;
    const std::size_t T = topology.temporal_depth;
    state.kernels.resize(S * T);

    const bool per_lag = topology.kind == ModelKind::Strbf && topology.branch_input == BranchInput::PerLag;
    std::vector<double> column;
    for (std::size_t t = 0; t < T; ++t) {
        std::vector<KernelSpec> branch;
        if (per_lag) {
            column.resize(dataset.size());
            for (std::size_t i = 0; i < dataset.size(); ++i) column[i] = dataset.input(i)[t];
            branch = init_kernels(column, 1, S, opts.kernel, opts.spread_scale, rng, opts.kernel_init);
        } else {
            branch = init_kernels(dataset, S, opts.kernel, opts.spread_scale, rng, opts.kernel_init);
        }
        for (std::size_t i = 0; i < S; ++i) state.kernels[state.slot(i, t)] = std::move(branch[i]);
    }

    std::uniform_real_distribution<double> init(-opts.init_range, opts.init_range);
    state.weights.resize(S * T);
    for (double& w : state.weights) w = init(rng);
    state.bias = init(rng);
    return state;
}

}  // namespace strbf
