#include <cmath>
#include <vector>

#include "doctest.h"
#include "strbf/errors.hpp"
#include "strbf/network.hpp"
#include "strbf/series.hpp"

using namespace strbf;

namespace {

WindowedDataset toy_dataset(std::size_t n, std::size_t lags, std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_real_distribution<double> U(0.2, 1.3);
    WindowedDataset ds;
    ds.lag_count = lags;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t l = 0; l < lags; ++l) ds.inputs.push_back(U(rng));
        ds.targets.push_back(U(rng));
        ds.source_indices.push_back(i + lags);
    }
    return ds;
}

NetworkState random_state(const Topology& topo, std::uint64_t seed, KernelKind kind = KernelKind::Gaussian) {
    Rng rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0), S(0.3, 1.2);
    NetworkState st;
    st.topology = topo;
    for (std::size_t s = 0; s < topo.neuron_count(); ++s) {
        KernelSpec k{kind, {}, S(rng)};
        for (std::size_t d = 0; d < topo.kernel_dim(); ++d) k.center.push_back(U(rng));
        st.kernels.push_back(k);
        st.weights.push_back(U(rng));
    }
    st.bias = U(rng);
    return st;
}

// Direct transcription of the network equations, Gaussian kernels only.
double oracle_predict(const NetworkState& st, const double* u) {
    const Topology& tp = st.topology;
    double y = st.bias;
    for (std::size_t i = 0; i < tp.spatial_size; ++i)
        for (std::size_t t = 0; t < tp.temporal_depth; ++t) {
            const KernelSpec& k = st.kernels[i * tp.temporal_depth + t];
            double r2 = 0;
            if (tp.kind == ModelKind::Strbf && tp.branch_input == BranchInput::PerLag)
                r2 = (u[t] - k.center[0]) * (u[t] - k.center[0]);
            else
                for (std::size_t d = 0; d < tp.input_dim; ++d) r2 += (u[d] - k.center[d]) * (u[d] - k.center[d]);
            y += st.weights[i * tp.temporal_depth + t] * std::exp(-r2 / (k.spread * k.spread));
        }
    return y;
}

double objective(const NetworkState& st, std::span<const double> u, double d) {
    const double e = d - forward(st, u).prediction;
    return 0.5 * e * e;
}

}  // namespace

TEST_CASE("topology factories and validation") {
    const Topology r = Topology::rbf(20, 2);
    CHECK(r.neuron_count() == 20);
    CHECK(r.kernel_dim() == 2);
    const Topology s = Topology::strbf(10, 2);
    CHECK(s.temporal_depth == 2);
    CHECK(s.neuron_count() == 20);
    CHECK(s.kernel_dim() == 1);
    const Topology f = Topology::strbf(10, 2, BranchInput::FullVector, 3);
    CHECK(f.temporal_depth == 3);
    CHECK(f.kernel_dim() == 2);
    Topology bad = s;
    bad.temporal_depth = 3;
    CHECK_THROWS_AS(bad.validate(), ContractViolation);
    bad = r;
    bad.spatial_size = 0;
    CHECK_THROWS_AS(bad.validate(), ContractViolation);
    CHECK(parse_model_kind("strbf") == ModelKind::Strbf);
    CHECK(parse_branch_input(to_string(BranchInput::FullVector)) == BranchInput::FullVector);
}

TEST_CASE("forward pass matches the network equations") {
    const WindowedDataset ds = toy_dataset(50, 2, 1);
    for (const Topology& topo : {Topology::rbf(7, 2), Topology::strbf(5, 2),
                                 Topology::strbf(4, 2, BranchInput::FullVector, 3)}) {
        const NetworkState st = random_state(topo, 42);
        for (std::size_t i = 0; i < ds.size(); ++i) {
            const std::span<const double> u(ds.input(i), 2);
            const Forward f = forward(st, u);
            CHECK(std::abs(f.prediction - oracle_predict(st, ds.input(i))) < 1e-12);
            CHECK(f.activations.size() == topo.neuron_count());
        }
    }
    const NetworkState st = random_state(Topology::rbf(3, 2), 1);
    const std::vector<double> wrong{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(forward(st, wrong), ContractViolation);
    CHECK_THROWS_AS(forward_strbf(st, std::span<const double>(wrong).first(2)), ContractViolation);
}

TEST_CASE("single-neuron SGD step by hand") {
    NetworkState st;
    st.topology = Topology::rbf(1, 1);
    st.kernels = {KernelSpec{KernelKind::Gaussian, {0.0}, 1.0}};
    st.weights = {0.5};
    st.bias = 0.1;
    const std::vector<double> u{1.0};
    const double psi = std::exp(-1.0);
    const double y = 0.5 * psi + 0.1;
    const double d = 1.0;
    const StepResult r = sgd_step(st, u, d, 0.1);
    CHECK(std::abs(r.prediction - y) < 1e-15);
    CHECK(std::abs(r.error - (d - y)) < 1e-15);
    CHECK(std::abs(st.weights[0] - (0.5 + 0.1 * psi * (d - y))) < 1e-15);
    CHECK(std::abs(st.bias - (0.1 + 0.1 * (d - y))) < 1e-15);
    // Kernels stay put.
    CHECK(st.kernels[0].center[0] == 0.0);
    CHECK(st.kernels[0].spread == 1.0);
}

TEST_CASE("update equals minus eta times the finite-difference gradient") {
    const WindowedDataset ds = toy_dataset(20, 2, 5);
    const double eta = 0.05;
    for (const Topology& topo : {Topology::rbf(6, 2), Topology::strbf(4, 2)}) {
        for (std::size_t n = 0; n < ds.size(); ++n) {
            const NetworkState st = random_state(topo, 100 + n);
            const std::span<const double> u(ds.input(n), 2);
            const double d = ds.targets[n];
            NetworkState stepped = st;
            sgd_step(stepped, u, d, eta);
            // O is quadratic in (w, p), so the central difference is exact
            // up to rounding for any h.
            const double h = 1e-3;
            for (std::size_t s = 0; s <= st.weights.size(); ++s) {
                NetworkState plus = st, minus = st;
                double delta;
                if (s < st.weights.size()) {
                    plus.weights[s] += h;
                    minus.weights[s] -= h;
                    delta = stepped.weights[s] - st.weights[s];
                } else {
                    plus.bias += h;
                    minus.bias -= h;
                    delta = stepped.bias - st.bias;
                }
                const double grad = (objective(plus, u, d) - objective(minus, u, d)) / (2 * h);
                const double expect = -eta * grad;
                CHECK(std::abs(delta - expect) <= 1e-6 * std::max(std::abs(expect), 1e-8));
            }
        }
    }
}

TEST_CASE("bias follows the LMS recursion when every kernel is silent") {
    NetworkState st;
    st.topology = Topology::rbf(2, 2);
    st.kernels = {KernelSpec{KernelKind::Gaussian, {1e3, 1e3}, 1.0}, KernelSpec{KernelKind::Gaussian, {-1e3, 1e3}, 1.0}};
    st.weights = {0.3, -0.2};
    st.bias = 0.0;
    const WindowedDataset ds = toy_dataset(200, 2, 8);
    const double eta = 0.05;
    const auto trace = train_online(st, ds, eta, 1);
    double p = 0.0;
    for (std::size_t k = 0; k < ds.size(); ++k) {
        const double e = ds.targets[k] - p;
        CHECK(trace[k] == doctest::Approx(e * e).epsilon(1e-12));
        p += eta * e;
    }
    CHECK(std::abs(st.bias - p) < 1e-12);
    CHECK(st.weights == std::vector<double>{0.3, -0.2});
}

TEST_CASE("online training matches a transcription of the update rule") {
    const WindowedDataset ds = toy_dataset(300, 2, 13);
    for (const Topology& topo : {Topology::rbf(5, 2), Topology::strbf(3, 2)}) {
        NetworkState st = random_state(topo, 77);
        NetworkState ref = st;
        const auto trace = train_online(st, ds, 0.02, 2);
        REQUIRE(trace.size() == 600);
        for (std::size_t k = 0; k < 600; ++k) {
            const double* u = ds.input(k % 300);
            const double e = ds.targets[k % 300] - oracle_predict(ref, u);
            CHECK(std::abs(trace[k] - e * e) < 1e-12);
            const Forward f = forward(ref, std::span<const double>(u, 2));
            for (std::size_t s = 0; s < ref.weights.size(); ++s) ref.weights[s] += 0.02 * f.activations[s] * e;
            ref.bias += 0.02 * e;
        }
        for (std::size_t s = 0; s < ref.weights.size(); ++s) CHECK(std::abs(st.weights[s] - ref.weights[s]) < 1e-12);
        CHECK(std::abs(st.bias - ref.bias) < 1e-12);
    }
}

TEST_CASE("training edge cases") {
    const WindowedDataset ds = toy_dataset(10, 2, 3);
    NetworkState st = random_state(Topology::rbf(3, 2), 9);
    const NetworkState before = st;
    train_online(st, ds, 0.0, 1);
    CHECK(st == before);
    CHECK(train_online(st, ds, 0.1, 0).empty());
    CHECK(st == before);
    CHECK_THROWS_AS(train_online(st, ds, -0.1, 1), ContractViolation);
    CHECK_THROWS_AS(train_online(st, WindowedDataset{{}, {}, 2, {}}, 0.1, 1), EmptyDatasetError);
    const WindowedDataset wrong = toy_dataset(10, 3, 3);
    CHECK_THROWS_AS(train_online(st, wrong, 0.1, 1), ContractViolation);

    // A runaway learning rate trips the divergence guard with the step index.
    NetworkState big = random_state(Topology::rbf(3, 2), 9, KernelKind::Multiquadric);
    try {
        train_online(big, ds, 1e4, 5);
        FAIL("expected divergence");
    } catch (const TrainingDivergence& e) {
        CHECK(e.iteration() < 50);
        CHECK(e.kind() == std::string("divergence"));
    }
}

TEST_CASE("evaluation is pure and its MSE is the mean squared residual") {
    const WindowedDataset ds = toy_dataset(500, 2, 21);
    const NetworkState st = random_state(Topology::strbf(4, 2), 3);
    const NetworkState copy = st;
    const Evaluation a = evaluate(st, ds, Exec::Serial);
    const Evaluation b = evaluate(st, ds, Exec::Parallel);
    CHECK(st == copy);
    CHECK(a.predictions == b.predictions);
    CHECK(a.mse == b.mse);
    double sum = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        CHECK(std::abs(a.predictions[i] - oracle_predict(st, ds.input(i))) < 1e-12);
        sum += (ds.targets[i] - a.predictions[i]) * (ds.targets[i] - a.predictions[i]);
    }
    CHECK(std::abs(a.mse - sum / 500.0) < 1e-14);
}

TEST_CASE("network initialisation") {
    MackeyGlassParams p;
    p.horizon = 800;
    const TimeSeries s = generate_mackey_glass(p);
    const WindowedDataset ds = make_windows(s, 2, {100, 799});
    NetworkInitOptions opts;
    Rng r1(5), r2(5);
    const NetworkState a = init_network(Topology::rbf(20, 2), ds, opts, r1);
    const NetworkState b = init_network(Topology::rbf(20, 2), ds, opts, r2);
    CHECK(a == b);
    CHECK(a.kernels.size() == 20);
    CHECK(a.weights.size() == 20);
    for (double w : a.weights) CHECK(std::abs(w) <= 0.5);
    CHECK(std::abs(a.bias) <= 0.5);
    CHECK_NOTHROW(a.validate());

    opts.spread_scale = 0.5;
    Rng r3(6);
    const NetworkState st = init_network(Topology::strbf(10, 2), ds, opts, r3);
    CHECK(st.kernels.size() == 20);
    CHECK(st.weights.size() == 20);
    CHECK_NOTHROW(st.validate());
    // Branch t clusters lag column t: its centers stay inside that column's range.
    for (std::size_t t = 0; t < 2; ++t) {
        double lo = 1e9, hi = -1e9;
        for (std::size_t i = 0; i < ds.size(); ++i) lo = std::min(lo, ds.input(i)[t]), hi = std::max(hi, ds.input(i)[t]);
        for (std::size_t i = 0; i < 10; ++i) {
            const KernelSpec& k = st.kernels[st.slot(i, t)];
            REQUIRE(k.center.size() == 1);
            CHECK(k.center[0] >= lo);
            CHECK(k.center[0] <= hi);
        }
    }
}

TEST_CASE("an STRBF with one full-vector branch is exactly an RBF") {
    const WindowedDataset ds = toy_dataset(1000, 2, 99);
    NetworkState rbf = random_state(Topology::rbf(6, 2), 4);
    NetworkState strbf = rbf;
    strbf.topology = Topology::strbf(6, 2, BranchInput::FullVector, 1);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const std::span<const double> u(ds.input(i), 2);
        CHECK(forward(rbf, u).prediction == forward(strbf, u).prediction);
    }
    train_online(rbf, ds, 0.05, 1);
    train_online(strbf, ds, 0.05, 1);
    CHECK(rbf.weights == strbf.weights);
    CHECK(rbf.bias == strbf.bias);

    // Scalar inputs: per-lag STRBF with one lag reduces the same way.
    const WindowedDataset ds1 = toy_dataset(1000, 1, 98);
    NetworkState r1 = random_state(Topology::rbf(5, 1), 6);
    NetworkState s1 = r1;
    s1.topology = Topology::strbf(5, 1);
    for (std::size_t i = 0; i < ds1.size(); ++i) {
        const std::span<const double> u(ds1.input(i), 1);
        CHECK(forward(r1, u).prediction == forward(s1, u).prediction);
    }
}
