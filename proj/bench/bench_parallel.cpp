// Wall-clock comparison of the OpenMP kernels against their serial
// reference: k-means assignment, batch evaluation and the Monte-Carlo
// driver. Each pair is also checked for bit-identical output.
//
//   strbf_bench [runs]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include <omp.h>

#include "strbf/experiment.hpp"
#include "strbf/kernels.hpp"
#include "strbf/network.hpp"
#include "strbf/series.hpp"

using namespace strbf;
using Clock = std::chrono::steady_clock;

template <class F>
double best_of(int reps, F&& f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = Clock::now();
        f();
        const double s = std::chrono::duration<double>(Clock::now() - t0).count();
        if (s < best) best = s;
    }
    return best;
}

void report(const char* name, double serial, double parallel, bool identical) {
    std::printf("%-22s serial %9.4f s  parallel %9.4f s  speedup %5.2fx  %s\n", name, serial, parallel,
                serial / parallel, identical ? "identical" : "MISMATCH");
}

int main(int argc, char** argv) {
    const std::size_t runs = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 16;
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());

    ExperimentConfig cfg;
    cfg.runs = runs;
    const TimeSeries series = clean_series(cfg);
    const WindowedDataset train = make_windows(series, cfg.lag_count, cfg.train_range);

    {
        KMeansOptions opts;
        opts.k = 64;
        Rng rng(7);
        const auto init = seed_centroids(train.inputs, train.lag_count, opts.k, opts.seeding, rng);
        ClusterModel ser, par;
        opts.exec = Exec::Serial;
        const double ts = best_of(5, [&] { ser = kmeans_fit_from(train.inputs, train.lag_count, init, opts); });
        opts.exec = Exec::Parallel;
        const double tp = best_of(5, [&] { par = kmeans_fit_from(train.inputs, train.lag_count, init, opts); });
        report("kmeans k=64", ts, tp, ser.centroids == par.centroids && ser.inertia == par.inertia);
    }

    {
        Rng rng(11);
        const NetworkState state = init_network(Topology::rbf(200, cfg.lag_count), train, {}, rng);
        Evaluation ser, par;
        const double ts = best_of(5, [&] { ser = evaluate(state, train, Exec::Serial); });
        const double tp = best_of(5, [&] { par = evaluate(state, train, Exec::Parallel); });
        report("evaluate S=200", ts, tp, ser.predictions == par.predictions && ser.mse == par.mse);
    }

    {
        MonteCarloResult ser, par;
        const double ts = best_of(1, [&] { ser = run_monte_carlo(cfg, Exec::Serial); });
        const double tp = best_of(1, [&] { par = run_monte_carlo(cfg, Exec::Parallel); });
        const bool same = ser.rbf.per_run_test_mse == par.rbf.per_run_test_mse &&
                          ser.strbf.per_run_test_mse == par.strbf.per_run_test_mse &&
                          ser.rbf.train_curve == par.rbf.train_curve;
        const std::string name = "monte carlo x" + std::to_string(runs);
        report(name.c_str(), ts, tp, same);
    }
    return 0;
}
