#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "doctest.h"
#include "strbf/errors.hpp"
#include "strbf/kernels.hpp"
#include "strbf/series.hpp"

using namespace strbf;

namespace {

std::vector<double> two_blobs(std::size_t per_blob, Rng& rng) {
    std::normal_distribution<double> n(0.0, 0.1);
    std::vector<double> pts;
    for (std::size_t i = 0; i < per_blob; ++i) pts.insert(pts.end(), {-5.0 + n(rng), -5.0 + n(rng)});
    for (std::size_t i = 0; i < per_blob; ++i) pts.insert(pts.end(), {5.0 + n(rng), 5.0 + n(rng)});
    return pts;
}

// Textbook Lloyd with lowest-index tie breaking, no empty-cluster handling.
struct RefFit {
    std::vector<double> centroids;
    std::vector<std::size_t> labels;
    bool had_empty = false;
};

RefFit reference_lloyd(const std::vector<double>& pts, std::size_t dim, std::vector<double> c,
                       std::size_t iters, double tol) {
    const std::size_t n = pts.size() / dim, k = c.size() / dim;
    RefFit r;
    r.labels.assign(n, 0);
    auto assign = [&] {
        for (std::size_t i = 0; i < n; ++i) {
            double best = 1e300;
            for (std::size_t j = 0; j < k; ++j) {
                double d = 0;
                for (std::size_t q = 0; q < dim; ++q) d += (pts[i * dim + q] - c[j * dim + q]) * (pts[i * dim + q] - c[j * dim + q]);
                if (d < best) best = d, r.labels[i] = j;
            }
        }
    };
    for (std::size_t it = 0; it < iters; ++it) {
        assign();
        std::vector<double> sum(k * dim, 0.0);
        std::vector<double> cnt(k, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            cnt[r.labels[i]] += 1;
            for (std::size_t q = 0; q < dim; ++q) sum[r.labels[i] * dim + q] += pts[i * dim + q];
        }
        double move = 0;
        for (std::size_t j = 0; j < k; ++j) {
            if (cnt[j] == 0) {
                r.had_empty = true;
                continue;
            }
            double m = 0;
            for (std::size_t q = 0; q < dim; ++q) {
                const double nv = sum[j * dim + q] / cnt[j];
                m += (nv - c[j * dim + q]) * (nv - c[j * dim + q]);
                c[j * dim + q] = nv;
            }
            move = std::max(move, std::sqrt(m));
        }
        if (move < tol) break;
    }
    assign();
    r.centroids = c;
    return r;
}

}  // namespace

TEST_CASE("kernel identities") {
    const std::vector<double> c{0.3, -0.7};
    for (KernelKind kind : {KernelKind::Gaussian, KernelKind::Multiquadric, KernelKind::InverseMultiquadric}) {
        const KernelSpec k{kind, c, 0.8};
        const double at_center = eval_kernel(k, c);
        switch (kind) {
            case KernelKind::Gaussian: CHECK(std::abs(at_center - 1.0) < 1e-12); break;
            case KernelKind::Multiquadric: CHECK(std::abs(at_center - 0.8) < 1e-12); break;
            case KernelKind::InverseMultiquadric: CHECK(std::abs(at_center - 1.25) < 1e-12); break;
        }
    }
    const KernelSpec g{KernelKind::Gaussian, {0.0, 0.0}, 1.0};
    const std::vector<double> u{1.0, 0.0};
    CHECK(std::abs(eval_kernel(g, u) - std::exp(-1.0)) < 1e-12);
    const KernelSpec g2{KernelKind::Gaussian, {0.0, 0.0}, 2.0};
    const std::vector<double> u2{1.0, 1.0};
    CHECK(std::abs(eval_kernel(g2, u2) - std::exp(-0.5)) < 1e-12);
    const KernelSpec mq{KernelKind::Multiquadric, {0.0}, 4.0};
    const std::vector<double> three{3.0};
    CHECK(std::abs(eval_kernel(mq, three) - 5.0) < 1e-12);
    const KernelSpec imq{KernelKind::InverseMultiquadric, {0.0}, 4.0};
    CHECK(std::abs(eval_kernel(imq, three) - 0.2) < 1e-12);
}

TEST_CASE("kernels depend on the distance only") {
    Rng rng(3);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::vector<double> c{U(rng), U(rng)};
        const double dx = U(rng), dy = U(rng), th = U(rng);
        const std::vector<double> a{c[0] + dx, c[1] + dy};
        const std::vector<double> b{c[0] + std::cos(th) * dx - std::sin(th) * dy,
                                    c[1] + std::sin(th) * dx + std::cos(th) * dy};
        for (KernelKind kind : {KernelKind::Gaussian, KernelKind::Multiquadric, KernelKind::InverseMultiquadric}) {
            const KernelSpec k{kind, c, 0.6};
            CHECK(std::abs(eval_kernel(k, a) - eval_kernel(k, b)) < 1e-12);
        }
    }
    // Gaussian decays monotonically with distance.
    const KernelSpec g{KernelKind::Gaussian, {0.0}, 1.0};
    double prev = 2.0;
    for (double r = 0.0; r < 4.0; r += 0.25) {
        const std::vector<double> u{r};
        const double v = eval_kernel(g, u);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("kernel contract checks") {
    const KernelSpec k{KernelKind::Gaussian, {0.0, 0.0}, 1.0};
    const std::vector<double> wrong{1.0};
    CHECK_THROWS_AS(eval_kernel(k, wrong), ContractViolation);
    const KernelSpec bad{KernelKind::Gaussian, {0.0}, 0.0};
    CHECK_THROWS_AS(eval_kernel(bad, wrong), ContractViolation);
    CHECK(parse_kernel_kind("inverse_multiquadric") == KernelKind::InverseMultiquadric);
    CHECK(to_string(KernelKind::Multiquadric) == "multiquadric");
    CHECK_THROWS_AS(parse_kernel_kind("cubic"), ContractViolation);
    CHECK(parse_spread_rule(to_string(SpreadRule::NearestCentroid)) == SpreadRule::NearestCentroid);
}

TEST_CASE("k-means with k = 1 returns the mean and the RMS spread") {
    const std::vector<double> pts{0.0, 0.0, 2.0, 0.0, 2.0, 2.0, 0.0, 2.0};
    Rng rng(1);
    KMeansOptions o;
    o.k = 1;
    const ClusterModel m = kmeans_fit(pts, 2, o, rng);
    CHECK(std::abs(m.centroids[0] - 1.0) < 1e-12);
    CHECK(std::abs(m.centroids[1] - 1.0) < 1e-12);
    CHECK(std::abs(m.spreads[0] - std::sqrt(2.0)) < 1e-12);
    CHECK(std::abs(m.inertia - 8.0) < 1e-12);
    CHECK(m.converged);
}

TEST_CASE("k-means separates two blobs") {
    Rng data(5);
    const auto pts = two_blobs(50, data);
    Rng rng(9);
    KMeansOptions o;
    o.k = 2;
    const ClusterModel m = kmeans_fit(pts, 2, o, rng);
    REQUIRE(m.k() == 2);
    std::set<std::size_t> first(m.assignments.begin(), m.assignments.begin() + 50);
    std::set<std::size_t> second(m.assignments.begin() + 50, m.assignments.end());
    CHECK(first.size() == 1);
    CHECK(second.size() == 1);
    CHECK(*first.begin() != *second.begin());
    for (std::size_t j = 0; j < 2; ++j) {
        CHECK(std::abs(std::abs(m.centroid(j)[0]) - 5.0) < 0.1);
        CHECK(m.spreads[j] < 0.3);
    }
}

TEST_CASE("k = n puts every point in its own cluster") {
    const std::vector<double> pts{0.0, 1.0, 3.0, 7.0, 15.0};
    Rng rng(2);
    KMeansOptions o;
    o.k = 5;
    o.spread_min = 1e-3;
    const ClusterModel m = kmeans_fit(pts, 1, o, rng);
    CHECK(m.inertia == 0.0);
    for (double s : m.spreads) CHECK(s == 1e-3);
    std::set<std::size_t> labels(m.assignments.begin(), m.assignments.end());
    CHECK(labels.size() == 5);
    o.k = 6;
    CHECK_THROWS_AS(kmeans_fit(pts, 1, o, rng), ContractViolation);
    o.k = 0;
    CHECK_THROWS_AS(kmeans_fit(pts, 1, o, rng), ContractViolation);
}

TEST_CASE("k-means agrees with a textbook Lloyd iteration and never increases inertia") {
    Rng data(17);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<double> pts(400);
    for (double& v : pts) v = U(data);
    for (Seeding seeding : {Seeding::RandomPoints, Seeding::PlusPlus}) {
        Rng rng(23);
        KMeansOptions o;
        o.k = 5;
        o.seeding = seeding;
        const auto init = seed_centroids(pts, 2, 5, seeding, rng);
        const ClusterModel m = kmeans_fit_from(pts, 2, init, o);
        const RefFit ref = reference_lloyd(pts, 2, init, o.max_iters, o.tol);
        REQUIRE_FALSE(ref.had_empty);
        CHECK(m.assignments == ref.labels);
        for (std::size_t i = 0; i < m.centroids.size(); ++i) CHECK(std::abs(m.centroids[i] - ref.centroids[i]) < 1e-12);
        for (std::size_t i = 1; i < m.inertia_history.size(); ++i)
            CHECK(m.inertia_history[i] <= m.inertia_history[i - 1] * (1 + 1e-12));
        CHECK(m.converged);
    }
}

TEST_CASE("serial and parallel k-means are bit-identical") {
    Rng data(4);
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<double> pts(6000);
    for (double& v : pts) v = n(data);
    KMeansOptions o;
    o.k = 16;
    Rng r1(8), r2(8);
    o.exec = Exec::Serial;
    const ClusterModel a = kmeans_fit(pts, 3, o, r1);
    o.exec = Exec::Parallel;
    const ClusterModel b = kmeans_fit(pts, 3, o, r2);
    CHECK(a.centroids == b.centroids);
    CHECK(a.assignments == b.assignments);
    CHECK(a.spreads == b.spreads);
    CHECK(a.inertia == b.inertia);
}

TEST_CASE("seeding picks distinct data points") {
    std::vector<double> pts(100);
    std::iota(pts.begin(), pts.end(), 0.0);
    Rng rng(12);
    const auto c = seed_centroids(pts, 1, 100, Seeding::RandomPoints, rng);
    std::set<double> uniq(c.begin(), c.end());
    CHECK(uniq.size() == 100);
}

TEST_CASE("cluster widths") {
    ClusterModel m;
    m.dim = 1;
    m.centroids = {0.0, 1.0, 4.0};
    m.spreads = {0.2, 0.3, 0.5};
    CHECK(cluster_widths(m, SpreadRule::ClusterRms, 1e-3) == std::vector<double>{0.2, 0.3, 0.5});
    CHECK(cluster_widths(m, SpreadRule::NearestCentroid, 1e-3) == std::vector<double>{1.0, 1.0, 3.0});
    CHECK(cluster_widths(m, SpreadRule::ClusterRms, 0.4) == std::vector<double>{0.4, 0.4, 0.5});
    ClusterModel one;
    one.dim = 1;
    one.centroids = {2.0};
    one.spreads = {0.7};
    CHECK(cluster_widths(one, SpreadRule::NearestCentroid, 1e-3) == std::vector<double>{0.7});
}

TEST_CASE("kernel initialisation scales widths and is deterministic") {
    MackeyGlassParams p;
    p.horizon = 600;
    const TimeSeries s = generate_mackey_glass(p);
    const WindowedDataset ds = make_windows(s, 2, {100, 599});
    for (SpreadRule rule : {SpreadRule::ClusterRms, SpreadRule::NearestCentroid}) {
        KernelInitOptions opts;
        opts.spread_rule = rule;
        Rng r1(31), r2(31), r3(31);
        const auto full = init_kernels(ds, 10, KernelKind::Gaussian, 1.0, r1, opts);
        const auto half = init_kernels(ds, 10, KernelKind::Gaussian, 0.5, r2, opts);
        const auto again = init_kernels(ds, 10, KernelKind::Gaussian, 1.0, r3, opts);
        REQUIRE(full.size() == 10);
        CHECK(full == again);
        for (std::size_t j = 0; j < 10; ++j) {
            CHECK(full[j].center == half[j].center);
            CHECK(half[j].spread == 0.5 * full[j].spread);
            CHECK(full[j].center.size() == 2);
        }
    }
    Rng r(1);
    CHECK_THROWS_AS(init_kernels(ds, 10, KernelKind::Gaussian, 0.0, r), ContractViolation);
    const std::vector<double> none;
    CHECK_THROWS_AS(init_kernels(none, 1, 3, KernelKind::Gaussian, 1.0, r), EmptyDatasetError);
}
