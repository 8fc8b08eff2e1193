#include "strbf/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "strbf/errors.hpp"
#include "strbf/series.hpp"

namespace strbf {

std::string_view to_string(KernelKind k) noexcept {
    switch (k) {
        case KernelKind::Gaussian: return "gaussian";
        case KernelKind::Multiquadric: return "multiquadric";
        case KernelKind::InverseMultiquadric: return "inverse_multiquadric";
    }
    return "?";
}

KernelKind parse_kernel_kind(std::string_view s) {
    if (s == "gaussian") return KernelKind::Gaussian;
    if (s == "multiquadric") return KernelKind::Multiquadric;
    if (s == "inverse_multiquadric") return KernelKind::InverseMultiquadric;
    throw ContractViolation("unknown kernel kind '" + std::string(s) + "'");
}

std::string_view to_string(SpreadRule r) noexcept {
    return r == SpreadRule::ClusterRms ? "cluster_rms" : "nearest_centroid";
}

SpreadRule parse_spread_rule(std::string_view s) {
    if (s == "cluster_rms") return SpreadRule::ClusterRms;
    if (s == "nearest_centroid") return SpreadRule::NearestCentroid;
    throw ContractViolation("unknown spread rule '" + std::string(s) + "'");
}

double squared_distance(std::span<const double> u, std::span<const double> c) noexcept {
    double r2 = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double d = u[j] - c[j];
        r2 += d * d;
    }
    return r2;
}

double radial_profile(KernelKind kind, double r2, double spread) noexcept {
    const double s2 = spread * spread;
    switch (kind) {
        case KernelKind::Gaussian: return std::exp(-r2 / s2);
        case KernelKind::Multiquadric: return std::sqrt(r2 + s2);
        case KernelKind::InverseMultiquadric: return 1.0 / std::sqrt(r2 + s2);
    }
    return 0.0;
}

double eval_kernel(const KernelSpec& spec, std::span<const double> u) {
    if (u.size() != spec.center.size())
        throw ContractViolation("eval_kernel: input dimension " + std::to_string(u.size()) +
                                " does not match center dimension " +
                                std::to_string(spec.center.size()));
    if (!(spec.spread > 0.0)) throw ContractViolation("eval_kernel: spread must be > 0");
    return radial_profile(spec.kind, squared_distance(u, spec.center), spec.spread);
}

namespace {

struct Nearest {
    std::size_t index;
    double dist2;
};

Nearest nearest_centroid(const double* x, std::span<const double> centroids, std::size_t dim) {
    const std::size_t k = centroids.size() / dim;
    Nearest best{0, std::numeric_limits<double>::infinity()};
    for (std::size_t j = 0; j < k; ++j) {
        const double d = squared_distance({x, dim}, centroids.subspan(j * dim, dim));
        if (d < best.dist2) best = {j, d};
    }
    return best;
}

// Nearest-centroid assignment for every point. The OpenMP version writes
// disjoint slots only, so both paths agree bit for bit.
void assign_points(std::span<const double> points, std::size_t dim,
                   std::span<const double> centroids, std::vector<std::size_t>& labels,
                   std::vector<double>& dist2, Exec exec) {
    const auto n = static_cast<std::ptrdiff_t>(labels.size());
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            const Nearest nb = nearest_centroid(points.data() + i * dim, centroids, dim);
            labels[i] = nb.index;
            dist2[i] = nb.dist2;
        }
    } else {
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            const Nearest nb = nearest_centroid(points.data() + i * dim, centroids, dim);
            labels[i] = nb.index;
            dist2[i] = nb.dist2;
        }
    }
}

// Moves the worst-fitting point of a multi-member cluster into every empty
// cluster. Returns true if anything changed.
bool repair_empty_clusters(std::vector<std::size_t>& labels, std::vector<double>& dist2,
                           std::size_t k) {
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t l : labels) ++counts[l];
    bool changed = false;
    for (std::size_t j = 0; j < k; ++j) {
        if (counts[j] != 0) continue;
        std::size_t worst = labels.size();
        double worst_d = -1.0;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (counts[labels[i]] > 1 && dist2[i] > worst_d) {
                worst = i;
                worst_d = dist2[i];
            }
        }
        if (worst == labels.size()) break;
        --counts[labels[worst]];
        labels[worst] = j;
        dist2[worst] = 0.0;
        ++counts[j];
        changed = true;
    }
    return changed;
}

// Means of members; a cluster with no members keeps its centroid.
std::vector<double> update_centroids(std::span<const double> points, std::size_t dim,
                                     const std::vector<std::size_t>& labels,
                                     const std::vector<double>& previous, std::size_t k) {
    std::vector<double> sums(k * dim, 0.0);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const std::size_t j = labels[i];
        ++counts[j];
        for (std::size_t d = 0; d < dim; ++d) sums[j * dim + d] += points[i * dim + d];
    }
    std::vector<double> next = previous;
    for (std::size_t j = 0; j < k; ++j) {
        if (counts[j] == 0) continue;
        for (std::size_t d = 0; d < dim; ++d)
            next[j * dim + d] = sums[j * dim + d] / static_cast<double>(counts[j]);
    }
    return next;
}

double total_inertia(std::span<const double> points, std::size_t dim,
                     const std::vector<std::size_t>& labels, std::span<const double> centroids) {
    double j = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i)
        j += squared_distance(points.subspan(i * dim, dim), centroids.subspan(labels[i] * dim, dim));
    return j;
}

void check_points(std::span<const double> points, std::size_t dim, std::size_t k) {
    if (dim == 0 || points.size() % dim != 0)
        throw ContractViolation("kmeans: point buffer is not a whole number of vectors");
    if (k == 0) throw ContractViolation("kmeans: k must be >= 1");
    if (k > points.size() / dim)
        throw ContractViolation("kmeans: k = " + std::to_string(k) + " exceeds the " +
                                std::to_string(points.size() / dim) + " available points");
}

}  // namespace

std::vector<double> seed_centroids(std::span<const double> points, std::size_t dim,
                                   std::size_t k, Seeding seeding, Rng& rng) {
    check_points(points, dim, k);
    const std::size_t n = points.size() / dim;
    std::vector<double> centroids;
    centroids.reserve(k * dim);

    if (seeding == Seeding::RandomPoints) {
        // Partial Fisher-Yates over point indices.
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        for (std::size_t i = 0; i < k; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, n - 1);
            std::swap(idx[i], idx[pick(rng)]);
            centroids.insert(centroids.end(), points.begin() + idx[i] * dim,
                             points.begin() + (idx[i] + 1) * dim);
        }
        return centroids;
    }

    // k-means++: D^2-weighted sampling after a uniform first pick.
    std::uniform_int_distribution<std::size_t> first(0, n - 1);
    const std::size_t f = first(rng);
    centroids.insert(centroids.end(), points.begin() + f * dim, points.begin() + (f + 1) * dim);
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t c = 1; c < k; ++c) {
        const auto last = std::span<const double>(centroids).subspan((c - 1) * dim, dim);
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], squared_distance(points.subspan(i * dim, dim), last));
            total += d2[i];
        }
        std::size_t chosen = n - 1;
        if (total > 0.0) {
            const double target = unit(rng) * total;
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc > target) {
                    chosen = i;
                    break;
                }
            }
        } else {
            chosen = first(rng);
        }
        centroids.insert(centroids.end(), points.begin() + chosen * dim,
                         points.begin() + (chosen + 1) * dim);
    }
    return centroids;
}

ClusterModel kmeans_fit_from(std::span<const double> points, std::size_t dim,
                             std::vector<double> centroids, const KMeansOptions& opts) {
    check_points(points, dim, opts.k);
    if (centroids.size() != opts.k * dim)
        throw ContractViolation("kmeans: initial centroids do not match k x dim");

    const std::size_t n = points.size() / dim;
    const std::size_t k = opts.k;
    std::vector<std::size_t> labels(n, 0);
    std::vector<double> dist2(n, 0.0);

    ClusterModel model;
    model.dim = dim;

    for (std::size_t it = 0; it < opts.max_iters; ++it) {
        assign_points(points, dim, centroids, labels, dist2, opts.exec);
        repair_empty_clusters(labels, dist2, k);
        std::vector<double> next = update_centroids(points, dim, labels, centroids, k);

        double movement = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            const double m = std::sqrt(squared_distance(std::span<const double>(next).subspan(j * dim, dim),
                                                        std::span<const double>(centroids).subspan(j * dim, dim)));
            movement = std::max(movement, m);
        }
        centroids = std::move(next);
        model.inertia_history.push_back(total_inertia(points, dim, labels, centroids));
        model.iterations = it + 1;
        if (movement < opts.tol) {
            model.converged = true;
            break;
        }
    }

    assign_points(points, dim, centroids, labels, dist2, opts.exec);

    std::vector<double> sum_d2(k, 0.0);
    std::vector<std::size_t> counts(k, 0);
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sum_d2[labels[i]] += dist2[i];
        ++counts[labels[i]];
        inertia += dist2[i];
    }
    model.spreads.resize(k);
    for (std::size_t j = 0; j < k; ++j) {
        const double rms = counts[j] ? std::sqrt(sum_d2[j] / static_cast<double>(counts[j])) : 0.0;
        model.spreads[j] = std::max(rms, opts.spread_min);
    }
    model.centroids = std::move(centroids);
    model.assignments = std::move(labels);
    model.inertia = inertia;
    model.inertia_history.push_back(inertia);
    return model;
}

ClusterModel kmeans_fit(std::span<const double> points, std::size_t dim,
                        const KMeansOptions& opts, Rng& rng) {
    return kmeans_fit_from(points, dim, seed_centroids(points, dim, opts.k, opts.seeding, rng), opts);
}

std::vector<double> cluster_widths(const ClusterModel& model, SpreadRule rule, double spread_min) {
    const std::size_t k = model.k();
    if (rule == SpreadRule::ClusterRms || k < 2) {
        std::vector<double> w = model.spreads;
        for (double& s : w) s = std::max(s, spread_min);
        return w;
    }
    std::vector<double> w(k, std::numeric_limits<double>::infinity());
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t l = 0; l < k; ++l)
            if (l != j) w[j] = std::min(w[j], std::sqrt(squared_distance(model.centroid(j), model.centroid(l))));
    for (double& s : w) s = std::max(s, spread_min);
    return w;
}

std::vector<KernelSpec> init_kernels(std::span<const double> points, std::size_t dim,
                                     std::size_t k, KernelKind kind, double spread_scale,
                                     Rng& rng, const KernelInitOptions& opts) {
    if (points.empty()) throw EmptyDatasetError("init_kernels: no points");
    if (!(spread_scale > 0.0)) throw ContractViolation("init_kernels: spread_scale must be > 0");
    KMeansOptions km = opts.kmeans;
    km.k = k;
    const ClusterModel model = kmeans_fit(points, dim, km, rng);
    const std::vector<double> widths = cluster_widths(model, opts.spread_rule, km.spread_min);

    std::vector<KernelSpec> out;
    out.reserve(k);
    for (std::size_t j = 0; j < k; ++j) {
        const auto c = model.centroid(j);
        out.push_back(KernelSpec{kind, {c.begin(), c.end()}, spread_scale * widths[j]});
    }
    return out;
}

std::vector<KernelSpec> init_kernels(const WindowedDataset& dataset, std::size_t k,
                                     KernelKind kind, double spread_scale, Rng& rng,
                                     const KernelInitOptions& opts) {
    if (dataset.size() == 0) throw EmptyDatasetError("init_kernels: empty dataset");
    return init_kernels(dataset.inputs, dataset.lag_count, k, kind, spread_scale, rng, opts);
}

}  // namespace strbf
