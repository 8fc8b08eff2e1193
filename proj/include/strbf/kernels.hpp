#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "strbf/exec.hpp"
#include "strbf/random.hpp"

namespace strbf {

struct WindowedDataset;

enum class KernelKind { Gaussian, Multiquadric, InverseMultiquadric };

std::string_view to_string(KernelKind k) noexcept;
KernelKind parse_kernel_kind(std::string_view s);

/// One basis function. `spread` is sigma for the Gaussian and the additive
/// constant tau for the multiquadric pair.
struct KernelSpec {
    KernelKind kind = KernelKind::Gaussian;
    std::vector<double> center;
    double spread = 1.0;

    bool operator==(const KernelSpec&) const = default;
};

double squared_distance(std::span<const double> u, std::span<const double> c) noexcept;

/// Applies the radial profile of `kind` to a squared distance.
///   gaussian              exp(-r2 / s^2)
///   multiquadric          sqrt(r2 + s^2)
///   inverse multiquadric  1 / sqrt(r2 + s^2)
double radial_profile(KernelKind kind, double r2, double spread) noexcept;

/// Throws ContractViolation on dimension mismatch or non-positive spread.
double eval_kernel(const KernelSpec& spec, std::span<const double> u);

enum class Seeding { RandomPoints, PlusPlus };

struct KMeansOptions {
    std::size_t k = 1;
    std::size_t max_iters = 100;
    double tol = 1e-6;
    double spread_min = 1e-3;
    Seeding seeding = Seeding::RandomPoints;
    Exec exec = Exec::Parallel;
};

/// Result of a Lloyd fit. Centroids are row-major (k x dim).
struct ClusterModel {
    std::size_t dim = 0;
    std::vector<double> centroids;
    /// Per-cluster RMS member-to-centroid distance, floored at spread_min.
    std::vector<double> spreads;
    std::vector<std::size_t> assignments;
    double inertia = 0.0;
    /// Inertia after every Lloyd update, then the final assignment.
    std::vector<double> inertia_history;
    std::size_t iterations = 0;
    bool converged = false;

    std::size_t k() const noexcept { return spreads.size(); }
    std::span<const double> centroid(std::size_t j) const noexcept {
        return {centroids.data() + j * dim, dim};
    }
};

/// Initial centroids (k x dim) per `seeding`. RandomPoints samples k distinct
/// point indices uniformly.
std::vector<double> seed_centroids(std::span<const double> points, std::size_t dim,
                                   std::size_t k, Seeding seeding, Rng& rng);

/// Lloyd iterations from given initial centroids. An empty cluster takes the
/// point farthest from its own centroid.
ClusterModel kmeans_fit_from(std::span<const double> points, std::size_t dim,
                             std::vector<double> initial_centroids, const KMeansOptions& opts);

/// seed_centroids followed by kmeans_fit_from. Throws ContractViolation when
/// k is zero or exceeds the number of points.
ClusterModel kmeans_fit(std::span<const double> points, std::size_t dim,
                        const KMeansOptions& opts, Rng& rng);

/// How a kernel width is read off a cluster model.
///   ClusterRms       the model's per-cluster RMS spread
///   NearestCentroid  distance to the closest other centroid (falls back to
///                    ClusterRms for k = 1)
enum class SpreadRule { ClusterRms, NearestCentroid };

std::string_view to_string(SpreadRule r) noexcept;
SpreadRule parse_spread_rule(std::string_view s);

/// Widths for every cluster of `model` under `rule`, floored at spread_min.
std::vector<double> cluster_widths(const ClusterModel& model, SpreadRule rule, double spread_min);

struct KernelInitOptions {
    KMeansOptions kmeans;
    SpreadRule spread_rule = SpreadRule::ClusterRms;
};

/// Fits k-means on `points` and returns one kernel per cluster with
/// spread = spread_scale * width.
std::vector<KernelSpec> init_kernels(std::span<const double> points, std::size_t dim,
                                     std::size_t k, KernelKind kind, double spread_scale,
                                     Rng& rng, const KernelInitOptions& opts = {});

/// Same, over the dataset's full lag vectors.
std::vector<KernelSpec> init_kernels(const WindowedDataset& dataset, std::size_t k,
                                     KernelKind kind, double spread_scale, Rng& rng,
                                     const KernelInitOptions& opts = {});

}  // namespace strbf
