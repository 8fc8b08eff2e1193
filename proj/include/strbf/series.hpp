#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "strbf/random.hpp"

namespace strbf {

/// Coefficients of du/dt = a u(t-delay) / (1 + u(t-delay)^exponent) - b u(t).
/// Times are in seconds.
struct MackeyGlassParams {
    double a = 0.2;
    double b = 0.1;
    double delay = 20.0;
    double exponent = 10.0;
    double initial_value = 1.2;
    double horizon = 3000.0;
    double integration_step = 0.1;
    double sample_interval = 1.0;

    /// Throws ContractViolation if any invariant fails.
    void validate() const;
};

struct TimeSeries {
    std::vector<double> values;
    double t0 = 0.0;
    double sample_interval = 1.0;

    std::size_t size() const noexcept { return values.size(); }
    double time_at(std::size_t i) const noexcept {
        return t0 + static_cast<double>(i) * sample_interval;
    }
};

/// Closed sample-index interval [first, last].
struct IndexRange {
    std::size_t first = 0;
    std::size_t last = 0;

    std::size_t length() const noexcept { return last - first + 1; }
    bool contains(std::size_t i) const noexcept { return i >= first && i <= last; }
    bool overlaps(const IndexRange& o) const noexcept {
        return first <= o.last && o.first <= last;
    }
};

/// Supervised (lag vector -> next value) pairs cut from one series with
/// stride 1. inputs is row-major, one row of lag_count values per window.
struct WindowedDataset {
    std::vector<double> inputs;
    std::vector<double> targets;
    std::size_t lag_count = 0;
    std::vector<std::size_t> source_indices;

    std::size_t size() const noexcept { return targets.size(); }
    const double* input(std::size_t i) const noexcept { return inputs.data() + i * lag_count; }
};

/// RK4 integration of the delay equation with zero pre-history
/// (u(s) = 0 for s <= 0 when used as the delayed argument) and
/// u(0) = initial_value. The delayed term comes from a ring buffer of past
/// states, linearly interpolated off-grid. Samples t = 0, dt, ..., horizon.
/// Throws IntegrationDivergence on a non-finite state.
TimeSeries generate_mackey_glass(const MackeyGlassParams& params);

inline constexpr double kNoiseDisabled = std::numeric_limits<double>::infinity();

/// Adds zero-mean white Gaussian noise with variance P / 10^(snr_db/10),
/// where P is the mean square of the clean values inside `range`. Only
/// samples inside `range` are perturbed. snr_db = +inf returns a copy.
TimeSeries add_awgn(const TimeSeries& series, double snr_db, Rng& rng, IndexRange range);
TimeSeries add_awgn(const TimeSeries& series, double snr_db, Rng& rng);

/// For each k with range.first + lag_count - 1 <= k < range.last emits
/// input [u(k-lag_count+1) .. u(k)] and target u(k+1). Every index touched
/// lies inside `range`.
WindowedDataset make_windows(const TimeSeries& series, std::size_t lag_count, IndexRange range);
WindowedDataset make_windows(const TimeSeries& series, std::size_t lag_count);

}  // namespace strbf
