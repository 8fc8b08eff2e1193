#include "strbf/series.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <sstream>

#include "strbf/errors.hpp"

namespace strbf {

namespace {

constexpr double kGridTol = 1e-9;

bool near_integer(double x) { return std::abs(x - std::round(x)) <= kGridTol * std::max(1.0, std::abs(x)); }

// Fixed-capacity history of integration states addressed by absolute step
// index. Only the last `capacity` states are retained.
class StateRing {
public:
    explicit StateRing(std::size_t capacity) : buf_(capacity, 0.0) {}
    void put(std::size_t step, double v) { buf_[step % buf_.size()] = v; }
    double at(std::size_t step) const { return buf_[step % buf_.size()]; }

private:
    std::vector<double> buf_;
};

}  // namespace

void MackeyGlassParams::validate() const {
    auto fail = [](const std::string& m) { throw ContractViolation("MackeyGlassParams: " + m); };
    for (double v : {a, b, delay, exponent, initial_value, horizon, integration_step, sample_interval})
        if (!std::isfinite(v)) fail("all parameters must be finite");
    if (!(delay > 0.0)) fail("delay must be > 0");
    if (!(horizon > delay)) fail("horizon must exceed delay");
    if (!(integration_step > 0.0)) fail("integration_step must be > 0");
    if (delay < integration_step) fail("delay must be at least one integration_step");
    if (!(sample_interval > 0.0)) fail("sample_interval must be > 0");
    const double ratio = sample_interval / integration_step;
    if (!near_integer(ratio) || std::round(ratio) < 1.0)
        fail("sample_interval must be a positive integer multiple of integration_step");
    if (!(exponent >= 1.0)) fail("exponent must be >= 1");
}

TimeSeries generate_mackey_glass(const MackeyGlassParams& p) {
    p.validate();

    const double h = p.integration_step;
    const auto steps_per_sample = static_cast<std::size_t>(std::llround(p.sample_interval / h));
    const auto n_samples = static_cast<std::size_t>(std::floor(p.horizon / p.sample_interval + kGridTol)) + 1;
    const std::size_t total_steps = (n_samples - 1) * steps_per_sample;

    // Delay measured in steps. Exact multiples take the integer path so that
    // stage lookups land on stored states without rounding noise.
    const double delay_steps_real = p.delay / h;
    const bool delay_on_grid = near_integer(delay_steps_real);
    const double delay_steps = delay_on_grid ? std::round(delay_steps_real) : delay_steps_real;

    StateRing ring(static_cast<std::size_t>(std::floor(delay_steps)) + 3);

    // Delayed argument at fractional step position `pos`. The history is zero
    // for s < 0 and starts at u(0), so it jumps at s = 0. A stage sitting on
    // the jump takes the limit from inside its own step: the right limit
    // u(0) at the start of a step, the left limit 0 at its end.
    auto delayed = [&](double pos, bool step_start) {
        if (step_start ? pos < -kGridTol : pos <= kGridTol) return 0.0;
        if (pos <= kGridTol) return ring.at(0);
        const double base = std::floor(pos);
        const double frac = pos - base;
        const auto j = static_cast<std::size_t>(base);
        if (frac <= kGridTol) return ring.at(j);
        return (1.0 - frac) * ring.at(j) + frac * ring.at(j + 1);
    };

    auto rhs = [&](double u, double ud) {
        return p.a * ud / (1.0 + std::pow(ud, p.exponent)) - p.b * u;
    };

    TimeSeries out;
    out.t0 = 0.0;
    out.sample_interval = p.sample_interval;
    out.values.reserve(n_samples);

    double u = p.initial_value;
    ring.put(0, u);
    out.values.push_back(u);

    for (std::size_t n = 0; n < total_steps; ++n) {
        const double origin = static_cast<double>(n) - delay_steps;
        const double d0 = delayed(origin, true);
        const double dm = delayed(origin + 0.5, false);
        const double d1 = delayed(origin + 1.0, false);

        const double k1 = rhs(u, d0);
        const double k2 = rhs(u + 0.5 * h * k1, dm);
        const double k3 = rhs(u + 0.5 * h * k2, dm);
        const double k4 = rhs(u + h * k3, d1);
        u += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        if (!std::isfinite(u)) {
            const double t = static_cast<double>(n + 1) * h;
            std::ostringstream msg;
            msg << "Mackey-Glass integration diverged at t=" << t;
            throw IntegrationDivergence(t, msg.str());
        }
        ring.put(n + 1, u);
        if ((n + 1) % steps_per_sample == 0) out.values.push_back(u);
    }
    return out;
}

TimeSeries add_awgn(const TimeSeries& series, double snr_db, Rng& rng, IndexRange range) {
    if (series.values.empty()) throw ContractViolation("add_awgn: empty series");
    if (range.first > range.last || range.last >= series.size())
        throw ContractViolation("add_awgn: range outside series");
    if (std::isnan(snr_db) || snr_db == -std::numeric_limits<double>::infinity())
        throw ContractViolation("add_awgn: snr_db must be finite or +inf");

    TimeSeries out = series;
    if (snr_db == kNoiseDisabled) return out;

    double power = 0.0;
    for (std::size_t i = range.first; i <= range.last; ++i) power += series.values[i] * series.values[i];
    power /= static_cast<double>(range.length());
    if (power == 0.0) throw DomainError("add_awgn: all-zero signal has undefined power");

    const double variance = power / std::pow(10.0, snr_db / 10.0);
    std::normal_distribution<double> noise(0.0, std::sqrt(variance));
    for (std::size_t i = range.first; i <= range.last; ++i) out.values[i] += noise(rng);
    return out;
}

TimeSeries add_awgn(const TimeSeries& series, double snr_db, Rng& rng) {
    if (series.values.empty()) throw ContractViolation("add_awgn: empty series");
    return add_awgn(series, snr_db, rng, IndexRange{0, series.size() - 1});
}

WindowedDataset make_windows(const TimeSeries& series, std::size_t lag_count, IndexRange range) {
    if (lag_count < 1) throw ContractViolation("make_windows: lag_count must be >= 1");
    if (range.first > range.last || range.last >= series.size())
        throw ContractViolation("make_windows: range outside series");
    if (range.length() <= lag_count)
        throw EmptyDatasetError("make_windows: range too short for a single window");

    WindowedDataset ds;
    ds.lag_count = lag_count;
    const std::size_t count = range.length() - lag_count;
    ds.inputs.reserve(count * lag_count);
    ds.targets.reserve(count);
    ds.source_indices.reserve(count);
    for (std::size_t k = range.first + lag_count - 1; k < range.last; ++k) {
        for (std::size_t j = k + 1 - lag_count; j <= k; ++j) ds.inputs.push_back(series.values[j]);
        ds.targets.push_back(series.values[k + 1]);
        ds.source_indices.push_back(k + 1);
    }
    return ds;
}

WindowedDataset make_windows(const TimeSeries& series, std::size_t lag_count) {
    if (series.values.empty()) throw ContractViolation("make_windows: empty series");
    return make_windows(series, lag_count, IndexRange{0, series.size() - 1});
}

}  // namespace strbf
