#ifndef AIRA_ADVICE_HPP
#define AIRA_ADVICE_HPP

/** @file
 * The three advice generators: most influential variable, length of effect
 * and percentage effect.
 */

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "aira/irf.hpp"

namespace aira {

/// Responses smaller than this (in absolute value) count as no effect.
inline constexpr double kEffectThreshold = 1e-4;

struct AdviceOptions {
    /// Orthogonalization and, when bootstrapped, the significance bands.
    IrfOptions irf;
    /// Bounds on reported percentages.
    double window_low = -1000.0;
    double window_high = 1000.0;
    /// Threads for the outer loop of the percentage advice.
    unsigned workers = 1;

    bool bootstrap() const { return static_cast<bool>(irf.bands); }
};

// -- most influential variable ------------------------------------------------

struct InfluenceEntry {
    std::string name;
    std::size_t index = 0;
    Polarity polarity = Polarity::positive;
    double net_effect = 0.0; ///< standard deviations, polarity-transformed

    bool operator==(const InfluenceEntry&) const = default;
};

struct InfluenceRanking {
    std::vector<InfluenceEntry> entries; ///< descending |net_effect|, ties by index
    int horizon = 0;
    bool bootstrap = false;
};

inline InfluenceRanking determine_most_influential(const VarModel& model, int k, const AdviceOptions& opts = {}) {
    if (k < 1) throw DomainError("horizon must be >= 1");
    IrfOptions irf_opts = opts.irf;
    irf_opts.polarity = true;
    const ResponseGrid grid(model, k, irf_opts);

    InfluenceRanking ranking;
    ranking.horizon = k;
    ranking.bootstrap = opts.bootstrap();
    for (std::size_t x = 0; x < model.dimension(); ++x) {
        double net = 0.0;
        for (std::size_t y = 0; y < model.dimension(); ++y)
            if (y != x) net += cumulative_effect(grid.at(x, y));
        ranking.entries.push_back({model.variables[x].name, x, model.variables[x].polarity, net});
    }
    std::stable_sort(ranking.entries.begin(), ranking.entries.end(),
                     [](const InfluenceEntry& a, const InfluenceEntry& b) {
                         return std::abs(a.net_effect) > std::abs(b.net_effect);
                     });
    return ranking;
}

// -- length of effect -----------------------------------------------------------

struct EffectLength {
    double total_minutes = 0.0;
    double total_steps = 0.0;       ///< interpolated steps with an effect
    double effective_horizon = 0.0; ///< interpolated end of the last effect

    bool operator==(const EffectLength&) const = default;
};

/// Walks steps 0..k of @p response. An effect interval opens when |value|
/// first exceeds the threshold and closes when it falls back; both crossings
/// are linearly interpolated. An effect still open at step k is cut off there.
inline EffectLength length_of_effect(std::span<const double> response, double interval_minutes, int k) {
    if (k < 0 || response.size() < static_cast<std::size_t>(k) + 1)
        throw DomainError("response is shorter than the horizon");
    const double threshold = kEffectThreshold;
    double start = 0.0;
    double end = 0.0;
    double total = 0.0;
    double effective_horizon = 0.0;
    double d = 0.0;
    bool effect_started = false;

    for (int i = 0; i <= k; ++i) {
        const double g = response[static_cast<std::size_t>(i)];
        if (std::abs(g) > threshold) {
            d = g > threshold ? -1.0 : 1.0;
            if (!effect_started) {
                // An effect present at the impulse instant starts at 0.
                start = i > 0 ? i - (g + d * threshold) / (g - response[static_cast<std::size_t>(i - 1)]) : 0.0;
                effect_started = true;
            }
        } else if (effect_started) {
            end = i - 1 + (1.0 - (g + d * threshold) / (g - response[static_cast<std::size_t>(i - 1)]));
            effect_started = false;
            total += end - start;
            effective_horizon = end;
        }
    }
    if (effect_started) {
        total += k - start;
        effective_horizon = k;
    }
    return {total * interval_minutes, total, effective_horizon};
}

inline EffectLength length_of_effect(const ImpulseResponse& response, double interval_minutes) {
    return length_of_effect(response.values, interval_minutes, response.horizon());
}

/// Effect length of the response of @p y to a shock on @p x.
inline EffectLength determine_length_of_effect(std::size_t x, std::size_t y, double interval_minutes, int k,
                                               const VarModel& model, const AdviceOptions& opts = {}) {
    IrfOptions irf_opts = opts.irf;
    irf_opts.polarity = false;
    return length_of_effect(irf(x, y, k, model, irf_opts), interval_minutes);
}

// -- percentage effect ----------------------------------------------------------

/// Fractional change needed in y so that x changes by @p delta (a fraction):
///   (k_hat * x_mean * delta * y_sd) / (y_mean * net_effect * x_sd)
inline double required_change(double delta, double k_hat, double x_mean, double x_sd, double y_mean, double y_sd,
                              double net_effect) {
    return (k_hat * x_mean * delta * y_sd) / (y_mean * net_effect * x_sd);
}

struct Suggestion {
    std::string variable;
    std::size_t index = 0;
    double percent = 0.0;           ///< required change in the variable, percent
    double net_effect = 0.0;        ///< cumulative response of the target over k_hat
    double effective_horizon = 0.0; ///< k_hat

    bool operator==(const Suggestion&) const = default;
};

struct SkippedVariable {
    std::string variable;
    std::size_t index = 0;
    std::string reason; ///< no_effect, below_theta, zero_mean, zero_sd, outside_window

    bool operator==(const SkippedVariable&) const = default;
};

struct PercentageAdvice {
    std::string target;
    std::size_t target_index = 0;
    double desired_percent = 0.0;
    double theta = 0.0;
    int horizon = 0;
    double window_low = -1000.0;
    double window_high = 1000.0;
    std::vector<Suggestion> suggestions; ///< model order, target excluded
    std::vector<SkippedVariable> skipped;
};

namespace detail {

struct PercentageOutcome {
    bool kept = false;
    Suggestion suggestion;
    SkippedVariable skipped;
};

inline PercentageOutcome percentage_for(const VarModel& model, const ResponseGrid& grid, std::size_t x, std::size_t y,
                                        double delta, double theta, const AdviceOptions& opts) {
    const auto& target = model.variables[x];
    const auto& lever = model.variables[y];
    PercentageOutcome out;
    out.skipped = {lever.name, y, {}};

    const auto& resp = grid.at(y, x);
    const double k_hat = length_of_effect(resp.values, 0.0, grid.horizon()).effective_horizon;
    const double net = cumulative_effect(resp, static_cast<int>(std::floor(k_hat)));

    if (k_hat == 0.0 || net == 0.0) {
        out.skipped.reason = "no_effect";
    } else if (!(std::abs(net) > theta)) {
        out.skipped.reason = "below_theta";
    } else if (lever.mean == 0.0) {
        out.skipped.reason = "zero_mean";
    } else if (target.sd == 0.0) {
        out.skipped.reason = "zero_sd";
    } else {
        const double percent = required_change(delta, k_hat, target.mean, target.sd, lever.mean, lever.sd, net) * 100.0;
        if (percent < opts.window_low || percent > opts.window_high) {
            out.skipped.reason = "outside_window";
        } else {
            out.kept = true;
            out.suggestion = {lever.name, y, percent, net, k_hat};
        }
    }
    return out;
}

} // namespace detail

/// Change needed in every other variable for @p x to change by
/// @p desired_percent percent.
inline PercentageAdvice determine_percentage_effect(double desired_percent, std::size_t x, double theta, int k,
                                                    const VarModel& model, const AdviceOptions& opts = {}) {
    if (x >= model.dimension()) throw DomainError("variable index out of range");
    if (!(theta >= 0.0)) throw DomainError("theta must be >= 0");
    if (k < 1) throw DomainError("horizon must be >= 1");
    IrfOptions irf_opts = opts.irf;
    irf_opts.polarity = false;
    const ResponseGrid grid(model, k, irf_opts);
    const double delta = desired_percent / 100.0;

    const auto m = model.dimension();
    std::vector<detail::PercentageOutcome> outcomes(m);
    const unsigned workers = std::max(1u, std::min<unsigned>(opts.workers, static_cast<unsigned>(m)));
    auto work = [&](unsigned w) {
        for (std::size_t y = w; y < m; y += workers)
            if (y != x) outcomes[y] = detail::percentage_for(model, grid, x, y, delta, theta, opts);
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& th : pool) th.join();
    }

    PercentageAdvice advice;
    advice.target = model.variables[x].name;
    advice.target_index = x;
    advice.desired_percent = desired_percent;
    advice.theta = theta;
    advice.horizon = k;
    advice.window_low = opts.window_low;
    advice.window_high = opts.window_high;
    for (std::size_t y = 0; y < m; ++y) {
        if (y == x) continue;
        if (outcomes[y].kept)
            advice.suggestions.push_back(std::move(outcomes[y].suggestion));
        else
            advice.skipped.push_back(std::move(outcomes[y].skipped));
    }
    return advice;
}

} // namespace aira

#endif // AIRA_ADVICE_HPP
