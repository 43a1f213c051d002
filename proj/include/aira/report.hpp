#ifndef AIRA_REPORT_HPP
#define AIRA_REPORT_HPP

/** @file
 * Advice report assembly, text templates and the JSON report schema.
 *
 * All numbers in reports are rounded to 12 significant digits so golden
 * files stay stable across platforms.
 */

#include <nlohmann/json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include "aira/advice.hpp"

namespace aira {

inline constexpr int kReportSchemaVersion = 1;

/// Rounds to 12 significant digits; negative zero becomes zero.
inline double report_number(double v) {
    if (!std::isfinite(v)) return v;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    const double r = std::strtod(buf, nullptr);
    return r == 0.0 ? 0.0 : r;
}

inline std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v == 0.0 ? 0.0 : v);
    std::string s(buf);
    if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
    return s;
}

/// Sentence templates. Placeholders are written {name}.
struct Locale {
    std::string increase = "increase";
    std::string decrease = "decrease";
    std::string influence =
        "If you were to {action} your {variable}, this seems to positively affect your well-being "
        "(net effect {effect} standard deviations).";
    std::string no_influence = "No influential variable was found.";
    std::string effect_length =
        "A one standard deviation increase in {impulse} affects {response} for approximately {minutes} minutes "
        "({steps} steps).";
    std::string percentage = "{action} {target} by changing {variable} by {percent}%";
    std::string percentage_none = "No variable can {action} {target} by {desired}% within the reporting window.";
    int decimals = 3;
    int percent_decimals = 2;

    static Locale from_json(const nlohmann::json& j) {
        Locale l;
        l.increase = j.value("increase", l.increase);
        l.decrease = j.value("decrease", l.decrease);
        l.influence = j.value("influence", l.influence);
        l.no_influence = j.value("no_influence", l.no_influence);
        l.effect_length = j.value("effect_length", l.effect_length);
        l.percentage = j.value("percentage", l.percentage);
        l.percentage_none = j.value("percentage_none", l.percentage_none);
        l.decimals = j.value("decimals", l.decimals);
        l.percent_decimals = j.value("percent_decimals", l.percent_decimals);
        return l;
    }

    static Locale load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open locale file '" + path + "'");
        try {
            return from_json(nlohmann::json::parse(in));
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("bad locale file: ") + e.what());
        }
    }
};

inline std::string render(std::string tmpl, const std::vector<std::pair<std::string, std::string>>& fields) {
    for (const auto& [key, value] : fields) {
        const std::string token = "{" + key + "}";
        for (auto pos = tmpl.find(token); pos != std::string::npos; pos = tmpl.find(token, pos + value.size()))
            tmpl.replace(pos, token.size(), value);
    }
    return tmpl;
}

/// One line per suggestion, e.g.
/// "decrease feeling inadequate by changing feeling gloomy by -89.89%".
inline std::vector<std::string> render_percentage(const PercentageAdvice& advice, const Locale& locale = {}) {
    const std::string action = advice.desired_percent < 0.0 ? locale.decrease : locale.increase;
    std::vector<std::string> lines;
    for (const auto& s : advice.suggestions)
        lines.push_back(render(locale.percentage, {{"action", action},
                                                   {"target", advice.target},
                                                   {"variable", s.variable},
                                                   {"percent", fixed(s.percent, locale.percent_decimals)}}));
    if (lines.empty())
        lines.push_back(render(locale.percentage_none,
                               {{"action", action},
                                {"target", advice.target},
                                {"desired", fixed(std::abs(advice.desired_percent), locale.percent_decimals)}}));
    return lines;
}

struct PairEffectLength {
    std::size_t impulse = 0;
    std::size_t response = 0;
    EffectLength length;
};

struct AdviceReport {
    int horizon = 0;
    bool bootstrap = false;
    double confidence = 0.0;
    std::size_t replicates = 0;
    double interval_minutes = 0.0;
    std::vector<std::string> variables;
    InfluenceRanking ranking;
    std::vector<PairEffectLength> effect_lengths; ///< pairs x != y with a nonzero effect
    std::vector<PercentageAdvice> percentage_effects;
    std::vector<std::string> sentences;
};

struct ReportOptions {
    /// Desired change used for each variable's percentage table, applied as an
    /// increase for positive and a decrease for negative variables.
    double percent = 10.0;
    double theta = 0.0;
    Locale locale;
};

inline AdviceReport build_advice_report(const VarModel& model, int k, const AdviceOptions& opts = {},
                                        const ReportOptions& ropts = {}) {
    model.validate();
    AdviceReport report;
    report.horizon = k;
    report.bootstrap = opts.bootstrap();
    if (opts.irf.bands) {
        report.confidence = opts.irf.bands->confidence;
        report.replicates = opts.irf.bands->replicates;
    }
    report.interval_minutes = model.interval_minutes;
    report.variables = model.names();
    report.ranking = determine_most_influential(model, k, opts);

    IrfOptions raw = opts.irf;
    raw.polarity = false;
    const ResponseGrid grid(model, k, raw);
    for (std::size_t x = 0; x < model.dimension(); ++x)
        for (std::size_t y = 0; y < model.dimension(); ++y) {
            if (x == y) continue;
            const auto len = length_of_effect(grid.at(x, y), model.interval_minutes);
            if (len.total_steps > 0.0) report.effect_lengths.push_back({x, y, len});
        }

    for (std::size_t x = 0; x < model.dimension(); ++x) {
        const double desired = model.variables[x].polarity == Polarity::positive ? ropts.percent : -ropts.percent;
        report.percentage_effects.push_back(determine_percentage_effect(desired, x, ropts.theta, k, model, opts));
    }

    const auto& loc = ropts.locale;
    const auto& top = report.ranking.entries.front();
    if (top.net_effect == 0.0) {
        report.sentences.push_back(loc.no_influence);
    } else {
        // The transformed impulse moves a negative variable downwards.
        const bool raise = (top.net_effect > 0.0) == (top.polarity == Polarity::positive);
        report.sentences.push_back(render(loc.influence, {{"action", raise ? loc.increase : loc.decrease},
                                                          {"variable", top.name},
                                                          {"effect", fixed(top.net_effect, loc.decimals)}}));
        for (const auto& e : report.effect_lengths) {
            if (e.impulse != top.index) continue;
            report.sentences.push_back(render(loc.effect_length,
                                              {{"impulse", model.variables[e.impulse].name},
                                               {"response", model.variables[e.response].name},
                                               {"minutes", fixed(e.length.total_minutes, loc.decimals)},
                                               {"steps", fixed(e.length.total_steps, loc.decimals)}}));
        }
    }
    return report;
}

// -- JSON schema -------------------------------------------------------------------

inline nlohmann::json to_json(const InfluenceRanking& r) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : r.entries)
        entries.push_back({{"variable", e.name},
                           {"index", e.index},
                           {"polarity", to_string(e.polarity)},
                           {"net_effect", report_number(e.net_effect)}});
    return {{"horizon", r.horizon}, {"bootstrap", r.bootstrap}, {"entries", std::move(entries)}};
}

inline nlohmann::json to_json(const EffectLength& e) {
    return {{"total_minutes", report_number(e.total_minutes)},
            {"total_steps", report_number(e.total_steps)},
            {"effective_horizon", report_number(e.effective_horizon)}};
}

inline nlohmann::json to_json(const PercentageAdvice& a) {
    nlohmann::json suggestions = nlohmann::json::array();
    for (const auto& s : a.suggestions)
        suggestions.push_back({{"variable", s.variable},
                               {"index", s.index},
                               {"percent", report_number(s.percent)},
                               {"net_effect", report_number(s.net_effect)},
                               {"effective_horizon", report_number(s.effective_horizon)}});
    nlohmann::json skipped = nlohmann::json::array();
    for (const auto& s : a.skipped)
        skipped.push_back({{"variable", s.variable}, {"index", s.index}, {"reason", s.reason}});
    return {{"target", a.target},
            {"target_index", a.target_index},
            {"desired_percent", report_number(a.desired_percent)},
            {"theta", report_number(a.theta)},
            {"horizon", a.horizon},
            {"window", {report_number(a.window_low), report_number(a.window_high)}},
            {"suggestions", std::move(suggestions)},
            {"skipped", std::move(skipped)}};
}

inline nlohmann::json to_json(const ImpulseResponse& r, const VarModel& model) {
    nlohmann::json steps = nlohmann::json::array();
    for (std::size_t t = 0; t < r.values.size(); ++t) {
        nlohmann::json s = {{"t", t}, {"value", report_number(r.values[t])}};
        s["lower"] = r.lower ? nlohmann::json(report_number((*r.lower)[t])) : nlohmann::json(nullptr);
        s["upper"] = r.upper ? nlohmann::json(report_number((*r.upper)[t])) : nlohmann::json(nullptr);
        steps.push_back(std::move(s));
    }
    return {{"impulse", model.variables[r.impulse].name},
            {"response", model.variables[r.response].name},
            {"confidence", r.has_bands() ? nlohmann::json(report_number(r.confidence)) : nlohmann::json(nullptr)},
            {"masked", r.masked},
            {"model_stable", r.model_stable},
            {"interval_minutes", report_number(r.interval_minutes)},
            {"cumulative", report_number(cumulative_effect(r))},
            {"steps", std::move(steps)}};
}

inline nlohmann::json to_json(const AdviceReport& r) {
    nlohmann::json lengths = nlohmann::json::array();
    for (const auto& e : r.effect_lengths) {
        auto j = to_json(e.length);
        j["impulse"] = r.variables[e.impulse];
        j["response"] = r.variables[e.response];
        lengths.push_back(std::move(j));
    }
    nlohmann::json percentages = nlohmann::json::array();
    for (const auto& p : r.percentage_effects) percentages.push_back(to_json(p));
    return {{"schema", "aira-advice-report"},
            {"version", kReportSchemaVersion},
            {"horizon", r.horizon},
            {"bootstrap", r.bootstrap},
            {"confidence", report_number(r.confidence)},
            {"replicates", r.replicates},
            {"interval_minutes", report_number(r.interval_minutes)},
            {"variables", r.variables},
            {"ranking", to_json(r.ranking)},
            {"effect_lengths", std::move(lengths)},
            {"percentage_effects", std::move(percentages)},
            {"sentences", r.sentences}};
}

/// Inverse of to_json(AdviceReport); values keep their report rounding.
inline AdviceReport report_from_json(const nlohmann::json& j) {
    try {
        if (j.at("schema") != "aira-advice-report" || j.at("version") != kReportSchemaVersion)
            throw ModelFormatError("unsupported report schema");
        AdviceReport r;
        r.horizon = j.at("horizon").get<int>();
        r.bootstrap = j.at("bootstrap").get<bool>();
        r.confidence = j.at("confidence").get<double>();
        r.replicates = j.at("replicates").get<std::size_t>();
        r.interval_minutes = j.at("interval_minutes").get<double>();
        r.variables = j.at("variables").get<std::vector<std::string>>();
        const auto index = [&](const std::string& name) {
            for (std::size_t i = 0; i < r.variables.size(); ++i)
                if (r.variables[i] == name) return i;
            throw ModelFormatError("report references unknown variable '" + name + "'");
        };
        const auto& rk = j.at("ranking");
        r.ranking.horizon = rk.at("horizon").get<int>();
        r.ranking.bootstrap = rk.at("bootstrap").get<bool>();
        for (const auto& e : rk.at("entries"))
            r.ranking.entries.push_back({e.at("variable").get<std::string>(), e.at("index").get<std::size_t>(),
                                         parse_polarity(e.at("polarity").get<std::string>()),
                                         e.at("net_effect").get<double>()});
        for (const auto& e : j.at("effect_lengths"))
            r.effect_lengths.push_back({index(e.at("impulse").get<std::string>()),
                                        index(e.at("response").get<std::string>()),
                                        {e.at("total_minutes").get<double>(), e.at("total_steps").get<double>(),
                                         e.at("effective_horizon").get<double>()}});
        for (const auto& p : j.at("percentage_effects")) {
            PercentageAdvice a;
            a.target = p.at("target").get<std::string>();
            a.target_index = p.at("target_index").get<std::size_t>();
            a.desired_percent = p.at("desired_percent").get<double>();
            a.theta = p.at("theta").get<double>();
            a.horizon = p.at("horizon").get<int>();
            a.window_low = p.at("window").at(0).get<double>();
            a.window_high = p.at("window").at(1).get<double>();
            for (const auto& s : p.at("suggestions"))
                a.suggestions.push_back({s.at("variable").get<std::string>(), s.at("index").get<std::size_t>(),
                                         s.at("percent").get<double>(), s.at("net_effect").get<double>(),
                                         s.at("effective_horizon").get<double>()});
            for (const auto& s : p.at("skipped"))
                a.skipped.push_back({s.at("variable").get<std::string>(), s.at("index").get<std::size_t>(),
                                     s.at("reason").get<std::string>()});
            r.percentage_effects.push_back(std::move(a));
        }
        r.sentences = j.at("sentences").get<std::vector<std::string>>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ModelFormatError(std::string("malformed report: ") + e.what());
    }
}

/// Plot data: one CSV record per (impulse, response, t).
inline std::string plot_csv(const std::vector<ImpulseResponse>& responses, const VarModel& model,
                            bool header = true) {
    std::string out = header ? "impulse,response,t,value,lower,upper\n" : "";
    char buf[64];
    const auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.12g", report_number(v));
        return std::string(buf);
    };
    for (const auto& r : responses)
        for (std::size_t t = 0; t < r.values.size(); ++t) {
            out += model.variables[r.impulse].name + ',' + model.variables[r.response].name + ',' +
                   std::to_string(t) + ',' + num(r.values[t]) + ',' + (r.lower ? num((*r.lower)[t]) : "") + ',' +
                   (r.upper ? num((*r.upper)[t]) : "") + '\n';
        }
    return out;
}

} // namespace aira

#endif // AIRA_REPORT_HPP
