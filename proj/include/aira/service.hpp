#ifndef AIRA_SERVICE_HPP
#define AIRA_SERVICE_HPP

/** @file
 * The computation core shared by the command-line tool and the HTTP service,
 * and the HTTP routes themselves.
 *
 * Every command resolves to one of the *_json functions below; both front
 * ends serialize their result with to_text(), so identical inputs produce
 * identical bytes.
 */

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

// Eigen must precede httplib: <resolv.h> defines a macro named _res.
#include "aira/bootstrap.hpp"
#include "aira/dataset.hpp"
#include "aira/fit.hpp"
#include "aira/model_io.hpp"
#include "aira/report.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace aira {

using nlohmann::json;

class UnknownVariableError : public ConfigError {
public:
    UnknownVariableError(const std::string& name, std::vector<std::string> valid)
        : ConfigError(message(name, valid)), name_(name), valid_(std::move(valid)) {}
    const std::string& name() const { return name_; }
    const std::vector<std::string>& valid() const { return valid_; }

private:
    static std::string message(const std::string& name, const std::vector<std::string>& valid) {
        std::string msg = "unknown variable '" + name + "'; valid names:";
        for (const auto& v : valid) msg += " " + v;
        return msg;
    }
    std::string name_;
    std::vector<std::string> valid_;
};

/// Raised for malformed requests; carries per-field messages.
class RequestError : public ConfigError {
public:
    explicit RequestError(std::map<std::string, std::string> fields)
        : ConfigError(summary(fields)), fields_(std::move(fields)) {}
    RequestError(const std::string& field, const std::string& message)
        : RequestError(std::map<std::string, std::string>{{field, message}}) {}
    const std::map<std::string, std::string>& fields() const { return fields_; }

private:
    static std::string summary(const std::map<std::string, std::string>& f) {
        std::string s = "invalid request:";
        for (const auto& [k, v] : f) s += " " + k + ": " + v + ";";
        return s;
    }
    std::map<std::string, std::string> fields_;
};

struct RunConfig {
    int horizon = 20;
    std::optional<bool> bootstrap; ///< unset: on when residuals or data are available
    int iterations = 200;
    double confidence = 0.95;
    double theta = 0.0;
    double window_low = -1000.0;
    double window_high = 1000.0;
    std::uint64_t seed = 1;
    std::optional<double> interval_minutes;
    unsigned workers = 1;
    bool orthogonalized = false;
    std::vector<std::string> ordering;

    void validate() const {
        if (horizon < 1) throw ConfigError("horizon must be >= 1");
        if (iterations < 1) throw ConfigError("iterations must be >= 1");
        if (!(confidence > 0.0 && confidence < 1.0)) throw ConfigError("confidence must lie in (0, 1)");
        if (!(theta >= 0.0)) throw ConfigError("theta must be >= 0");
        if (!(window_low <= window_high)) throw ConfigError("window lower bound exceeds upper bound");
        if (interval_minutes && !(*interval_minutes > 0.0)) throw ConfigError("interval_minutes must be > 0");
        if (workers < 1) throw ConfigError("workers must be >= 1");
    }
};

/// Immutable model (and optional raw data) a request is evaluated against.
struct Snapshot {
    VarModel model;
    std::optional<EmaDataset> data;
};

inline std::string to_text(const json& j) { return j.dump(2) + "\n"; }

/// Reorders @p data's columns to the model's variable order.
inline EmaDataset align_dataset(const VarModel& model, const EmaDataset& data) {
    EmaDataset out;
    out.interval_minutes = data.interval_minutes;
    out.variables = model.variables;
    out.rows.resize(data.rows.rows(), static_cast<Eigen::Index>(model.dimension()));
    for (std::size_t j = 0; j < model.dimension(); ++j) {
        std::optional<std::size_t> col;
        for (std::size_t c = 0; c < data.variables.size(); ++c)
            if (data.variables[c].name == model.variables[j].name) col = c;
        if (!col) throw ConfigError("dataset lacks model variable '" + model.variables[j].name + "'");
        out.rows.col(static_cast<Eigen::Index>(j)) = data.rows.col(static_cast<Eigen::Index>(*col));
    }
    out.exo_names = data.exo_names;
    out.exogenous = data.exogenous;
    return out;
}

inline std::size_t resolve(const VarModel& model, const std::string& name) {
    if (auto i = model.index_of(name)) return *i;
    throw UnknownVariableError(name, model.names());
}

namespace detail {

inline VarModel effective_model(const Snapshot& snap, const RunConfig& cfg) {
    VarModel model = snap.model;
    if (cfg.interval_minutes) model.interval_minutes = *cfg.interval_minutes;
    return model;
}

inline bool bootstrap_available(const Snapshot& snap) {
    return snap.data.has_value() || (snap.model.residuals && snap.model.residuals->rows() > 0);
}

} // namespace detail

/// Resolves orthogonalization and, when bootstrapping, computes the bands.
inline AdviceOptions advice_options(const Snapshot& snap, const RunConfig& cfg) {
    cfg.validate();
    AdviceOptions opts;
    opts.window_low = cfg.window_low;
    opts.window_high = cfg.window_high;
    opts.workers = cfg.workers;
    opts.irf.orthogonalized = cfg.orthogonalized;
    for (const auto& name : cfg.ordering) opts.irf.ordering.push_back(resolve(snap.model, name));
    const bool available = detail::bootstrap_available(snap);
    const bool wanted = cfg.bootstrap.value_or(available);
    if (wanted && !available)
        throw BootstrapUnavailableError(
            "bootstrap requested but the model has no residuals and no dataset was supplied; "
            "pass the raw data or disable the bootstrap");
    if (wanted) {
        BootstrapConfig bc{cfg.iterations, cfg.confidence, cfg.seed, cfg.workers};
        const EmaDataset* data = snap.data ? &*snap.data : nullptr;
        opts.irf.bands = std::make_shared<const ResponseBands>(
            bootstrap_bands(snap.model, data, cfg.horizon, bc, opts.irf));
    }
    return opts;
}

inline json meta_json(const Snapshot& snap) {
    const auto& m = snap.model;
    json vars = json::array();
    for (const auto& v : m.variables)
        vars.push_back({{"name", v.name},
                        {"polarity", to_string(v.polarity)},
                        {"mean", report_number(v.mean)},
                        {"sd", report_number(v.sd)}});
    const auto stability = check_stability(m);
    return {{"variables", std::move(vars)},
            {"lags", m.lags()},
            {"exo_names", m.exo_names},
            {"interval_minutes", report_number(m.interval_minutes)},
            {"stable", stability.stable},
            {"spectral_radius", report_number(stability.spectral_radius)},
            {"has_residuals", m.residuals.has_value()},
            {"has_data", snap.data.has_value()}};
}

inline json influence_json(const Snapshot& snap, const RunConfig& cfg) {
    const auto opts = advice_options(snap, cfg);
    return to_json(determine_most_influential(detail::effective_model(snap, cfg), cfg.horizon, opts));
}

inline json report_json(const Snapshot& snap, const RunConfig& cfg, const ReportOptions& ropts = {}) {
    const auto opts = advice_options(snap, cfg);
    ReportOptions r = ropts;
    r.theta = cfg.theta;
    return to_json(build_advice_report(detail::effective_model(snap, cfg), cfg.horizon, opts, r));
}

/// Responses to a shock on @p impulse; all responses when @p response is empty.
inline std::vector<ImpulseResponse> irf_series(const Snapshot& snap, const RunConfig& cfg, const std::string& impulse,
                                               const std::optional<std::string>& response) {
    const auto model = detail::effective_model(snap, cfg);
    const auto x = resolve(model, impulse);
    std::optional<std::size_t> y;
    if (response) y = resolve(model, *response);
    const auto opts = advice_options(snap, cfg);
    IrfOptions irf_opts = opts.irf;
    // Plotted series keep their bands but are not masked.
    irf_opts.bands.reset();
    const ResponseGrid grid(model, cfg.horizon, irf_opts);
    std::vector<ImpulseResponse> out;
    for (std::size_t r = 0; r < model.dimension(); ++r) {
        if (y && *y != r) continue;
        auto resp = grid.at(x, r);
        if (opts.irf.bands) ResponseGrid::attach_bands(resp, *opts.irf.bands, 1.0);
        out.push_back(std::move(resp));
    }
    return out;
}

inline json irf_json(const Snapshot& snap, const RunConfig& cfg, const std::string& impulse,
                     const std::optional<std::string>& response) {
    const auto series = irf_series(snap, cfg, impulse, response);
    json out = json::array();
    for (const auto& s : series) out.push_back(to_json(s, snap.model));
    return {{"horizon", cfg.horizon}, {"orthogonalized", cfg.orthogonalized}, {"series", std::move(out)}};
}

inline json effect_length_json(const Snapshot& snap, const RunConfig& cfg, const std::string& impulse,
                               const std::string& response) {
    const auto model = detail::effective_model(snap, cfg);
    const auto x = resolve(model, impulse);
    const auto y = resolve(model, response);
    const auto opts = advice_options(snap, cfg);
    auto j = to_json(determine_length_of_effect(x, y, model.interval_minutes, cfg.horizon, model, opts));
    j["impulse"] = impulse;
    j["response"] = response;
    j["horizon"] = cfg.horizon;
    j["bootstrap"] = opts.bootstrap();
    return j;
}

inline PercentageAdvice whatif(const Snapshot& snap, const RunConfig& cfg, const std::string& target, double percent) {
    const auto model = detail::effective_model(snap, cfg);
    const auto x = resolve(model, target);
    const auto opts = advice_options(snap, cfg);
    return determine_percentage_effect(percent, x, cfg.theta, cfg.horizon, model, opts);
}

inline json whatif_json(const Snapshot& snap, const RunConfig& cfg, const std::string& target, double percent,
                        const Locale& locale = {}) {
    const auto advice = whatif(snap, cfg, target, percent);
    auto j = to_json(advice);
    j["text"] = render_percentage(advice, locale);
    return j;
}

// -- HTTP ----------------------------------------------------------------------------

namespace http_detail {

class FieldReader {
public:
    explicit FieldReader(const json& body) : body_(body) {}

    template <typename T>
    std::optional<T> optional(const std::string& name) {
        if (!body_.contains(name) || body_.at(name).is_null()) return std::nullopt;
        try {
            return body_.at(name).get<T>();
        } catch (const json::exception&) {
            errors_[name] = "has the wrong type";
            return std::nullopt;
        }
    }

    template <typename T>
    T required(const std::string& name) {
        if (!body_.contains(name)) {
            errors_[name] = "is required";
            return T{};
        }
        return optional<T>(name).value_or(T{});
    }

    void fail(const std::string& name, const std::string& msg) { errors_[name] = msg; }

    void finish() const {
        if (!errors_.empty()) throw RequestError(errors_);
    }

private:
    const json& body_;
    std::map<std::string, std::string> errors_;
};

inline json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    json body;
    try {
        body = json::parse(req.body);
    } catch (const json::exception&) {
        throw RequestError("body", "is not valid JSON");
    }
    if (!body.is_object()) throw RequestError("body", "must be a JSON object");
    return body;
}

inline RunConfig request_config(RunConfig cfg, FieldReader& f) {
    if (auto v = f.optional<int>("horizon")) cfg.horizon = *v;
    if (auto v = f.optional<bool>("bootstrap")) cfg.bootstrap = *v;
    if (auto v = f.optional<int>("iterations")) cfg.iterations = *v;
    if (auto v = f.optional<double>("confidence")) cfg.confidence = *v;
    if (auto v = f.optional<std::uint64_t>("seed")) cfg.seed = *v;
    if (auto v = f.optional<bool>("orthogonalized")) cfg.orthogonalized = *v;
    if (auto v = f.optional<std::vector<std::string>>("ordering")) cfg.ordering = *v;
    if (cfg.horizon < 1) f.fail("horizon", "must be >= 1");
    if (cfg.iterations < 1) f.fail("iterations", "must be >= 1");
    if (!(cfg.confidence > 0.0 && cfg.confidence < 1.0)) f.fail("confidence", "must lie in (0, 1)");
    return cfg;
}

inline void reply(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(to_text(body), "application/json");
}

} // namespace http_detail

/// Holds the current model snapshot; uploads swap it atomically.
class AnalysisService {
public:
    explicit AnalysisService(RunConfig defaults = {}) : defaults_(std::move(defaults)) {}

    std::shared_ptr<const Snapshot> snapshot() const {
        std::lock_guard lock(mutex_);
        return snapshot_;
    }

    void load(Snapshot snap) {
        snap.model.validate();
        if (snap.data) snap.data = align_dataset(snap.model, *snap.data);
        auto next = std::make_shared<const Snapshot>(std::move(snap));
        std::lock_guard lock(mutex_);
        snapshot_ = std::move(next);
    }

    const RunConfig& defaults() const { return defaults_; }

    /// Registers the /api routes (and CORS handling) on @p server.
    void mount(httplib::Server& server) {
        using namespace http_detail;
        server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                    {"Access-Control-Allow-Headers", "Content-Type"},
                                    {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
        server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

        server.Post("/api/model", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const json body = parse_body(req);
                load(snapshot_from_upload(body));
                reply(res, 200, meta_json(*snapshot()));
            });
        });
        server.Get("/api/model/meta", [this](const httplib::Request&, httplib::Response& res) {
            guarded(res, [&] { reply(res, 200, meta_json(*current())); });
        });
        server.Post("/api/irf", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const json body = parse_body(req);
                FieldReader f(body);
                const auto impulse = f.required<std::string>("impulse");
                const auto response = f.optional<std::string>("response");
                const auto cfg = request_config(defaults_, f);
                f.finish();
                reply(res, 200, irf_json(*current(), cfg, impulse, response));
            });
        });
        server.Post("/api/influence", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const json body = parse_body(req);
                FieldReader f(body);
                const auto cfg = request_config(defaults_, f);
                f.finish();
                reply(res, 200, influence_json(*current(), cfg));
            });
        });
        server.Post("/api/effect-length", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const json body = parse_body(req);
                FieldReader f(body);
                const auto impulse = f.required<std::string>("impulse");
                const auto response = f.required<std::string>("response");
                const auto cfg = request_config(defaults_, f);
                f.finish();
                reply(res, 200, effect_length_json(*current(), cfg, impulse, response));
            });
        });
        server.Post("/api/whatif", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const json body = parse_body(req);
                FieldReader f(body);
                const auto target = f.required<std::string>("target");
                const auto percent = f.required<double>("percent");
                auto cfg = request_config(defaults_, f);
                cfg.theta = f.required<double>("theta");
                if (!(cfg.theta >= 0.0)) f.fail("theta", "must be >= 0");
                f.finish();
                reply(res, 200, whatif_json(*current(), cfg, target, percent));
            });
        });
    }

private:
    std::shared_ptr<const Snapshot> current() const {
        auto snap = snapshot();
        if (!snap) throw NoModel();
        return snap;
    }

    struct NoModel {};

    static Snapshot snapshot_from_upload(const json& body) {
        Snapshot snap;
        const json* model_doc = nullptr;
        if (body.contains("coefficient_blocks")) model_doc = &body;
        else if (body.contains("model")) model_doc = &body.at("model");
        if (model_doc) snap.model = model_from_json(*model_doc);

        if (body.contains("csv")) {
            http_detail::FieldReader f(body);
            const auto csv = f.required<std::string>("csv");
            const auto interval = model_doc ? f.optional<double>("interval_minutes").value_or(snap.model.interval_minutes)
                                            : f.required<double>("interval_minutes");
            const auto lags = model_doc ? 0 : f.required<int>("lags");
            PolarityMap polarities;
            if (auto pol = f.optional<std::map<std::string, std::string>>("polarities"))
                for (const auto& [name, p] : *pol) polarities[name] = parse_polarity(p);
            const auto exo = f.optional<std::vector<std::string>>("exogenous").value_or(std::vector<std::string>{});
            if (!model_doc && lags < 1) f.fail("lags", "must be >= 1");
            if (!(interval > 0.0)) f.fail("interval_minutes", "must be > 0");
            f.finish();
            auto data = parse_ema_csv_text(csv, interval, polarities, exo);
            if (!model_doc) snap.model = fit_var(data, lags);
            snap.data = std::move(data);
        } else if (!model_doc) {
            throw RequestError("body", "must contain a model document or csv with lags");
        }
        return snap;
    }

    template <typename F>
    static void guarded(httplib::Response& res, F&& body) {
        using http_detail::reply;
        try {
            body();
        } catch (const NoModel&) {
            reply(res, 409, {{"error", "no model loaded"}});
        } catch (const RequestError& e) {
            reply(res, 400, {{"error", e.what()}, {"fields", e.fields()}});
        } catch (const UnknownVariableError& e) {
            reply(res, 404, {{"error", e.what()}, {"valid", e.valid()}});
        } catch (const FitError& e) {
            reply(res, 422, {{"error", e.what()}});
        } catch (const DecompositionError& e) {
            reply(res, 422, {{"error", e.what()}});
        } catch (const Error& e) {
            reply(res, 400, {{"error", e.what()}});
        } catch (const std::exception& e) {
            reply(res, 500, {{"error", e.what()}});
        }
    }

    RunConfig defaults_;
    mutable std::mutex mutex_;
    std::shared_ptr<const Snapshot> snapshot_;
};

} // namespace aira

#endif // AIRA_SERVICE_HPP
