#ifndef AIRA_TOOLS_CLI_APP_HPP
#define AIRA_TOOLS_CLI_APP_HPP

// Command-line front end: fit, advise, irf, effect-length, whatif, serve.
// Exit codes: 0 success, 1 computation error, 2 usage error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "aira/service.hpp"

namespace aira::cli {

enum ExitCode : int { kOk = 0, kComputation = 1, kUsage = 2 };

namespace detail {

struct Flags {
    RunConfig cfg;
    bool bootstrap_on = false;
    bool bootstrap_off = false;
    double interval = 0.0;
    std::string model_path;
    std::string data_path;
    std::string output;

    void add_run_options(CLI::App& cmd, bool with_model = true) {
        if (with_model) cmd.add_option("-m,--model", model_path, "Model file")->required()->check(CLI::ExistingFile);
        cmd.add_option("--data", data_path, "Raw EMA CSV used for the bootstrap")->check(CLI::ExistingFile);
        cmd.add_option("-k,--horizon", cfg.horizon, "Horizon in steps")->capture_default_str()->check(CLI::Range(1, 100000));
        cmd.add_flag("--bootstrap", bootstrap_on, "Significance-mask responses with bootstrap bands");
        cmd.add_flag("--no-bootstrap", bootstrap_off, "Use all responses");
        cmd.add_option("--iterations", cfg.iterations, "Bootstrap replicates")->capture_default_str()->check(CLI::Range(1, 1000000));
        cmd.add_option("--confidence", cfg.confidence, "Band confidence level")->capture_default_str()
            ->check(CLI::Range(0.0, 1.0));
        cmd.add_option("--seed", cfg.seed, "Bootstrap seed")->capture_default_str();
        cmd.add_option("--workers", cfg.workers, "Worker threads")->capture_default_str()->check(CLI::Range(1u, 1024u));
        cmd.add_option("--interval-minutes", interval, "Override the measurement interval")->check(CLI::PositiveNumber);
        cmd.add_flag("--orthogonalized", cfg.orthogonalized, "Cholesky-orthogonalized responses");
        cmd.add_option("--ordering", cfg.ordering, "Variable order for the Cholesky factor")->delimiter(',');
        cmd.add_option("-o,--output", output, "Write to this file instead of standard output");
    }

    RunConfig resolve() const {
        if (bootstrap_on && bootstrap_off) throw ConfigError("--bootstrap and --no-bootstrap are exclusive");
        RunConfig out = cfg;
        if (bootstrap_on) out.bootstrap = true;
        if (bootstrap_off) out.bootstrap = false;
        if (interval > 0.0) out.interval_minutes = interval;
        out.validate();
        return out;
    }

    Snapshot snapshot() const {
        Snapshot snap;
        snap.model = load_model(model_path);
        if (!data_path.empty()) {
            const double minutes = interval > 0.0 ? interval : snap.model.interval_minutes;
            snap.data = align_dataset(snap.model, load_ema_csv(data_path, minutes, {}, snap.model.exo_names));
        }
        return snap;
    }
};

inline void emit(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(path);
    if (!file) throw ConfigError("cannot write '" + path + "'");
    file << text;
}

inline PolarityMap parse_polarities(const std::vector<std::string>& specs) {
    PolarityMap map;
    for (const auto& s : specs) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("polarity must be written name=positive|negative");
        map[s.substr(0, eq)] = parse_polarity(s.substr(eq + 1));
    }
    return map;
}

} // namespace detail

/// Runs one command line. @p args excludes the program name.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Automated impulse response analysis of EMA time series"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    // fit
    auto* fit = app.add_subcommand("fit", "Fit a VAR(p) to an EMA CSV and write a model file");
    std::string fit_input, fit_output;
    int fit_lags = 1;
    double fit_interval = 0.0;
    std::vector<std::string> fit_polarity, fit_exo;
    fit->add_option("-i,--input", fit_input, "EMA CSV")->required()->check(CLI::ExistingFile);
    fit->add_option("-p,--lags", fit_lags, "Lag order")->required()->check(CLI::Range(1, 1000));
    fit->add_option("--interval-minutes", fit_interval, "Measurement interval")->required()->check(CLI::PositiveNumber);
    fit->add_option("-o,--output", fit_output, "Model file to write")->required();
    fit->add_option("--polarity", fit_polarity, "name=positive|negative (repeatable)");
    fit->add_option("--exogenous", fit_exo, "Exogenous column names")->delimiter(',');

    // advise
    auto* advise = app.add_subcommand("advise", "Full advice report");
    detail::Flags advise_flags;
    advise_flags.add_run_options(*advise);
    double advise_theta = 0.0, advise_percent = 10.0;
    bool advise_text = false;
    std::string advise_locale;
    advise->add_option("--theta", advise_theta, "Minimum effect (sd units) for percentage advice")->check(CLI::NonNegativeNumber);
    advise->add_option("--percent", advise_percent, "Desired change for the percentage tables")->capture_default_str();
    advise->add_flag("--text", advise_text, "Print the advice sentences instead of the JSON report");
    advise->add_option("--locale", advise_locale, "JSON file with sentence templates")->check(CLI::ExistingFile);

    // irf
    auto* irf_cmd = app.add_subcommand("irf", "Impulse response series (plot data)");
    detail::Flags irf_flags;
    irf_flags.add_run_options(*irf_cmd);
    std::string irf_impulse, irf_response, irf_format = "json";
    irf_cmd->add_option("--impulse", irf_impulse, "Shocked variable")->required();
    irf_cmd->add_option("--response", irf_response, "Response variable (default: all)");
    irf_cmd->add_option("--format", irf_format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

    // effect-length
    auto* len_cmd = app.add_subcommand("effect-length", "Duration of the effect of one variable on another");
    detail::Flags len_flags;
    len_flags.add_run_options(*len_cmd);
    std::string len_impulse, len_response;
    len_cmd->add_option("--impulse", len_impulse, "Shocked variable")->required();
    len_cmd->add_option("--response", len_response, "Response variable")->required();

    // whatif
    auto* what_cmd = app.add_subcommand("whatif", "Changes needed in other variables to move a target");
    detail::Flags what_flags;
    what_flags.add_run_options(*what_cmd);
    std::string what_target;
    double what_percent = 0.0, what_theta = 0.0;
    bool what_text = false;
    what_cmd->add_option("--target", what_target, "Variable to change")->required();
    what_cmd->add_option("--percent", what_percent, "Desired change in percent")->required();
    what_cmd->add_option("--theta", what_theta, "Minimum effect (sd units)")->check(CLI::NonNegativeNumber);
    what_cmd->add_option("--window", what_flags.cfg.window_high, "Largest reported |percent|")->capture_default_str()
        ->check(CLI::PositiveNumber);
    what_cmd->add_flag("--text", what_text, "Print sentences instead of JSON");

    // serve
    auto* serve = app.add_subcommand("serve", "HTTP analysis service");
    detail::Flags serve_flags;
    serve_flags.add_run_options(*serve, false);
    serve->add_option("-m,--model", serve_flags.model_path, "Model to preload")->check(CLI::ExistingFile);
    std::string host = "127.0.0.1", ui_dir;
    int port = 8080;
    serve->add_option("--host", host)->capture_default_str();
    serve->add_option("--port", port)->capture_default_str()->check(CLI::Range(0, 65535));
    serve->add_option("--ui-dir", ui_dir, "Static UI bundle served at /")->check(CLI::ExistingDirectory);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }

    try {
        if (fit->parsed()) {
            const auto data = load_ema_csv(fit_input, fit_interval, detail::parse_polarities(fit_polarity), fit_exo);
            const auto model = fit_var(data, fit_lags);
            save_model(model, fit_output);
            const auto s = check_stability(model);
            out << "fitted VAR(" << fit_lags << ") on " << data.observations() << " observations of "
                << data.dimension() << " variables\n"
                << "stable: " << (s.stable ? "yes" : "no") << ", spectral radius: " << report_number(s.spectral_radius)
                << "\n";
            if (!s.stable) err << "warning: model is not stable; responses will not die out\n";
            return kOk;
        }
        if (advise->parsed()) {
            const auto cfg = advise_flags.resolve();
            ReportOptions ropts;
            ropts.percent = advise_percent;
            if (!advise_locale.empty()) ropts.locale = Locale::load(advise_locale);
            auto c = cfg;
            c.theta = advise_theta;
            const auto report = report_json(advise_flags.snapshot(), c, ropts);
            if (advise_text) {
                std::string text;
                for (const auto& s : report.at("sentences")) text += s.get<std::string>() + "\n";
                detail::emit(text, advise_flags.output, out);
            } else {
                detail::emit(to_text(report), advise_flags.output, out);
            }
            return kOk;
        }
        if (irf_cmd->parsed()) {
            const auto cfg = irf_flags.resolve();
            const auto snap = irf_flags.snapshot();
            const std::optional<std::string> response =
                irf_response.empty() ? std::nullopt : std::optional<std::string>(irf_response);
            if (irf_format == "csv")
                detail::emit(plot_csv(irf_series(snap, cfg, irf_impulse, response), snap.model), irf_flags.output, out);
            else
                detail::emit(to_text(irf_json(snap, cfg, irf_impulse, response)), irf_flags.output, out);
            return kOk;
        }
        if (len_cmd->parsed()) {
            const auto cfg = len_flags.resolve();
            detail::emit(to_text(effect_length_json(len_flags.snapshot(), cfg, len_impulse, len_response)),
                         len_flags.output, out);
            return kOk;
        }
        if (what_cmd->parsed()) {
            auto cfg = what_flags.resolve();
            cfg.theta = what_theta;
            cfg.window_low = -cfg.window_high;
            const auto j = whatif_json(what_flags.snapshot(), cfg, what_target, what_percent);
            if (what_text) {
                std::string text;
                for (const auto& s : j.at("text")) text += s.get<std::string>() + "\n";
                for (const auto& s : j.at("skipped"))
                    text += "skipped " + s.at("variable").get<std::string>() + ": " + s.at("reason").get<std::string>() + "\n";
                detail::emit(text, what_flags.output, out);
            } else {
                detail::emit(to_text(j), what_flags.output, out);
            }
            return kOk;
        }
        if (serve->parsed()) {
            AnalysisService service(serve_flags.resolve());
            if (!serve_flags.model_path.empty()) service.load(serve_flags.snapshot());
            httplib::Server server;
            service.mount(server);
            if (!ui_dir.empty()) server.set_mount_point("/", ui_dir);
            out << "listening on http://" << host << ":" << port << "\n" << std::flush;
            if (!server.listen(host, port)) {
                err << "error: cannot listen on " << host << ":" << port << "\n";
                return kComputation;
            }
            return kOk;
        }
    } catch (const UnknownVariableError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const BootstrapUnavailableError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kComputation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kComputation;
    }
    return kUsage;
}

} // namespace aira::cli

#endif // AIRA_TOOLS_CLI_APP_HPP
