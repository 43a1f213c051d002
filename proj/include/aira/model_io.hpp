#ifndef AIRA_MODEL_IO_HPP
#define AIRA_MODEL_IO_HPP

/** @file
 * Versioned JSON model files.
 *
 * {
 *   "format": "aira-var-model", "version": 1,
 *   "variables": [{"name", "polarity", "mean", "sd"}, ...],
 *   "lags": p,
 *   "coefficient_blocks": [[[row], ...] per lag],
 *   "constant": [...],
 *   "exo_names": [...], "exo_coefficients": [[row], ...],
 *   "residual_covariance": [[row], ...],
 *   "residuals": [[row], ...] | null,
 *   "interval_minutes": minutes
 * }
 *
 * Either residual_covariance or residuals must be present; the covariance is
 * derived from the residuals when only those are given.
 */

#include <nlohmann/json.hpp>

#include <fstream>
#include <string>

#include "aira/model.hpp"

namespace aira {

inline constexpr int kModelFormatVersion = 1;
inline constexpr const char* kModelFormatTag = "aira-var-model";

namespace json_util {

using nlohmann::json;

inline json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json vector_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

inline Eigen::MatrixXd matrix_from_json(const json& j, Eigen::Index cols_hint, const char* field) {
    if (!j.is_array()) throw ModelFormatError(std::string(field) + " must be an array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    Eigen::Index cols = rows > 0 ? static_cast<Eigen::Index>(j.front().size()) : cols_hint;
    Eigen::MatrixXd out(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw ModelFormatError(std::string(field) + " has ragged rows");
        for (Eigen::Index c = 0; c < cols; ++c) {
            const auto& cell = row[static_cast<std::size_t>(c)];
            if (!cell.is_number()) throw ModelFormatError(std::string(field) + " has non-numeric entries");
            out(i, c) = cell.get<double>();
        }
    }
    return out;
}

inline Eigen::VectorXd vector_from_json(const json& j, const char* field) {
    if (!j.is_array()) throw ModelFormatError(std::string(field) + " must be an array");
    Eigen::VectorXd out(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw ModelFormatError(std::string(field) + " has non-numeric entries");
        out(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    }
    return out;
}

inline const json& require(const json& doc, const char* field) {
    if (!doc.contains(field)) throw ModelFormatError(std::string("model file lacks field '") + field + "'");
    return doc.at(field);
}

} // namespace json_util

inline nlohmann::json model_to_json(const VarModel& model) {
    using namespace json_util;
    json doc;
    doc["format"] = kModelFormatTag;
    doc["version"] = kModelFormatVersion;
    json vars = json::array();
    for (const auto& v : model.variables)
        vars.push_back({{"name", v.name}, {"polarity", to_string(v.polarity)}, {"mean", v.mean}, {"sd", v.sd}});
    doc["variables"] = std::move(vars);
    doc["lags"] = model.lags();
    json blocks = json::array();
    for (const auto& b : model.coefficient_blocks) blocks.push_back(matrix_to_json(b));
    doc["coefficient_blocks"] = std::move(blocks);
    doc["constant"] = vector_to_json(model.constant);
    doc["exo_names"] = model.exo_names;
    doc["exo_coefficients"] = matrix_to_json(model.exo_coefficients);
    doc["residual_covariance"] = matrix_to_json(model.residual_covariance);
    doc["residuals"] = model.residuals ? matrix_to_json(*model.residuals) : json(nullptr);
    doc["interval_minutes"] = model.interval_minutes;
    return doc;
}

inline VarModel model_from_json(const nlohmann::json& doc) {
    using namespace json_util;
    if (!doc.is_object()) throw ModelFormatError("model document must be an object");
    try {
        const auto& version = require(doc, "version");
        if (!version.is_number_integer() || version.get<int>() != kModelFormatVersion)
            throw ModelFormatError("unsupported model file version " + version.dump());
        if (doc.contains("format") && doc.at("format") != kModelFormatTag)
            throw ModelFormatError("not an aira model file");

        VarModel model;
        for (const auto& v : require(doc, "variables")) {
            VariableMeta meta;
            meta.name = v.at("name").get<std::string>();
            meta.polarity = v.contains("polarity") ? parse_polarity(v.at("polarity").get<std::string>())
                                                   : Polarity::positive;
            meta.mean = v.value("mean", 0.0);
            meta.sd = v.value("sd", 0.0);
            model.variables.push_back(std::move(meta));
        }
        const auto m = static_cast<Eigen::Index>(model.variables.size());
        const auto& blocks = require(doc, "coefficient_blocks");
        if (!blocks.is_array()) throw ModelFormatError("coefficient_blocks must be an array");
        for (const auto& b : blocks) model.coefficient_blocks.push_back(matrix_from_json(b, m, "coefficient_blocks"));
        const auto lags = require(doc, "lags").get<std::size_t>();
        if (lags != model.coefficient_blocks.size())
            throw ModelFormatError("lags does not match the number of coefficient blocks");
        model.constant = doc.contains("constant") ? vector_from_json(doc.at("constant"), "constant")
                                                  : Eigen::VectorXd::Zero(m);
        if (doc.contains("exo_names")) model.exo_names = doc.at("exo_names").get<std::vector<std::string>>();
        const auto l = static_cast<Eigen::Index>(model.exo_names.size());
        if (doc.contains("exo_coefficients") && !doc.at("exo_coefficients").empty())
            model.exo_coefficients = matrix_from_json(doc.at("exo_coefficients"), l, "exo_coefficients");
        if (doc.contains("residuals") && !doc.at("residuals").is_null())
            model.residuals = matrix_from_json(doc.at("residuals"), m, "residuals");
        if (doc.contains("residual_covariance") && !doc.at("residual_covariance").is_null())
            model.residual_covariance = matrix_from_json(doc.at("residual_covariance"), m, "residual_covariance");
        else if (model.residuals)
            model.residual_covariance = sample_covariance(*model.residuals);
        else
            throw ModelFormatError("model file needs residual_covariance or residuals");
        model.interval_minutes = require(doc, "interval_minutes").get<double>();
        model.validate();
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw ModelFormatError(std::string("malformed model file: ") + e.what());
    } catch (const ConfigError& e) {
        throw ModelFormatError(e.what());
    }
}

inline void save_model(const VarModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << model_to_json(model).dump(2) << '\n';
}

inline VarModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ModelFormatError(std::string("model file is not valid JSON: ") + e.what());
    }
    return model_from_json(doc);
}

} // namespace aira

#endif // AIRA_MODEL_IO_HPP
