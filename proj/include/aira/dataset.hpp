#ifndef AIRA_DATASET_HPP
#define AIRA_DATASET_HPP

/** @file
 * Loading equidistant EMA series from comma-separated text.
 */

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "aira/model.hpp"

namespace aira {

using PolarityMap = std::map<std::string, Polarity, std::less<>>;

namespace detail {

inline std::string trim_cell(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return std::string(s);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(',', start);
        cells.push_back(trim_cell(std::string_view(line).substr(start, pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return cells;
}

inline bool is_missing(const std::string& cell) {
    return cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan";
}

} // namespace detail

/// Parses EMA CSV text. The first row names the columns; columns listed in
/// @p exogenous become exogenous regressors, the rest endogenous variables.
/// Means and standard deviations are computed on the raw columns.
inline EmaDataset parse_ema_csv(std::istream& in, double interval_minutes,
                                const PolarityMap& polarities = {},
                                const std::vector<std::string>& exogenous = {}) {
    if (!(interval_minutes > 0.0)) throw ConfigError("interval_minutes must be > 0");

    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty CSV input: missing header row");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    const auto header = detail::split_csv_line(line);

    std::vector<bool> is_exo(header.size(), false);
    for (const auto& name : exogenous) {
        bool found = false;
        for (std::size_t j = 0; j < header.size(); ++j)
            if (header[j] == name) is_exo[j] = found = true;
        if (!found) throw ConfigError("exogenous column '" + name + "' not in header");
    }
    for (const auto& [name, pol] : polarities) {
        bool found = false;
        for (std::size_t j = 0; j < header.size(); ++j)
            if (header[j] == name && !is_exo[j]) found = true;
        if (!found) throw ConfigError("polarity given for unknown variable '" + name + "'");
    }

    EmaDataset data;
    data.interval_minutes = interval_minutes;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (is_exo[j]) {
            data.exo_names.push_back(header[j]);
            continue;
        }
        VariableMeta meta{header[j], Polarity::positive, 0.0, 0.0};
        if (auto it = polarities.find(header[j]); it != polarities.end()) meta.polarity = it->second;
        data.variables.push_back(std::move(meta));
    }

    std::vector<std::vector<double>> endo, exo;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (detail::trim_cell(line).empty()) continue;
        auto cells = detail::split_csv_line(line);
        if (cells.size() > header.size())
            throw ParseError("row " + std::to_string(row) + " has more cells than the header");
        cells.resize(header.size());
        std::vector<double> e, x;
        for (std::size_t j = 0; j < header.size(); ++j) {
            const auto& cell = cells[j];
            if (detail::is_missing(cell))
                throw MissingDataError("missing value in row " + std::to_string(row) + ", column '" +
                                           header[j] + "'",
                                       row);
            double value = 0.0;
            const auto* first = cell.data();
            const auto* last = first + cell.size();
            if (*first == '+') ++first;
            const auto [ptr, ec] = std::from_chars(first, last, value);
            if (ec != std::errc() || ptr != last)
                throw ParseError("non-numeric value '" + cell + "' in row " + std::to_string(row) +
                                 ", column '" + header[j] + "'");
            (is_exo[j] ? x : e).push_back(value);
        }
        endo.push_back(std::move(e));
        exo.push_back(std::move(x));
        ++row;
    }

    const auto t = static_cast<Eigen::Index>(endo.size());
    data.rows.resize(t, static_cast<Eigen::Index>(data.variables.size()));
    data.exogenous.resize(t, static_cast<Eigen::Index>(data.exo_names.size()));
    for (Eigen::Index i = 0; i < t; ++i) {
        for (Eigen::Index j = 0; j < data.rows.cols(); ++j) data.rows(i, j) = endo[i][j];
        for (Eigen::Index j = 0; j < data.exogenous.cols(); ++j) data.exogenous(i, j) = exo[i][j];
    }
    data.refresh_moments();
    data.validate();
    return data;
}

inline EmaDataset load_ema_csv(const std::string& path, double interval_minutes,
                               const PolarityMap& polarities = {},
                               const std::vector<std::string>& exogenous = {}) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    return parse_ema_csv(in, interval_minutes, polarities, exogenous);
}

inline EmaDataset parse_ema_csv_text(const std::string& text, double interval_minutes,
                                     const PolarityMap& polarities = {},
                                     const std::vector<std::string>& exogenous = {}) {
    std::istringstream in(text);
    return parse_ema_csv(in, interval_minutes, polarities, exogenous);
}

} // namespace aira

#endif // AIRA_DATASET_HPP
