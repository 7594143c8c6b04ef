#pragma once

#include "pla/error.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace pla {

/// One sweep point of one defender/attacker pairing.
struct ResultRow {
    std::string experiment;
    std::string defender;
    std::string attacker;

    std::uint64_t n_subcarriers = 0;
    std::uint64_t m_training = 0;
    double alpha_I = 0, alpha_II = 0, rho_AE = 0, rho_EB = 0, snr_I_db = 0, snr_II_db = 0;
    std::optional<double> target_pfa;
    std::uint64_t n_datasets = 0;
    std::uint64_t n_trials = 0;

    std::uint64_t fa_count = 0, alice_total = 0, md_count = 0, eve_total = 0;
    double p_fa = 0, p_md = 0, g_mean = 0, accuracy = 0, se_p_fa = 0, se_p_md = 0;

    std::optional<double> theta, epsilon;
    std::optional<std::uint64_t> j, k;
    std::optional<double> theta_d, nu, sigma_svm, svm_c;
    std::optional<std::uint64_t> knn_k;
    std::optional<double> attack_x, attack_y, cv_g_mean, train_time_s;

    friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

struct ResultTable {
    std::vector<ResultRow> rows;

    void append(const ResultTable& o) { rows.insert(rows.end(), o.rows.begin(), o.rows.end()); }
    friend bool operator==(const ResultTable&, const ResultTable&) = default;
};

/// "<1/n" when no error was seen, otherwise the rate itself.
inline std::string report_rate(std::uint64_t count, std::uint64_t total)
{
    char buf[64];
    if (count == 0) std::snprintf(buf, sizeof buf, "<%.17g", 1.0 / static_cast<double>(total));
    else std::snprintf(buf, sizeof buf, "%.17g", static_cast<double>(count) / static_cast<double>(total));
    return buf;
}

namespace detail {

using ColumnField =
    std::variant<std::string ResultRow::*, std::uint64_t ResultRow::*, double ResultRow::*,
                 std::optional<double> ResultRow::*, std::optional<std::uint64_t> ResultRow::*>;

struct Column {
    const char* name;
    ColumnField field;
};

// Stable output order: identity, sweep, counts, metrics, trained parameters.
inline const std::vector<Column>& columns()
{
    static const std::vector<Column> cols{
        {"experiment", &ResultRow::experiment},   {"defender", &ResultRow::defender},
        {"attacker", &ResultRow::attacker},       {"n_subcarriers", &ResultRow::n_subcarriers},
        {"m_training", &ResultRow::m_training},   {"alpha_I", &ResultRow::alpha_I},
        {"alpha_II", &ResultRow::alpha_II},       {"rho_AE", &ResultRow::rho_AE},
        {"rho_EB", &ResultRow::rho_EB},           {"snr_I_db", &ResultRow::snr_I_db},
        {"snr_II_db", &ResultRow::snr_II_db},     {"target_pfa", &ResultRow::target_pfa},
        {"n_datasets", &ResultRow::n_datasets},   {"n_trials", &ResultRow::n_trials},
        {"fa_count", &ResultRow::fa_count},       {"alice_total", &ResultRow::alice_total},
        {"md_count", &ResultRow::md_count},       {"eve_total", &ResultRow::eve_total},
        {"p_fa", &ResultRow::p_fa},               {"p_md", &ResultRow::p_md},
        {"g_mean", &ResultRow::g_mean},           {"accuracy", &ResultRow::accuracy},
        {"se_p_fa", &ResultRow::se_p_fa},         {"se_p_md", &ResultRow::se_p_md},
        {"theta", &ResultRow::theta},             {"epsilon", &ResultRow::epsilon},
        {"j", &ResultRow::j},                     {"k", &ResultRow::k},
        {"theta_d", &ResultRow::theta_d},         {"nu", &ResultRow::nu},
        {"sigma_svm", &ResultRow::sigma_svm},     {"svm_c", &ResultRow::svm_c},
        {"knn_k", &ResultRow::knn_k},             {"attack_x", &ResultRow::attack_x},
        {"attack_y", &ResultRow::attack_y},       {"cv_g_mean", &ResultRow::cv_g_mean},
        {"train_time_s", &ResultRow::train_time_s}};
    return cols;
}

// Derived, emitted after the stored columns and ignored on parse.
inline constexpr const char* kReportColumns[] = {"p_fa_report", "p_md_report"};

inline std::string format_real(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_real(const std::string& s)
{
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    if (s == "nan") return NAN;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0') throw ConfigError("result table: bad number '" + s + "'");
    return v;
}

inline std::uint64_t parse_count(const std::string& s)
{
    char* end = nullptr;
    const auto v = std::strtoull(s.c_str(), &end, 10);
    if (s.empty() || *end != '\0') throw ConfigError("result table: bad count '" + s + "'");
    return v;
}

inline std::string cell_text(const ResultRow& r, const ColumnField& f)
{
    return std::visit(
        [&](auto ptr) -> std::string {
            const auto& v = r.*ptr;
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, std::string>) return v;
            else if constexpr (std::is_same_v<V, std::uint64_t>) return std::to_string(v);
            else if constexpr (std::is_same_v<V, double>) return format_real(v);
            else if constexpr (std::is_same_v<V, std::optional<double>>) return v ? format_real(*v) : "";
            else return v ? std::to_string(*v) : "";
        },
        f);
}

inline void set_cell_text(ResultRow& r, const ColumnField& f, const std::string& s)
{
    std::visit(
        [&](auto ptr) {
            auto& v = r.*ptr;
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, std::string>) v = s;
            else if constexpr (std::is_same_v<V, std::uint64_t>) v = parse_count(s);
            else if constexpr (std::is_same_v<V, double>) v = parse_real(s);
            else if constexpr (std::is_same_v<V, std::optional<double>>) v = s.empty() ? std::nullopt : std::optional(parse_real(s));
            else v = s.empty() ? std::nullopt : std::optional(parse_count(s));
        },
        f);
}

inline nlohmann::json real_json(double v)
{
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(format_real(v));
}

inline double real_from_json(const nlohmann::json& j)
{
    return j.is_string() ? parse_real(j.get<std::string>()) : j.get<double>();
}

inline std::string csv_quote(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

inline std::vector<std::string> csv_split(const std::string& line)
{
    std::vector<std::string> out(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') out.back() += '"', ++i;
            else if (c == '"') quoted = false;
            else out.back() += c;
        } else if (c == '"') quoted = true;
        else if (c == ',') out.emplace_back();
        else out.back() += c;
    }
    if (quoted) throw ConfigError("result table: unterminated quote");
    return out;
}

} // namespace detail

inline std::vector<std::string> result_columns()
{
    std::vector<std::string> out;
    for (const auto& c : detail::columns()) out.emplace_back(c.name);
    for (const char* c : detail::kReportColumns) out.emplace_back(c);
    return out;
}

inline void write_csv(const ResultTable& t, std::ostream& os)
{
    const auto names = result_columns();
    for (std::size_t i = 0; i < names.size(); ++i) os << (i ? "," : "") << names[i];
    os << '\n';
    for (const auto& r : t.rows) {
        for (const auto& c : detail::columns()) os << detail::csv_quote(detail::cell_text(r, c.field)) << ',';
        os << detail::csv_quote(report_rate(r.fa_count, r.alice_total)) << ','
           << detail::csv_quote(report_rate(r.md_count, r.eve_total)) << '\n';
    }
}

inline nlohmann::json to_json(const ResultTable& t)
{
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : t.rows) {
        nlohmann::json o = nlohmann::json::object();
        for (const auto& c : detail::columns()) {
            std::visit(
                [&](auto ptr) {
                    const auto& v = r.*ptr;
                    using V = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<V, std::string> || std::is_same_v<V, std::uint64_t>) o[c.name] = v;
                    else if constexpr (std::is_same_v<V, double>) o[c.name] = detail::real_json(v);
                    else if constexpr (std::is_same_v<V, std::optional<double>>)
                        o[c.name] = v ? detail::real_json(*v) : nlohmann::json(nullptr);
                    else o[c.name] = v ? nlohmann::json(*v) : nlohmann::json(nullptr);
                },
                c.field);
        }
        o["p_fa_report"] = report_rate(r.fa_count, r.alice_total);
        o["p_md_report"] = report_rate(r.md_count, r.eve_total);
        rows.push_back(std::move(o));
    }
    return {{"columns", result_columns()}, {"rows", std::move(rows)}};
}

inline void write_json(const ResultTable& t, std::ostream& os) { os << to_json(t).dump(2) << '\n'; }

enum class OutputFormat { Csv, Json };

inline void emit(const ResultTable& t, OutputFormat f, const std::string& path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open '" + path + "' for writing");
    if (f == OutputFormat::Csv) write_csv(t, os);
    else write_json(t, os);
    os.flush();
    if (!os) throw Error("write to '" + path + "' failed");
}

inline ResultTable parse_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("result table: missing header");
    const auto header = detail::csv_split(line);
    const auto& cols = detail::columns();
    std::vector<const detail::Column*> map;
    for (const auto& h : header) {
        const detail::Column* found = nullptr;
        for (const auto& c : cols)
            if (h == c.name) found = &c;
        map.push_back(found);
    }
    ResultTable t;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto cells = detail::csv_split(line);
        if (cells.size() != header.size()) throw ConfigError("result table: ragged row");
        ResultRow r;
        for (std::size_t i = 0; i < cells.size(); ++i)
            if (map[i]) detail::set_cell_text(r, map[i]->field, cells[i]);
        t.rows.push_back(std::move(r));
    }
    return t;
}

inline ResultTable parse_json(const nlohmann::json& j)
{
    ResultTable t;
    try {
        for (const auto& o : j.at("rows")) {
            ResultRow r;
            for (const auto& c : detail::columns()) {
                const auto& v = o.at(c.name);
                std::visit(
                    [&](auto ptr) {
                        auto& dst = r.*ptr;
                        using V = std::decay_t<decltype(dst)>;
                        if constexpr (std::is_same_v<V, std::string> || std::is_same_v<V, std::uint64_t>) dst = v.get<V>();
                        else if constexpr (std::is_same_v<V, double>) dst = detail::real_from_json(v);
                        else if constexpr (std::is_same_v<V, std::optional<double>>)
                            dst = v.is_null() ? std::nullopt : std::optional(detail::real_from_json(v));
                        else dst = v.is_null() ? std::nullopt : std::optional(v.get<std::uint64_t>());
                    },
                    c.field);
            }
            t.rows.push_back(std::move(r));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("result table: ") + e.what());
    }
    return t;
}

inline std::string to_csv_string(const ResultTable& t)
{
    std::ostringstream os;
    write_csv(t, os);
    return os.str();
}

} // namespace pla
