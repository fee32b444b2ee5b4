#pragma once

// CSV and JSON serialization of datasets. Both carry the same metadata:
// software version, verb, config hash, units, quadrature tolerances, sweep
// axes and the canonical config text, which parses back into the run config.

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "qdgain/config.hpp"
#include "qdgain/sweep.hpp"

#ifndef QDGAIN_VERSION
#define QDGAIN_VERSION "0.0.0"
#endif

namespace qdgain {

enum class Format { csv, json };

inline constexpr std::string_view kUnitsNote =
    "energies and frequencies in ueV with hbar = 1 (MHz inputs converted by E = h f, h = 4.135667696e-3 ueV/MHz); "
    "phase in rad; spectrum in 1/ueV; self-energy columns per replica; emission_rate = i F^<, absorption_rate = i F^>";

namespace detail {

inline std::string hash_text(const RunConfig& c) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016" PRIx64, config_hash(c));
    return buf;
}

inline std::vector<std::string> header_names(const Dataset& d) {
    std::vector<std::string> names;
    for (const SweepAxis& a : d.config.axes) names.push_back(a.parameter + "_ueV");
    names.emplace_back(d.config.size_name());
    for (Column c : d.columns) names.emplace_back(column_name(c));
    return names;
}

template <class Emit>
void for_each_value(const Dataset& d, const ResultRow& row, Emit&& emit) {
    for (double v : row.axes) emit(format_double(v));
    emit(std::to_string(row.size));
    for (Column c : d.columns) {
        const double v = row.value(c);
        if (!std::isfinite(v)) {
            std::ostringstream os;
            os << "non-finite " << column_name(c) << " at omega = " << row.omega << " ueV";
            throw Error(os.str());
        }
        emit(format_double(v));
    }
}

inline std::string cutoff_text(const RunConfig& c) {
    return c.quadrature.cutoff.ueV() > 0.0 ? format_double(c.quadrature.cutoff.ueV()) + " ueV" : "auto";
}

}  // namespace detail

inline void write_csv(std::ostream& out, const Dataset& d) {
    const RunConfig& c = d.config;
    out << "# qdgain " << QDGAIN_VERSION << "\n";
    out << "# verb: " << d.verb << "\n";
    out << "# config_hash: " << detail::hash_text(c) << "\n";
    out << "# units: " << kUnitsNote << "\n";
    out << "# quadrature: abs_tol=" << detail::format_double(c.quadrature.abs_tol)
        << " rel_tol=" << detail::format_double(c.quadrature.rel_tol) << " cutoff=" << detail::cutoff_text(c)
        << " max_intervals=" << c.quadrature.max_intervals << "\n";
    for (std::size_t i = 0; i < c.axes.size(); ++i) {
        const SweepAxis& a = c.axes[i];
        out << "# axis" << i + 1 << ": " << a.parameter << " from " << detail::format_double(a.start.ueV()) << " to "
            << detail::format_double(a.stop.ueV()) << " ueV, " << a.points << " points\n";
    }
    if (!c.axes.empty()) out << "# order: " << c.size_name() << " outermost, then axis1, axis2, omega\n";
    out << "# config:\n";
    std::istringstream cfg(serialize(c));
    for (std::string line; std::getline(cfg, line);) out << "#   " << line << "\n";
    out << "# end config\n";
    const auto names = detail::header_names(d);
    for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
    out << "\n";
    for (const ResultRow& row : d.rows) {
        bool first = true;
        detail::for_each_value(d, row, [&](const std::string& v) {
            out << (first ? "" : ",") << v;
            first = false;
        });
        out << "\n";
    }
}

inline void write_json(std::ostream& out, const Dataset& d) {
    const RunConfig& c = d.config;
    nlohmann::ordered_json meta;
    meta["software"] = "qdgain";
    meta["version"] = QDGAIN_VERSION;
    meta["verb"] = d.verb;
    meta["config_hash"] = detail::hash_text(c);
    meta["units"] = kUnitsNote;
    meta["quadrature"] = {{"abs_tol", c.quadrature.abs_tol},
                          {"rel_tol", c.quadrature.rel_tol},
                          {"cutoff", detail::cutoff_text(c)},
                          {"max_intervals", c.quadrature.max_intervals}};
    nlohmann::ordered_json axes = nlohmann::ordered_json::array();
    for (const SweepAxis& a : c.axes)
        axes.push_back({{"parameter", a.parameter},
                        {"start_ueV", a.start.ueV()},
                        {"stop_ueV", a.stop.ueV()},
                        {"points", a.points}});
    meta["axes"] = axes;
    meta["config"] = serialize(c);

    // Rows are written by hand so that every number carries 17 significant digits.
    out << "{\n\"metadata\": " << meta.dump(2) << ",\n\"columns\": " << nlohmann::json(detail::header_names(d)).dump()
        << ",\n\"rows\": [";
    for (std::size_t r = 0; r < d.rows.size(); ++r) {
        out << (r ? ",\n  [" : "\n  [");
        bool first = true;
        detail::for_each_value(d, d.rows[r], [&](const std::string& v) {
            out << (first ? "" : ", ") << v;
            first = false;
        });
        out << "]";
    }
    out << "\n]\n}\n";
}

inline void write_dataset(std::ostream& out, const Dataset& d, Format f) {
    if (f == Format::csv) write_csv(out, d);
    else write_json(out, d);
}

inline Format parse_format(std::string_view s) {
    if (s == "csv") return Format::csv;
    if (s == "json") return Format::json;
    throw std::invalid_argument("unknown format '" + std::string(s) + "' (use csv or json)");
}

/// Recovers the run config embedded in a CSV or JSON dataset.
inline RunConfig embedded_config(std::string_view dataset) {
    const auto start = dataset.find_first_not_of(" \t\r\n");
    if (start != std::string_view::npos && dataset[start] == '{') {
        const auto doc = nlohmann::json::parse(dataset);
        return parse_config(doc.at("metadata").at("config").get<std::string>());
    }
    std::string text;
    bool inside = false;
    std::istringstream in{std::string(dataset)};
    for (std::string line; std::getline(in, line);) {
        if (line == "# config:") {
            inside = true;
            continue;
        }
        if (line == "# end config") return parse_config(text);
        if (inside) {
            if (line.rfind("#   ", 0) != 0) break;
            text += line.substr(4) + "\n";
        }
    }
    throw ConfigError("dataset has no embedded config block");
}

}  // namespace qdgain
