#pragma once

// Run configuration: an INI-style text file with mandatory units.
//
//   [model]       architecture = ndqd | cascade; detuning, hopping, coupling;
//                 replicas = 1, 2, 4 (ndqd) or sites = 1, 2, 3 (cascade)
//   [leads]       gamma (or gamma_left/gamma_right), bias, temperature
//   [cavity]      frequency, decay
//   [grid]        start, stop, points           (probe frequencies)
//   [sweep]       axis1 = <parameter>, <start>, <stop>, <points>; axis2 likewise
//   [quadrature]  abs_tol, rel_tol, cutoff, max_intervals
//
// Energies are written as "<number> ueV" or "<number> MHz" (E = h f) and
// stored in ueV. '#' and ';' start comments.

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qdgain/errors.hpp"
#include "qdgain/physmodel.hpp"
#include "qdgain/susceptibility.hpp"

namespace qdgain {

/// Model and lead parameters that a sweep axis may vary.
inline constexpr std::array<std::string_view, 8> kSweepParameters = {
    "detuning", "hopping", "coupling", "gamma", "gamma_left", "gamma_right", "bias", "temperature"};

struct SweepAxis {
    std::string parameter;
    Energy start{0.0};
    Energy stop{0.0};
    int points = 0;

    /// Uniformly spaced values, endpoints exact.
    std::vector<Energy> values() const {
        std::vector<Energy> v;
        v.reserve(static_cast<std::size_t>(points));
        for (int i = 0; i < points; ++i) {
            if (i == points - 1) {
                v.push_back(stop);
                break;
            }
            const double u = static_cast<double>(i) / (points - 1);
            v.push_back(Energy(start.ueV() + u * (stop - start).ueV()));
        }
        return v;
    }

    bool operator==(const SweepAxis&) const = default;
};

struct FrequencyGrid {
    Energy start{0.0};
    Energy stop{0.0};
    int points = 0;

    std::vector<Energy> values() const { return SweepAxis{"", start, stop, points}.values(); }
    bool operator==(const FrequencyGrid&) const = default;
};

struct RunConfig {
    Architecture architecture = Architecture::ndqd;
    Energy detuning{0.0};
    Energy hopping{0.0};
    Energy coupling{0.0};
    std::vector<int> sizes;  // N replicas (ndqd) or M sites (cascade)
    Energy gamma_left{0.0};
    Energy gamma_right{0.0};
    Energy bias{0.0};
    Energy temperature{0.0};
    CavityParams cavity{Energy(0.0), Energy(0.0)};
    std::optional<FrequencyGrid> grid;
    std::vector<SweepAxis> axes;
    QuadratureConfig quadrature;

    const char* size_name() const { return architecture == Architecture::ndqd ? "n" : "m"; }

    LeadSet leads() const { return LeadSet::biased(gamma_left, gamma_right, bias, temperature); }

    /// Per-replica medium for one entry of `sizes`.
    GainMedium medium(int size) const {
        return architecture == Architecture::ndqd ? build_ndqd(detuning, hopping, coupling, size)
                                                  : build_cascade(size, detuning, hopping, coupling);
    }

    /// Copy with one sweepable parameter replaced.
    RunConfig with(std::string_view parameter, Energy value) const {
        RunConfig c = *this;
        if (parameter == "detuning") c.detuning = value;
        else if (parameter == "hopping") c.hopping = value;
        else if (parameter == "coupling") c.coupling = value;
        else if (parameter == "gamma") c.gamma_left = c.gamma_right = value;
        else if (parameter == "gamma_left") c.gamma_left = value;
        else if (parameter == "gamma_right") c.gamma_right = value;
        else if (parameter == "bias") c.bias = value;
        else if (parameter == "temperature") c.temperature = value;
        else throw ConfigError("unknown sweep parameter '" + std::string(parameter) + "'");
        return c;
    }

    bool operator==(const RunConfig& o) const {
        return architecture == o.architecture && detuning == o.detuning && hopping == o.hopping &&
               coupling == o.coupling && sizes == o.sizes && gamma_left == o.gamma_left &&
               gamma_right == o.gamma_right && bias == o.bias && temperature == o.temperature &&
               cavity.omega_c == o.cavity.omega_c && cavity.kappa == o.cavity.kappa && grid == o.grid &&
               axes == o.axes && quadrature.abs_tol == o.quadrature.abs_tol &&
               quadrature.rel_tol == o.quadrature.rel_tol && quadrature.cutoff == o.quadrature.cutoff &&
               quadrature.max_intervals == o.quadrature.max_intervals;
    }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    for (;;) {
        const auto p = s.find(sep);
        out.push_back(trim(s.substr(0, p)));
        if (p == std::string_view::npos) return out;
        s.remove_prefix(p + 1);
    }
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct LineContext {
    int line;
    std::string field;

    [[noreturn]] void fail(const std::string& what) const { throw ConfigError(what, line, field); }
};

inline double parse_number(std::string_view text, const LineContext& at) {
    const std::string s(trim(text));
    if (s.empty()) at.fail("missing number for '" + at.field + "'");
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        at.fail("'" + s + "' is not a number");
    }
    if (used != s.size()) at.fail("unexpected text after number in '" + s + "'");
    if (!std::isfinite(v)) at.fail("'" + at.field + "' must be finite");
    return v;
}

inline int parse_int(std::string_view text, const LineContext& at) {
    const std::string_view s = trim(text);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
        at.fail("'" + std::string(s) + "' is not an integer");
    return v;
}

/// "<number> ueV" or "<number> MHz".
inline Energy parse_energy(std::string_view text, const LineContext& at) {
    const std::string_view s = trim(text);
    const auto sp = s.find_last_of(" \t");
    if (sp == std::string_view::npos)
        at.fail("'" + at.field + "' needs a unit (ueV or MHz): '" + std::string(s) + "'");
    const std::string_view unit = trim(s.substr(sp + 1));
    const double v = parse_number(s.substr(0, sp), at);
    if (unit == "ueV" || unit == "\xCE\xBC" "eV" || unit == "\xC2\xB5" "eV") return Energy::ueV(v);
    if (unit == "MHz") return Energy::mhz(v);
    at.fail("unknown unit '" + std::string(unit) + "' for '" + at.field + "' (use ueV or MHz)");
}

inline std::vector<int> parse_int_list(std::string_view text, const LineContext& at) {
    std::vector<int> out;
    for (std::string_view item : split(text, ',')) out.push_back(parse_int(item, at));
    for (int v : out)
        if (v < 1) at.fail("'" + at.field + "' entries must be at least 1");
    for (std::size_t i = 1; i < out.size(); ++i)
        if (std::find(out.begin(), out.begin() + static_cast<long>(i), out[i]) != out.begin() + static_cast<long>(i))
            at.fail("'" + at.field + "' lists " + std::to_string(out[i]) + " twice");
    return out;
}

}  // namespace detail

/// Parses configuration text. Errors carry the offending line and key.
inline RunConfig parse_config(std::string_view text) {
    using detail::LineContext;
    RunConfig c;
    std::map<std::string, int> seen;  // "section.key" -> line
    std::string section;
    bool have_gamma = false, have_gamma_side = false;
    std::optional<Energy> grid_start, grid_stop;
    std::optional<int> grid_points;
    std::map<int, SweepAxis> axes;
    std::optional<int> sizes_line;
    std::string sizes_key;

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("malformed section header", line_no);
            section = std::string(detail::trim(line.substr(1, line.size() - 2)));
            static constexpr std::array<std::string_view, 6> known = {"model", "cavity", "leads",
                                                                      "grid",  "sweep",  "quadrature"};
            if (std::find(known.begin(), known.end(), section) == known.end())
                throw ConfigError("unknown section [" + section + "]", line_no);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line_no);
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string_view value = detail::trim(line.substr(eq + 1));
        const LineContext at{line_no, section.empty() ? key : section + "." + key};
        if (section.empty()) at.fail("key '" + key + "' outside any section");
        if (value.empty()) at.fail("empty value for '" + at.field + "'");
        if (auto [it, fresh] = seen.emplace(at.field, line_no); !fresh)
            at.fail("duplicate key '" + at.field + "' (first set on line " + std::to_string(it->second) + ")");

        auto unknown = [&] { at.fail("unknown key '" + key + "' in [" + section + "]"); };
        if (section == "model") {
            if (key == "architecture") {
                if (value == "ndqd") c.architecture = Architecture::ndqd;
                else if (value == "cascade") c.architecture = Architecture::cascade;
                else at.fail("architecture must be ndqd or cascade, not '" + std::string(value) + "'");
            } else if (key == "detuning") c.detuning = detail::parse_energy(value, at);
            else if (key == "hopping") c.hopping = detail::parse_energy(value, at);
            else if (key == "coupling") c.coupling = detail::parse_energy(value, at);
            else if (key == "replicas" || key == "sites") {
                if (sizes_line) at.fail("give either 'replicas' or 'sites', not both");
                c.sizes = detail::parse_int_list(value, at);
                sizes_line = line_no;
                sizes_key = key;
            } else unknown();
        } else if (section == "leads") {
            if (key == "gamma") {
                c.gamma_left = c.gamma_right = detail::parse_energy(value, at);
                have_gamma = true;
            } else if (key == "gamma_left") {
                c.gamma_left = detail::parse_energy(value, at);
                have_gamma_side = true;
            } else if (key == "gamma_right") {
                c.gamma_right = detail::parse_energy(value, at);
                have_gamma_side = true;
            } else if (key == "bias") c.bias = detail::parse_energy(value, at);
            else if (key == "temperature") c.temperature = detail::parse_energy(value, at);
            else unknown();
            if (have_gamma && have_gamma_side) at.fail("give either 'gamma' or 'gamma_left'/'gamma_right'");
        } else if (section == "cavity") {
            if (key == "frequency") c.cavity.omega_c = detail::parse_energy(value, at);
            else if (key == "decay") c.cavity.kappa = detail::parse_energy(value, at);
            else unknown();
        } else if (section == "grid") {
            if (key == "start") grid_start = detail::parse_energy(value, at);
            else if (key == "stop") grid_stop = detail::parse_energy(value, at);
            else if (key == "points") grid_points = detail::parse_int(value, at);
            else unknown();
        } else if (section == "sweep") {
            if (key != "axis1" && key != "axis2") unknown();
            const auto parts = detail::split(value, ',');
            if (parts.size() != 4) at.fail("expected '<parameter>, <start>, <stop>, <points>'");
            SweepAxis a{std::string(parts[0]), detail::parse_energy(parts[1], at), detail::parse_energy(parts[2], at),
                        detail::parse_int(parts[3], at)};
            if (std::find(kSweepParameters.begin(), kSweepParameters.end(), a.parameter) == kSweepParameters.end())
                at.fail("'" + a.parameter + "' cannot be swept");
            if (a.points < 2) at.fail("a sweep axis needs at least 2 points");
            if (a.start == a.stop) at.fail("sweep range of '" + a.parameter + "' has zero width");
            axes[key == "axis1" ? 1 : 2] = a;
        } else if (section == "quadrature") {
            if (key == "abs_tol") c.quadrature.abs_tol = detail::parse_number(value, at);
            else if (key == "rel_tol") c.quadrature.rel_tol = detail::parse_number(value, at);
            else if (key == "cutoff") c.quadrature.cutoff = value == "auto" ? Energy(0.0) : detail::parse_energy(value, at);
            else if (key == "max_intervals") c.quadrature.max_intervals = detail::parse_int(value, at);
            else unknown();
        }
    }

    auto require = [&](const char* field) {
        if (!seen.contains(field)) throw ConfigError(std::string("missing required key '") + field + "'", 0, field);
    };
    for (const char* f : {"model.architecture", "model.detuning", "model.hopping", "model.coupling", "leads.bias",
                          "leads.temperature", "cavity.frequency", "cavity.decay"})
        require(f);
    if (!have_gamma && !(seen.contains("leads.gamma_left") && seen.contains("leads.gamma_right")))
        throw ConfigError("missing 'gamma' (or both 'gamma_left' and 'gamma_right') in [leads]", 0, "leads.gamma");
    const char* expected_sizes = c.architecture == Architecture::ndqd ? "replicas" : "sites";
    if (!sizes_line)
        throw ConfigError(std::string("missing '") + expected_sizes + "' in [model]", 0,
                          std::string("model.") + expected_sizes);
    if (sizes_key != expected_sizes)
        throw ConfigError("'" + sizes_key + "' does not apply to architecture " + to_string(c.architecture) +
                              " (use '" + expected_sizes + "')",
                          *sizes_line, "model." + sizes_key);

    if (grid_start || grid_stop || grid_points) {
        const int line = seen.count("grid.start") ? seen["grid.start"] : 0;
        if (!grid_start || !grid_stop || !grid_points)
            throw ConfigError("[grid] needs start, stop and points", line, "grid");
        if (*grid_points < 2) throw ConfigError("grid needs at least 2 points", seen["grid.points"], "grid.points");
        if (!(*grid_stop > *grid_start))
            throw ConfigError("grid stop must exceed start", seen["grid.stop"], "grid.stop");
        c.grid = FrequencyGrid{*grid_start, *grid_stop, *grid_points};
    }
    if (axes.contains(2) && !axes.contains(1)) throw ConfigError("axis2 given without axis1", seen["sweep.axis2"], "sweep.axis2");
    for (auto& [k, a] : axes) c.axes.push_back(a);
    if (c.axes.size() == 2 && c.axes[0].parameter == c.axes[1].parameter)
        throw ConfigError("both sweep axes vary '" + c.axes[0].parameter + "'", seen["sweep.axis2"], "sweep.axis2");
    const auto sweeps = [&](std::string_view p) {
        return std::any_of(c.axes.begin(), c.axes.end(), [&](const SweepAxis& a) { return a.parameter == p; });
    };
    if (sweeps("gamma") && (sweeps("gamma_left") || sweeps("gamma_right")))
        throw ConfigError("'gamma' cannot be swept together with 'gamma_left' or 'gamma_right'", seen["sweep.axis2"],
                          "sweep.axis2");

    try {
        c.cavity.validate();
        c.leads();
        c.quadrature.validate();
        for (int s : c.sizes) c.medium(s).validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid parameters: ") + e.what());
    }
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

/// Canonical text form: every section in a fixed order, energies in ueV with
/// 17 significant digits. parse_config(serialize(c)) == c.
inline std::string serialize(const RunConfig& c) {
    using detail::format_double;
    auto energy = [](Energy e) { return format_double(e.ueV()) + " ueV"; };
    std::ostringstream os;
    os << "[model]\n";
    os << "architecture = " << to_string(c.architecture) << "\n";
    os << "detuning = " << energy(c.detuning) << "\n";
    os << "hopping = " << energy(c.hopping) << "\n";
    os << "coupling = " << energy(c.coupling) << "\n";
    os << (c.architecture == Architecture::ndqd ? "replicas = " : "sites = ");
    for (std::size_t i = 0; i < c.sizes.size(); ++i) os << (i ? ", " : "") << c.sizes[i];
    os << "\n[leads]\n";
    os << "gamma_left = " << energy(c.gamma_left) << "\n";
    os << "gamma_right = " << energy(c.gamma_right) << "\n";
    os << "bias = " << energy(c.bias) << "\n";
    os << "temperature = " << energy(c.temperature) << "\n";
    os << "[cavity]\n";
    os << "frequency = " << energy(c.cavity.omega_c) << "\n";
    os << "decay = " << energy(c.cavity.kappa) << "\n";
    if (c.grid) {
        os << "[grid]\n";
        os << "start = " << energy(c.grid->start) << "\n";
        os << "stop = " << energy(c.grid->stop) << "\n";
        os << "points = " << c.grid->points << "\n";
    }
    if (!c.axes.empty()) {
        os << "[sweep]\n";
        for (std::size_t i = 0; i < c.axes.size(); ++i) {
            const SweepAxis& a = c.axes[i];
            os << "axis" << i + 1 << " = " << a.parameter << ", " << energy(a.start) << ", " << energy(a.stop) << ", "
               << a.points << "\n";
        }
    }
    os << "[quadrature]\n";
    os << "abs_tol = " << format_double(c.quadrature.abs_tol) << "\n";
    os << "rel_tol = " << format_double(c.quadrature.rel_tol) << "\n";
    os << "cutoff = " << (c.quadrature.cutoff.ueV() == 0.0 ? std::string("auto") : energy(c.quadrature.cutoff)) << "\n";
    os << "max_intervals = " << c.quadrature.max_intervals << "\n";
    return os.str();
}

/// 64-bit FNV-1a of the canonical serialization.
inline std::uint64_t config_hash(const RunConfig& c) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : serialize(c)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace qdgain
