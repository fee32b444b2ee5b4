#pragma once

// Datasets for the command-line verbs: frequency scans per medium size and
// cartesian parameter sweeps. Every (parameter point, medium, frequency)
// self-energy is an independent task; results are gathered by index, so the
// output does not depend on the thread count.

#include <complex>
#include <sstream>
#include <string>
#include <vector>

#include "qdgain/cavity.hpp"
#include "qdgain/config.hpp"
#include "qdgain/parallel.hpp"
#include "qdgain/susceptibility.hpp"

namespace qdgain {

enum class Column {
    omega,
    re_t,
    im_t,
    gain,
    phase,
    spectrum,
    f_real,
    f_imag,
    emission_rate,
    absorption_rate,
    threshold_margin,
    photon_number,
};

inline const char* column_name(Column c) {
    switch (c) {
        case Column::omega: return "omega_ueV";
        case Column::re_t: return "re_t";
        case Column::im_t: return "im_t";
        case Column::gain: return "gain";
        case Column::phase: return "phase_rad";
        case Column::spectrum: return "spectrum_per_ueV";
        case Column::f_real: return "f_real_ueV";
        case Column::f_imag: return "f_imag_ueV";
        case Column::emission_rate: return "emission_rate_ueV";
        case Column::absorption_rate: return "absorption_rate_ueV";
        case Column::threshold_margin: return "threshold_margin_ueV";
        case Column::photon_number: return "photon_number";
    }
    return "?";
}

struct ResultRow {
    std::vector<double> axes;  // swept parameter values, ueV
    int size = 1;              // N (ndqd) or M (cascade)
    double omega = 0.0;
    cd t{0.0, 0.0};
    double gain = 0.0;
    double phase = 0.0;
    double spectrum = 0.0;
    double f_real = 0.0;   // per replica
    double f_imag = 0.0;   // per replica
    double emission_rate = 0.0;    // i F^<, per replica
    double absorption_rate = 0.0;  // i F^>, per replica
    double threshold_margin = 0.0;  // kappa - N max F'' over this curve's frequencies
    double photon_number = 0.0;     // pole form; meaningful at omega = omega_c only

    double value(Column c) const {
        switch (c) {
            case Column::omega: return omega;
            case Column::re_t: return t.real();
            case Column::im_t: return t.imag();
            case Column::gain: return gain;
            case Column::phase: return phase;
            case Column::spectrum: return spectrum;
            case Column::f_real: return f_real;
            case Column::f_imag: return f_imag;
            case Column::emission_rate: return emission_rate;
            case Column::absorption_rate: return absorption_rate;
            case Column::threshold_margin: return threshold_margin;
            case Column::photon_number: return photon_number;
        }
        return 0.0;
    }
};

struct Dataset {
    std::string verb;
    RunConfig config;
    std::vector<Column> columns;  // after the axis and size columns
    std::vector<ResultRow> rows;  // size outermost, then axis1, axis2, omega
};

namespace detail {

inline std::vector<Energy> probe_frequencies(const RunConfig& c) {
    if (c.grid) return c.grid->values();
    return {c.cavity.omega_c};
}

inline std::vector<std::vector<double>> axis_points(const RunConfig& c) {
    std::vector<std::vector<double>> points{{}};
    for (const SweepAxis& axis : c.axes) {
        std::vector<std::vector<double>> next;
        for (const auto& prefix : points)
            for (Energy v : axis.values()) {
                auto p = prefix;
                p.push_back(v.ueV());
                next.push_back(std::move(p));
            }
        points = std::move(next);
    }
    return points;
}

inline RunConfig configured_at(const RunConfig& c, const std::vector<double>& point) {
    RunConfig out = c;
    for (std::size_t i = 0; i < point.size(); ++i) out = out.with(c.axes[i].parameter, Energy(point[i]));
    return out;
}

inline std::string describe_point(const RunConfig& c, const std::vector<double>& point, int size) {
    std::ostringstream os;
    os.precision(10);
    os << c.size_name() << " = " << size;
    for (std::size_t i = 0; i < point.size(); ++i) os << ", " << c.axes[i].parameter << " = " << point[i] << " ueV";
    return os.str();
}

inline Dataset evaluate(const RunConfig& config, std::string verb, unsigned threads) {
    const std::vector<Energy> omegas = probe_frequencies(config);
    const auto points = axis_points(config);
    const bool ndqd = config.architecture == Architecture::ndqd;
    // The N-DQD self-energy is per replica, so one medium serves every N.
    const std::size_t media = ndqd ? 1 : config.sizes.size();
    const std::size_t w_count = omegas.size();
    const std::size_t tasks = points.size() * media * w_count;

    std::vector<RunConfig> at_point;
    at_point.reserve(points.size());
    for (const auto& p : points) at_point.push_back(configured_at(config, p));

    const auto susc = parallel_map<SusceptibilityPoint>(tasks, threads, [&](std::size_t i) {
        const std::size_t w = i % w_count;
        const std::size_t k = (i / w_count) % media;
        const std::size_t p = i / (w_count * media);
        const RunConfig& c = at_point[p];
        const GainMedium medium = ndqd ? c.medium(1) : c.medium(config.sizes[k]);
        return susceptibility_point(omegas[w], c.leads(), medium, c.quadrature);
    });

    Dataset d;
    d.verb = std::move(verb);
    d.config = config;
    d.rows.reserve(config.sizes.size() * tasks / media);
    for (std::size_t s = 0; s < config.sizes.size(); ++s) {
        const int size = config.sizes[s];
        const int n = ndqd ? size : 1;
        const std::size_t k = ndqd ? 0 : s;
        for (std::size_t p = 0; p < points.size(); ++p) {
            const std::span<const SusceptibilityPoint> curve(susc.data() + (p * media + k) * w_count, w_count);
            CavityResponse r;
            try {
                r = cavity_response(config.cavity, curve, n);
            } catch (const ThresholdViolation& e) {
                throw ThresholdViolation(describe_point(config, points[p], size) + ": " + e.what(), e.replicas(),
                                         e.omega());
            }
            for (std::size_t w = 0; w < w_count; ++w) {
                const SusceptibilityPoint& sp = curve[w];
                ResultRow row;
                row.axes = points[p];
                row.size = size;
                row.omega = sp.omega.ueV();
                row.t = r.transmission[w];
                row.gain = r.gain[w];
                row.phase = r.phase[w];
                row.spectrum = r.spectrum[w];
                row.f_real = sp.f_real;
                row.f_imag = sp.f_imag;
                row.emission_rate = sp.emission_rate();
                row.absorption_rate = sp.absorption_rate();
                row.threshold_margin = r.threshold_margin;
                row.photon_number = n * sp.emission_rate() / (2.0 * (config.cavity.kappa.ueV() - n * sp.f_imag));
                d.rows.push_back(std::move(row));
            }
        }
    }
    return d;
}

}  // namespace detail

/// Transmission, phase and emission spectrum over the [grid] frequencies,
/// one curve per medium size. Requires a grid and no sweep axes.
inline Dataset run_transmission(const RunConfig& config, unsigned threads = 1) {
    if (!config.grid) throw ConfigError("transmission needs a [grid] section", 0, "grid");
    if (!config.axes.empty()) throw ConfigError("transmission does not take sweep axes; use the sweep verb", 0, "sweep");
    Dataset d = detail::evaluate(config, "transmission", threads);
    d.columns = {Column::omega,         Column::re_t,           Column::im_t,
                 Column::gain,          Column::phase,          Column::spectrum,
                 Column::f_real,        Column::f_imag,         Column::emission_rate,
                 Column::absorption_rate, Column::threshold_margin};
    return d;
}

/// Emission-side view of the same scan.
inline Dataset run_spectrum(const RunConfig& config, unsigned threads = 1) {
    Dataset d = run_transmission(config, threads);
    d.verb = "spectrum";
    d.columns = {Column::omega,         Column::spectrum,        Column::gain, Column::f_imag,
                 Column::emission_rate, Column::absorption_rate, Column::threshold_margin};
    return d;
}

/// Cartesian sweep over one or two parameter axes. Without a [grid] every
/// point is evaluated at the cavity frequency and the photon number is
/// reported as well.
inline Dataset run_sweep(const RunConfig& config, unsigned threads = 1) {
    if (config.axes.empty() || config.axes.size() > 2)
        throw ConfigError("sweep needs one or two axes in [sweep]", 0, "sweep");
    Dataset d = detail::evaluate(config, "sweep", threads);
    d.columns = {Column::omega,         Column::re_t,           Column::im_t,
                 Column::gain,          Column::phase,          Column::spectrum,
                 Column::f_real,        Column::f_imag,         Column::emission_rate,
                 Column::absorption_rate, Column::threshold_margin};
    if (!config.grid) d.columns.push_back(Column::photon_number);
    return d;
}

}  // namespace qdgain
