#pragma once

// Cavity observables from the per-replica self-energy of the gain medium.
//
//   t(w) = i kappa / [(w - w_c - N F'(w)) + i (kappa - N F''(w))]
//   S(w) = i N F^<(w) / {[w - w_c - N F'(w)]^2 + [kappa - N F''(w)]^2}

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <vector>

#include "qdgain/errors.hpp"
#include "qdgain/physmodel.hpp"
#include "qdgain/susceptibility.hpp"

namespace qdgain {

namespace detail {

inline void require_below_threshold(const CavityParams& cavity, const SusceptibilityPoint& s, int n) {
    if (n < 1) throw std::invalid_argument("replica count must be at least 1");
    if (!(cavity.kappa.ueV() - n * s.f_imag > 0.0)) {
        std::ostringstream os;
        os.precision(10);
        os << "at or above the lasing threshold: kappa - N F'' = " << cavity.kappa.ueV() - n * s.f_imag
           << " ueV for N = " << n << " at omega = " << s.omega.ueV()
           << " ueV; the linear-response theory only covers N F'' < kappa";
        throw ThresholdViolation(os.str(), n, s.omega.ueV());
    }
}

inline double detuning(const CavityParams& c, const SusceptibilityPoint& s, int n) {
    return s.omega.ueV() - c.omega_c.ueV() - n * s.f_real;
}

inline double net_loss(const CavityParams& c, const SusceptibilityPoint& s, int n) {
    return c.kappa.ueV() - n * s.f_imag;
}

}  // namespace detail

inline cd transmission(const CavityParams& cavity, const SusceptibilityPoint& s, int n) {
    detail::require_below_threshold(cavity, s, n);
    return kI * cavity.kappa.ueV() / cd(detail::detuning(cavity, s, n), detail::net_loss(cavity, s, n));
}

inline double emission_spectrum(const CavityParams& cavity, const SusceptibilityPoint& s, int n) {
    detail::require_below_threshold(cavity, s, n);
    const double x = detail::detuning(cavity, s, n);
    const double y = detail::net_loss(cavity, s, n);
    return n * s.emission_rate() / (x * x + y * y);
}

/// kappa - N max F'' over the grid; positive below threshold.
inline double threshold_margin(const CavityParams& cavity, std::span<const SusceptibilityPoint> grid, int n) {
    if (grid.empty()) throw std::invalid_argument("empty susceptibility grid");
    double fmax = grid.front().f_imag;
    for (const auto& s : grid) fmax = std::max(fmax, s.f_imag);
    return cavity.kappa.ueV() - n * fmax;
}

struct CavityResponse {
    std::vector<Energy> omegas;
    std::vector<cd> transmission;
    std::vector<double> gain;
    std::vector<double> phase;
    std::vector<double> spectrum;
    int n_replicas = 1;
    double threshold_margin = 0.0;
};

inline CavityResponse cavity_response(const CavityParams& cavity, std::span<const SusceptibilityPoint> grid, int n) {
    cavity.validate();
    CavityResponse r;
    r.n_replicas = n;
    r.threshold_margin = threshold_margin(cavity, grid, n);
    r.omegas.reserve(grid.size());
    for (const auto& s : grid) {
        const cd t = transmission(cavity, s, n);
        r.omegas.push_back(s.omega);
        r.transmission.push_back(t);
        r.gain.push_back(std::norm(t));
        r.phase.push_back(std::arg(t));
        r.spectrum.push_back(emission_spectrum(cavity, s, n));
    }
    return r;
}

/// Linear interpolation of the self-energy at `omega` from a sorted grid.
inline SusceptibilityPoint interpolate(std::span<const SusceptibilityPoint> grid, Energy omega) {
    if (grid.empty() || omega < grid.front().omega || omega > grid.back().omega)
        throw InsufficientGrid("frequency outside the susceptibility grid");
    auto it = std::lower_bound(grid.begin(), grid.end(), omega,
                               [](const SusceptibilityPoint& s, Energy w) { return s.omega < w; });
    if (it->omega == omega) return *it;
    const SusceptibilityPoint& hi = *it;
    const SusceptibilityPoint& lo = *(it - 1);
    const double u = (omega - lo.omega).ueV() / (hi.omega - lo.omega).ueV();
    SusceptibilityPoint p;
    p.omega = omega;
    p.f_real = lo.f_real + u * (hi.f_real - lo.f_real);
    p.f_imag = lo.f_imag + u * (hi.f_imag - lo.f_imag);
    p.f_lesser = lo.f_lesser + u * (hi.f_lesser - lo.f_lesser);
    p.f_greater = lo.f_greater + u * (hi.f_greater - lo.f_greater);
    p.error_estimate = std::max(lo.error_estimate, hi.error_estimate);
    return p;
}

namespace detail {

template <class F>
double trapezoid(std::span<const SusceptibilityPoint> grid, F&& value) {
    double sum = 0.0;
    double prev = value(grid.front());
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double cur = value(grid[i]);
        sum += 0.5 * (prev + cur) * (grid[i].omega - grid[i - 1].omega).ueV();
        prev = cur;
    }
    return sum;
}

}  // namespace detail

struct PhotonNumber {
    double pole_approximation = 0.0;
    double spectral_integral = 0.0;
};

/// Pole form i N F^<(w_c) / (2 [kappa - N F''(w_c)]) and the trapezoid
/// integral of S over the grid divided by 2 pi. The grid must reach far
/// enough that S at both ends is below 1e-6 of its peak.
inline PhotonNumber mean_photon_number(const CavityParams& cavity, std::span<const SusceptibilityPoint> grid, int n) {
    if (grid.size() < 2) throw InsufficientGrid("photon number needs at least two grid points");
    if (threshold_margin(cavity, grid, n) <= 0.0) {
        auto it = std::max_element(grid.begin(), grid.end(),
                                   [](const auto& a, const auto& b) { return a.f_imag < b.f_imag; });
        detail::require_below_threshold(cavity, *it, n);
    }
    PhotonNumber out;
    const SusceptibilityPoint at_c = interpolate(grid, cavity.omega_c);
    out.pole_approximation = n * at_c.emission_rate() / (2.0 * detail::net_loss(cavity, at_c, n));

    double peak = 0.0;
    for (const auto& s : grid) peak = std::max(peak, emission_spectrum(cavity, s, n));
    if (peak == 0.0) return out;
    const double ends = std::max(emission_spectrum(cavity, grid.front(), n), emission_spectrum(cavity, grid.back(), n));
    if (ends > 1e-6 * peak) {
        std::ostringstream os;
        os << "emission spectrum at the grid ends is " << ends / peak << " of its peak (need < 1e-6)";
        throw InsufficientGrid(os.str());
    }
    out.spectral_integral =
        detail::trapezoid(grid, [&](const SusceptibilityPoint& s) { return emission_spectrum(cavity, s, n); }) /
        (2.0 * std::numbers::pi);
    return out;
}

struct SumRule {
    double re_integral = 0.0;  // Int Re t dw/2pi, expected kappa/2
    double im_integral = 0.0;  // Int Im t dw/2pi, expected 0
    double area_lhs = 0.0;     // Int |t|^2 dw/2pi
    double area_rhs = 0.0;     // kappa^2 / (2 [kappa - N F''(w_c)])
};

namespace detail {

// Integrals of 1/D and 1/|D|^2 over one grid interval of width h, with the
// complex denominator D taken linear between its end values a and b.
// Below threshold D stays in the upper half plane, so the principal
// branches of log and arg are continuous along the path.
inline cd inverse_integral(cd a, cd b, double h) {
    const cd z = (b - a) / a;
    if (std::abs(z) < 1e-4) {
        const cd series = 1.0 - z / 2.0 + z * z / 3.0 - z * z * z / 4.0;  // log(1 + z) / z
        return h * series / a;
    }
    return h * std::log(b / a) / (b - a);
}

inline double inverse_norm_integral(cd a, cd b, double h) {
    const cd c = std::conj(a) * b;
    const double q = c.imag(), p = c.real();
    if (std::abs(q) < 1e-8 * std::abs(p) && p > 0.0) return h / p * (1.0 - (q / p) * (q / p) / 3.0);
    return h * std::atan2(q, p) / q;
}

}  // namespace detail

/// Frequency integrals of t and |t|^2. Inside the grid the denominator of t
/// is interpolated linearly between nodes and integrated in closed form, so
/// a frequency-independent self-energy gives exact results. Beyond the grid
/// ends the response is continued as a Lorentzian with the self-energy
/// frozen at the end points; the Im t tails are taken as a principal value.
inline SumRule sum_rule_check(const CavityParams& cavity, std::span<const SusceptibilityPoint> grid, int n) {
    if (grid.size() < 2) throw InsufficientGrid("sum rule needs at least two grid points");
    const double kappa = cavity.kappa.ueV();
    const double two_pi = 2.0 * std::numbers::pi;
    auto denominator = [&](const SusceptibilityPoint& s) {
        detail::require_below_threshold(cavity, s, n);
        return cd(detail::detuning(cavity, s, n), detail::net_loss(cavity, s, n));
    };
    SumRule r;
    cd t_integral{0.0, 0.0};
    cd prev = denominator(grid.front());
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const cd cur = denominator(grid[i]);
        const double h = (grid[i].omega - grid[i - 1].omega).ueV();
        t_integral += detail::inverse_integral(prev, cur, h);
        r.area_lhs += detail::inverse_norm_integral(prev, cur, h);
        prev = cur;
    }
    t_integral *= kI * kappa;
    r.area_lhs *= kappa * kappa;
    r.re_integral = t_integral.real();
    r.im_integral = t_integral.imag();

    const SusceptibilityPoint& lo = grid.front();
    const SusceptibilityPoint& hi = grid.back();
    const double xa = detail::detuning(cavity, lo, n), ga = detail::net_loss(cavity, lo, n);
    const double xb = detail::detuning(cavity, hi, n), gb = detail::net_loss(cavity, hi, n);
    const double half_pi = 0.5 * std::numbers::pi;
    r.re_integral += kappa * (std::atan(xa / ga) + half_pi) + kappa * (half_pi - std::atan(xb / gb));
    r.im_integral += 0.5 * kappa * (std::log(xa * xa + ga * ga) - std::log(xb * xb + gb * gb));
    r.area_lhs += kappa * kappa / ga * (std::atan(xa / ga) + half_pi) + kappa * kappa / gb * (half_pi - std::atan(xb / gb));

    r.re_integral /= two_pi;
    r.im_integral /= two_pi;
    r.area_lhs /= two_pi;
    const SusceptibilityPoint at_c = interpolate(grid, cavity.omega_c);
    r.area_rhs = kappa * kappa / (2.0 * detail::net_loss(cavity, at_c, n));
    return r;
}

/// Frequencies on which the effective detuning w - w_c - N F'(w) vanishes,
/// located by bisection inside every sign change on the grid.
inline std::vector<Energy> resonance_frequencies(const CavityParams& cavity, const LeadSet& leads,
                                                 const GainMedium& medium, const QuadratureConfig& quad,
                                                 std::span<const SusceptibilityPoint> grid, int n) {
    std::vector<Energy> roots;
    const double tol = 1e-6 * cavity.kappa.ueV();
    auto h = [&](const SusceptibilityPoint& s) { return detail::detuning(cavity, s, n); };
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double hi_val = h(grid[i]);
        if (hi_val == 0.0) {
            roots.push_back(grid[i].omega);
            continue;
        }
        if (i == 0) continue;
        const double lo_val = h(grid[i - 1]);
        if (lo_val == 0.0 || (lo_val > 0.0) == (hi_val > 0.0)) continue;
        double a = grid[i - 1].omega.ueV(), b = grid[i].omega.ueV();
        double fa = lo_val;
        while (b - a > tol) {
            const double mid = 0.5 * (a + b);
            const double fm = h(susceptibility_point(Energy(mid), leads, medium, quad));
            if (fm == 0.0) {
                a = b = mid;
                break;
            }
            if ((fm > 0.0) == (fa > 0.0)) {
                a = mid;
                fa = fm;
            } else {
                b = mid;
            }
        }
        roots.push_back(Energy(0.5 * (a + b)));
    }
    return roots;
}

/// kappa^2 / (kappa - N F''(w*))^2, the gain on an effective resonance.
inline double resonant_gain(const CavityParams& cavity, const SusceptibilityPoint& at_resonance, int n) {
    detail::require_below_threshold(cavity, at_resonance, n);
    const double y = detail::net_loss(cavity, at_resonance, n);
    return cavity.kappa.ueV() * cavity.kappa.ueV() / (y * y);
}

/// Full width at half maximum of the gain line around its largest value,
/// from linear interpolation between grid points. Empty if the line is not
/// resolved inside the grid.
inline std::optional<double> gain_linewidth(const CavityResponse& r) {
    if (r.gain.size() < 3) return std::nullopt;
    const auto peak_it = std::max_element(r.gain.begin(), r.gain.end());
    const auto k = static_cast<std::size_t>(peak_it - r.gain.begin());
    const double half = 0.5 * *peak_it;
    std::optional<double> left, right;
    for (std::size_t i = k; i > 0; --i)
        if (r.gain[i - 1] <= half) {
            const double u = (half - r.gain[i - 1]) / (r.gain[i] - r.gain[i - 1]);
            left = r.omegas[i - 1].ueV() + u * (r.omegas[i] - r.omegas[i - 1]).ueV();
            break;
        }
    for (std::size_t i = k; i + 1 < r.gain.size(); ++i)
        if (r.gain[i + 1] <= half) {
            const double u = (r.gain[i] - half) / (r.gain[i] - r.gain[i + 1]);
            right = r.omegas[i].ueV() + u * (r.omegas[i + 1] - r.omegas[i]).ueV();
            break;
        }
    if (!left || !right) return std::nullopt;
    return *right - *left;
}

/// Sorted grid of `points` frequencies on [center - half_width, center + half_width],
/// spaced uniformly in asinh((w - center) / core_width) so that the spacing
/// near the center is fine and grows geometrically outwards. An odd point
/// count puts `center` on the grid exactly.
inline std::vector<Energy> resonance_grid(Energy center, Energy half_width, Energy core_width, int points) {
    if (points < 2) throw std::invalid_argument("grid needs at least two points");
    if (!(half_width.ueV() > 0.0) || !(core_width.ueV() > 0.0))
        throw std::invalid_argument("grid widths must be positive");
    const double umax = std::asinh(half_width.ueV() / core_width.ueV());
    std::vector<Energy> out;
    out.reserve(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        const double u = -umax + 2.0 * umax * i / (points - 1);
        const double x = (2 * i == points - 1) ? 0.0 : core_width.ueV() * std::sinh(u);
        out.push_back(center + Energy(x));
    }
    return out;
}

/// Photon number on a resonance grid that is widened by doubling (at most
/// 20 times) until the emission spectrum has decayed at both ends.
inline PhotonNumber converged_photon_number(const CavityParams& cavity, const LeadSet& leads,
                                            const GainMedium& medium, const QuadratureConfig& quad, int n,
                                            Energy half_width, Energy core_width, int points,
                                            unsigned threads = 1) {
    Energy width = half_width;
    for (int attempt = 0; attempt <= 20; ++attempt, width = width * 2.0) {
        const std::vector<Energy> omegas = resonance_grid(cavity.omega_c, width, core_width, points);
        const auto grid = susceptibility_grid(omegas, leads, medium, quad, threads);
        try {
            return mean_photon_number(cavity, grid, n);
        } catch (const InsufficientGrid&) {
            if (attempt == 20) throw;
        }
    }
    throw InsufficientGrid("emission spectrum did not decay within 20 grid doublings");
}

}  // namespace qdgain
