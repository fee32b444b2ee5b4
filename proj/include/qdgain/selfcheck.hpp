#pragma once

// Invariant checks at three canonical parameter sets: an unbiased DQD, the
// biased DQD of the reference gain scan, and a three-dot cascade.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "qdgain/cavity.hpp"
#include "qdgain/green.hpp"
#include "qdgain/physmodel.hpp"
#include "qdgain/susceptibility.hpp"

namespace qdgain {

struct Check {
    std::string name;
    double measured = 0.0;
    bool upper = true;  // measured <= bound when set, measured >= bound otherwise
    double bound = 0.0;

    bool passed() const { return std::isfinite(measured) && (upper ? measured <= bound : measured >= bound); }
};

struct SelfCheckReport {
    std::vector<Check> checks;

    bool passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed(); });
    }
    const Check* find(std::string_view name) const {
        for (const Check& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }
};

/// One line per check: name,measured,bound,verdict.
inline void write_report(std::ostream& out, const SelfCheckReport& r) {
    out << "check,measured,bound,verdict\n";
    char buf[64];
    for (const Check& c : r.checks) {
        std::snprintf(buf, sizeof buf, "%.6e", c.measured);
        out << c.name << "," << buf << ",";
        std::snprintf(buf, sizeof buf, "%.6e", c.bound);
        out << (c.upper ? "<=" : ">=") << buf << "," << (c.passed() ? "PASS" : "FAIL") << "\n";
    }
}

namespace detail {

inline double rel_gap(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

inline double rel_gap(cd a, cd b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

inline double matrix_gap(const SmallMatrix& a, const SmallMatrix& b) {
    const double scale = std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
    return scale == 0.0 ? 0.0 : (a - b).cwiseAbs().maxCoeff() / scale;
}

inline double psd_defect(const SmallMatrix& m) {
    const double scale = m.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;
    const Eigen::MatrixXcd h = 0.5 * (m + m.adjoint()) / scale;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    return std::max(0.0, -es.eigenvalues().minCoeff());
}

struct GreenAudit {
    double keldysh = 0.0;
    double psd = 0.0;
    double fdt = 0.0;
};

inline GreenAudit audit_green(const LeadSet& leads, const GainMedium& m, bool equilibrium) {
    GreenAudit a;
    for (int i = 0; i < 200; ++i) {
        const double w = -60.0 + 120.0 * (i + 0.5) / 200.0;
        const GreenSet g = green_set(Energy(w), leads, m);
        a.keldysh = std::max(a.keldysh, matrix_gap(g.greater - g.lesser, g.retarded - g.advanced));
        const SmallMatrix spectral = kI * (g.retarded - g.advanced);
        a.psd = std::max({a.psd, psd_defect(-kI * g.lesser), psd_defect(kI * g.greater), psd_defect(spectral)});
        if (equilibrium) {
            const double f = fermi(w, leads.mu_left.ueV(), leads.beta());
            a.fdt = std::max(a.fdt, matrix_gap(g.lesser, kI * f * spectral));
        }
    }
    return a;
}

}  // namespace detail

/// Runs every check. `pre` only differs from the default in mutation tests.
inline SelfCheckReport run_selfcheck(const SelfEnergyPrefactors& pre = {}) {
    SelfCheckReport r;
    auto add = [&](std::string name, double measured, bool upper, double bound) {
        r.checks.push_back({std::move(name), measured, upper, bound});
    };

    const QuadratureConfig quad{};
    const CavityParams cavity{Energy::mhz(7880.5), Energy::mhz(3.15)};
    const double kappa = cavity.kappa.ueV();
    const Energy gamma(2.6), eps(7.0), hop(16.4), temp(0.69);
    const Energy g = Energy::mhz(50.0);
    const LeadSet equilibrium = LeadSet::symmetric(gamma, Energy(0.0), temp);
    const LeadSet biased = LeadSet::symmetric(gamma, Energy(250.0), temp);
    const GainMedium dqd = build_ndqd(eps, hop, g, 1);
    const GainMedium cascade = build_cascade(3, eps, hop, g);
    auto point = [&](double w, const LeadSet& leads, const GainMedium& m) {
        return susceptibility_point(Energy(w), leads, m, quad, pre);
    };

    // Equilibrium DQD.
    {
        double worst = 0.0;
        const double beta = equilibrium.beta();
        for (int k = -10; k <= 10; ++k) {
            const double w = k * temp.ueV();
            const SusceptibilityPoint s = point(w, equilibrium, dqd);
            worst = std::max(worst, detail::rel_gap(s.f_greater, std::exp(beta * w) * s.f_lesser));
        }
        add("equilibrium.detailed_balance_max_rel", worst, true, 1e-4);
        const SusceptibilityPoint at_c = point(cavity.omega_c.ueV(), equilibrium, dqd);
        add("equilibrium.f_imag_at_cavity_over_kappa", at_c.f_imag / kappa, true, 0.0);
        const detail::GreenAudit a = detail::audit_green(equilibrium, dqd, true);
        add("equilibrium.fluctuation_dissipation_max_rel", a.fdt, true, 1e-10);
        add("equilibrium.keldysh_identity_max_rel", a.keldysh, true, 1e-10);
    }

    // Biased DQD at the reference gain parameters.
    {
        double cross = 0.0, reflection = 0.0, min_rate = 1e300;
        for (double w : {5.0, 20.0, cavity.omega_c.ueV(), 60.0}) {
            const SusceptibilityPoint s = point(w, biased, dqd);
            const SusceptibilityPoint m = point(-w, biased, dqd);
            cross = std::max(cross, detail::rel_gap(s.f_imag, s.f_imag_from_rates()));
            reflection = std::max(reflection, detail::rel_gap(m.f_lesser, s.f_greater));
            const double scale = std::max(s.emission_rate(), s.absorption_rate());
            min_rate = std::min({min_rate, s.emission_rate() / scale, s.absorption_rate() / scale});
        }
        add("fig2.cross_route_max_rel", cross, true, 1e-6);
        add("fig2.reflection_max_rel", reflection, true, 1e-8);
        add("fig2.min_rate_over_scale", min_rate, false, -1e-12);

        const SusceptibilityPoint at_c = point(cavity.omega_c.ueV(), biased, dqd);
        const SusceptibilityPoint scaled = point(cavity.omega_c.ueV(), biased, build_ndqd(eps, hop, g * 3.0, 1));
        add("fig2.coupling_squared_scaling_rel", detail::rel_gap(scaled.f_imag, 9.0 * at_c.f_imag), true, 1e-12);
        add("fig2.f_imag_at_cavity_over_kappa_min", at_c.f_imag / kappa, false, 0.2);
        add("fig2.f_imag_at_cavity_over_kappa_max", at_c.f_imag / kappa, true, 1.0 / 3.0);
        const std::vector<SusceptibilityPoint> one{at_c};
        add("fig2.threshold_margin_n4_over_kappa", threshold_margin(cavity, one, 4) / kappa, false, 1e-6);

        double lorentz = 0.0;
        for (int i = 0; i < 1000; ++i) {
            SusceptibilityPoint empty;
            empty.omega = cavity.omega_c + Energy(kappa * (-50.0 + 100.0 * i / 999.0));
            const double x = (empty.omega - cavity.omega_c).ueV();
            lorentz = std::max(lorentz, detail::rel_gap(std::norm(transmission(cavity, empty, 1)),
                                                        kappa * kappa / (x * x + kappa * kappa)));
        }
        add("fig2.empty_cavity_lorentzian_max_rel", lorentz, true, 1e-14);

        const detail::GreenAudit a = detail::audit_green(biased, dqd, false);
        add("fig2.keldysh_identity_max_rel", a.keldysh, true, 1e-10);
        add("fig2.positivity_defect", a.psd, true, 1e-12);
    }

    // Three-dot cascade.
    {
        double cross = 0.0, reflection = 0.0, min_rate = 1e300;
        for (double w : {5.0, cavity.omega_c.ueV(), 60.0}) {
            const SusceptibilityPoint s = point(w, biased, cascade);
            const SusceptibilityPoint m = point(-w, biased, cascade);
            cross = std::max(cross, detail::rel_gap(s.f_imag, s.f_imag_from_rates()));
            reflection = std::max(reflection, detail::rel_gap(m.f_lesser, s.f_greater));
            const double scale = std::max(s.emission_rate(), s.absorption_rate());
            min_rate = std::min({min_rate, s.emission_rate() / scale, s.absorption_rate() / scale});
        }
        add("cascade3.cross_route_max_rel", cross, true, 1e-6);
        add("cascade3.reflection_max_rel", reflection, true, 1e-8);
        add("cascade3.min_rate_over_scale", min_rate, false, -1e-12);
        const detail::GreenAudit a = detail::audit_green(biased, cascade, false);
        add("cascade3.keldysh_identity_max_rel", a.keldysh, true, 1e-10);
        add("cascade3.positivity_defect", a.psd, true, 1e-12);
        const SusceptibilityPoint single = point(cavity.omega_c.ueV(), biased, build_cascade(1, eps, hop, g));
        add("cascade1.f_imag_at_cavity_over_kappa", single.f_imag / kappa, true, 0.0);
    }
    return r;
}

}  // namespace qdgain
