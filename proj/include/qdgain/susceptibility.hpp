#pragma once

// Cavity self-energy induced by the charge response of one gain-medium
// replica. All four components are frequency convolutions of dot Green's
// functions taken at omega' +/- omega/2:
//
//   F'(w)  = -i/(8 pi) Int dw' { Tr[g G^k(w+) g (G^r+G^a)(w-)] + Tr[g G^k(w-) g (G^r+G^a)(w+)] }
//   F''(w) =  1/(8 pi) Int dw' { Tr[g G^k(w+) g (G^r-G^a)(w-)] - Tr[g G^k(w-) g (G^r-G^a)(w+)] }
//   F^<(w) = -i/(2 pi) Int dw'   Tr[g G^<(w+) g G^>(w-)]
//   F^>(w) = -i/(2 pi) Int dw'   Tr[g G^>(w+) g G^<(w-)]
//
// with g = diag(coupling). F'' and (F^> - F^<)/(2i) are two routes to the
// same quantity.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <vector>

#include "qdgain/errors.hpp"
#include "qdgain/green.hpp"
#include "qdgain/parallel.hpp"
#include "qdgain/physmodel.hpp"
#include "qdgain/quadrature.hpp"

namespace qdgain {

struct SusceptibilityPoint {
    Energy omega;
    double f_real = 0.0;     // F', ueV
    double f_imag = 0.0;     // F'', ueV
    cd f_lesser{0.0, 0.0};   // F^<, ueV; purely imaginary
    cd f_greater{0.0, 0.0};  // F^>, ueV; purely imaginary
    double error_estimate = 0.0;  // largest quadrature error estimate among the four, ueV

    double emission_rate() const { return (kI * f_lesser).real(); }     // i F^<
    double absorption_rate() const { return (kI * f_greater).real(); }  // i F^>
    /// F'' through the lesser/greater route, (F^> - F^<)/(2i).
    double f_imag_from_rates() const { return ((f_greater - f_lesser) / (2.0 * kI)).real(); }
};

/// Integration tolerances. abs_tol applies to the self-energy of a medium
/// whose largest coupling is 1 ueV; the physical error is abs_tol * g_max^2
/// at most. Keeping the tolerance independent of g makes results scale
/// exactly as g^2.
struct QuadratureConfig {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    Energy cutoff{0.0};  // half-width of the finite window; 0 selects default_cutoff
    int max_intervals = 4000;

    void validate() const {
        if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw std::invalid_argument("quadrature tolerances must be positive");
        if (!(cutoff.ueV() >= 0.0)) throw std::invalid_argument("cutoff must be non-negative");
        if (max_intervals < 8) throw std::invalid_argument("max_intervals too small");
    }
};

/// Overall factors of the two routes. Only altered by self-tests.
struct SelfEnergyPrefactors {
    double real_imag = 1.0 / (8.0 * std::numbers::pi);
    double lesser_greater = 1.0 / (2.0 * std::numbers::pi);
};

/// Lambda = max|mu| + 40 k_B T + 20 (||H|| + Gamma_L + Gamma_R), at least 1 ueV.
inline Energy default_cutoff(const LeadSet& leads, const GainMedium& medium) {
    const double mu = std::max(std::abs(leads.mu_left.ueV()), std::abs(leads.mu_right.ueV()));
    const double lambda = mu + 40.0 * leads.temperature.ueV() +
                          20.0 * (medium.spectral_norm() + leads.gamma_left.ueV() + leads.gamma_right.ueV());
    return Energy(std::max(lambda, 1.0));
}

namespace detail {

/// Tr[W o X o Y^T] restricted to the coupled sites, i.e. sum_ij g_i g_j X_ij Y_ji.
inline cd weighted_trace(const SmallMatrix& x, const SmallMatrix& y, const Eigen::MatrixXd& w) {
    cd s{0.0, 0.0};
    const Eigen::Index k = w.rows();
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j) s += w(i, j) * x(i, j) * y(j, i);
    return s;
}

/// Green's functions at one frequency, restricted to the cavity-coupled sites.
struct CoupledBlock {
    SmallMatrix sum;      // G^r + G^a
    SmallMatrix diff;     // G^r - G^a
    SmallMatrix lesser;   // G^<
    SmallMatrix greater;  // G^>
    SmallMatrix keldysh;  // G^< + G^>
};

class SelfEnergyKernel {
public:
    SelfEnergyKernel(const LeadSet& leads, const GainMedium& medium, const SelfEnergyPrefactors& pre)
        : problem_(leads, medium), pre_(pre) {
        for (int i = 0; i < medium.sites(); ++i)
            if (medium.coupling(i) != 0.0) active_.push_back(i);
        scale_ = active_.empty() ? 0.0 : medium.coupling.cwiseAbs().maxCoeff();
        const auto k = static_cast<Eigen::Index>(active_.size());
        weights_.resize(k, k);
        for (Eigen::Index i = 0; i < k; ++i)
            for (Eigen::Index j = 0; j < k; ++j)
                weights_(i, j) = (medium.coupling(active_[i]) / scale_) * (medium.coupling(active_[j]) / scale_);
    }

    bool decoupled() const { return active_.empty(); }
    double coupling_scale() const { return scale_; }

    CoupledBlock block(double w) const {
        const Propagators p = problem_.propagators(w);
        const auto k = static_cast<Eigen::Index>(active_.size());
        CoupledBlock b;
        b.sum.resize(k, k);
        b.diff.resize(k, k);
        b.lesser.resize(k, k);
        b.greater.resize(k, k);
        for (Eigen::Index i = 0; i < k; ++i)
            for (Eigen::Index j = 0; j < k; ++j) {
                const int si = active_[i], sj = active_[j];
                const cd r = p.retarded(si, sj);
                const cd a = std::conj(p.retarded(sj, si));
                b.sum(i, j) = r + a;
                b.diff(i, j) = r - a;
                b.lesser(i, j) = p.lesser(si, sj);
                b.greater(i, j) = p.greater(si, sj);
            }
        b.keldysh = b.lesser + b.greater;
        return b;
    }

    /// Integrand components at w' for external frequency w, for unit coupling
    /// scale: Re/Im of F', F'', F^<, F^>.
    std::array<double, 8> integrand(double wp, double w) const {
        const CoupledBlock up = block(wp + 0.5 * w);
        const CoupledBlock dn = block(wp - 0.5 * w);
        const cd real_part = -kI * pre_.real_imag *
                             (weighted_trace(up.keldysh, dn.sum, weights_) + weighted_trace(dn.keldysh, up.sum, weights_));
        const cd imag_part = pre_.real_imag *
                             (weighted_trace(up.keldysh, dn.diff, weights_) - weighted_trace(dn.keldysh, up.diff, weights_));
        const cd lesser = -kI * pre_.lesser_greater * weighted_trace(up.lesser, dn.greater, weights_);
        const cd greater = -kI * pre_.lesser_greater * weighted_trace(up.greater, dn.lesser, weights_);
        return {real_part.real(), real_part.imag(), imag_part.real(), imag_part.imag(),
                lesser.real(),    lesser.imag(),    greater.real(),   greater.imag()};
    }

private:
    DotProblem problem_;
    SelfEnergyPrefactors pre_;
    std::vector<int> active_;
    Eigen::MatrixXd weights_;
    double scale_ = 0.0;
};

/// Window breakpoints: Fermi edges and dot levels shifted by +/- omega/2.
inline std::vector<double> convolution_breakpoints(double w, double lambda, const LeadSet& leads,
                                                   const GainMedium& medium) {
    std::vector<double> pts{-lambda, 0.0, lambda};
    std::vector<double> centers{leads.mu_left.ueV(), leads.mu_right.ueV()};
    const Eigen::VectorXd ev = medium.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) centers.push_back(ev(i));
    for (double c : centers)
        for (double s : {-0.5 * w, 0.5 * w}) pts.push_back(c + s);
    std::sort(pts.begin(), pts.end());
    std::vector<double> out;
    const double sep = 1e-9 * lambda;
    for (double p : pts) {
        if (p < -lambda || p > lambda) continue;
        if (!out.empty() && p - out.back() <= sep) continue;
        out.push_back(p);
    }
    if (out.back() < lambda) out.back() = lambda;  // merged into the end point
    return out;
}

}  // namespace detail

/// All four components at one frequency, per replica.
inline SusceptibilityPoint susceptibility_point(Energy omega, const LeadSet& leads, const GainMedium& medium,
                                                const QuadratureConfig& quad,
                                                const SelfEnergyPrefactors& pre = {}) {
    const double w = omega.ueV();
    if (!std::isfinite(w)) throw std::invalid_argument("omega must be finite");
    quad.validate();
    SusceptibilityPoint out;
    out.omega = omega;
    const detail::SelfEnergyKernel kernel(leads, medium, pre);
    if (kernel.decoupled()) return out;

    const double lambda = quad.cutoff.ueV() > 0.0 ? quad.cutoff.ueV() : default_cutoff(leads, medium).ueV();
    const std::vector<double> bp = detail::convolution_breakpoints(w, lambda, leads, medium);
    const quad::Options opts{quad.abs_tol, quad.rel_tol, quad.max_intervals};
    quad::Result<8> r;
    try {
        r = quad::integrate<8>([&](double wp) { return kernel.integrand(wp, w); }, bp, true, lambda, opts);
    } catch (const IntegrationFailure& e) {
        std::ostringstream os;
        os.precision(17);
        os << e.what() << " (omega = " << w << " ueV)";
        throw IntegrationFailure(os.str(), e.error_estimate(), w);
    }

    const double g2 = kernel.coupling_scale() * kernel.coupling_scale();
    out.f_real = g2 * r.value[0];
    out.f_imag = g2 * r.value[2];
    out.f_lesser = g2 * cd(r.value[4], r.value[5]);
    out.f_greater = g2 * cd(r.value[6], r.value[7]);
    out.error_estimate = g2 * std::max({r.error[0], r.error[2], r.error[5], r.error[7]});

    // The traces make F', F'' real and F^<, F^> imaginary; a residue beyond
    // rounding means the integrand is broken.
    const double magnitude = std::max({std::abs(r.value[0]), std::abs(r.value[2]), std::abs(r.value[5]),
                                       std::abs(r.value[7])});
    const double residue = std::max({std::abs(r.value[1]), std::abs(r.value[3]), std::abs(r.value[4]),
                                     std::abs(r.value[6])});
    if (residue > 1e-10 * magnitude + 1e-300) {
        std::ostringstream os;
        os << "self-energy residue " << residue << " exceeds 1e-10 of " << magnitude << " at omega = " << w;
        throw IntegrationFailure(os.str(), residue, w);
    }
    return out;
}

struct RealImag {
    double f_real;
    double f_imag;
};

struct LesserGreater {
    cd f_lesser;
    cd f_greater;
};

inline RealImag f_real_imag(Energy omega, const LeadSet& leads, const GainMedium& medium,
                            const QuadratureConfig& quad) {
    const SusceptibilityPoint p = susceptibility_point(omega, leads, medium, quad);
    return {p.f_real, p.f_imag};
}

inline LesserGreater f_lesser_greater(Energy omega, const LeadSet& leads, const GainMedium& medium,
                                      const QuadratureConfig& quad) {
    const SusceptibilityPoint p = susceptibility_point(omega, leads, medium, quad);
    return {p.f_lesser, p.f_greater};
}

/// Pointwise evaluation over a sorted frequency list, parallel across points.
inline std::vector<SusceptibilityPoint> susceptibility_grid(std::span<const Energy> omegas, const LeadSet& leads,
                                                            const GainMedium& medium, const QuadratureConfig& quad,
                                                            unsigned threads = 1) {
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        if (!std::isfinite(omegas[i].ueV())) throw std::invalid_argument("grid frequencies must be finite");
        if (i > 0 && omegas[i] < omegas[i - 1]) throw std::invalid_argument("grid frequencies must be sorted");
    }
    return parallel_map<SusceptibilityPoint>(omegas.size(), threads, [&](std::size_t i) {
        return susceptibility_point(omegas[i], leads, medium, quad);
    });
}

}  // namespace qdgain
