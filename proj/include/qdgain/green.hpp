#pragma once

// Noninteracting Green's functions of the dot network, dressed by wide-band
// lead self-energies.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

#include "qdgain/errors.hpp"
#include "qdgain/physmodel.hpp"

namespace qdgain {

using cd = std::complex<double>;
inline constexpr cd kI{0.0, 1.0};

/// Complex matrix with inline storage for up to kMaxSites rows/columns.
using SmallMatrix = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxSites, kMaxSites>;
using SmallVector = Eigen::Matrix<cd, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxSites, 1>;
using RealVector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxSites, 1>;

/// Occupation f and 1 - f for x = beta * (omega - mu). Both are computed
/// from the decaying exponential, and clamp to 0/1 beyond |x| = 700.
struct Occupation {
    double filled;
    double empty;
};

inline Occupation fermi_occupation(double x) {
    if (x > 700.0) return {0.0, 1.0};
    if (x < -700.0) return {1.0, 0.0};
    if (x >= 0.0) {
        const double e = std::exp(-x);
        return {e / (1.0 + e), 1.0 / (1.0 + e)};
    }
    const double e = std::exp(x);
    return {1.0 / (1.0 + e), e / (1.0 + e)};
}

inline double fermi(double omega, double mu, double beta) {
    return fermi_occupation(beta * (omega - mu)).filled;
}

/// Diagonal entries of the total lead self-energy (left + right).
struct LeadSelfEnergySet {
    SmallVector retarded;
    SmallVector advanced;
    SmallVector lesser;
    SmallVector greater;

    SmallMatrix retarded_matrix() const { return retarded.asDiagonal(); }
    SmallMatrix advanced_matrix() const { return advanced.asDiagonal(); }
    SmallMatrix lesser_matrix() const { return lesser.asDiagonal(); }
    SmallMatrix greater_matrix() const { return greater.asDiagonal(); }
};

inline LeadSelfEnergySet lead_self_energy(Energy omega, const LeadSet& leads, const GainMedium& medium) {
    const int m = medium.sites();
    LeadSelfEnergySet s;
    s.retarded = SmallVector::Zero(m);
    s.lesser = SmallVector::Zero(m);
    s.greater = SmallVector::Zero(m);
    const double w = omega.ueV();
    const double beta = leads.beta();
    auto attach = [&](int site, double gamma, double mu) {
        const Occupation occ = fermi_occupation(beta * (w - mu));
        s.retarded(site) += cd(0.0, -gamma / 2.0);
        s.lesser(site) += cd(0.0, occ.filled * gamma);
        s.greater(site) += cd(0.0, -occ.empty * gamma);
    };
    attach(medium.left_site, leads.gamma_left.ueV(), leads.mu_left.ueV());
    attach(medium.right_site, leads.gamma_right.ueV(), leads.mu_right.ueV());
    s.advanced = s.retarded.conjugate();
    return s;
}

struct GreenSet {
    Energy omega;
    SmallMatrix retarded;
    SmallMatrix advanced;
    SmallMatrix lesser;
    SmallMatrix greater;
    SmallMatrix keldysh;
};

namespace detail {

[[noreturn]] inline void throw_singular(double w, const GainMedium& medium) {
    const Eigen::VectorXd ev = medium.eigenvalues();
    Eigen::Index k = 0;
    (ev.array() - w).abs().minCoeff(&k);
    std::ostringstream os;
    os.precision(17);
    os << "omega*I - H - Sigma^r is singular at omega = " << w << " ueV (eigenvalue " << ev(k)
       << " ueV with zero lead broadening)";
    throw SingularMatrix(os.str(), ev(k));
}

/// Retarded function and the lesser/greater pair. Used by the quadrature hot
/// path, which has no use for the advanced and Keldysh copies.
struct Propagators {
    SmallMatrix retarded;
    SmallMatrix lesser;
    SmallMatrix greater;
};

/// Precomputed, frequency-independent pieces of the dot problem.
class DotProblem {
public:
    DotProblem(const LeadSet& leads, const GainMedium& medium)
        : m_(medium.sites()),
          hamiltonian_(medium.hamiltonian.cast<cd>()),
          gamma_left_(leads.gamma_left.ueV()),
          gamma_right_(leads.gamma_right.ueV()),
          mu_left_(leads.mu_left.ueV()),
          mu_right_(leads.mu_right.ueV()),
          beta_(leads.beta()),
          left_(medium.left_site),
          right_(medium.right_site),
          medium_(&medium) {
        sigma_r_ = SmallVector::Zero(m_);
        sigma_r_(left_) += cd(0.0, -gamma_left_ / 2.0);
        sigma_r_(right_) += cd(0.0, -gamma_right_ / 2.0);
    }

    int sites() const { return m_; }

    SmallMatrix retarded(double w) const {
        SmallMatrix a = -hamiltonian_;
        for (int i = 0; i < m_; ++i) a(i, i) += w - sigma_r_(i);
        if (m_ == 1) {
            if (a(0, 0) == cd(0.0)) throw_singular(w, *medium_);
            SmallMatrix r(1, 1);
            r(0, 0) = 1.0 / a(0, 0);
            return r;
        }
        Eigen::PartialPivLU<SmallMatrix> lu(a);
        if (!(lu.rcond() > 1e-14)) throw_singular(w, *medium_);
        return lu.inverse();
    }

    Propagators propagators(double w) const {
        Propagators p;
        p.retarded = retarded(w);
        RealVector in = RealVector::Zero(m_);   // Gamma * f per site
        RealVector out = RealVector::Zero(m_);  // Gamma * (1 - f) per site
        const Occupation ol = fermi_occupation(beta_ * (w - mu_left_));
        const Occupation orr = fermi_occupation(beta_ * (w - mu_right_));
        in(left_) += gamma_left_ * ol.filled;
        out(left_) += gamma_left_ * ol.empty;
        in(right_) += gamma_right_ * orr.filled;
        out(right_) += gamma_right_ * orr.empty;
        const SmallMatrix ga = p.retarded.adjoint();
        p.lesser.noalias() = (p.retarded * in.cast<cd>().asDiagonal()) * ga;
        p.lesser *= kI;
        p.greater.noalias() = (p.retarded * out.cast<cd>().asDiagonal()) * ga;
        p.greater *= -kI;
        return p;
    }

private:
    int m_;
    SmallMatrix hamiltonian_;
    SmallVector sigma_r_;
    double gamma_left_, gamma_right_, mu_left_, mu_right_, beta_;
    int left_, right_;
    const GainMedium* medium_;
};

}  // namespace detail

/// G^{r,a} = [omega - H - Sigma^{r,a}]^{-1}, G^{<,>} = G^r Sigma^{<,>} G^a,
/// G^k = G^< + G^>.
inline GreenSet green_set(Energy omega, const LeadSet& leads, const GainMedium& medium) {
    if (!std::isfinite(omega.ueV())) throw std::invalid_argument("omega must be finite");
    const detail::DotProblem problem(leads, medium);
    detail::Propagators p = problem.propagators(omega.ueV());
    GreenSet g;
    g.omega = omega;
    g.retarded = std::move(p.retarded);
    g.advanced = g.retarded.adjoint();
    g.lesser = std::move(p.lesser);
    g.greater = std::move(p.greater);
    g.keldysh = g.lesser + g.greater;
    return g;
}

/// A = i (G^r - G^a).
inline SmallMatrix spectral_function(Energy omega, const LeadSet& leads, const GainMedium& medium) {
    const detail::DotProblem problem(leads, medium);
    const SmallMatrix gr = problem.retarded(omega.ueV());
    return kI * (gr - SmallMatrix(gr.adjoint()));
}

}  // namespace qdgain
