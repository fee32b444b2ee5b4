#pragma once

// Unit conventions, parameter sets, and gain-medium builders.
//
// Every energy and frequency is carried in micro-electronvolts with hbar = 1
// in the dynamical formulas. Quantities quoted in MHz are converted with
// E = h * f.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

#include "qdgain/errors.hpp"

namespace qdgain {

/// Planck constant in ueV per MHz (CODATA 2018, exact).
inline constexpr double kPlanckUeVPerMHz = 4.135667696e-3;

/// Energy in ueV.
class Energy {
public:
    constexpr Energy() = default;
    constexpr explicit Energy(double ueV) : value_(ueV) {}

    static constexpr Energy ueV(double v) { return Energy(v); }
    static constexpr Energy mhz(double f) { return Energy(f * kPlanckUeVPerMHz); }

    constexpr double ueV() const { return value_; }
    constexpr double mhz() const { return value_ / kPlanckUeVPerMHz; }

    constexpr Energy operator-() const { return Energy(-value_); }
    constexpr Energy operator+(Energy o) const { return Energy(value_ + o.value_); }
    constexpr Energy operator-(Energy o) const { return Energy(value_ - o.value_); }
    constexpr Energy operator*(double s) const { return Energy(value_ * s); }
    constexpr Energy operator/(double s) const { return Energy(value_ / s); }
    constexpr auto operator<=>(const Energy&) const = default;

private:
    double value_ = 0.0;
};

constexpr Energy operator*(double s, Energy e) { return e * s; }

inline Energy mhz_to_uev(double f) {
    if (!std::isfinite(f)) throw std::invalid_argument("frequency must be finite");
    return Energy::mhz(f);
}

/// Fermionic reservoirs attached to the gain medium.
struct LeadSet {
    Energy gamma_left;
    Energy gamma_right;
    Energy mu_left;
    Energy mu_right;
    Energy temperature;  // k_B T

    Energy bias() const { return mu_left - mu_right; }
    double beta() const { return 1.0 / temperature.ueV(); }

    /// Symmetric split mu_L = +bias/2, mu_R = -bias/2.
    static LeadSet symmetric(Energy gamma, Energy bias, Energy temperature) {
        return biased(gamma, gamma, bias, temperature);
    }
    static LeadSet biased(Energy gamma_left, Energy gamma_right, Energy bias, Energy temperature) {
        LeadSet s{gamma_left, gamma_right, bias / 2.0, -bias / 2.0, temperature};
        s.validate();
        return s;
    }

    void validate() const {
        if (!(gamma_left.ueV() >= 0.0) || !(gamma_right.ueV() >= 0.0))
            throw std::invalid_argument("lead hybridization must be non-negative");
        if (!std::isfinite(mu_left.ueV()) || !std::isfinite(mu_right.ueV()))
            throw std::invalid_argument("chemical potentials must be finite");
        if (!(temperature.ueV() > 0.0) || !std::isfinite(temperature.ueV()))
            throw std::invalid_argument("temperature must be strictly positive");
    }
};

struct CavityParams {
    Energy omega_c;
    Energy kappa;  // decay rate per port, kappa_L = kappa_R

    void validate() const {
        if (!(omega_c.ueV() > 0.0) || !std::isfinite(omega_c.ueV()))
            throw std::invalid_argument("cavity frequency must be positive");
        if (!(kappa.ueV() > 0.0) || !std::isfinite(kappa.ueV()))
            throw std::invalid_argument("cavity decay rate must be positive");
    }
};

enum class Architecture { ndqd, cascade };

inline const char* to_string(Architecture a) {
    return a == Architecture::ndqd ? "ndqd" : "cascade";
}

/// Largest number of dot sites supported by the fixed-capacity matrix kernels.
inline constexpr int kMaxSites = 16;

/// One replica of the electronic gain medium. Replicas are identical, so the
/// replica count only multiplies the induced cavity self-energy.
struct GainMedium {
    Eigen::MatrixXd hamiltonian;  // ueV
    Eigen::VectorXd coupling;     // diagonal of the light-matter matrix, ueV
    int left_site = 0;
    int right_site = 0;
    int replicas = 1;

    int sites() const { return static_cast<int>(hamiltonian.rows()); }

    void validate() const {
        const int m = sites();
        if (m < 1 || hamiltonian.cols() != m)
            throw std::invalid_argument("hamiltonian must be a non-empty square matrix");
        if (m > kMaxSites)
            throw std::invalid_argument("at most " + std::to_string(kMaxSites) + " sites supported");
        if (coupling.size() != m)
            throw std::invalid_argument("coupling vector length must match the hamiltonian");
        if (!hamiltonian.allFinite() || !coupling.allFinite())
            throw std::invalid_argument("gain medium entries must be finite");
        const double scale = std::max(1.0, hamiltonian.cwiseAbs().maxCoeff());
        if ((hamiltonian - hamiltonian.transpose()).cwiseAbs().maxCoeff() > 1e-14 * scale)
            throw std::invalid_argument("hamiltonian must be symmetric");
        if (left_site < 0 || left_site >= m || right_site < 0 || right_site >= m)
            throw std::invalid_argument("lead site index out of range");
        if (m > 1 && left_site == right_site)
            throw std::invalid_argument("left and right leads must attach to different sites");
        if (replicas < 1) throw std::invalid_argument("replica count must be at least 1");
    }

    /// Largest |eigenvalue| of the hamiltonian.
    double spectral_norm() const {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hamiltonian, Eigen::EigenvaluesOnly);
        return es.eigenvalues().cwiseAbs().maxCoeff();
    }

    Eigen::VectorXd eigenvalues() const {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hamiltonian, Eigen::EigenvaluesOnly);
        return es.eigenvalues();
    }
};

/// Double quantum dot: H = [[eps/2, t], [t, -eps/2]], coupling (g, -g).
inline GainMedium build_ndqd(Energy epsilon, Energy hopping, Energy g, int n_replicas) {
    if (n_replicas < 1) throw std::invalid_argument("n_replicas must be >= 1");
    GainMedium m;
    m.hamiltonian.resize(2, 2);
    m.hamiltonian << epsilon.ueV() / 2.0, hopping.ueV(), hopping.ueV(), -epsilon.ueV() / 2.0;
    m.coupling.resize(2);
    m.coupling << g.ueV(), -g.ueV();
    m.left_site = 0;
    m.right_site = 1;
    m.replicas = n_replicas;
    return m;
}

/// Chain of M single-level dots, on-site energies eps_j = (j - (M+1)/2) * eps
/// for j = 1..M, so that eps_{j+1} - eps_j = eps and the chain is centered
/// at zero. Only the first two sites couple to the cavity, with g_1 = -g_2.
inline GainMedium build_cascade(int m, Energy epsilon, Energy hopping, Energy g) {
    if (m < 1) throw std::invalid_argument("cascade needs at least one dot");
    if (m > kMaxSites) throw std::invalid_argument("cascade too long");
    GainMedium med;
    med.hamiltonian = Eigen::MatrixXd::Zero(m, m);
    for (int j = 0; j < m; ++j) {
        med.hamiltonian(j, j) = (j + 1 - (m + 1) / 2.0) * epsilon.ueV();
        if (j + 1 < m) {
            med.hamiltonian(j, j + 1) = hopping.ueV();
            med.hamiltonian(j + 1, j) = hopping.ueV();
        }
    }
    med.coupling = Eigen::VectorXd::Zero(m);
    med.coupling(0) = g.ueV();
    if (m >= 2) med.coupling(1) = -g.ueV();
    med.left_site = 0;
    med.right_site = m - 1;
    med.replicas = 1;
    return med;
}

}  // namespace qdgain
