#pragma once

// Brute-force reference for the self-energy: dense fixed-step trapezoid
// sums on [-2 Lambda, 2 Lambda] built from plain Eigen inverses and full
// matrix products, plus the analytic 1/w'^3 tail of F' beyond the window.
// Shares nothing with the adaptive path except the model structs.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "qdgain/physmodel.hpp"

namespace qdgain::oracle {

using Mat = Eigen::MatrixXcd;
using cplx = std::complex<double>;

struct Reference {
    double f_real, f_imag;
    double emission, absorption;  // i F^<, i F^>
};

struct Dense {
    Mat r, a, lesser, greater;
};

inline double occupation(double w, double mu, double kt) { return 0.5 * (1.0 - std::tanh((w - mu) / (2.0 * kt))); }

inline Dense dense_green(double w, const LeadSet& l, const GainMedium& m) {
    const int n = m.sites();
    const cplx i(0.0, 1.0);
    Mat sr = Mat::Zero(n, n), sl = Mat::Zero(n, n), sg = Mat::Zero(n, n);
    const double fl = occupation(w, l.mu_left.ueV(), l.temperature.ueV());
    const double fr = occupation(w, l.mu_right.ueV(), l.temperature.ueV());
    sr(m.left_site, m.left_site) += -i * l.gamma_left.ueV() / 2.0;
    sr(m.right_site, m.right_site) += -i * l.gamma_right.ueV() / 2.0;
    sl(m.left_site, m.left_site) += i * fl * l.gamma_left.ueV();
    sl(m.right_site, m.right_site) += i * fr * l.gamma_right.ueV();
    sg(m.left_site, m.left_site) += -i * (1.0 - fl) * l.gamma_left.ueV();
    sg(m.right_site, m.right_site) += -i * (1.0 - fr) * l.gamma_right.ueV();
    Dense d;
    d.r = (w * Mat::Identity(n, n) - m.hamiltonian.cast<cplx>() - sr).inverse();
    d.a = d.r.adjoint();
    d.lesser = d.r * sl * d.a;
    d.greater = d.r * sg * d.a;
    return d;
}

/// `lambda` is the adaptive window half-width; the oracle sums over twice it.
/// Requires omega >= 0.
inline Reference trapezoid_reference(double omega, const LeadSet& l, const GainMedium& m, double lambda,
                                     long points = 2'000'000) {
    const double pi = std::numbers::pi;
    const cplx i(0.0, 1.0);
    const Mat g = m.coupling.cast<cplx>().asDiagonal();
    const double lo = -2.0 * lambda, hi = 2.0 * lambda;
    // The step divides omega/2 so that w' +/- omega/2 land on one shared
    // lattice; a ring buffer holds the 2*shift + 1 points in flight.
    long shift = 0;
    double h = (hi - lo) / static_cast<double>(points);
    if (omega > 0.0) {
        shift = std::max(1L, std::lround(0.5 * omega / h));
        h = 0.5 * omega / static_cast<double>(shift);
    }
    const long steps = std::lround((hi - lo) / h);
    const long span = 2 * shift + 1;
    std::vector<Dense> ring(static_cast<std::size_t>(span));
    auto lattice = [&](long j) { return lo - 0.5 * omega + static_cast<double>(j) * h; };
    for (long j = 0; j < 2 * shift; ++j) ring[j % span] = dense_green(lattice(j), l, m);

    cplx real_part = 0.0, imag_part = 0.0, lesser = 0.0, greater = 0.0;
    for (long k = 0; k <= steps; ++k) {
        ring[(k + 2 * shift) % span] = dense_green(lattice(k + 2 * shift), l, m);
        const double weight = (k == 0 || k == steps) ? 0.5 : 1.0;
        const Dense& up = ring[(k + 2 * shift) % span];
        const Dense& dn = ring[k % span];
        const Mat ku = up.lesser + up.greater, kd = dn.lesser + dn.greater;
        real_part += weight * ((g * ku * g * (dn.r + dn.a)).trace() + (g * kd * g * (up.r + up.a)).trace());
        imag_part += weight * ((g * ku * g * (dn.r - dn.a)).trace() - (g * kd * g * (up.r - up.a)).trace());
        lesser += weight * (g * up.lesser * g * dn.greater).trace();
        greater += weight * (g * up.greater * g * dn.lesser).trace();
    }
    const double edge = lo + steps * h;  // == hi up to rounding
    Reference ref;
    ref.f_real = (-i * real_part * h / (8.0 * pi)).real();
    ref.f_imag = (imag_part * h / (8.0 * pi)).real();
    ref.emission = (i * (-i) * lesser * h / (2.0 * pi)).real();
    ref.absorption = (i * (-i) * greater * h / (2.0 * pi)).real();

    // Beyond |w'| = X: G^r ~ 1/w', G^k ~ -/+ i Gamma_site / w'^2, so the F'
    // integrand tends to -C/(2 pi w'^3) on both sides with C = sum_i g_i^2 Gamma_i.
    Eigen::VectorXd site_gamma = Eigen::VectorXd::Zero(m.sites());
    site_gamma(m.left_site) += l.gamma_left.ueV();
    site_gamma(m.right_site) += l.gamma_right.ueV();
    const double c = (m.coupling.array().square() * site_gamma.array()).sum();
    const double x = std::min(-lo, edge);
    ref.f_real += -c / (2.0 * pi) * (1.0 / (x * x));
    return ref;
}

}  // namespace qdgain::oracle
