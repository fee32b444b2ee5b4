#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "qdgain/physmodel.hpp"

using namespace qdgain;

TEST(Units, MhzToUeV) {
    EXPECT_EQ(mhz_to_uev(0.0).ueV(), 0.0);
    EXPECT_NEAR(mhz_to_uev(7880.5).ueV(), 32.591, 1e-3);
    EXPECT_NEAR(mhz_to_uev(3.15).ueV(), 0.013027, 1e-6);
    EXPECT_THROW(mhz_to_uev(std::numeric_limits<double>::quiet_NaN()), std::invalid_argument);
    EXPECT_THROW(mhz_to_uev(std::numeric_limits<double>::infinity()), std::invalid_argument);
}

TEST(Units, RoundTripAndLinearity) {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> dist(-1e5, 1e5);
    for (int i = 0; i < 1000; ++i) {
        const double a = dist(rng), b = dist(rng);
        const double back = mhz_to_uev(a).mhz();
        EXPECT_LE(std::abs(back - a), 1e-12 * std::abs(a));
        const double sum = mhz_to_uev(a + b).ueV();
        const double parts = mhz_to_uev(a).ueV() + mhz_to_uev(b).ueV();
        EXPECT_LE(std::abs(sum - parts), 1e-12 * std::max(std::abs(sum), std::abs(mhz_to_uev(a).ueV())));
    }
}

TEST(LeadSet, SymmetricSplitAndValidation) {
    const LeadSet l = LeadSet::symmetric(Energy(2.6), Energy(250.0), Energy(0.69));
    EXPECT_EQ(l.mu_left.ueV(), 125.0);
    EXPECT_EQ(l.mu_right.ueV(), -125.0);
    EXPECT_EQ(l.bias().ueV(), 250.0);
    EXPECT_THROW(LeadSet::symmetric(Energy(2.6), Energy(0.0), Energy(0.0)), std::invalid_argument);
    EXPECT_THROW(LeadSet::symmetric(Energy(-1.0), Energy(0.0), Energy(1.0)), std::invalid_argument);
}

TEST(CavityParams, Validation) {
    EXPECT_NO_THROW((CavityParams{Energy(32.0), Energy(0.01)}.validate()));
    EXPECT_THROW((CavityParams{Energy(32.0), Energy(0.0)}.validate()), std::invalid_argument);
    EXPECT_THROW((CavityParams{Energy(-1.0), Energy(0.1)}.validate()), std::invalid_argument);
}

TEST(BuildNdqd, ResonantSplitting) {
    const GainMedium m = build_ndqd(Energy(7.0), Energy(16.4), Energy(0.2), 3);
    m.validate();
    const Eigen::VectorXd ev = m.eigenvalues();
    EXPECT_NEAR(ev(1) - ev(0), 33.54, 0.01);
    EXPECT_NEAR(ev(1) - ev(0), std::sqrt(7.0 * 7.0 + 4.0 * 16.4 * 16.4), 1e-12);
    EXPECT_EQ(m.replicas, 3);
    EXPECT_EQ(m.left_site, 0);
    EXPECT_EQ(m.right_site, 1);
    EXPECT_EQ(m.hamiltonian(0, 0), 3.5);
    EXPECT_EQ(m.hamiltonian(1, 1), -3.5);
}

TEST(BuildNdqd, DegenerateAndSymmetricCases) {
    const GainMedium z = build_ndqd(Energy(0.0), Energy(0.0), Energy(0.3), 1);
    EXPECT_TRUE(z.hamiltonian.isZero(0.0));
    EXPECT_EQ(z.coupling(0), 0.3);
    EXPECT_EQ(z.coupling(1), -0.3);

    const GainMedium s = build_ndqd(Energy(0.0), Energy(16.4), Energy(0.3), 1);
    const Eigen::VectorXd ev = s.eigenvalues();
    EXPECT_NEAR(ev(0), -16.4, 1e-12);
    EXPECT_NEAR(ev(1), 16.4, 1e-12);

    EXPECT_THROW(build_ndqd(Energy(7.0), Energy(16.4), Energy(0.2), 0), std::invalid_argument);
}

TEST(BuildCascade, SingleDot) {
    const GainMedium m = build_cascade(1, Energy(7.0), Energy(16.4), Energy(0.2));
    m.validate();
    ASSERT_EQ(m.sites(), 1);
    EXPECT_EQ(m.hamiltonian(0, 0), 0.0);
    EXPECT_EQ(m.coupling(0), 0.2);
    EXPECT_EQ(m.left_site, 0);
    EXPECT_EQ(m.right_site, 0);
}

TEST(BuildCascade, CenteredEqualSpacing) {
    const GainMedium m = build_cascade(3, Energy(7.0), Energy(16.4), Energy(0.2));
    m.validate();
    EXPECT_EQ(m.hamiltonian(0, 0), -7.0);
    EXPECT_EQ(m.hamiltonian(1, 1), 0.0);
    EXPECT_EQ(m.hamiltonian(2, 2), 7.0);
    EXPECT_EQ(m.hamiltonian(0, 1), 16.4);
    EXPECT_EQ(m.hamiltonian(1, 2), 16.4);
    EXPECT_EQ(m.hamiltonian(0, 2), 0.0);
    EXPECT_EQ(m.coupling(0), 0.2);
    EXPECT_EQ(m.coupling(1), -0.2);
    EXPECT_EQ(m.coupling(2), 0.0);
    EXPECT_EQ(m.right_site, 2);
    EXPECT_EQ(m.replicas, 1);
    EXPECT_THROW(build_cascade(0, Energy(7.0), Energy(16.4), Energy(0.2)), std::invalid_argument);
}

// eps_{j+1} - eps_j = eps for the chain, while the DQD has eps_1 - eps_2 = eps:
// a two-dot cascade is the DQD with the detuning reversed.
TEST(BuildCascade, TwoDotsMatchMirroredDqd) {
    for (double eps : {0.0, 7.0, -3.25, 12.5}) {
        const GainMedium c = build_cascade(2, Energy(eps), Energy(16.4), Energy(0.2));
        const GainMedium d = build_ndqd(Energy(-eps), Energy(16.4), Energy(0.2), 1);
        EXPECT_EQ(c.hamiltonian, d.hamiltonian);
        EXPECT_EQ(c.coupling, d.coupling);
        EXPECT_EQ(c.left_site, d.left_site);
        EXPECT_EQ(c.right_site, d.right_site);
        EXPECT_EQ(c.replicas, d.replicas);
    }
}

TEST(GainMedium, InvariantsOfBuilders) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> e(-40.0, 40.0);
    for (int i = 0; i < 200; ++i) {
        const int m = 1 + static_cast<int>(rng() % kMaxSites);
        EXPECT_NO_THROW(build_cascade(m, Energy(e(rng)), Energy(e(rng)), Energy(e(rng))).validate());
        EXPECT_NO_THROW(build_ndqd(Energy(e(rng)), Energy(e(rng)), Energy(e(rng)), 1 + i % 5).validate());
    }
}

TEST(GainMedium, RejectsBrokenInvariants) {
    GainMedium m = build_ndqd(Energy(7.0), Energy(16.4), Energy(0.2), 1);
    m.hamiltonian(0, 1) += 1e-6;
    EXPECT_THROW(m.validate(), std::invalid_argument);
    m = build_ndqd(Energy(7.0), Energy(16.4), Energy(0.2), 1);
    m.right_site = 0;
    EXPECT_THROW(m.validate(), std::invalid_argument);
    m = build_ndqd(Energy(7.0), Energy(16.4), Energy(0.2), 1);
    m.coupling.resize(3);
    EXPECT_THROW(m.validate(), std::invalid_argument);
    EXPECT_THROW(build_cascade(kMaxSites + 1, Energy(1.0), Energy(1.0), Energy(1.0)), std::invalid_argument);
}
