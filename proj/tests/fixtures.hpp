#pragma once

// Canonical parameter sets used across the test suites.

#include "qdgain/physmodel.hpp"

namespace qdgain::testing {

inline const Energy kGamma{2.6};
inline const Energy kEpsilon{7.0};
inline const Energy kHopping{16.4};
inline const Energy kBias{250.0};
inline const Energy kTemperature{0.69};
inline const Energy kCoupling = Energy::mhz(50.0);

inline CavityParams fig2_cavity() { return {Energy::mhz(7880.5), Energy::mhz(3.15)}; }

inline LeadSet fig2_leads() { return LeadSet::symmetric(kGamma, kBias, kTemperature); }

inline LeadSet equilibrium_leads() { return LeadSet::symmetric(kGamma, Energy(0.0), kTemperature); }

inline GainMedium fig2_dqd(int n = 1) { return build_ndqd(kEpsilon, kHopping, kCoupling, n); }

}  // namespace qdgain::testing
