#pragma once

#include <cstdint>

#include "nkt/report.hpp"

namespace nkt {

/// Randomized identity suites: eta involution, Koszul-Tate nilpotency, the first variational
/// formula, divergence annihilation and theory round-trip. One residual per failing case.
VerificationReport run_selftest(std::uint64_t seed, int count);

}  // namespace nkt
