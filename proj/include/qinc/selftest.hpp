#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qinc/report.hpp"

namespace qinc {

/// Uniform draw from the regular domain of `id`, away from the poles
/// (theta in [0.2, pi - 0.2]) and with gamma * t below about 2.5.
ResolvedPoint random_point(ModelId id, std::mt19937_64& rng);

/// I + N(0, 1/4) entries, redrawn until |det| > 0.1.
RMat random_invertible(int n, std::mt19937_64& rng);

struct SubtestResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Property suite over every registered model: P1-P5, the bound chain,
/// scale invariance, classical models and the analytic-vs-integrator oracle.
std::vector<SubtestResult> run_selftest(std::uint64_t seed);

}  // namespace qinc
