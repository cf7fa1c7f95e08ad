#pragma once

#include <string>

namespace sica::test {

struct PropertyResult {
  bool ok = true;
  std::string detail;
};

// Each check runs a fixed, seeded batch of cases and reports the worst one.
PropertyResult whitening_unit_covariance();
PropertyResult mixing_orthogonality();
PropertyResult threshold_monotone_in_alpha();
PropertyResult empirical_tau_matches_gaussian();
PropertyResult solve_theta_hits_kurtosis();
PropertyResult simulate_is_deterministic();
PropertyResult hungarian_matches_brute_force();
PropertyResult sica1_round_trip_is_bitwise();

inline constexpr double kWhiteningTolerance = 1e-6;
inline constexpr double kOrthogonalityTolerance = 1e-6;
inline constexpr double kTauTolerance = 0.03;
inline constexpr double kKurtosisTolerance = 0.1;

}  // namespace sica::test
