#pragma once

// Numerical tolerances shared by the kernels, the self-test and the test suites.
// Values assume double precision and O(1) channel entries.

namespace mimo::tol {

inline constexpr double kSvdReconstruction = 1e-10;
inline constexpr double kUnitarity = 1e-10;
inline constexpr double kGivensNorm = 1e-12;
inline constexpr double kRank = 1e-12;
inline constexpr double kEffectiveChannel = 1e-9;
inline constexpr double kLowerTriangle = 1e-10;
inline constexpr double kEqualDiagonal = 1e-9;
inline constexpr double kProductConservation = 1e-8;
inline constexpr double kUnitEnergy = 1e-12;

// One-sided Jacobi stops once every column pair is orthogonal to this relative level.
inline constexpr double kJacobiOrthogonality = 1e-15;
inline constexpr int kJacobiMaxSweeps = 60;

}  // namespace mimo::tol
