#pragma once

#include "strat/grassmann.hpp"

namespace strat {

// Data-parallel batch kernels. Each has an OpenMP path and a plain serial
// reference path; both write one slot per input index, so outputs are
// bit-identical regardless of scheduling. The serial path is kept as the
// reference for testing and for the benchmark comparison.

std::vector<ProjectResult> project_batch(const StratumNumerics& s, const std::vector<Vec>& starts,
                                         const ProjectOptions& opt, Exec exec);

std::vector<TangentResult> tangent_batch(const StratumNumerics& s, const std::vector<Vec>& points,
                                         double tol_rank, double tol_on, Exec exec);

// Membership of many points against many strata: row-major flags
// [point][stratum].
std::vector<std::vector<bool>> membership_batch(const std::vector<const StratumNumerics*>& strata,
                                                const std::vector<Vec>& points, double tol_on,
                                                Exec exec);

}  // namespace strat
