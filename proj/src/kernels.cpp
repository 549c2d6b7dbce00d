#include "strat/kernels.hpp"

namespace strat {

std::vector<ProjectResult> project_batch(const StratumNumerics& s, const std::vector<Vec>& starts,
                                         const ProjectOptions& opt, Exec exec) {
    const int n = static_cast<int>(starts.size());
    std::vector<ProjectResult> out(n);
    if (exec == Exec::Parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < n; ++i) out[i] = s.project(starts[i], opt);
        return out;
#endif
    }
    // Serial reference.
    for (int i = 0; i < n; ++i) out[i] = s.project(starts[i], opt);
    return out;
}

std::vector<TangentResult> tangent_batch(const StratumNumerics& s, const std::vector<Vec>& points,
                                         double tol_rank, double tol_on, Exec exec) {
    const int n = static_cast<int>(points.size());
    std::vector<TangentResult> out(n);
    if (exec == Exec::Parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < n; ++i) out[i] = stratum_tangent(s, points[i], tol_rank, tol_on);
        return out;
#endif
    }
    for (int i = 0; i < n; ++i) out[i] = stratum_tangent(s, points[i], tol_rank, tol_on);
    return out;
}

std::vector<std::vector<bool>> membership_batch(const std::vector<const StratumNumerics*>& strata,
                                                const std::vector<Vec>& points, double tol_on,
                                                Exec exec) {
    const int n = static_cast<int>(points.size());
    std::vector<std::vector<bool>> out(n, std::vector<bool>(strata.size(), false));
    if (exec == Exec::Parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
        for (int i = 0; i < n; ++i)
            for (std::size_t k = 0; k < strata.size(); ++k)
                out[i][k] = on_stratum(strata[k]->stratum(), points[i], tol_on);
        return out;
#endif
    }
    for (int i = 0; i < n; ++i)
        for (std::size_t k = 0; k < strata.size(); ++k)
            out[i][k] = on_stratum(strata[k]->stratum(), points[i], tol_on);
    return out;
}

}  // namespace strat
