#include "strat/filtration.hpp"

#include <algorithm>

namespace strat {

Filtration filtrate(const Semivariety& v, std::uint64_t seed, const FiltrateOptions& opt) {
    Filtration out;
    if (v.trivially_empty()) return out;

    Semivariety cur = v;
    int dim;
    if (opt.declared_dim) {
        dim = *opt.declared_dim;
    } else {
        DimEstimate est = estimate_dim(cur, opt.n_probe, seed, opt.box_radius, opt.project);
        if (est.no_samples) return out;  // numerically empty input
        if (est.ambiguous)
            throw FiltrateError("filtrate: ambiguous dimension estimate for the input (" +
                                std::to_string(est.votes_for_dim) + "/" +
                                std::to_string(est.samples) + " votes)");
        dim = est.dim;
    }

    std::vector<FiltrationLevel> descending;
    for (int round = 0; round <= v.ambient_dim + 1; ++round) {
        descending.push_back({cur, dim});
        if (dim <= 0) break;
        Semivariety locus = singular_locus(cur, dim);
        if (probe_empty(locus, opt.empty_attempts, opt.box_radius, seed + 17 * round + 1,
                        opt.project))
            break;
        DimEstimate est =
            estimate_dim(locus, opt.n_probe, seed + 31 * round + 2, opt.box_radius, opt.project);
        if (est.no_samples) break;
        if (est.ambiguous)
            throw FiltrateError("filtrate: ambiguous dimension estimate at level " +
                                std::to_string(dim - 1));
        if (est.dim >= dim)
            throw FiltrateError("filtrate: singular locus dimension did not decrease (" +
                                std::to_string(est.dim) + " >= " + std::to_string(dim) + ")");
        cur = std::move(locus);
        dim = est.dim;
    }
    std::reverse(descending.begin(), descending.end());
    out.levels = std::move(descending);
    return out;
}

bool verify_filtration(const Filtration& f, std::uint64_t seed, std::string* diagnostic,
                       const FiltrateOptions& opt) {
    for (std::size_t k = 0; k < f.levels.size(); ++k) {
        const auto& level = f.levels[k];
        Stratum st;
        st.id = "__filtration_level_" + std::to_string(k);
        st.carrier = level.set;
        if (k > 0) st.excluded = f.levels[k - 1].set;
        StratumNumerics num(st);
        std::vector<Vec> pts =
            sample_box(num, opt.n_probe, opt.box_radius, seed + 7 * k, Exec::Parallel, opt.project);
        int checked = 0, good = 0;
        for (const Vec& p : pts) {
            if (!on_stratum(st, p, opt.project.tol_on)) continue;
            // Nested: every difference sample must lie in all higher levels.
            for (std::size_t up = k; up < f.levels.size(); ++up) {
                if (membership(f.levels[up].set, p, 1e-7) == Membership::Outside) {
                    if (diagnostic) *diagnostic = "nesting violated at level " + std::to_string(k);
                    return false;
                }
            }
            int best_piece = 0;
            double best_res = std::numeric_limits<double>::infinity();
            for (int q = 0; q < num.pieces(); ++q) {
                double r = num.piece_system(q).residual(p).cwiseAbs().maxCoeff();
                if (r < best_res) {
                    best_res = r;
                    best_piece = q;
                }
            }
            Mat jac = num.piece_system(best_piece).jacobian_at(p);
            Eigen::JacobiSVD<Mat> svd(jac);
            int rank = numerical_rank(svd, opt.project.tol_rank);
            ++checked;
            if (level.set.ambient_dim - rank == level.dim) ++good;
        }
        if (checked > 0 && good * 4 < checked * 3) {
            if (diagnostic)
                *diagnostic = "tangent rank mismatch at level " + std::to_string(k) + " (" +
                              std::to_string(good) + "/" + std::to_string(checked) + ")";
            return false;
        }
    }
    return true;
}

}  // namespace strat
