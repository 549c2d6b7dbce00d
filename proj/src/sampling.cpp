#include "strat/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "strat/rng.hpp"

namespace strat {

namespace {

// Core Gauss-Newton loop on a callable residual/Jacobian pair.
template <typename ResFn, typename JacFn>
ProjectResult gauss_newton(const ResFn& res_fn, const JacFn& jac_fn, const Vec& start,
                           const ProjectOptions& opt) {
    ProjectResult out;
    Vec p = start;
    Vec f = res_fn(p);
    double linf = f.size() ? f.cwiseAbs().maxCoeff() : 0.0;
    for (int iter = 0; iter <= opt.max_iter; ++iter) {
        if (linf <= opt.tol_res) {
            out.status = ProjectStatus::Ok;
            out.point = p;
            out.residual = linf;
            out.iterations = iter;
            return out;
        }
        if (iter == opt.max_iter) break;
        Mat j = jac_fn(p);
        Vec step = svd_least_squares(j, -f, opt.tol_rank);
        if (!step.allFinite()) break;
        double old_norm = f.norm();
        double alpha = 1.0;
        bool improved = false;
        for (int half = 0; half < 30; ++half) {
            Vec cand = p + alpha * step;
            Vec fc = res_fn(cand);
            if (fc.allFinite() && fc.norm() < old_norm) {
                p = cand;
                f = fc;
                linf = f.cwiseAbs().maxCoeff();
                improved = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!improved) break;
        if (alpha * step.norm() < 1e-17 && linf > opt.tol_res) break;
    }
    out.status = ProjectStatus::NoConvergence;
    out.point = p;
    out.residual = linf;
    out.iterations = opt.max_iter;
    return out;
}

std::span<const double> as_span(const Vec& p) {
    return std::span<const double>(p.data(), static_cast<std::size_t>(p.size()));
}

}  // namespace

ProjectResult newton_project(const BasicSet& s, const Vec& start, const ProjectOptions& opt) {
    PolySystem sys(s.equations);
    auto res = [&](const Vec& p) { return sys.residual(p); };
    auto jac = [&](const Vec& p) { return sys.jacobian_at(p); };
    ProjectResult r = gauss_newton(res, jac, start, opt);
    if (r.ok()) {
        for (const auto& g : s.strict_inequalities) {
            if (g.eval(as_span(r.point)) <= opt.tol_on) {
                r.status = ProjectStatus::InequalityViolated;
                break;
            }
        }
    }
    return r;
}

StratumNumerics::StratumNumerics(Stratum s) : stratum_(std::move(s)) {
    for (const auto& piece : stratum_.carrier.pieces) systems_.emplace_back(piece.equations);
}

Vec StratumNumerics::stacked_residual(int piece, const Vec& p) const {
    const PolySystem& sys = systems_[piece];
    int extra = static_cast<int>(stratum_.extra.size());
    Vec r(sys.size() + extra);
    r.head(sys.size()) = sys.residual(p);
    for (int i = 0; i < extra; ++i) r[sys.size() + i] = stratum_.extra[i].value(p);
    return r;
}

Mat StratumNumerics::stacked_jacobian(int piece, const Vec& p) const {
    const PolySystem& sys = systems_[piece];
    int extra = static_cast<int>(stratum_.extra.size());
    Mat j(sys.size() + extra, ambient());
    j.topRows(sys.size()) = sys.jacobian_at(p);
    for (int i = 0; i < extra; ++i) j.row(sys.size() + i) = stratum_.extra[i].gradient(p).transpose();
    return j;
}

ProjectResult StratumNumerics::project(const Vec& start, const ProjectOptions& opt) const {
    ProjectResult best;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int k = 0; k < pieces(); ++k) {
        auto res = [&](const Vec& p) { return stacked_residual(k, p); };
        auto jac = [&](const Vec& p) { return stacked_jacobian(k, p); };
        ProjectResult r = gauss_newton(res, jac, start, opt);
        if (!r.ok()) {
            if (!best.ok() && r.residual < best.residual) best = r;
            continue;
        }
        if (!on_stratum(stratum_, r.point, opt.tol_on)) {
            if (!best.ok()) {
                r.status = ProjectStatus::InequalityViolated;
                best = r;
            }
            continue;
        }
        double d = (r.point - start).norm();
        if (!best.ok() || d < best_dist) {
            best = r;
            best_dist = d;
        }
    }
    return best;
}

std::uint64_t stratum_salt(const Stratum& s) {
    // FNV-1a over the id string.
    std::uint64_t h = 1469598103934665603ull;
    for (char c : s.id) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

std::vector<std::vector<Vec>> sample_shells(const StratumNumerics& j, const Vec& x,
                                            const ShellSpec& spec, std::uint64_t seed,
                                            Exec exec, const ProjectOptions& opt) {
    if (spec.gamma <= 0.0 || spec.gamma >= 1.0)
        throw std::invalid_argument("sample_shells: gamma must be in (0,1)");
    const int m = j.ambient();
    const std::uint64_t salt = stratum_salt(j.stratum());
    const int kAttempts = 4;
    std::vector<std::vector<Vec>> shells(spec.n_shells);
    std::vector<std::vector<std::optional<Vec>>> slots(
        spec.n_shells, std::vector<std::optional<Vec>>(spec.probes_per_shell));

    int total = spec.n_shells * spec.probes_per_shell;
    for_each_index(exec, total, [&](int idx) {
        int shell = idx / spec.probes_per_shell;
        int probe = idx % spec.probes_per_shell;
        double r = spec.r0 * std::pow(spec.gamma, shell);
        for (int attempt = 0; attempt < kAttempts; ++attempt) {
            Rng rng = Rng::stream(seed, {Rng::kShellProbe, salt, static_cast<std::uint64_t>(shell),
                                         static_cast<std::uint64_t>(probe),
                                         static_cast<std::uint64_t>(attempt)});
            Vec dir = rng.on_sphere(m);
            if (spec.cone) {
                bool got = false;
                for (int draw = 0; draw < 64; ++draw) {
                    if (dir.dot(spec.cone->direction) > 1.0 - spec.cone->aperture) {
                        got = true;
                        break;
                    }
                    dir = rng.on_sphere(m);
                }
                if (!got) continue;
            }
            Vec start = x + r * dir;
            ProjectResult pr = j.project(start, opt);
            if (!pr.ok()) continue;
            double dist = (pr.point - x).norm();
            if (dist < 0.5 * r || dist > 2.0 * r) continue;
            if (spec.cone) {
                Vec u = (pr.point - x) / dist;
                if (u.dot(spec.cone->direction) <= 1.0 - spec.cone->aperture) continue;
            }
            slots[shell][probe] = pr.point;
            break;
        }
    });

    for (int shell = 0; shell < spec.n_shells; ++shell) {
        for (auto& s : slots[shell])
            if (s) shells[shell].push_back(*s);
        std::sort(shells[shell].begin(), shells[shell].end(),
                  [](const Vec& a, const Vec& b) { return lex_less(a, b); });
        // Drop exact duplicates (distinct probes converging to one point).
        auto& pts = shells[shell];
        pts.erase(std::unique(pts.begin(), pts.end(),
                              [](const Vec& a, const Vec& b) {
                                  return (a - b).cwiseAbs().maxCoeff() < 1e-12;
                              }),
                  pts.end());
    }
    return shells;
}

std::vector<Vec> sample_box(const StratumNumerics& s, int n_samples, double box_radius,
                            std::uint64_t seed, Exec exec, const ProjectOptions& opt) {
    const int m = s.ambient();
    const std::uint64_t salt = stratum_salt(s.stratum());
    std::vector<std::optional<Vec>> slots(n_samples);
    for_each_index(exec, n_samples, [&](int i) {
        for (int attempt = 0; attempt < 4; ++attempt) {
            Rng rng = Rng::stream(seed, {Rng::kBoxSample, salt, static_cast<std::uint64_t>(i),
                                         static_cast<std::uint64_t>(attempt)});
            Vec start(m);
            for (int k = 0; k < m; ++k) start[k] = rng.uniform(-box_radius, box_radius);
            ProjectResult pr = s.project(start, opt);
            if (pr.ok() && pr.point.cwiseAbs().maxCoeff() <= 2.0 * box_radius) {
                slots[i] = pr.point;
                break;
            }
        }
    });
    std::vector<Vec> out;
    for (auto& sl : slots)
        if (sl) out.push_back(*sl);
    std::sort(out.begin(), out.end(), [](const Vec& a, const Vec& b) { return lex_less(a, b); });
    out.erase(std::unique(out.begin(), out.end(),
                          [](const Vec& a, const Vec& b) {
                              return (a - b).cwiseAbs().maxCoeff() < 1e-10;
                          }),
              out.end());
    return out;
}

bool probe_empty(const Semivariety& s, int attempts, double box_radius, std::uint64_t seed,
                 const ProjectOptions& opt) {
    Stratum st;
    st.id = "__emptiness_probe__";
    st.carrier = s;
    StratumNumerics num(st);
    std::vector<Vec> pts = sample_box(num, attempts, box_radius, seed, Exec::Parallel, opt);
    return pts.empty();
}

DimEstimate estimate_dim(const Semivariety& s, int n_probe, std::uint64_t seed,
                         double box_radius, const ProjectOptions& opt) {
    DimEstimate est;
    const int m = s.ambient_dim;
    Stratum st;
    st.id = "__dim_probe__";
    st.carrier = s;
    StratumNumerics num(st);
    std::vector<Vec> pts = sample_box(num, n_probe, box_radius, seed + 1, Exec::Parallel, opt);
    if (pts.empty()) {
        est.no_samples = true;
        return est;
    }
    std::vector<int> votes(m + 1, 0);
    for (const Vec& p : pts) {
        // Vote with the best-fitting piece (smallest residual).
        int best_piece = 0;
        double best_res = std::numeric_limits<double>::infinity();
        for (int k = 0; k < num.pieces(); ++k) {
            double r = num.piece_system(k).residual(p).cwiseAbs().maxCoeff();
            if (r < best_res) {
                best_res = r;
                best_piece = k;
            }
        }
        Mat j = num.piece_system(best_piece).jacobian_at(p);
        Eigen::JacobiSVD<Mat> svd(j);
        int rank = numerical_rank(svd, opt.tol_rank);
        int dim = m - rank;
        if (dim >= 0 && dim <= m) ++votes[dim];
    }
    int best_dim = 0;
    for (int d = 0; d <= m; ++d)
        if (votes[d] > votes[best_dim]) best_dim = d;
    est.dim = best_dim;
    est.votes_for_dim = votes[best_dim];
    est.samples = static_cast<int>(pts.size());
    est.ambiguous = 3 * est.votes_for_dim < 2 * est.samples;
    return est;
}

}  // namespace strat
