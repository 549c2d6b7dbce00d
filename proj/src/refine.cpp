#include "strat/refine.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>

#include "strat/rng.hpp"

namespace strat {

namespace {

// Tangent from the Jacobian null space without the on-set residual gate;
// needed while Newton iterates hover slightly off the carrier.
std::optional<TangentSample> raw_tangent(const StratumNumerics& j, const Vec& y,
                                         double tol_rank) {
    int best_piece = 0;
    double best_res = std::numeric_limits<double>::infinity();
    for (int k = 0; k < j.pieces(); ++k) {
        double r = j.stacked_residual(k, y).cwiseAbs().maxCoeff();
        if (k == 0 || r < best_res) {
            best_res = r;
            best_piece = k;
        }
    }
    Mat jac = j.stacked_jacobian(best_piece, y);
    Eigen::JacobiSVD<Mat> svd(jac, Eigen::ComputeFullV);
    int rank = numerical_rank(svd, tol_rank);
    int null_dim = static_cast<int>(y.size()) - rank;
    if (null_dim != j.stratum().dim) return std::nullopt;
    Mat v = svd.matrixV();
    TangentSample t;
    t.point = y;
    t.tangent = Plane{v.rightCols(null_dim)};
    t.normal = Plane{v.leftCols(rank)};
    return t;
}

}  // namespace

double kuo_value(const StratumNumerics& j, const KuoFrame& frame, char which, const Vec& y,
                 double tol_rank, double tol_on) {
    auto t = raw_tangent(j, y, tol_rank);
    if (!t) return std::numeric_limits<double>::quiet_NaN();
    if (which == 'a') return kuo_a(frame, *t);
    KuoBValue b = kuo_b(frame, *t, tol_on);
    return b.value;
}

namespace {

// Bisection along a Newton-corrected chord between two on-stratum points
// whose P values straddle eps.
std::optional<Vec> bisect_level(const StratumNumerics& j, const KuoFrame& frame, char which,
                                double eps, Vec lo, Vec hi, double p_lo, double p_hi,
                                const RefineParams& params) {
    if ((p_lo - eps) * (p_hi - eps) >= 0) return std::nullopt;
    ProjectOptions popt = params.check.project();
    for (int it = 0; it < params.bisection_iters; ++it) {
        Vec mid_amb = 0.5 * (lo + hi);
        ProjectResult pr = j.project(mid_amb, popt);
        if (!pr.ok()) return std::nullopt;
        if ((pr.point - mid_amb).norm() > (hi - lo).norm()) return std::nullopt;
        double pm = kuo_value(j, frame, which, pr.point, params.check.tol_rank,
                              params.check.tol_on);
        if (!std::isfinite(pm)) return std::nullopt;
        if (std::fabs(pm - eps) <= params.tol_level) return pr.point;
        if ((p_lo - eps) * (pm - eps) < 0) {
            hi = pr.point;
            p_hi = pm;
        } else {
            lo = pr.point;
            p_lo = pm;
        }
        if ((hi - lo).norm() < 1e-15) break;
    }
    return std::nullopt;
}

struct ShellValues {
    std::vector<const KuoTraceEntry*> entries;
};

std::vector<ShellValues> group_by_shell(const KuoTrace& trace, char which) {
    int n_shells = static_cast<int>(trace.shell_radii.size());
    std::vector<ShellValues> by_shell(n_shells);
    for (const auto& e : trace.entries) {
        if (which == 'b' && e.degenerate_secant) continue;
        by_shell[e.shell].entries.push_back(&e);
    }
    return by_shell;
}

double entry_value(const KuoTraceEntry& e, char which) { return which == 'a' ? e.pa : e.pb; }

// Level points from straddling pairs, at most `per_shell` per shell.
std::vector<Vec> collect_level_points(const StratumNumerics& j, const KuoFrame& frame,
                                      char which, double eps, const KuoTrace& trace,
                                      int per_shell, std::vector<int>* shells_hit,
                                      const RefineParams& params) {
    std::vector<Vec> out;
    auto by_shell = group_by_shell(trace, which);
    for (int s = 0; s < static_cast<int>(by_shell.size()); ++s) {
        const auto& es = by_shell[s].entries;
        int found = 0;
        for (std::size_t a = 0; a < es.size() && found < per_shell; ++a) {
            for (std::size_t b = a + 1; b < es.size() && found < per_shell; ++b) {
                double pa = entry_value(*es[a], which), pb = entry_value(*es[b], which);
                if ((pa - eps) * (pb - eps) >= 0) continue;
                auto pt = bisect_level(j, frame, which, eps, es[a]->y, es[b]->y, pa, pb, params);
                if (pt) {
                    out.push_back(*pt);
                    ++found;
                }
            }
        }
        if (found > 0 && shells_hit) shells_hit->push_back(s);
    }
    return out;
}

// Finite-difference gradient of P along the stratum tangent directions.
double tangential_gradient_norm(const StratumNumerics& j, const KuoFrame& frame, char which,
                                const Vec& y, const RefineParams& params) {
    auto t = raw_tangent(j, y, params.check.tol_rank);
    if (!t) return 0.0;
    double h = 1e-5 * std::max(1.0, y.norm());
    ProjectOptions popt = params.check.project();
    double sq = 0.0;
    for (int c = 0; c < t->tangent.dim(); ++c) {
        Vec dir = t->tangent.basis.col(c);
        ProjectResult p1 = j.project(y + h * dir, popt);
        ProjectResult p2 = j.project(y - h * dir, popt);
        if (!p1.ok() || !p2.ok()) continue;
        double sep = (p1.point - p2.point).norm();
        if (sep < 1e-12) continue;
        double v1 = kuo_value(j, frame, which, p1.point, params.check.tol_rank,
                              params.check.tol_on);
        double v2 = kuo_value(j, frame, which, p2.point, params.check.tol_rank,
                              params.check.tol_on);
        if (!std::isfinite(v1) || !std::isfinite(v2)) continue;
        double g = (v1 - v2) / sep;
        sq += g * g;
    }
    return std::sqrt(sq);
}

}  // namespace

std::vector<double> find_regular_levels(const StratumNumerics& j, const KuoFrame& frame,
                                        char which, int n_levels, std::uint64_t seed,
                                        const RefineParams& params) {
    if (n_levels == 0) return {};
    KuoTrace trace = build_trace(j, frame, params.check.shells, seed, params.check.tol_rank,
                                 params.check.tol_on, params.check.exec);
    if (trace.entries.empty()) throw RefineError("find_regular_levels: empty trace");
    const double top = frame.s() + 1.0;
    const double golden = 0.6180339887498949;
    std::vector<double> accepted;
    int budget = 3 * n_levels + 8;
    for (int k = 0; k < budget && static_cast<int>(accepted.size()) < n_levels; ++k) {
        double frac = std::fmod(0.5 + (k + 1) * golden, 1.0);
        double eps = frac * top;
        std::vector<Vec> pts =
            collect_level_points(j, frame, which, eps, trace, 3, nullptr, params);
        if (static_cast<int>(pts.size()) < params.min_level_points) continue;
        bool regular = true;
        for (const Vec& p : pts) {
            if (tangential_gradient_norm(j, frame, which, p, params) <= params.tol_grad) {
                regular = false;
                break;
            }
        }
        if (regular) accepted.push_back(eps);
    }
    if (accepted.empty()) throw RefineError("no-valid-levels");
    std::sort(accepted.begin(), accepted.end());
    return accepted;
}

LevelStratum level_stratum(const StratumNumerics& j, const KuoFrame& frame, char which,
                           double eps, std::uint64_t seed, const RefineParams& params) {
    LevelStratum ls;
    ls.parent_id = j.stratum().id;
    ls.which = which;
    ls.level = eps;
    ls.base = frame.base;
    KuoTrace trace = build_trace(j, frame, params.check.shells, seed, params.check.tol_rank,
                                 params.check.tol_on, params.check.exec);
    std::vector<int> shells_hit;
    ls.carrier = collect_level_points(j, frame, which, eps, trace, 4, &shells_hit, params);
    if (ls.carrier.empty()) throw RefineError("level_stratum: no straddling pairs found");

    // The level set accumulates at the base point only if the tail shells
    // all cross it.
    std::set<int> populated;
    for (const auto& e : trace.entries) populated.insert(e.shell);
    std::vector<int> pop(populated.begin(), populated.end());
    int keep = (static_cast<int>(pop.size()) + 1) / 2;
    std::set<int> hit(shells_hit.begin(), shells_hit.end());
    for (int s = static_cast<int>(pop.size()) - keep; s < static_cast<int>(pop.size()); ++s) {
        if (!hit.count(pop[s]))
            throw RefineError("level_stratum: level not crossed at tail shell " +
                              std::to_string(pop[s]));
    }
    for (const Vec& p : ls.carrier) {
        double v = kuo_value(j, frame, which, p, params.check.tol_rank, params.check.tol_on);
        ls.residuals.push_back(std::fabs(v - eps));
    }
    return ls;
}

Stratum level_as_stratum(const LevelStratum& ls, const Stratum& parent, const KuoFrame& frame,
                         const RefineParams& params) {
    Stratum st;
    st.id = ls.id.empty() ? ls.parent_id + "/lvl" : ls.id;
    st.carrier = parent.carrier;
    st.excluded = parent.excluded;
    st.excluded_dim = parent.excluded_dim;
    st.dim = parent.dim - 1;
    st.seeds = ls.carrier;

    auto parent_copy = std::make_shared<Stratum>(parent);
    auto parent_num = std::make_shared<StratumNumerics>(*parent_copy);
    double tol_rank = params.check.tol_rank;
    double tol_on = params.check.tol_on;
    char which = ls.which;
    double eps = ls.level;
    KuoFrame fr = frame;
    NumericConstraint c;
    c.membership_tol = params.tol_level * 10.0;
    c.value = [parent_copy, parent_num, fr, which, eps, tol_rank, tol_on](const Vec& y) {
        return kuo_value(*parent_num, fr, which, y, tol_rank, tol_on) - eps;
    };
    c.gradient = [parent_copy, parent_num, fr, which, tol_rank, tol_on](const Vec& y) {
        double h = 1e-6 * std::max(1.0, y.norm());
        Vec g(y.size());
        for (int k = 0; k < y.size(); ++k) {
            Vec yp = y, ym = y;
            yp[k] += h;
            ym[k] -= h;
            double vp = kuo_value(*parent_num, fr, which, yp, tol_rank, tol_on);
            double vm = kuo_value(*parent_num, fr, which, ym, tol_rank, tol_on);
            g[k] = (vp - vm) / (2.0 * h);
        }
        return g;
    };
    st.extra.push_back(std::move(c));
    return st;
}

CriticalStratum critical_locus(const StratumNumerics& j, const OrientedPlane& l,
                               std::uint64_t seed, const RefineParams& params) {
    const Stratum& parent = j.stratum();
    const int m = parent.ambient();
    if (l.ambient() != m) throw std::invalid_argument("critical_locus: ambient mismatch");
    if (parent.has_extra())
        throw std::invalid_argument("critical_locus: sampled carriers not supported");

    // Transversality of l to the stratum at its seed points.
    for (const Vec& s : parent.seeds) {
        TangentResult t = stratum_tangent(j, s, params.check.tol_rank, params.check.tol_on);
        if (!t.ok) throw NonTransversalError("critical_locus: no tangent at a seed point");
        Mat combined(m, t.sample.tangent.dim() + l.dim());
        combined.leftCols(t.sample.tangent.dim()) = t.sample.tangent.basis;
        combined.rightCols(l.dim()) = l.basis;
        if (smallest_singular_value(combined) <= params.check.tol_det)
            throw NonTransversalError("critical_locus: plane not transversal at a seed point");
    }

    CriticalStratum out;
    out.parent_id = parent.id;
    out.l = l;

    // Exact minors of J * L: the tangent space meets l nontrivially exactly
    // where the projection along l restricted to the stratum drops rank.
    const int lc = l.dim();
    Semivariety defining;
    defining.ambient_dim = m;
    for (const auto& piece : parent.carrier.pieces) {
        BasicSet cut = piece;
        if (!piece.equations.empty()) {
            PolyMatrix jac = jacobian(piece.equations);
            int rows = static_cast<int>(piece.equations.size());
            PolyMatrix jl(rows, std::vector<Polynomial>(lc, Polynomial(m)));
            for (int r = 0; r < rows; ++r)
                for (int c = 0; c < lc; ++c) {
                    Polynomial sum(m);
                    for (int v = 0; v < m; ++v)
                        sum = sum + jac[r][v] * rational_from_double(l.basis(v, c));
                    jl[r][c] = std::move(sum);
                }
            if (rows >= lc)
                for (auto& mi : minors(jl, lc)) cut.equations.push_back(std::move(mi));
            // rows < lc: the projection is nowhere of full rank; no new cut.
        }
        defining.pieces.push_back(std::move(cut));
    }
    out.defining = defining;

    // Sample the locus from perturbed parent seeds and box starts.
    Stratum crit_st;
    crit_st.id = parent.id + "/crit";
    crit_st.carrier = defining;
    crit_st.excluded = parent.excluded;
    crit_st.dim = -1;
    StratumNumerics crit_num(crit_st);
    std::vector<Vec> pts = sample_box(crit_num, 48, 2.0, seed + 5, Exec::Serial,
                                      params.check.project());
    for (const Vec& s : parent.seeds) {
        ProjectResult pr = crit_num.project(s, params.check.project());
        if (pr.ok()) pts.push_back(pr.point);
    }
    std::sort(pts.begin(), pts.end(), [](const Vec& a, const Vec& b) { return lex_less(a, b); });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Vec& a, const Vec& b) {
                              return (a - b).cwiseAbs().maxCoeff() < 1e-8;
                          }),
              pts.end());
    out.carrier = pts;

    DimEstimate est = estimate_dim(defining, 32, seed + 11, 2.0, params.check.project());
    out.dim = est.no_samples ? -1 : est.dim;
    return out;
}

namespace {

std::vector<TangentSample> sample_path(const StratumNumerics& j, const Vec& a, const Vec& b,
                                       int n_steps, const CheckParams& params) {
    std::vector<TangentSample> path;
    Vec prev;
    for (int k = 0; k <= n_steps; ++k) {
        double t = static_cast<double>(k) / n_steps;
        Vec chord = (1.0 - t) * a + t * b;
        ProjectResult pr = j.project(chord, params.project());
        if (!pr.ok()) return {};
        if (k > 0 && (pr.point - prev).norm() > 4.0 * (b - a).norm() / n_steps) return {};
        TangentResult tr = stratum_tangent(j, pr.point, params.tol_rank, params.tol_on);
        if (!tr.ok) return {};
        if (!path.empty() &&
            grass_dist(path.back().tangent, tr.sample.tangent) >= 0.5)
            return {};
        path.push_back(tr.sample);
        prev = pr.point;
    }
    return path;
}

}  // namespace

RefineOutcome refine_pair(const StratumNumerics& j, const StratumNumerics& i,
                          const SingProbe& probe, char which, const RefineParams& params) {
    RefineOutcome out;
    std::vector<int> irregular;
    for (int k = 0; k < static_cast<int>(probe.verdicts.size()); ++k) {
        const auto& v = probe.verdicts[k];
        Verdict s = which == 'a' ? v.a.status : v.b.status;
        if (s == Verdict::Irregular) irregular.push_back(k);
    }
    if (irregular.empty())
        throw std::invalid_argument("refine_pair: probe contains no irregular point");

    int level_count = 0, crit_count = 0;
    for (int k : irregular) {
        const TripleVerdict& v = probe.verdicts[k];
        const Vec& x = probe.points[k];
        const auto& kuo_cs = which == 'a' ? v.kuo_clusters_a : v.kuo_clusters_b;

        bool kuo_split = kuo_cs.size() >= 2;
        for (const auto& c : kuo_cs)
            if (c.spread > 2.0 * params.check.cluster_tol_scalar) kuo_split = true;
        bool plane_split = v.plane_clusters.size() >= 2;
        for (const auto& c : v.plane_clusters)
            if (c.spread > 2.0 * params.check.cluster_tol_planes) plane_split = true;

        KuoFrame frame = kuo_frame(i, x, params.check.tol_rank, params.check.tol_on);
        std::uint64_t site_seed = params.check.seed + 104729ull * (k + 1);

        if (kuo_split) {
            out.case_used = std::max(out.case_used, 1);
            double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
            for (const auto& c : kuo_cs) {
                lo = std::min(lo, c.value - c.spread / 2.0);
                hi = std::max(hi, c.value + c.spread / 2.0);
            }
            lo = std::max(lo, 0.0);
            std::vector<double> levels =
                find_regular_levels(j, frame, which, params.n_levels, site_seed, params);
            std::vector<double> inside;
            double margin = 0.02 * std::max(hi - lo, 1e-6);
            for (double e : levels)
                if (e > lo + margin && e < hi - margin) inside.push_back(e);
            if (inside.empty()) {
                inside = levels;
                out.notes += "no validated level strictly between observed limits at one "
                             "site; using nearest validated levels; ";
            }
            int take = std::min<int>(2, static_cast<int>(inside.size()));
            for (int t = 0; t < take; ++t) {
                LevelStratum ls = level_stratum(j, frame, which, inside[t], site_seed, params);
                ls.id = j.stratum().id + "/lvl+" + std::to_string(++level_count);
                out.levels.push_back(std::move(ls));
            }
        } else if (plane_split) {
            out.case_used = std::max(out.case_used, 2);
            // Two most separated plane representatives.
            int c0 = 0, c1 = 1;
            double best = -1.0;
            for (std::size_t a = 0; a < v.plane_clusters.size(); ++a)
                for (std::size_t b = a + 1; b < v.plane_clusters.size(); ++b) {
                    if (!v.plane_clusters[a].plane || !v.plane_clusters[b].plane) continue;
                    double d = grass_dist(*v.plane_clusters[a].plane,
                                          *v.plane_clusters[b].plane);
                    if (d > best) {
                        best = d;
                        c0 = static_cast<int>(a);
                        c1 = static_cast<int>(b);
                    }
                }
            if (best <= params.check.tol_grass) {
                out.anomaly = true;
                out.notes += "plane clusters too close to separate; ";
                continue;
            }
            OrientedPlane t0{v.plane_clusters[c0].plane->basis};
            OrientedPlane t1{v.plane_clusters[c1].plane->basis};
            std::vector<const StratumNumerics*> avoid{&j};
            OrientedPlane l = random_separating_plane(t0, t1, avoid, params.plane_trials,
                                                      site_seed, params.check.tol_det,
                                                      params.check.tol_grass,
                                                      params.check.tol_rank);
            // Rolle confirmation along a connecting on-stratum path.
            bool confirmed = false;
            for (int ma = 0; ma < 2 && !confirmed; ++ma) {
                for (int mb = 0; mb < 2 && !confirmed; ++mb) {
                    if (ma >= static_cast<int>(v.plane_clusters[c0].members.size()) ||
                        mb >= static_cast<int>(v.plane_clusters[c1].members.size()))
                        continue;
                    const Vec& y0 = v.trace.entries[v.plane_clusters[c0].members[ma]].y;
                    const Vec& y1 = v.trace.entries[v.plane_clusters[c1].members[mb]].y;
                    auto path = sample_path(j, y0, y1, 60, params.check);
                    if (path.empty()) continue;
                    try {
                        if (rolle_scan(path, l, params.check.tol_det)) confirmed = true;
                    } catch (const DiscontinuousPathError&) {
                    }
                }
            }
            if (!confirmed) {
                out.notes += "rolle confirmation failed at one site; ";
                continue;
            }
            CriticalStratum cs = critical_locus(j, l, site_seed, params);
            cs.id = j.stratum().id + "/crit-" + std::to_string(++crit_count);
            out.criticals.push_back(std::move(cs));
        } else {
            out.anomaly = true;
            out.notes +=
                "unique positive Kuo limit with unique plane limit at one site (recorded: "
                "the reduction offers no cut here); ";
            continue;
        }
        out.frontier_points.push_back(x);

        // Projection-monotonicity contract: P on a sub-stratum tangent
        // dominates P on the parent tangent at shared points.
        auto check_monotone = [&](const StratumNumerics& child, const std::vector<Vec>& pts) {
            for (const Vec& p : pts) {
                double pc = kuo_value(child, frame, which, p, params.check.tol_rank,
                                      params.check.tol_on);
                double pp = kuo_value(j, frame, which, p, params.check.tol_rank,
                                      params.check.tol_on);
                if (!std::isfinite(pc) || !std::isfinite(pp)) continue;
                double gap = pp - pc;
                out.monotonicity_worst = std::max(out.monotonicity_worst, gap);
                if (gap > 1e-10) out.monotonicity_ok = false;
            }
        };
        for (const auto& ls : out.levels) {
            Stratum child = level_as_stratum(ls, j.stratum(), frame, params);
            StratumNumerics cn(child);
            std::vector<Vec> pts(ls.carrier.begin(),
                                 ls.carrier.begin() + std::min<std::size_t>(10, ls.carrier.size()));
            check_monotone(cn, pts);
        }
        for (const auto& cs : out.criticals) {
            Stratum child;
            child.id = cs.id;
            child.carrier = cs.defining;
            child.excluded = j.stratum().excluded;
            child.dim = cs.dim >= 0 ? cs.dim : j.stratum().dim - 1;
            child.seeds = cs.carrier;
            StratumNumerics cn(child);
            std::vector<Vec> pts(cs.carrier.begin(),
                                 cs.carrier.begin() + std::min<std::size_t>(10, cs.carrier.size()));
            check_monotone(cn, pts);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// stratify / certify

const char* cert_status_name(CertStatus s) {
    switch (s) {
        case CertStatus::Certified: return "certified";
        case CertStatus::Refuted: return "refuted";
        default: return "incomplete";
    }
}

namespace {

// Is p in the closure of stratum j? Probed by shrinking shells.
bool in_closure_of(const StratumNumerics& j, const Vec& p, std::uint64_t seed,
                   const ProjectOptions& opt) {
    ShellSpec spec;
    spec.r0 = 0.03;
    spec.gamma = 0.5;
    spec.n_shells = 5;
    spec.probes_per_shell = 10;
    auto shells = sample_shells(j, p, spec, seed, Exec::Serial, opt);
    for (int k = 2; k < spec.n_shells; ++k)
        if (!shells[k].empty()) return true;
    // A point of the stratum itself is trivially in the closure.
    return on_stratum(j.stratum(), p, opt.tol_on);
}

struct RuntimeStratum {
    CertificateStratum record;
    std::shared_ptr<Stratum> stratum;
    std::shared_ptr<StratumNumerics> numerics;
};

RuntimeStratum make_runtime(const CertificateStratum& rec) {
    RuntimeStratum rt;
    rt.record = rec;
    rt.stratum = std::make_shared<Stratum>(rec.stratum);
    rt.numerics = std::make_shared<StratumNumerics>(*rt.stratum);
    return rt;
}

}  // namespace

StratificationCertificate stratify(const Semivariety& v, char mode,
                                   const StratifyParams& params) {
    StratificationCertificate cert;
    cert.mode = mode;
    cert.seed = params.refine.check.seed;
    cert.max_depth = params.max_depth;
    std::uint64_t seed = cert.seed;

    Filtration filt = filtrate(v, seed, params.filtrate);
    if (filt.levels.empty()) {
        cert.status = CertStatus::Certified;
        cert.notes.push_back("input is numerically empty; empty stratification");
        return cert;
    }
    {
        std::string diag;
        if (!verify_filtration(filt, seed + 3, &diag, params.filtrate))
            cert.notes.push_back("filtration verification warning: " + diag);
    }

    // Initial strata: filtration differences.
    std::vector<RuntimeStratum> strata;
    for (std::size_t k = 0; k < filt.levels.size(); ++k) {
        CertificateStratum rec;
        rec.kind = "filtration";
        Stratum st;
        st.id = "v" + std::to_string(filt.levels[k].dim);
        st.carrier = filt.levels[k].set;
        st.dim = filt.levels[k].dim;
        if (k > 0) {
            st.excluded = filt.levels[k - 1].set;
            st.excluded_dim = filt.levels[k - 1].dim;
        }
        StratumNumerics tmp(st);
        st.seeds.clear();
        for (const Vec& p :
             sample_box(tmp, params.stratum_samples, params.box_radius, seed + 101 * k,
                        Exec::Parallel, params.refine.check.project()))
            if (on_stratum(st, p, params.refine.check.tol_on)) st.seeds.push_back(p);
        if (st.seeds.empty()) continue;  // empty difference
        rec.stratum = st;
        strata.push_back(make_runtime(rec));
    }

    // Frontier-driven splitting: every stratum must be uniformly inside or
    // outside the closure of each higher stratum.
    WalkOptions walk = params.refine.check.walk();
    for (int pass = 0; pass < 6; ++pass) {
        bool changed = false;
        for (std::size_t jj = 0; jj < strata.size() && !changed; ++jj) {
            for (std::size_t ii = 0; ii < strata.size() && !changed; ++ii) {
                if (strata[jj].stratum->dim <= strata[ii].stratum->dim) continue;
                const auto& si = *strata[ii].stratum;
                std::vector<bool> flags;
                bool any_true = false, any_false = false;
                for (const Vec& p : si.seeds) {
                    bool f = in_closure_of(*strata[jj].numerics, p,
                                           seed + 13 * jj + 7 * ii + 1,
                                           params.refine.check.project());
                    flags.push_back(f);
                    (f ? any_true : any_false) = true;
                }
                if (!(any_true && any_false)) continue;

                // Split stratum ii by closure flag, then by connectivity.
                std::vector<RuntimeStratum> pieces;
                for (int want = 0; want < 2; ++want) {
                    std::vector<Vec> group;
                    for (std::size_t p = 0; p < si.seeds.size(); ++p)
                        if (flags[p] == (want == 1)) group.push_back(si.seeds[p]);
                    if (group.empty()) continue;
                    // Connectivity components within the group.
                    std::vector<int> comp(group.size(), -1);
                    int n_comp = 0;
                    for (std::size_t a = 0; a < group.size(); ++a) {
                        if (comp[a] >= 0) continue;
                        comp[a] = n_comp;
                        for (std::size_t b = 0; b < group.size(); ++b) {
                            if (comp[b] >= 0) continue;
                            double d = (group[a] - group[b]).norm();
                            double step = std::clamp(d / 20.0, 1e-4, 0.25);
                            if (path_connected(*strata[ii].numerics, group[a], group[b], step,
                                               walk))
                                comp[b] = n_comp;
                        }
                        ++n_comp;
                    }
                    for (int c = 0; c < n_comp; ++c) {
                        CertificateStratum rec = strata[ii].record;
                        Stratum st = si;
                        st.id = si.id + "_c" + std::to_string(static_cast<int>(pieces.size()));
                        st.component_restricted = true;
                        st.seeds.clear();
                        for (std::size_t p = 0; p < group.size(); ++p)
                            if (comp[p] == c) st.seeds.push_back(group[p]);
                        rec.stratum = st;
                        RuntimeStratum rt = make_runtime(rec);
                        pieces.push_back(rt);
                    }
                }
                if (pieces.size() > 1) {
                    strata.erase(strata.begin() + ii);
                    for (auto& p : pieces) strata.push_back(p);
                    changed = true;
                    cert.notes.push_back("split stratum by frontier condition");
                }
            }
        }
        if (!changed) break;
    }

    // Contact map and pair probes.
    CheckParams check = params.refine.check;
    check.exec = Exec::Serial;
    auto probe_pair = [&](const RuntimeStratum& sj, const RuntimeStratum& si) {
        SingProbe probe;
        std::vector<Vec> pts = si.stratum->seeds;
        if (static_cast<int>(pts.size()) > params.pair_samples)
            pts.resize(params.pair_samples);
        std::vector<TripleVerdict> verdicts(pts.size());
        for_each_index(params.refine.check.exec, static_cast<int>(pts.size()), [&](int k) {
            CheckParams p = check;
            p.seed = seed + 1009ull * (k + 1) + stratum_salt(*sj.stratum);
            verdicts[k] = classify_triple(*sj.numerics, *si.numerics, pts[k], p);
        });
        for (std::size_t k = 0; k < pts.size(); ++k) {
            if (!verdicts[k].ok()) continue;
            probe.points.push_back(pts[k]);
            probe.verdicts.push_back(verdicts[k]);
        }
        return probe;
    };

    int rounds = 0;
    bool any_irregular = false, any_inconclusive = false;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t jj = 0; jj < strata.size(); ++jj) {
        for (std::size_t ii = 0; ii < strata.size(); ++ii) {
            if (strata[jj].stratum->dim <= strata[ii].stratum->dim) continue;
            bool contact = false;
            for (const Vec& p : strata[ii].stratum->seeds)
                if (in_closure_of(*strata[jj].numerics, p, seed + 37 * jj + 5 * ii,
                                  params.refine.check.project())) {
                    contact = true;
                    break;
                }
            if (!contact) continue;
            edges.emplace_back(jj, ii);
        }
    }
    std::vector<SingProbe> probes(edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e) {
        probes[e] = probe_pair(strata[edges[e].first], strata[edges[e].second]);
        PairProbeRecord rec;
        rec.j_id = strata[edges[e].first].stratum->id;
        rec.i_id = strata[edges[e].second].stratum->id;
        rec.points = probes[e].points;
        for (const auto& vd : probes[e].verdicts) {
            rec.a_status.push_back(vd.a.status);
            rec.b_status.push_back(vd.b.status);
        }
        cert.probes.push_back(rec);
        for (const auto& vd : probes[e].verdicts) {
            Verdict s = mode == 'a' ? vd.a.status : vd.b.status;
            if (s == Verdict::Irregular) any_irregular = true;
            if (s == Verdict::Inconclusive) any_inconclusive = true;
        }
    }

    // Refinement rounds (Lemma 2). The corpus certifies without entering
    // this loop; irregular inputs descend until the budget is exhausted.
    while (any_irregular && rounds < params.max_depth) {
        ++rounds;
        bool refined = false;
        for (std::size_t e = 0; e < edges.size(); ++e) {
            bool has_irr = false;
            for (const auto& vd : probes[e].verdicts) {
                Verdict s = mode == 'a' ? vd.a.status : vd.b.status;
                if (s == Verdict::Irregular) has_irr = true;
            }
            if (!has_irr) continue;
            const RuntimeStratum& sj = strata[edges[e].first];
            const RuntimeStratum& si = strata[edges[e].second];
            try {
                RefineOutcome ro = refine_pair(*sj.numerics, *si.numerics, probes[e], mode,
                                               params.refine);
                for (const auto& ls : ro.levels) {
                    CertificateStratum rec;
                    rec.kind = "level";
                    rec.parent = ls.parent_id;
                    rec.level_which = ls.which;
                    rec.level_value = ls.level;
                    rec.level_base = ls.base;
                    rec.carrier_samples = ls.carrier;
                    KuoFrame fr = kuo_frame(*si.numerics, ls.base, check.tol_rank, check.tol_on);
                    Stratum st = level_as_stratum(ls, *sj.stratum, fr, params.refine);
                    st.id = ls.id;
                    rec.stratum = st;
                    strata.push_back(make_runtime(rec));
                    refined = true;
                }
                for (const auto& cs : ro.criticals) {
                    CertificateStratum rec;
                    rec.kind = "critical";
                    rec.parent = cs.parent_id;
                    Stratum st;
                    st.id = cs.id;
                    st.carrier = cs.defining;
                    st.excluded = sj.stratum->excluded;
                    st.excluded_dim = sj.stratum->excluded_dim;
                    st.dim = cs.dim >= 0 ? cs.dim : sj.stratum->dim - 1;
                    st.seeds = cs.carrier;
                    rec.stratum = st;
                    rec.carrier_samples = cs.carrier;
                    strata.push_back(make_runtime(rec));
                    refined = true;
                }
                if (ro.anomaly) cert.notes.push_back("refine anomaly: " + ro.notes);
                if (!ro.monotonicity_ok)
                    cert.notes.push_back("kuo restriction monotonicity violated (worst " +
                                         std::to_string(ro.monotonicity_worst) + ")");
            } catch (const std::exception& ex) {
                cert.notes.push_back(std::string("refine_pair failed: ") + ex.what());
            }
        }
        if (!refined) break;
        // Re-probe all pairs against the refreshed stratum list.
        edges.clear();
        cert.probes.clear();
        any_irregular = any_inconclusive = false;
        for (std::size_t jj = 0; jj < strata.size(); ++jj)
            for (std::size_t ii = 0; ii < strata.size(); ++ii) {
                if (strata[jj].stratum->dim <= strata[ii].stratum->dim) continue;
                edges.emplace_back(jj, ii);
            }
        probes.assign(edges.size(), SingProbe{});
        for (std::size_t e = 0; e < edges.size(); ++e) {
            probes[e] = probe_pair(strata[edges[e].first], strata[edges[e].second]);
            if (probes[e].points.empty()) continue;
            PairProbeRecord rec;
            rec.j_id = strata[edges[e].first].stratum->id;
            rec.i_id = strata[edges[e].second].stratum->id;
            rec.points = probes[e].points;
            for (const auto& vd : probes[e].verdicts) {
                rec.a_status.push_back(vd.a.status);
                rec.b_status.push_back(vd.b.status);
                Verdict s = mode == 'a' ? vd.a.status : vd.b.status;
                if (s == Verdict::Irregular) any_irregular = true;
                if (s == Verdict::Inconclusive) any_inconclusive = true;
            }
            cert.probes.push_back(rec);
        }
    }
    cert.rounds_used = rounds;

    // Frontier relation on the final strata.
    cert.frontier.clear();
    for (std::size_t jj = 0; jj < strata.size(); ++jj)
        for (std::size_t ii = 0; ii < strata.size(); ++ii) {
            if (jj == ii || strata[jj].stratum->dim <= strata[ii].stratum->dim) continue;
            int inside = 0;
            for (const Vec& p : strata[ii].stratum->seeds)
                if (in_closure_of(*strata[jj].numerics, p, seed + 41 * jj + 3 * ii,
                                  params.refine.check.project()))
                    ++inside;
            if (inside == static_cast<int>(strata[ii].stratum->seeds.size()) && inside > 0)
                cert.frontier.emplace_back(strata[jj].stratum->id, strata[ii].stratum->id);
            else if (inside > 0) {
                cert.notes.push_back("frontier condition unresolved for pair (" +
                                     strata[jj].stratum->id + ", " + strata[ii].stratum->id +
                                     ")");
                any_inconclusive = true;
            }
        }

    // Partition axiom on a sample cloud.
    {
        Stratum whole;
        whole.id = "__cloud__";
        whole.carrier = v;
        StratumNumerics wn(whole);
        std::vector<Vec> cloud = sample_box(wn, params.cloud_samples, params.box_radius,
                                            seed + 997, Exec::Parallel,
                                            params.refine.check.project());
        int orphan = 0, multi = 0;
        for (const Vec& p : cloud) {
            int hits = 0;
            for (const auto& rt : strata) {
                if (rt.record.kind != "filtration") continue;
                if (stratum_contains(*rt.numerics, p, walk)) ++hits;
            }
            if (hits == 0) ++orphan;
            if (hits > 1) ++multi;
        }
        if (orphan > 0 || multi > 0) {
            cert.status = CertStatus::Refuted;
            cert.notes.push_back("partition axiom failed on the sample cloud (" +
                                 std::to_string(orphan) + " orphan, " + std::to_string(multi) +
                                 " multiply covered)");
        }
    }

    for (const auto& rt : strata) cert.strata.push_back(rt.record);
    if (cert.status != CertStatus::Refuted) {
        if (any_irregular)
            cert.status = CertStatus::Incomplete;
        else if (any_inconclusive)
            cert.status = CertStatus::Incomplete;
        else
            cert.status = CertStatus::Certified;
    }
    return cert;
}

CertifyResult certify(const StratificationCertificate& cert, const Semivariety& v,
                      const StratifyParams& params, std::uint64_t fresh_seed) {
    CertifyResult out;
    WalkOptions walk = params.refine.check.walk();

    std::vector<RuntimeStratum> strata;
    for (const auto& rec : cert.strata) strata.push_back(make_runtime(rec));

    // Membership partition on a fresh random cloud.
    {
        Stratum whole;
        whole.id = "__certify_cloud__";
        whole.carrier = v;
        StratumNumerics wn(whole);
        std::vector<Vec> cloud = sample_box(wn, params.cloud_samples, params.box_radius,
                                            fresh_seed + 1, Exec::Parallel,
                                            params.refine.check.project());
        out.cloud_points = static_cast<int>(cloud.size());
        for (const Vec& p : cloud) {
            int hits = 0;
            for (const auto& rt : strata) {
                if (rt.record.kind != "filtration") continue;
                if (stratum_contains(*rt.numerics, p, walk)) ++hits;
            }
            if (hits == 0) ++out.orphan_points;
            if (hits > 1) ++out.multi_points;
        }
        if (out.orphan_points > 0 || out.multi_points > 0)
            out.failures.push_back("partition failure: " + std::to_string(out.orphan_points) +
                                   " orphan / " + std::to_string(out.multi_points) +
                                   " multiply covered cloud points");
    }

    // Sampled frontier condition must match the recorded relation exactly.
    for (std::size_t jj = 0; jj < strata.size(); ++jj) {
        for (std::size_t ii = 0; ii < strata.size(); ++ii) {
            if (jj == ii || strata[jj].stratum->dim <= strata[ii].stratum->dim) continue;
            if (strata[jj].record.kind != "filtration" || strata[ii].record.kind != "filtration")
                continue;
            bool edge = false;
            for (const auto& [a, b] : cert.frontier)
                if (a == strata[jj].stratum->id && b == strata[ii].stratum->id) edge = true;
            int inside = 0, total = 0;
            for (const Vec& p : strata[ii].stratum->seeds) {
                ++total;
                if (in_closure_of(*strata[jj].numerics, p, fresh_seed + 11 * jj + 3 * ii,
                                  params.refine.check.project()))
                    ++inside;
            }
            if (total == 0) continue;
            if (edge && inside < total)
                out.failures.push_back("frontier edge (" + strata[jj].stratum->id + ", " +
                                       strata[ii].stratum->id + ") not confirmed");
            if (!edge && inside > 0)
                out.failures.push_back("missing frontier edge (" + strata[jj].stratum->id +
                                       ", " + strata[ii].stratum->id + ")");
        }
    }

    // Re-run one fifth of the probed triples with the fresh seed.
    bool mismatch_refutes = false;
    CheckParams check = params.refine.check;
    check.exec = Exec::Serial;
    for (const auto& rec : cert.probes) {
        const RuntimeStratum* sj = nullptr;
        const RuntimeStratum* si = nullptr;
        for (const auto& rt : strata) {
            if (rt.stratum->id == rec.j_id) sj = &rt;
            if (rt.stratum->id == rec.i_id) si = &rt;
        }
        if (!sj || !si) {
            out.failures.push_back("probe references missing stratum " + rec.j_id + "/" +
                                   rec.i_id);
            continue;
        }
        for (std::size_t k = 0; k < rec.points.size(); k += 5) {
            ++out.reprobed;
            CheckParams p = check;
            p.seed = fresh_seed + 211ull * (k + 1);
            TripleVerdict vd = classify_triple(*sj->numerics, *si->numerics, rec.points[k], p);
            Verdict want = cert.mode == 'a' ? rec.a_status[k] : rec.b_status[k];
            Verdict got = cert.mode == 'a' ? vd.a.status : vd.b.status;
            if (got != want) {
                ++out.verdict_mismatches;
                if (got == Verdict::Inconclusive)
                    out.failures.push_back("reprobe inconclusive at a recorded point");
                else {
                    out.failures.push_back("reprobe verdict flip at a recorded point");
                    mismatch_refutes = true;
                }
            }
        }
    }

    if (out.orphan_points > 0 || out.multi_points > 0 || mismatch_refutes ||
        std::any_of(out.failures.begin(), out.failures.end(), [](const std::string& f) {
            return f.find("frontier") != std::string::npos;
        })) {
        out.status = CertStatus::Refuted;
    } else if (!out.failures.empty()) {
        out.status = CertStatus::Incomplete;
    } else {
        out.status = CertStatus::Certified;
    }
    return out;
}

}  // namespace strat
