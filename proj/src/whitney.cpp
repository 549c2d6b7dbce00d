#include "strat/whitney.hpp"

#include <algorithm>
#include <cmath>

namespace strat {

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Regular: return "regular";
        case Verdict::Irregular: return "irregular";
        default: return "inconclusive";
    }
}

namespace {

// Second-order deviation of the small stratum at the base point; zero for
// flat carriers. Used to restrict shell radii so the tangent-frame
// linearization of V_i is valid on every shell.
double curvature_bound(const StratumNumerics& i, const KuoFrame& frame,
                       const ProjectOptions& opt) {
    if (frame.s() == 0) return 0.0;
    const double delta = 1e-3;
    double kappa = 0.0;
    for (int t = 0; t < frame.s(); ++t) {
        Vec dir = frame.small_tangent.col(t);
        ProjectResult p1 = i.project(frame.base + delta * dir, opt);
        ProjectResult p2 = i.project(frame.base - delta * dir, opt);
        if (!p1.ok() || !p2.ok()) continue;
        double dev = (p1.point + p2.point - 2.0 * frame.base).norm();
        kappa = std::max(kappa, dev / (delta * delta));
    }
    return kappa;
}

double max_cluster_value(const std::vector<LimitCluster>& cs) {
    double v = 0.0;
    for (const auto& c : cs) v = std::max(v, c.value);
    return v;
}

// Direct condition-A detector: containment defect of T_x V_i in each limit
// plane cluster representative, squared spectral norm.
double direct_a_defect(const std::vector<LimitCluster>& plane_clusters, const KuoFrame& frame) {
    double worst = 0.0;
    for (const auto& c : plane_clusters) {
        if (!c.plane) continue;
        const Mat& b = c.plane->basis;
        Mat resid = frame.small_tangent - b * (b.transpose() * frame.small_tangent);
        double s = largest_singular_value(resid);
        worst = std::max(worst, s * s);
    }
    return worst;
}

struct SecantDefect {
    double value = 0.0;
    Vec secant;
};

// Direct condition-B detector data for one trace entry: worst normal defect
// over base, nearest-point and slow-sequence secant partners.
SecantDefect secant_defect(const StratumNumerics& i, const KuoFrame& frame,
                           const KuoTraceEntry& e, double slow_exponent,
                           const ProjectOptions& opt) {
    SecantDefect out;
    std::vector<Vec> partners;
    partners.push_back(frame.base);
    double r = (e.y - frame.base).norm();
    if (frame.s() > 0) {
        // Nearest-point partner x + pi_i^perp(y - x), Newton-corrected.
        Vec raw = frame.base + frame.tangential_project(e.y - frame.base);
        ProjectResult pr = i.project(raw, opt);
        if (pr.ok() && (pr.point - raw).norm() < 0.5 * r) partners.push_back(pr.point);
        // Mather slow partners at distance r^slow_exponent along the frame.
        double slow = std::pow(r, slow_exponent);
        for (int t = 0; t < frame.s(); ++t) {
            for (double sign : {1.0, -1.0}) {
                Vec cand = frame.base + sign * slow * frame.small_tangent.col(t);
                ProjectResult sp = i.project(cand, opt);
                if (sp.ok() && (sp.point - cand).norm() < 0.5 * slow)
                    partners.push_back(sp.point);
            }
        }
    }
    for (const Vec& p : partners) {
        Vec d = p - e.y;
        double n = d.norm();
        if (n < 1e-14) continue;
        Vec u = d / n;
        double defect = project_normal(e.tangent, u).squaredNorm();
        if (defect >= out.value) {
            out.value = defect;
            out.secant = u;
        }
    }
    return out;
}

Witness make_witness(char cond, const KuoTrace& trace, const LimitCluster& cluster,
                     const KuoFrame& frame, const std::string& note) {
    Witness w;
    w.condition = cond;
    w.cluster_value = cluster.value;
    w.note = note;
    int take = 0;
    double best = -1.0;
    const KuoTraceEntry* best_entry = nullptr;
    for (int idx : cluster.members) {
        const auto& e = trace.entries[idx];
        if (take < 8) {
            w.points.push_back(e.y);
            ++take;
        }
        double v = cond == 'a' ? e.pa : e.pb;
        if (v > best) {
            best = v;
            best_entry = &e;
        }
    }
    if (best_entry) {
        w.limit_plane = best_entry->tangent.tangent;
        Vec sec = frame.normal_project(best_entry->y - frame.base);
        double sn = sec.norm();
        if (sn > 1e-14) w.secant = Vec(sec / sn);
    }
    return w;
}

TripleVerdict classify_core(const StratumNumerics& j, const StratumNumerics& i, const Vec& x,
                            const CheckParams& params, bool want_a, bool want_b) {
    TripleVerdict out;
    out.j_id = j.stratum().id;
    out.i_id = i.stratum().id;
    out.x = x;

    if (membership(i.stratum().carrier, x, params.tol_on) != Membership::Inside) {
        out.error = "x-not-on-small-stratum";
        return out;
    }
    if (i.stratum().component_restricted && !stratum_contains(i, x, params.walk())) {
        out.error = "x-not-on-small-stratum (component restriction)";
        return out;
    }

    KuoFrame frame;
    try {
        frame = kuo_frame(i, x, params.tol_rank, params.tol_on);
    } catch (const std::exception& ex) {
        out.error = std::string("small-stratum-frame: ") + ex.what();
        return out;
    }

    ShellSpec spec = params.shells;
    double kappa = curvature_bound(i, frame, params.project());
    if (kappa > 0.0) {
        double rmax = std::sqrt(params.tol_on / kappa);
        if (spec.r0 > rmax) {
            spec.r0 = rmax;
            out.a.note += "shell radii restricted by small-stratum curvature; ";
        }
    }

    out.trace = build_trace(j, frame, spec, params.seed, params.tol_rank, params.tol_on,
                            params.exec);
    out.populated_shells = out.trace.populated_shells();

    // Frontier test: the innermost shells must reach V_j.
    int inner = std::min(3, spec.n_shells);
    bool approach = false;
    for (const auto& e : out.trace.entries)
        if (e.shell >= spec.n_shells - inner) approach = true;
    if (!approach) {
        out.frontier_empty = true;
        out.error = "x-not-in-frontier";
        return out;
    }
    if (out.populated_shells < 3) {
        out.a.status = out.b.status = Verdict::Inconclusive;
        out.a.note += "insufficient-trace; ";
        out.b.note += "insufficient-trace; ";
        return out;
    }

    // Local components and per-entry assignment (frontier bookkeeping).
    ComponentOptions copts;
    copts.n_samples = params.component_samples;
    copts.walk = params.walk();
    std::vector<LocalComponent> comps =
        local_components(j, i, x, params.component_radius, params.seed, copts);
    out.n_components = static_cast<int>(comps.size());
    for (const auto& c : comps)
        if (c.essential) ++out.n_essential;
    std::vector<int> tail = out.trace.tail_indices();
    for (int idx : tail) {
        out.trace.entries[idx].component = assign_to_component(
            j, comps, out.trace.entries[idx].y, params.component_radius / 20.0, params.walk());
    }

    out.plane_clusters = limit_points(out.trace, TraceObservable::Planes,
                                      params.cluster_tol_planes);
    out.plane_cluster_count = static_cast<int>(out.plane_clusters.size());
    for (const auto& c : out.plane_clusters)
        out.plane_cluster_max_spread = std::max(out.plane_cluster_max_spread, c.spread);

    bool coverage = out.populated_shells >= params.min_shells;

    if (want_a) {
        out.kuo_clusters_a = limit_points(out.trace, TraceObservable::KuoA,
                                          params.cluster_tol_scalar);
        ConditionReport& a = out.a;
        a.kuo_cluster_count = static_cast<int>(out.kuo_clusters_a.size());
        a.kuo_max_cluster = max_cluster_value(out.kuo_clusters_a);
        a.direct_max_cluster = direct_a_defect(out.plane_clusters, frame);
        bool kuo_irr = a.kuo_max_cluster > params.tol_kuo;
        bool direct_irr = a.direct_max_cluster > params.tol_kuo;
        a.detectors_agree = kuo_irr == direct_irr;
        if (frame.s() == 0) a.note += "s=0 (containment vacuous); ";
        if (!a.detectors_agree) {
            a.status = Verdict::Inconclusive;
            a.note += "detector-disagreement; ";
        } else if (kuo_irr) {
            a.status = Verdict::Irregular;
            const LimitCluster* worst = nullptr;
            for (const auto& c : out.kuo_clusters_a)
                if (!worst || c.value > worst->value) worst = &c;
            a.witness = make_witness('a', out.trace, *worst, frame, "kuo_a limit cluster");
        } else if (coverage) {
            a.status = Verdict::Regular;
        } else {
            a.status = Verdict::Inconclusive;
            a.note += "low-shell-coverage; ";
        }
    }

    int degenerate = 0;
    for (const auto& e : out.trace.entries)
        if (e.degenerate_secant) ++degenerate;

    std::vector<double> secant_vals;
    std::vector<Vec> secant_dirs;
    if (want_b) {
        out.kuo_clusters_b = limit_points(out.trace, TraceObservable::KuoB,
                                          params.cluster_tol_scalar);
        ConditionReport& b = out.b;
        b.kuo_cluster_count = static_cast<int>(out.kuo_clusters_b.size());
        b.kuo_max_cluster = max_cluster_value(out.kuo_clusters_b);
        if (degenerate > 0)
            b.note += "degenerate-secant on " + std::to_string(degenerate) + " samples; ";

        for (int idx : tail) {
            SecantDefect sd =
                secant_defect(i, frame, out.trace.entries[idx], params.slow_exponent,
                              params.project());
            secant_vals.push_back(sd.value);
            secant_dirs.push_back(sd.secant);
        }
        auto sc = cluster_scalars(secant_vals, params.cluster_tol_scalar);
        for (const auto& c : sc) b.direct_max_cluster = std::max(b.direct_max_cluster, c.value);
        bool kuo_irr = b.kuo_max_cluster > params.tol_kuo;
        bool direct_irr = b.direct_max_cluster > params.tol_kuo;
        b.detectors_agree = kuo_irr == direct_irr;
        if (!b.detectors_agree) {
            b.status = Verdict::Inconclusive;
            b.note += "detector-disagreement; ";
        } else if (kuo_irr) {
            b.status = Verdict::Irregular;
            const LimitCluster* worst = nullptr;
            for (const auto& c : out.kuo_clusters_b)
                if (!worst || c.value > worst->value) worst = &c;
            b.witness = make_witness('b', out.trace, *worst, frame, "kuo_b limit cluster");
        } else if (coverage) {
            b.status = Verdict::Regular;
        } else {
            b.status = Verdict::Inconclusive;
            b.note += "low-shell-coverage; ";
        }
    }

    // Lemma 1: a-irregularity forces b-irregularity through the slow-sequence
    // construction; the a-witness is reused.
    if (want_a && want_b && out.a.status == Verdict::Irregular &&
        out.b.status != Verdict::Irregular) {
        out.b.status = Verdict::Irregular;
        if (out.a.witness) {
            out.b.witness = out.a.witness;
            out.b.witness->condition = 'b';
            out.b.witness->note += "; via slow-sequence from a-irregularity";
        }
        out.b.note += "forced by a-irregularity (slow sequences); ";
    }

    // Per-component and essential-only bookkeeping.
    for (int c = 0; c < static_cast<int>(comps.size()); ++c) {
        ComponentReport rep;
        rep.essential = comps[c].essential;
        rep.n_members = static_cast<int>(comps[c].members.size());
        for (int idx : tail) {
            const auto& e = out.trace.entries[idx];
            if (e.component != c) continue;
            ++rep.n_trace_entries;
            rep.kuo_a_max = std::max(rep.kuo_a_max, e.pa);
            if (!e.degenerate_secant) rep.kuo_b_max = std::max(rep.kuo_b_max, e.pb);
        }
        if (rep.n_trace_entries >= 3) {
            rep.a_status = rep.kuo_a_max > params.tol_kuo ? Verdict::Irregular : Verdict::Regular;
            rep.b_status = rep.kuo_b_max > params.tol_kuo ? Verdict::Irregular : Verdict::Regular;
        }
        out.components.push_back(rep);
    }
    {
        double ess_a = 0.0, ess_b = 0.0;
        int ess_entries = 0;
        for (int idx : tail) {
            const auto& e = out.trace.entries[idx];
            if (e.component < 0 || !comps[e.component].essential) continue;
            ++ess_entries;
            ess_a = std::max(ess_a, e.pa);
            if (!e.degenerate_secant) ess_b = std::max(ess_b, e.pb);
        }
        if (ess_entries >= 3) {
            out.essential_a = ess_a > params.tol_kuo ? Verdict::Irregular : Verdict::Regular;
            out.essential_b = ess_b > params.tol_kuo ? Verdict::Irregular : Verdict::Regular;
        }
    }
    return out;
}

}  // namespace

TripleVerdict check_condition_a(const StratumNumerics& j, const StratumNumerics& i,
                                const Vec& x, const CheckParams& params) {
    return classify_core(j, i, x, params, true, false);
}

TripleVerdict check_condition_b(const StratumNumerics& j, const StratumNumerics& i,
                                const Vec& x, const CheckParams& params) {
    return classify_core(j, i, x, params, false, true);
}

TripleVerdict classify_triple(const StratumNumerics& j, const StratumNumerics& i, const Vec& x,
                              const CheckParams& params) {
    return classify_core(j, i, x, params, true, true);
}

SingProbe probe_sing(const StratumNumerics& j, const StratumNumerics& i, const GridSpec& grid,
                     const CheckParams& params) {
    SingProbe out;
    KuoFrame frame = kuo_frame(i, grid.center, params.tol_rank, params.tol_on);
    const int s = frame.s();
    const int m = static_cast<int>(grid.center.size());
    out.grid_dim = s;
    out.grid_count = s == 0 ? 1 : grid.count;

    std::vector<Vec> lattice;
    std::vector<int> lattice_index;
    if (s == 0) {
        lattice.push_back(grid.center);
        lattice_index.push_back(0);
    } else {
        if (grid.count < 1) throw std::invalid_argument("probe_sing: empty grid");
        long total = 1;
        for (int t = 0; t < s; ++t) total *= grid.count;
        if (total > 400) throw std::invalid_argument("probe_sing: grid too large");
        double spacing = grid.count > 1 ? 2.0 * grid.extent / (grid.count - 1) : 0.0;
        std::vector<int> counter(s, 0);
        while (true) {
            Vec offset = Vec::Zero(m);
            int flat = 0, stride = 1;
            for (int t = 0; t < s; ++t) {
                offset += (counter[t] * spacing - grid.extent) * frame.small_tangent.col(t);
                flat += counter[t] * stride;
                stride *= grid.count;
            }
            Vec raw = grid.center + offset;
            ProjectResult pr = i.project(raw, params.project());
            double close = spacing > 0 ? 0.5 * spacing : 0.1;
            if (pr.ok() && (pr.point - raw).norm() < close &&
                on_stratum(i.stratum(), pr.point, params.tol_on)) {
                bool keep = true;
                if (i.stratum().component_restricted)
                    keep = stratum_contains(i, pr.point, params.walk());
                if (keep) {
                    lattice.push_back(pr.point);
                    lattice_index.push_back(flat);
                }
            }
            int t = 0;
            while (t < s && counter[t] == grid.count - 1) counter[t++] = 0;
            if (t == s) break;
            ++counter[t];
        }
    }
    if (lattice.empty()) throw std::invalid_argument("probe_sing: empty grid");

    std::vector<TripleVerdict> verdicts(lattice.size());
    CheckParams inner = params;
    inner.exec = Exec::Serial;
    for_each_index(params.exec, static_cast<int>(lattice.size()), [&](int k) {
        CheckParams p = inner;
        p.seed = inner.seed + 7919ull * static_cast<std::uint64_t>(lattice_index[k]);
        verdicts[k] = classify_triple(j, i, lattice[k], p);
    });

    int kept = 0, irr_a = 0, irr_b = 0;
    std::vector<bool> irregular_a_at, irregular_b_at;
    irregular_a_at.assign(lattice.size(), false);
    irregular_b_at.assign(lattice.size(), false);
    for (std::size_t k = 0; k < lattice.size(); ++k) {
        if (verdicts[k].frontier_empty) {
            ++out.dropped_not_in_frontier;
            continue;
        }
        out.points.push_back(lattice[k]);
        out.grid_index.push_back(lattice_index[k]);
        out.verdicts.push_back(verdicts[k]);
        ++kept;
        if (verdicts[k].a.status == Verdict::Irregular) {
            ++irr_a;
            irregular_a_at[k] = true;
        }
        if (verdicts[k].b.status == Verdict::Irregular) {
            ++irr_b;
            irregular_b_at[k] = true;
        }
    }
    if (kept > 0) {
        out.irregular_fraction_a = static_cast<double>(irr_a) / kept;
        out.irregular_fraction_b = static_cast<double>(irr_b) / kept;
    }

    // Positive-codimension heuristic: no full cell of the grid may be
    // irregular. Cells are unit lattice hypercubes.
    if (s >= 1 && grid.count >= 2) {
        std::vector<char> flag_a(static_cast<std::size_t>(std::pow(grid.count, s)), 0);
        std::vector<char> flag_b(flag_a.size(), 0);
        for (std::size_t k = 0; k < lattice.size(); ++k) {
            if (irregular_a_at[k]) flag_a[lattice_index[k]] = 1;
            if (irregular_b_at[k]) flag_b[lattice_index[k]] = 1;
        }
        std::vector<int> counter(s, 0);
        while (true) {
            bool cell_ok = true;
            for (int t = 0; t < s; ++t)
                if (counter[t] >= grid.count - 1) cell_ok = false;
            if (cell_ok) {
                bool all_a = true, all_b = true;
                for (int corner = 0; corner < (1 << s); ++corner) {
                    int flat = 0, stride = 1;
                    for (int t = 0; t < s; ++t) {
                        int c = counter[t] + ((corner >> t) & 1);
                        flat += c * stride;
                        stride *= grid.count;
                    }
                    if (!flag_a[flat]) all_a = false;
                    if (!flag_b[flat]) all_b = false;
                }
                if (all_a) out.codim_ok_a = false;
                if (all_b) out.codim_ok_b = false;
            }
            int t = 0;
            while (t < s && counter[t] == grid.count - 1) counter[t++] = 0;
            if (t == s) break;
            ++counter[t];
        }
    }
    return out;
}

}  // namespace strat
