#include "strat/kuo.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace strat {

KuoFrame kuo_frame(const StratumNumerics& i_small, const Vec& x, double tol_rank,
                   double tol_on) {
    TangentResult t = stratum_tangent(i_small, x, tol_rank, tol_on);
    if (!t.ok) throw std::runtime_error("kuo_frame: " + t.error);
    return KuoFrame{x, t.sample.tangent.basis};
}

double kuo_a(const KuoFrame& frame, const TangentSample& t) {
    double sum = 0.0;
    for (int k = 0; k < frame.s(); ++k)
        sum += project_normal(t, frame.small_tangent.col(k)).squaredNorm();
    return sum;
}

KuoBValue kuo_b(const KuoFrame& frame, const TangentSample& t, double tol_on) {
    KuoBValue out;
    out.value = kuo_a(frame, t);
    Vec d = t.point - frame.base;
    double dist = d.norm();
    if (dist <= 0.0) throw std::invalid_argument("kuo_b: sample coincides with the base point");
    Vec sec = frame.normal_project(d);
    double sn = sec.norm();
    if (sn < tol_on * dist) {
        out.degenerate_secant = true;
        return out;
    }
    out.value += project_normal(t, Vec(sec / sn)).squaredNorm();
    return out;
}

int KuoTrace::populated_shells() const {
    std::set<int> shells;
    for (const auto& e : entries) shells.insert(e.shell);
    return static_cast<int>(shells.size());
}

std::vector<int> KuoTrace::tail_indices() const {
    std::set<int> shells;
    for (const auto& e : entries) shells.insert(e.shell);
    std::vector<int> ordered(shells.begin(), shells.end());
    int keep = (static_cast<int>(ordered.size()) + 1) / 2;
    std::set<int> tail(ordered.end() - keep, ordered.end());
    std::vector<int> idx;
    for (int i = 0; i < static_cast<int>(entries.size()); ++i)
        if (tail.count(entries[i].shell)) idx.push_back(i);
    return idx;
}

KuoTrace build_trace(const StratumNumerics& j, const KuoFrame& frame, const ShellSpec& spec,
                     std::uint64_t seed, double tol_rank, double tol_on, Exec exec) {
    KuoTrace trace;
    trace.base = frame.base;
    for (int k = 0; k < spec.n_shells; ++k)
        trace.shell_radii.push_back(spec.r0 * std::pow(spec.gamma, k));
    auto shells = sample_shells(j, frame.base, spec, seed, exec);
    for (int k = 0; k < spec.n_shells; ++k) {
        for (const Vec& y : shells[k]) {
            TangentResult t = stratum_tangent(j, y, tol_rank, tol_on);
            if (!t.ok) {
                ++trace.tangent_failures;
                continue;
            }
            KuoTraceEntry e;
            e.shell = k;
            e.shell_radius = trace.shell_radii[k];
            e.y = y;
            e.tangent = t.sample;
            e.pa = kuo_a(frame, t.sample);
            KuoBValue b = kuo_b(frame, t.sample, tol_on);
            e.pb = b.value;
            e.degenerate_secant = b.degenerate_secant;
            trace.entries.push_back(std::move(e));
        }
    }
    return trace;
}

namespace {

struct ClusterSet {
    std::vector<std::vector<int>> groups;  // member positions
};

// Single linkage with threshold; then keep merging until clusters are
// separated by more than twice the tolerance.
ClusterSet single_linkage(const std::vector<std::vector<double>>& dist, double tol) {
    const int n = static_cast<int>(dist.size());
    ClusterSet cs;
    for (int i = 0; i < n; ++i) cs.groups.push_back({i});
    auto link = [&](const std::vector<int>& a, const std::vector<int>& b) {
        double best = std::numeric_limits<double>::infinity();
        for (int p : a)
            for (int q : b) best = std::min(best, dist[p][q]);
        return best;
    };
    for (double threshold : {tol, 2.0 * tol}) {
        bool merged = true;
        while (merged && cs.groups.size() > 1) {
            merged = false;
            double best = std::numeric_limits<double>::infinity();
            std::size_t bi = 0, bj = 0;
            for (std::size_t i = 0; i < cs.groups.size(); ++i)
                for (std::size_t j = i + 1; j < cs.groups.size(); ++j) {
                    double d = link(cs.groups[i], cs.groups[j]);
                    if (d < best) {
                        best = d;
                        bi = i;
                        bj = j;
                    }
                }
            if (best <= threshold) {
                auto& gi = cs.groups[bi];
                gi.insert(gi.end(), cs.groups[bj].begin(), cs.groups[bj].end());
                cs.groups.erase(cs.groups.begin() + bj);
                merged = true;
            }
        }
    }
    return cs;
}

}  // namespace

std::vector<ScalarCluster> cluster_scalars(const std::vector<double>& values, double tol) {
    const int n = static_cast<int>(values.size());
    if (n == 0) return {};
    std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            dist[i][j] = dist[j][i] = std::fabs(values[i] - values[j]);
    ClusterSet cs = single_linkage(dist, tol);
    std::vector<ScalarCluster> out;
    for (const auto& g : cs.groups) {
        ScalarCluster c;
        c.members = g;
        std::sort(c.members.begin(), c.members.end());
        double sum = 0.0;
        for (int p : g) sum += values[p];
        c.value = sum / static_cast<double>(g.size());
        for (std::size_t a = 0; a < g.size(); ++a)
            for (std::size_t b = a + 1; b < g.size(); ++b)
                c.spread = std::max(c.spread, dist[g[a]][g[b]]);
        out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end(),
              [](const ScalarCluster& a, const ScalarCluster& b) { return a.value < b.value; });
    return out;
}

std::vector<LimitCluster> limit_points(const KuoTrace& trace, TraceObservable what,
                                       double cluster_tol) {
    if (trace.populated_shells() < 3)
        throw InsufficientTraceError("limit_points: need >= 3 populated shells, have " +
                                     std::to_string(trace.populated_shells()));
    std::vector<int> tail = trace.tail_indices();
    if (what == TraceObservable::KuoB) {
        tail.erase(std::remove_if(tail.begin(), tail.end(),
                                  [&](int i) { return trace.entries[i].degenerate_secant; }),
                   tail.end());
    }
    if (tail.empty()) return {};

    const int n = static_cast<int>(tail.size());
    std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
    auto scalar_of = [&](int i) {
        const auto& e = trace.entries[tail[i]];
        return what == TraceObservable::KuoA ? e.pa : e.pb;
    };
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double d;
            if (what == TraceObservable::Planes)
                d = grass_dist(trace.entries[tail[i]].tangent.tangent,
                               trace.entries[tail[j]].tangent.tangent);
            else
                d = std::fabs(scalar_of(i) - scalar_of(j));
            dist[i][j] = dist[j][i] = d;
        }
    }
    ClusterSet cs = single_linkage(dist, cluster_tol);

    std::vector<LimitCluster> out;
    for (const auto& g : cs.groups) {
        LimitCluster c;
        for (int p : g) c.members.push_back(tail[p]);
        std::sort(c.members.begin(), c.members.end());
        for (std::size_t a = 0; a < g.size(); ++a)
            for (std::size_t b = a + 1; b < g.size(); ++b)
                c.spread = std::max(c.spread, dist[g[a]][g[b]]);
        if (what == TraceObservable::Planes) {
            // Medoid representative: member minimizing the max distance.
            int best = g.front();
            double best_score = std::numeric_limits<double>::infinity();
            for (int p : g) {
                double score = 0.0;
                for (int q : g) score = std::max(score, dist[p][q]);
                if (score < best_score) {
                    best_score = score;
                    best = p;
                }
            }
            c.plane = trace.entries[tail[best]].tangent.tangent;
            c.value = best_score;
        } else {
            double sum = 0.0;
            for (std::size_t a = 0; a < g.size(); ++a) sum += scalar_of(g[a]);
            c.value = sum / static_cast<double>(g.size());
        }
        out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end(), [&](const LimitCluster& a, const LimitCluster& b) {
        if (what != TraceObservable::Planes) return a.value < b.value;
        return a.members.front() < b.members.front();
    });
    return out;
}

}  // namespace strat
