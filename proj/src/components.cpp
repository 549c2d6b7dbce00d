#include "strat/components.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "strat/rng.hpp"

namespace strat {

double approx_distance_to(const Semivariety& s, const Vec& p, const ProjectOptions& opt) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& piece : s.pieces) {
        ProjectResult r = newton_project(piece, p, opt);
        if (!r.ok()) continue;
        best = std::min(best, (r.point - p).norm());
    }
    return best;
}

namespace {

double point_segment_distance(const Vec& p, const Vec& a, const Vec& b) {
    Vec d = b - a;
    double len2 = d.squaredNorm();
    if (len2 < 1e-30) return (p - a).norm();
    double t = std::clamp((p - a).dot(d) / len2, 0.0, 1.0);
    return (p - (a + t * d)).norm();
}

// Guards a step [a, b] against hopping over the excluded set: a crossing
// shows up as the segment passing much closer to the excluded set than both
// endpoints sit. Walking alongside or toward the set stays legal.
bool step_crosses_excluded(const Stratum& st, const Vec& a, const Vec& b,
                           const ProjectOptions& opt) {
    if (st.excluded.trivially_empty()) return false;
    std::vector<Vec> nearby;
    for (const Vec& probe : {a, Vec(0.5 * (a + b)), b}) {
        for (const auto& piece : st.excluded.pieces) {
            ProjectResult r = newton_project(piece, probe, opt);
            if (r.ok()) nearby.push_back(r.point);
        }
    }
    if (nearby.empty()) return false;
    double da = std::numeric_limits<double>::infinity();
    double db = da, seg = da;
    for (const Vec& e : nearby) {
        da = std::min(da, (e - a).norm());
        db = std::min(db, (e - b).norm());
        seg = std::min(seg, point_segment_distance(e, a, b));
    }
    double step = (b - a).norm();
    return seg < 0.5 * std::min(da, db) && seg < step;
}

}  // namespace

bool path_connected(const StratumNumerics& s, const Vec& a, const Vec& b, double step,
                    const WalkOptions& opt) {
    if (step <= 0) throw std::invalid_argument("path_connected: step must be positive");
    if (!on_stratum(s.stratum(), a, opt.tol_on) || !on_stratum(s.stratum(), b, opt.tol_on))
        return false;
    TangentResult prev_t = stratum_tangent(s, a, opt.tol_rank, opt.tol_on);
    if (!prev_t.ok) return false;
    Vec cur = a;
    double dist = (b - cur).norm();
    if (dist <= 1.5 * step)
        return !step_crosses_excluded(s.stratum(), a, b, opt.project);
    int stalls = 0;
    for (int i = 0; i < opt.max_steps; ++i) {
        if (dist <= 1.5 * step) return true;
        Vec dir = (b - cur) / dist;
        Vec target = cur + step * dir;
        ProjectResult pr = s.project(target, opt.project);
        if (!pr.ok()) return false;
        if ((pr.point - target).norm() > 2.0 * step) return false;
        if ((pr.point - cur).norm() > 3.0 * step) return false;
        if (step_crosses_excluded(s.stratum(), cur, pr.point, opt.project)) return false;
        TangentResult t = stratum_tangent(s, pr.point, opt.tol_rank, opt.tol_on);
        if (!t.ok) return false;
        if (grass_dist(prev_t.sample.tangent, t.sample.tangent) >= 0.5) return false;
        double new_dist = (b - pr.point).norm();
        if (new_dist > dist - 0.25 * step) {
            if (++stalls > 8) return false;
        } else {
            stalls = 0;
        }
        cur = pr.point;
        prev_t = t;
        dist = new_dist;
    }
    return false;
}

bool walk_reaches(const StratumNumerics& s, const Vec& from, const Vec& target, double arrive,
                  const WalkOptions& opt) {
    if (!on_stratum(s.stratum(), from, opt.tol_on)) return false;
    TangentResult prev_t = stratum_tangent(s, from, opt.tol_rank, opt.tol_on);
    if (!prev_t.ok) return false;
    Vec cur = from;
    double dist = (target - cur).norm();
    double step = std::max(dist / 4.0, arrive / 4.0);
    int stalls = 0;
    for (int i = 0; i < opt.max_steps; ++i) {
        if (dist <= arrive) return true;
        Vec dir = (target - cur) / dist;
        Vec probe = cur + std::min(step, dist) * dir;
        ProjectResult pr = s.project(probe, opt.project);
        bool progressed = false;
        if (pr.ok() && (pr.point - cur).norm() < 4.0 * step &&
            !step_crosses_excluded(s.stratum(), cur, pr.point, opt.project)) {
            TangentResult t = stratum_tangent(s, pr.point, opt.tol_rank, opt.tol_on);
            if (t.ok && grass_dist(prev_t.sample.tangent, t.sample.tangent) < 0.5) {
                double nd = (target - pr.point).norm();
                if (nd < dist - 0.1 * step) {
                    cur = pr.point;
                    prev_t = t;
                    dist = nd;
                    progressed = true;
                }
            }
        }
        if (!progressed) {
            step *= 0.5;
            if (step < arrive / 8.0 && ++stalls > 4) return false;
        }
    }
    return dist <= arrive;
}

bool stratum_contains(const StratumNumerics& s, const Vec& p, const WalkOptions& opt) {
    if (!on_stratum(s.stratum(), p, opt.tol_on)) return false;
    const Stratum& st = s.stratum();
    if (!st.component_restricted) return true;
    for (const Vec& seed : st.seeds) {
        double dist = (seed - p).norm();
        if (dist < 1e-9) return true;
        double step = std::clamp(dist / 20.0, 1e-4, 0.25);
        if (path_connected(s, p, seed, step, opt)) return true;
    }
    return false;
}

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

// Directed on-stratum walk coverage: the component reaches x' when a walk
// from one of its nearest members gets within `arrive` of x'.
bool component_covers(const StratumNumerics& j, const std::vector<Vec>& members,
                      const Vec& xprime, double arrive, const WalkOptions& opt) {
    std::vector<int> order(members.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return (members[a] - xprime).norm() < (members[b] - xprime).norm();
    });
    int tries = std::min<int>(3, static_cast<int>(order.size()));
    for (int t = 0; t < tries; ++t)
        if (walk_reaches(j, members[order[t]], xprime, arrive, opt)) return true;
    return false;
}

}  // namespace

std::vector<LocalComponent> local_components(const StratumNumerics& j,
                                             const StratumNumerics& i_small, const Vec& x,
                                             double radius, std::uint64_t seed,
                                             const ComponentOptions& opt) {
    if (radius <= 0) throw std::invalid_argument("local_components: radius must be positive");
    const int m = j.ambient();
    const double step = radius / 20.0;
    const std::uint64_t salt = stratum_salt(j.stratum());

    std::vector<Vec> samples;
    for (int i = 0; i < opt.n_samples; ++i) {
        for (int attempt = 0; attempt < 4; ++attempt) {
            Rng rng = Rng::stream(seed, {Rng::kComponentSample, salt,
                                         static_cast<std::uint64_t>(i),
                                         static_cast<std::uint64_t>(attempt)});
            Vec start = x + radius * rng.in_ball(m);
            ProjectResult pr = j.project(start, opt.walk.project);
            if (!pr.ok()) continue;
            if ((pr.point - x).norm() > radius) continue;
            if (!on_stratum(j.stratum(), pr.point, opt.walk.tol_on)) continue;
            samples.push_back(pr.point);
            break;
        }
    }
    std::sort(samples.begin(), samples.end(),
              [](const Vec& a, const Vec& b) { return lex_less(a, b); });
    samples.erase(std::unique(samples.begin(), samples.end(),
                              [](const Vec& a, const Vec& b) {
                                  return (a - b).cwiseAbs().maxCoeff() < 1e-10;
                              }),
                  samples.end());
    if (samples.empty()) return {};

    const int n = static_cast<int>(samples.size());
    UnionFind uf(n);
    for (int a = 0; a < n; ++a) {
        std::vector<int> order;
        for (int b = 0; b < n; ++b)
            if (b != a) order.push_back(b);
        std::sort(order.begin(), order.end(), [&](int p, int q) {
            return (samples[p] - samples[a]).norm() < (samples[q] - samples[a]).norm();
        });
        int linked = 0;
        for (int b : order) {
            if (linked >= opt.link_neighbors) break;
            if (uf.find(a) == uf.find(b)) {
                ++linked;
                continue;
            }
            if (path_connected(j, samples[a], samples[b], step, opt.walk)) uf.unite(a, b);
            ++linked;
        }
    }

    std::vector<LocalComponent> comps;
    std::vector<int> root_of(n);
    std::vector<int> roots;
    for (int i = 0; i < n; ++i) {
        root_of[i] = uf.find(i);
        if (std::find(roots.begin(), roots.end(), root_of[i]) == roots.end())
            roots.push_back(root_of[i]);
    }
    for (int r : roots) {
        LocalComponent c;
        c.base_point = x;
        c.radius = radius;
        for (int i = 0; i < n; ++i)
            if (root_of[i] == r) c.members.push_back(samples[i]);
        comps.push_back(std::move(c));
    }
    std::sort(comps.begin(), comps.end(), [](const LocalComponent& a, const LocalComponent& b) {
        return lex_less(a.members.front(), b.members.front());
    });

    // Essentiality: the component closure must reach every grid point of the
    // small stratum around x at resolution radius / 10.
    const double h = radius / 10.0;
    std::vector<Vec> grid;
    grid.push_back(x);
    TangentResult frame = stratum_tangent(i_small, x, opt.walk.tol_rank, opt.walk.tol_on);
    if (frame.ok && frame.sample.tangent.dim() > 0) {
        const Mat& e = frame.sample.tangent.basis;
        int s_dim = static_cast<int>(e.cols());
        std::vector<int> counter(s_dim, -opt.grid_half);
        while (true) {
            Vec offset = Vec::Zero(m);
            bool origin = true;
            for (int t = 0; t < s_dim; ++t) {
                if (counter[t] != 0) origin = false;
                offset += counter[t] * h * e.col(t);
            }
            if (!origin && offset.norm() <= radius / 2.0 &&
                static_cast<int>(grid.size()) < 200) {
                ProjectResult pr = i_small.project(x + offset, opt.walk.project);
                if (pr.ok() && (pr.point - x - offset).norm() < h) grid.push_back(pr.point);
            }
            int t = 0;
            while (t < s_dim && counter[t] == opt.grid_half) counter[t++] = -opt.grid_half;
            if (t == s_dim) break;
            ++counter[t];
        }
    }
    for (auto& c : comps) {
        c.essential = true;
        for (const Vec& gp : grid) {
            if (!component_covers(j, c.members, gp, h / 2.0, opt.walk)) {
                c.essential = false;
                break;
            }
        }
    }
    return comps;
}

int assign_to_component(const StratumNumerics& j, const std::vector<LocalComponent>& comps,
                        const Vec& p, double step, const WalkOptions& opt) {
    struct Cand {
        double dist;
        int comp;
        const Vec* member;
    };
    std::vector<Cand> cands;
    for (int c = 0; c < static_cast<int>(comps.size()); ++c)
        for (const Vec& mpt : comps[c].members)
            cands.push_back({(mpt - p).norm(), c, &mpt});
    std::sort(cands.begin(), cands.end(),
              [](const Cand& a, const Cand& b) { return a.dist < b.dist; });
    int tries = static_cast<int>(std::min<std::size_t>(5, cands.size()));
    for (int t = 0; t < tries; ++t) {
        if (cands[t].dist < 1e-10) return cands[t].comp;
        double s = std::max(step, cands[t].dist / 20.0);
        if (path_connected(j, p, *cands[t].member, s, opt)) return cands[t].comp;
    }
    return -1;
}

}  // namespace strat
