#pragma once

#include <cstdint>

#include "strat/kuo.hpp"

namespace strat {

enum class Verdict { Regular, Irregular, Inconclusive };

const char* verdict_name(Verdict v);

struct CheckParams {
    ShellSpec shells;
    double tol_on = 1e-9;
    double tol_res = 1e-12;
    double tol_rank = 1e-8;
    double tol_kuo = 1e-6;
    double tol_det = 1e-10;
    double tol_grass = 1e-6;
    double cluster_tol_planes = 0.05;
    double cluster_tol_scalar = 0.02;
    int min_shells = 6;
    double slow_exponent = 0.5;
    double component_radius = 0.3;
    int component_samples = 48;
    std::uint64_t seed = 0;
    Exec exec = Exec::Parallel;

    ProjectOptions project() const {
        ProjectOptions p;
        p.tol_res = tol_res;
        p.tol_rank = tol_rank;
        p.tol_on = tol_on;
        return p;
    }
    WalkOptions walk() const {
        WalkOptions w;
        w.tol_on = tol_on;
        w.tol_rank = tol_rank;
        w.project = project();
        return w;
    }
};

// Replayable irregularity evidence: tail samples whose Kuo values stay above
// the threshold, with the limiting plane and (for b) the offending secant.
struct Witness {
    char condition = 'a';
    double cluster_value = 0.0;
    std::vector<Vec> points;
    std::optional<Plane> limit_plane;
    std::optional<Vec> secant;
    std::string note;
};

struct ConditionReport {
    Verdict status = Verdict::Inconclusive;
    double kuo_max_cluster = 0.0;     // largest Kuo limit-cluster representative
    double direct_max_cluster = 0.0;  // independent detector (containment/secants)
    int kuo_cluster_count = 0;
    bool detectors_agree = true;
    std::optional<Witness> witness;
    std::string note;
};

struct ComponentReport {
    bool essential = false;
    int n_members = 0;
    int n_trace_entries = 0;
    Verdict a_status = Verdict::Inconclusive;
    Verdict b_status = Verdict::Inconclusive;
    double kuo_a_max = 0.0;
    double kuo_b_max = 0.0;
};

struct TripleVerdict {
    std::string j_id, i_id;
    Vec x;
    std::string error;  // nonempty on precondition failure (x-not-in-frontier, ...)
    bool frontier_empty = false;
    ConditionReport a, b;
    int populated_shells = 0;
    int plane_cluster_count = 0;
    double plane_cluster_max_spread = 0.0;
    int n_components = 0;
    int n_essential = 0;
    std::vector<ComponentReport> components;
    // Essential-only sub-verdicts (frontier bookkeeping; the headline verdict
    // covers every approach to x).
    Verdict essential_a = Verdict::Inconclusive;
    Verdict essential_b = Verdict::Inconclusive;
    std::vector<LimitCluster> kuo_clusters_a, kuo_clusters_b, plane_clusters;
    KuoTrace trace;

    bool ok() const { return error.empty(); }
};

// Condition (A): limit tangent planes along shell traces must contain
// T_x V_i; detected as a nonzero Kuo P^a limit cluster, cross-checked by the
// direct containment defect. Definitive only when both detectors agree and
// the shell coverage suffices.
TripleVerdict check_condition_a(const StratumNumerics& j, const StratumNumerics& i,
                                const Vec& x, const CheckParams& params);

// Condition (B): adds the secant detector (base secants, nearest-point
// secants and Mather slow sequences paired at |y - x|^slow_exponent).
TripleVerdict check_condition_b(const StratumNumerics& j, const StratumNumerics& i,
                                const Vec& x, const CheckParams& params);

// Both conditions on one shared trace; enforces a-irregular => b-irregular
// by reusing the a-witness through the slow-sequence construction.
TripleVerdict classify_triple(const StratumNumerics& j, const StratumNumerics& i, const Vec& x,
                              const CheckParams& params);

struct GridSpec {
    Vec center;
    double extent = 1.0;  // half-width along each tangent direction of V_i
    int count = 21;       // points per direction
};

struct SingProbe {
    std::vector<Vec> points;               // kept grid points (in the frontier)
    std::vector<TripleVerdict> verdicts;   // one per kept point
    int dropped_not_in_frontier = 0;
    double irregular_fraction_a = 0.0;
    double irregular_fraction_b = 0.0;
    bool codim_ok_a = true;  // no full grid cell of irregular points
    bool codim_ok_b = true;
    std::vector<int> grid_index;  // lattice index per kept point (flattened)
    int grid_count = 0;           // points per direction
    int grid_dim = 0;
};

// classify_triple on a tangent-frame grid of V_i around the center;
// reports irregular fractions and the positive-codimension cell heuristic.
SingProbe probe_sing(const StratumNumerics& j, const StratumNumerics& i, const GridSpec& grid,
                     const CheckParams& params);

}  // namespace strat
