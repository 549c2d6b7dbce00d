#pragma once

#include <cstdint>
#include <optional>

#include "strat/components.hpp"

namespace strat {

// Local data of the small stratum at the base point: orthonormal tangent
// frame e_1..e_s of T_x V_i and the projection pair along/onto V_i.
struct KuoFrame {
    Vec base;          // x, taken as the origin of the projections
    Mat small_tangent;  // m x s orthonormal columns

    int ambient() const { return static_cast<int>(base.size()); }
    int s() const { return static_cast<int>(small_tangent.cols()); }
    // pi_i : orthogonal projection onto V_i^perp (along V_i).
    Vec normal_project(const Vec& v) const {
        return v - small_tangent * (small_tangent.transpose() * v);
    }
    // pi_i^perp : orthogonal projection onto V_i.
    Vec tangential_project(const Vec& v) const {
        return small_tangent * (small_tangent.transpose() * v);
    }
};

// Frame of the small stratum at x. For curved V_i this is the tangent frame
// at x; shell radii are restricted elsewhere so the linearization holds.
KuoFrame kuo_frame(const StratumNumerics& i_small, const Vec& x, double tol_rank = 1e-8,
                   double tol_on = 1e-9);

// P^a(y) = sum_t |pi_j(y, e_t)|^2, in [0, s].
double kuo_a(const KuoFrame& frame, const TangentSample& t);

struct KuoBValue {
    double value = 0.0;
    bool degenerate_secant = false;  // |pi_i(y - x)| below tolerance: term skipped
};

// P^b(y) = P^a(y) + |pi_j(y, pi_i(y - x)/|pi_i(y - x)|)|^2, in [0, s+1].
KuoBValue kuo_b(const KuoFrame& frame, const TangentSample& t, double tol_on = 1e-9);

struct KuoTraceEntry {
    int shell = 0;
    double shell_radius = 0.0;
    Vec y;
    TangentSample tangent;
    double pa = 0.0;
    double pb = 0.0;
    bool degenerate_secant = false;
    int component = -1;  // local component id, -1 when unassigned
};

struct KuoTrace {
    Vec base;
    std::vector<double> shell_radii;
    std::vector<KuoTraceEntry> entries;  // shell-major, lex within a shell
    int tangent_failures = 0;

    int populated_shells() const;
    // Indices of entries in the last ceil(half) of the populated shells.
    std::vector<int> tail_indices() const;
};

// Shell samples with tangent planes and Kuo values. Samples whose tangent
// computation fails (rank mismatch near deeper singularities) are dropped
// and counted.
KuoTrace build_trace(const StratumNumerics& j, const KuoFrame& frame, const ShellSpec& spec,
                     std::uint64_t seed, double tol_rank = 1e-8, double tol_on = 1e-9,
                     Exec exec = Exec::Parallel);

enum class TraceObservable { Planes, KuoA, KuoB };

struct LimitCluster {
    double value = 0.0;           // scalar representative (member mean)
    std::optional<Plane> plane;   // plane representative (medoid)
    std::vector<int> members;     // entry indices into the trace
    double spread = 0.0;          // max intra-cluster distance
};

struct InsufficientTraceError : std::runtime_error {
    explicit InsufficientTraceError(const std::string& msg) : std::runtime_error(msg) {}
};

// Single-linkage clustering of the tail of the trace; exactly one cluster
// means the limit is unique at the chosen tolerance. Degenerate-secant
// entries are excluded from KuoB clustering. Requires >= 3 populated shells.
std::vector<LimitCluster> limit_points(const KuoTrace& trace, TraceObservable what,
                                       double cluster_tol);

struct ScalarCluster {
    double value = 0.0;  // member mean
    std::vector<int> members;
    double spread = 0.0;
};

// Single-linkage clustering of plain scalars, sorted by representative.
std::vector<ScalarCluster> cluster_scalars(const std::vector<double>& values, double tol);

}  // namespace strat
