#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "strat/sampling.hpp"

namespace strat {

// k-dimensional linear subspace of R^m as an orthonormal basis. All
// operations are basis-independent (they act through the projector).
struct Plane {
    Mat basis;  // m x k, orthonormal columns

    int ambient() const { return static_cast<int>(basis.rows()); }
    int dim() const { return static_cast<int>(basis.cols()); }
    Mat projector() const { return basis * basis.transpose(); }

    static Plane from_span(const Mat& spanning_columns) {
        return Plane{orthonormalize(spanning_columns)};
    }
};

// Plane with a distinguished ordered basis; swapping two basis vectors
// flips the orientation.
struct OrientedPlane {
    Mat basis;  // m x k, orthonormal, order meaningful

    int ambient() const { return static_cast<int>(basis.rows()); }
    int dim() const { return static_cast<int>(basis.cols()); }
    Plane plane() const { return Plane{basis}; }
};

struct TangentSample {
    Vec point;
    Plane tangent;
    Plane normal;
};

struct TangentResult {
    bool ok = false;
    TangentSample sample;
    int observed_rank = -1;
    std::string error;
};

// Numerical null space of the Jacobian at y; fails with rank-mismatch when
// the null space dimension differs from expected_dim, or residual-too-large
// when y is not on the system.
TangentResult tangent_at(const PolySystem& system, const Vec& y, int expected_dim,
                         double tol_rank = 1e-8, double tol_on = 1e-9);

// Same, including any extra constraint rows of the stratum; picks the piece
// with smallest residual at y.
TangentResult stratum_tangent(const StratumNumerics& s, const Vec& y,
                              double tol_rank = 1e-8, double tol_on = 1e-9);

// Throwing wrapper around tangent_at.
TangentSample tangent_basis(const std::vector<Polynomial>& system, const Vec& y,
                            int expected_dim, double tol_rank = 1e-8,
                            double tol_on = 1e-9);

// Operator norm of the projector difference: the sine of the largest
// principal angle, in [0, 1].
double grass_dist(const Plane& p, const Plane& q);

// Component of v in the normal space of the sample's tangent plane.
Vec project_normal(const TangentSample& t, const Vec& v);

struct NonTransversalError : std::runtime_error {
    explicit NonTransversalError(const std::string& msg) : std::runtime_error(msg) {}
};

// True iff the orientations induced by t0 + l and t1 + l differ, i.e. the
// two frame determinants have opposite signs. Throws when l fails to be
// transversal to either plane.
bool separates(const OrientedPlane& l, const OrientedPlane& t0, const OrientedPlane& t1,
               double tol_det = 1e-10);

struct DiscontinuousPathError : std::runtime_error {
    explicit DiscontinuousPathError(const std::string& msg) : std::runtime_error(msg) {}
};

// Transports orientation along the path by positive-determinant alignment
// and returns the first index where det[tau_t | l] changes sign or falls
// below tol_det in absolute value.
std::optional<int> rolle_scan(const std::vector<TangentSample>& path, const OrientedPlane& l,
                              double tol_det = 1e-10);

struct SeparatingPlaneError : std::runtime_error {
    SeparatingPlaneError(const std::string& msg, int trials)
        : std::runtime_error(msg), trials_used(trials) {}
    int trials_used;
};

// Uniformly random orthonormal (m-k)-frames until one separates t0 and t1
// and is numerically transversal to every stratum in `avoid` at all of its
// seed points.
OrientedPlane random_separating_plane(const OrientedPlane& t0, const OrientedPlane& t1,
                                      const std::vector<const StratumNumerics*>& avoid,
                                      int n_trials, std::uint64_t seed,
                                      double tol_det = 1e-10, double tol_grass = 1e-6,
                                      double tol_rank = 1e-8);

}  // namespace strat
