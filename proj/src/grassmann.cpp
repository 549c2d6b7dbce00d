#include "strat/grassmann.hpp"

#include <cmath>

#include "strat/rng.hpp"

namespace strat {

namespace {

TangentResult tangent_from_jacobian(const Mat& jac, const Vec& y, double res_linf,
                                    int expected_dim, double tol_rank, double tol_on) {
    TangentResult out;
    const int m = static_cast<int>(y.size());
    if (res_linf > tol_on) {
        out.error = "residual-too-large";
        return out;
    }
    Eigen::JacobiSVD<Mat> svd(jac, Eigen::ComputeFullV);
    int rank = numerical_rank(svd, tol_rank);
    out.observed_rank = rank;
    int null_dim = m - rank;
    if (null_dim != expected_dim) {
        out.error = "rank-mismatch (observed tangent dimension " + std::to_string(null_dim) +
                    ", expected " + std::to_string(expected_dim) + ")";
        return out;
    }
    Mat v = svd.matrixV();
    out.ok = true;
    out.sample.point = y;
    out.sample.tangent = Plane{v.rightCols(null_dim)};
    out.sample.normal = Plane{v.leftCols(rank)};
    return out;
}

}  // namespace

TangentResult tangent_at(const PolySystem& system, const Vec& y, int expected_dim,
                         double tol_rank, double tol_on) {
    Vec r = system.residual(y);
    double linf = r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
    return tangent_from_jacobian(system.jacobian_at(y), y, linf, expected_dim, tol_rank, tol_on);
}

TangentResult stratum_tangent(const StratumNumerics& s, const Vec& y, double tol_rank,
                              double tol_on) {
    int best_piece = 0;
    double best_res = std::numeric_limits<double>::infinity();
    for (int k = 0; k < s.pieces(); ++k) {
        double r = s.stacked_residual(k, y).cwiseAbs().maxCoeff();
        if (k == 0 || r < best_res) {
            best_res = r;
            best_piece = k;
        }
    }
    int expected = s.stratum().dim;
    // Extra rows on top of a piece do not change the requested dimension:
    // the stratum's dim field already accounts for them.
    return tangent_from_jacobian(s.stacked_jacobian(best_piece, y), y, best_res, expected,
                                 tol_rank, tol_on);
}

TangentSample tangent_basis(const std::vector<Polynomial>& system, const Vec& y,
                            int expected_dim, double tol_rank, double tol_on) {
    PolySystem sys(system);
    TangentResult r = tangent_at(sys, y, expected_dim, tol_rank, tol_on);
    if (!r.ok) throw std::runtime_error("tangent_basis: " + r.error);
    return r.sample;
}

double grass_dist(const Plane& p, const Plane& q) {
    if (p.ambient() != q.ambient() || p.dim() != q.dim())
        throw std::invalid_argument("grass_dist: plane dimension mismatch");
    if (p.dim() == 0) return 0.0;
    double d = largest_singular_value(p.projector() - q.projector());
    return std::min(d, 1.0);
}

Vec project_normal(const TangentSample& t, const Vec& v) {
    const Mat& b = t.tangent.basis;
    if (b.cols() == 0) return v;
    return v - b * (b.transpose() * v);
}

namespace {

double frame_det(const OrientedPlane& t, const OrientedPlane& l) {
    Mat m(t.ambient(), t.dim() + l.dim());
    m.leftCols(t.dim()) = t.basis;
    m.rightCols(l.dim()) = l.basis;
    return m.determinant();
}

}  // namespace

bool separates(const OrientedPlane& l, const OrientedPlane& t0, const OrientedPlane& t1,
               double tol_det) {
    const int m = l.ambient();
    if (t0.ambient() != m || t1.ambient() != m || t0.dim() != t1.dim() ||
        t0.dim() + l.dim() != m)
        throw std::invalid_argument("separates: incompatible plane dimensions");
    double d0 = frame_det(t0, l);
    double d1 = frame_det(t1, l);
    if (std::fabs(d0) <= tol_det || std::fabs(d1) <= tol_det)
        throw NonTransversalError("separates: plane not transversal to an input plane");
    return (d0 > 0) != (d1 > 0);
}

std::optional<int> rolle_scan(const std::vector<TangentSample>& path, const OrientedPlane& l,
                              double tol_det) {
    if (path.empty()) return std::nullopt;
    const int k = path.front().tangent.dim();
    Mat prev = path.front().tangent.basis;
    double prev_det = 0.0;
    for (int i = 0; i < static_cast<int>(path.size()); ++i) {
        Mat cur = path[i].tangent.basis;
        if (i > 0) {
            double d = grass_dist(Plane{prev}, path[i].tangent);
            if (d >= 0.5)
                throw DiscontinuousPathError("rolle_scan: consecutive plane distance " +
                                             std::to_string(d));
            // Positive-determinant alignment transports the orientation.
            Mat transition = prev.transpose() * cur;
            if (transition.determinant() < 0) cur.col(k - 1) = -cur.col(k - 1);
        }
        double det = frame_det(OrientedPlane{cur}, l);
        if (std::fabs(det) < tol_det) return i;
        if (i > 0 && (det > 0) != (prev_det > 0)) return i;
        prev = cur;
        prev_det = det;
    }
    return std::nullopt;
}

OrientedPlane random_separating_plane(const OrientedPlane& t0, const OrientedPlane& t1,
                                      const std::vector<const StratumNumerics*>& avoid,
                                      int n_trials, std::uint64_t seed, double tol_det,
                                      double tol_grass, double tol_rank) {
    const int m = t0.ambient();
    const int k = t0.dim();
    if (grass_dist(t0.plane(), t1.plane()) <= tol_grass)
        throw std::invalid_argument("random_separating_plane: planes are not distinct");
    for (int trial = 0; trial < n_trials; ++trial) {
        Rng rng = Rng::stream(seed, {Rng::kSeparatingPlane, static_cast<std::uint64_t>(trial)});
        Mat frame(m, m - k);
        for (int c = 0; c < m - k; ++c) frame.col(c) = rng.gaussian_vector(m);
        OrientedPlane l{orthonormalize(frame)};
        bool sep;
        try {
            sep = separates(l, t0, t1, tol_det);
        } catch (const NonTransversalError&) {
            continue;
        }
        if (!sep) continue;
        bool transversal = true;
        for (const StratumNumerics* s : avoid) {
            for (const Vec& p : s->stratum().seeds) {
                TangentResult tr = stratum_tangent(*s, p, tol_rank);
                if (!tr.ok) {
                    transversal = false;
                    break;
                }
                Mat combined(m, tr.sample.tangent.dim() + l.dim());
                combined.leftCols(tr.sample.tangent.dim()) = tr.sample.tangent.basis;
                combined.rightCols(l.dim()) = l.basis;
                if (smallest_singular_value(combined) <= tol_det) {
                    transversal = false;
                    break;
                }
            }
            if (!transversal) break;
        }
        if (transversal) return l;
    }
    throw SeparatingPlaneError(
        "random_separating_plane: exhausted " + std::to_string(n_trials) + " trials", n_trials);
}

}  // namespace strat
