#include "strat/semivariety.hpp"

#include <cmath>

namespace strat {

void BasicSet::validate() const {
    for (const auto& p : equations)
        if (p.num_vars() != ambient_dim)
            throw std::invalid_argument("equation variable count != ambient_dim");
    for (const auto& p : strict_inequalities)
        if (p.num_vars() != ambient_dim)
            throw std::invalid_argument("inequality variable count != ambient_dim");
}

void Semivariety::validate() const {
    for (const auto& piece : pieces) {
        if (piece.ambient_dim != ambient_dim)
            throw std::invalid_argument("piece ambient_dim mismatch");
        piece.validate();
    }
}

namespace {

std::span<const double> as_span(const Vec& p) {
    return std::span<const double>(p.data(), static_cast<std::size_t>(p.size()));
}

}  // namespace

Membership membership(const BasicSet& s, const Vec& point, double tol_on) {
    if (point.size() != s.ambient_dim)
        throw std::invalid_argument("membership point dimension mismatch");
    bool inside = true;
    bool excluded = false;
    for (const auto& f : s.equations) {
        double v = f.eval(as_span(point));
        if (std::fabs(v) > tol_on) {
            inside = false;
            excluded = true;
            break;
        }
    }
    if (!excluded) {
        for (const auto& g : s.strict_inequalities) {
            double v = g.eval(as_span(point));
            if (v <= tol_on) inside = false;
            if (v < -tol_on) {
                excluded = true;
                break;
            }
        }
    }
    if (inside) return Membership::Inside;
    if (excluded) return Membership::Outside;
    return Membership::BoundaryUncertain;
}

Membership membership(const Semivariety& s, const Vec& point, double tol_on) {
    if (point.size() != s.ambient_dim)
        throw std::invalid_argument("membership point dimension mismatch");
    bool all_excluded = true;
    for (const auto& piece : s.pieces) {
        Membership m = membership(piece, point, tol_on);
        if (m == Membership::Inside) return Membership::Inside;
        if (m != Membership::Outside) all_excluded = false;
    }
    if (s.pieces.empty()) return Membership::Outside;
    return all_excluded ? Membership::Outside : Membership::BoundaryUncertain;
}

PolySystem::PolySystem(std::vector<Polynomial> equations)
    : equations_(std::move(equations)) {
    if (!equations_.empty()) {
        ambient_ = equations_.front().num_vars();
        partials_ = jacobian(equations_);
    }
}

Vec PolySystem::residual(const Vec& p) const {
    Vec r(size());
    for (int i = 0; i < size(); ++i) r[i] = equations_[i].eval(as_span(p));
    return r;
}

Mat PolySystem::jacobian_at(const Vec& p) const {
    Mat j(size(), ambient_);
    for (int i = 0; i < size(); ++i)
        for (int v = 0; v < ambient_; ++v) j(i, v) = partials_[i][v].eval(as_span(p));
    return j;
}

bool on_stratum(const Stratum& s, const Vec& p, double tol_on) {
    if (membership(s.carrier, p, tol_on) != Membership::Inside) return false;
    if (!s.excluded.trivially_empty() &&
        membership(s.excluded, p, tol_on) == Membership::Inside)
        return false;
    for (const auto& c : s.extra)
        if (std::fabs(c.value(p)) > c.membership_tol) return false;
    return true;
}

Semivariety singular_locus(const Semivariety& s, int d) {
    int m = s.ambient_dim;
    if (d < 0 || d > m) throw std::invalid_argument("singular_locus: dimension out of range");
    Semivariety out;
    out.ambient_dim = m;
    if (m == d) return out;  // full-dimensional presentation: nothing to cut
    int size = m - d;
    for (const auto& piece : s.pieces) {
        if (static_cast<int>(piece.equations.size()) < size)
            throw std::invalid_argument(
                "singular_locus: presentation has fewer equations than codimension");
        BasicSet locus = piece;
        PolyMatrix jac = jacobian(piece.equations);
        for (auto& minor : minors(jac, size)) locus.equations.push_back(std::move(minor));
        out.pieces.push_back(std::move(locus));
    }
    return out;
}

Semivariety semivariety_from_equations(int ambient_dim,
                                       std::vector<Polynomial> equations,
                                       std::vector<Polynomial> inequalities) {
    BasicSet piece;
    piece.ambient_dim = ambient_dim;
    piece.equations = std::move(equations);
    piece.strict_inequalities = std::move(inequalities);
    Semivariety s;
    s.ambient_dim = ambient_dim;
    s.pieces.push_back(std::move(piece));
    s.validate();
    return s;
}

}  // namespace strat
