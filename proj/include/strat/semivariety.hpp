#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "strat/linalg.hpp"
#include "strat/polynomial.hpp"

namespace strat {

// One basic set {f_1 = ... = f_k = 0, g_1 > 0, ..., g_l > 0}.
struct BasicSet {
    std::vector<Polynomial> equations;
    std::vector<Polynomial> strict_inequalities;
    int ambient_dim = 0;

    void validate() const;
};

// Finite union of basic sets in a fixed ambient space. An empty piece list
// describes the empty set.
struct Semivariety {
    std::vector<BasicSet> pieces;
    int ambient_dim = 0;

    bool trivially_empty() const { return pieces.empty(); }
    void validate() const;
};

enum class Membership { Inside, BoundaryUncertain, Outside };

// Inside iff some piece has all |f_i| <= tol_on and all g_j > +tol_on;
// outside iff every piece is violated by more than tol_on; points in the
// inequality margin are boundary-uncertain, never inside.
Membership membership(const BasicSet& s, const Vec& point, double tol_on);
Membership membership(const Semivariety& s, const Vec& point, double tol_on);

// Compiled view of an equation system: cached symbolic partials, cheap
// repeated numeric evaluation. Immutable after construction.
class PolySystem {
public:
    PolySystem() = default;
    explicit PolySystem(std::vector<Polynomial> equations);

    int ambient() const { return ambient_; }
    int size() const { return static_cast<int>(equations_.size()); }
    const std::vector<Polynomial>& equations() const { return equations_; }

    Vec residual(const Vec& p) const;
    Mat jacobian_at(const Vec& p) const;

private:
    int ambient_ = 0;
    std::vector<Polynomial> equations_;
    PolyMatrix partials_;
};

// Extra numeric equation rows for strata whose carrier has no closed form
// (sampled Kuo level sets). `value` is a residual targeted to zero.
struct NumericConstraint {
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> gradient;
    double membership_tol = 1e-8;
};

// A smooth semivariety piece of the stratification. When
// `component_restricted` is set, the stratum is the union of connected
// components of carrier \ excluded reachable from the seed points.
struct Stratum {
    std::string id;
    Semivariety carrier;
    Semivariety excluded;  // no pieces => nothing excluded
    int dim = -1;
    int excluded_dim = -1;  // dimension of the excluded set, -1 when unknown
    std::vector<Vec> seeds;
    bool component_restricted = false;
    std::vector<NumericConstraint> extra;

    int ambient() const { return carrier.ambient_dim; }
    bool has_extra() const { return !extra.empty(); }
};

// Carrier-and-exclusion membership; connectivity for component-restricted
// strata is handled by the components machinery.
bool on_stratum(const Stratum& s, const Vec& p, double tol_on);

// Per piece: original equations plus all (m-d) x (m-d) minors of the
// Jacobian, exactly. Inequalities are carried through unchanged.
Semivariety singular_locus(const Semivariety& s, int d);

Semivariety semivariety_from_equations(int ambient_dim,
                                       std::vector<Polynomial> equations,
                                       std::vector<Polynomial> inequalities = {});

}  // namespace strat
