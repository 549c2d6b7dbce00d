#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "corpus.hpp"
#include "strat/components.hpp"
#include "strat/filtration.hpp"
#include "strat/rng.hpp"

using namespace strat;
using namespace corpus;

TEST_CASE("membership: umbrella examples") {
    Semivariety umbrella = semivariety_from_equations(3, {p3("x^2 - z*y^2")});
    CHECK(membership(umbrella, v3(1, 1, 1), 1e-9) == Membership::Inside);
    CHECK(membership(umbrella, v3(0, 0, 5), 1e-9) == Membership::Inside);
    CHECK(membership(umbrella, v3(1, 0, 0), 1e-9) == Membership::Outside);
    CHECK_THROWS_AS(membership(umbrella, Vec::Zero(2), 1e-9), std::invalid_argument);
}

TEST_CASE("membership: inequality margin is boundary-uncertain, never inside") {
    Semivariety half = semivariety_from_equations(3, {p3("z")}, {p3("y")});
    CHECK(membership(half, v3(0, 0.5, 0), 1e-9) == Membership::Inside);
    CHECK(membership(half, v3(0, -0.5, 0), 1e-9) == Membership::Outside);
    CHECK(membership(half, v3(0, 0.0, 0), 1e-9) == Membership::BoundaryUncertain);
    CHECK(membership(half, v3(0, 5e-10, 0), 1e-9) == Membership::BoundaryUncertain);
}

TEST_CASE("property: enlarging tol_on never flips inside to outside") {
    Rng rng = Rng::stream(5, {Rng::kTest, 10});
    Semivariety s = semivariety_from_equations(3, {p3("x^2 + y^2 - z^2")}, {p3("z")});
    for (int k = 0; k < 300; ++k) {
        Vec p = 2.0 * rng.in_ball(3);
        double t1 = std::pow(10.0, rng.uniform(-12.0, -2.0));
        double t2 = t1 * rng.uniform(1.0, 100.0);
        if (membership(s, p, t1) == Membership::Inside)
            CHECK(membership(s, p, t2) != Membership::Outside);
    }
}

TEST_CASE("newton_project: cone examples") {
    BasicSet cone;
    cone.ambient_dim = 3;
    cone.equations = {p3("x^2 + y^2 - z^2")};

    ProjectOptions opt;
    ProjectResult r = newton_project(cone, v3(1.1, 0, 0.9), opt);
    REQUIRE(r.ok());
    CHECK(r.residual <= 1e-12);
    CHECK((r.point - v3(1, 0, 1)).norm() < 0.12);
    // Distance minimality relative to a grid search over the cone.
    double best = 1e9;
    for (int i = 0; i < 400; ++i) {
        double th = 2 * M_PI * i / 400.0;
        for (double rr = 0.5; rr < 1.6; rr += 0.01) {
            Vec q = v3(rr * std::cos(th), rr * std::sin(th), rr);
            best = std::min(best, (q - v3(1.1, 0, 0.9)).norm());
        }
    }
    CHECK((r.point - v3(1.1, 0, 0.9)).norm() <= best + 0.02);

    // A start on the variety is a fixed point.
    ProjectResult fixed = newton_project(cone, v3(3, 4, 5), opt);
    REQUIRE(fixed.ok());
    CHECK(fixed.iterations == 0);
    CHECK((fixed.point - v3(3, 4, 5)).norm() == 0.0);

    // The singular point is a solution; rank deficiency is tolerated.
    ProjectResult sing = newton_project(cone, v3(0, 0, 0), opt);
    REQUIRE(sing.ok());
    CHECK(sing.iterations == 0);
    CHECK(sing.point.norm() == 0.0);
}

TEST_CASE("newton_project: residual contract and inequality recheck") {
    BasicSet upper;
    upper.ambient_dim = 3;
    upper.equations = {p3("x^2 + y^2 - z^2")};
    upper.strict_inequalities = {p3("z")};
    ProjectResult bad = newton_project(upper, v3(0.9, 0.1, -1.0));
    CHECK(bad.status == ProjectStatus::InequalityViolated);

    Rng rng = Rng::stream(7, {Rng::kTest, 11});
    BasicSet cone;
    cone.ambient_dim = 3;
    cone.equations = {p3("x^2 + y^2 - z^2")};
    int okc = 0;
    for (int k = 0; k < 200; ++k) {
        ProjectResult r = newton_project(cone, Vec(2.0 * rng.in_ball(3)));
        if (r.ok()) {
            CHECK(r.residual <= 1e-12);  // hard assertion of the contract
            ++okc;
        }
    }
    CHECK(okc > 150);
}

TEST_CASE("sample_shells: plane, cone with aperture, umbrella sheets") {
    ShellSpec spec;
    spec.r0 = 0.4;
    spec.n_shells = 5;
    spec.probes_per_shell = 16;

    Stratum plane;
    plane.id = "zplane";
    plane.carrier = semivariety_from_equations(3, {p3("z")});
    plane.dim = 2;
    StratumNumerics pn(plane);
    auto shells = sample_shells(pn, v3(0, 0, 0), spec, 3);
    for (int k = 0; k < spec.n_shells; ++k) {
        CHECK(!shells[k].empty());
        for (const Vec& y : shells[k]) {
            CHECK(std::fabs(y[2]) <= 1e-12);
            double r = spec.r0 * std::pow(spec.gamma, k);
            CHECK(y.norm() >= 0.5 * r);
            CHECK(y.norm() <= 2.0 * r);
        }
    }

    // Cone-restricted probing.
    Stratum cone = cone_surface();
    StratumNumerics cn(cone);
    ShellSpec cone_spec = spec;
    cone_spec.cone = Cone{v3(0, 0, 1), 0.2};
    auto cshells = sample_shells(cn, v3(0, 0, 0), cone_spec, 3);
    int n_pts = 0;
    for (const auto& shell : cshells)
        for (const Vec& y : shell) {
            CHECK(y.dot(v3(0, 0, 1)) / y.norm() > 0.8);
            ++n_pts;
        }
    CHECK(n_pts > 0);

    // Umbrella shells populate both sheet signs and satisfy the equation.
    Stratum surf = umbrella_surface();
    StratumNumerics sn(surf);
    ShellSpec uspec;
    uspec.r0 = 0.2;
    uspec.n_shells = 6;
    uspec.probes_per_shell = 24;
    auto ushells = sample_shells(sn, v3(0, 0, 0), uspec, 3);
    bool pos = false, neg = false;
    int populated = 0;
    for (const auto& shell : ushells) {
        if (!shell.empty()) ++populated;
        for (const Vec& y : shell) {
            double pt[3] = {y[0], y[1], y[2]};
            CHECK(std::fabs(p3("x^2 - z*y^2").eval(std::span<const double>(pt, 3))) < 1e-10);
            if (y[0] > 0) pos = true;
            if (y[0] < 0) neg = true;
        }
    }
    CHECK(populated >= 5);
    CHECK(pos);
    CHECK(neg);

    // Determinism for a fixed seed.
    auto again = sample_shells(sn, v3(0, 0, 0), uspec, 3);
    REQUIRE(again.size() == ushells.size());
    for (std::size_t k = 0; k < again.size(); ++k) {
        REQUIRE(again[k].size() == ushells[k].size());
        for (std::size_t i = 0; i < again[k].size(); ++i)
            CHECK((again[k][i] - ushells[k][i]).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("estimate_dim: sphere, cone, line") {
    DimEstimate sphere = estimate_dim(sphere3(), 30, 5);
    CHECK(sphere.dim == 2);
    CHECK(!sphere.ambiguous);

    DimEstimate cone = estimate_dim(
        semivariety_from_equations(3, {p3("x^2 + y^2 - z^2")}, {p3("x^2 + y^2 + z^2")}), 30, 5);
    CHECK(cone.dim == 2);

    DimEstimate line = estimate_dim(semivariety_from_equations(3, {p3("x"), p3("y")}), 30, 5);
    CHECK(line.dim == 1);

    DimEstimate empty = estimate_dim(
        semivariety_from_equations(3, {p3("x^2 + y^2 + z^2 + 1")}), 30, 5);
    CHECK(empty.no_samples);
}

TEST_CASE("singular_locus: cone, umbrella, sphere") {
    // Cone: gradient vanishes only at the origin.
    Semivariety cone = semivariety_from_equations(3, {p3("x^2 + y^2 - z^2")});
    Semivariety clocus = singular_locus(cone, 2);
    REQUIRE(clocus.pieces.size() == 1);
    CHECK(clocus.pieces[0].equations.size() == 4);
    CHECK(membership(clocus, v3(0, 0, 0), 1e-9) == Membership::Inside);
    CHECK(membership(clocus, v3(1, 0, 1), 1e-9) == Membership::Outside);

    // Umbrella: the locus is exactly the z-axis. Verified symbolically by
    // substitution and by the independent solve (y = 0, x = 0, z free).
    Semivariety umbrella = semivariety_from_equations(3, {p3("x^2 - z*y^2")});
    Semivariety ulocus = singular_locus(umbrella, 2);
    REQUIRE(ulocus.pieces.size() == 1);
    for (const auto& eq : ulocus.pieces[0].equations) {
        Polynomial on_axis = eq.substitute(0, Rational(0)).substitute(1, Rational(0));
        CHECK(on_axis.is_zero());
    }
    bool forces_x = false, forces_y = false;
    for (const auto& eq : ulocus.pieces[0].equations) {
        if (eq == p3("2*x")) forces_x = true;
        if (eq == p3("-y^2")) forces_y = true;
    }
    CHECK(forces_x);
    CHECK(forces_y);
    CHECK(membership(ulocus, v3(0, 0, -2.3), 1e-9) == Membership::Inside);
    CHECK(membership(ulocus, v3(1, 1, 1), 1e-9) == Membership::Outside);

    // Sphere: empty locus.
    Semivariety slocus = singular_locus(sphere3(), 2);
    CHECK(probe_empty(slocus, 40, 2.0, 9));
}

TEST_CASE("property: regular samples are excluded from the singular locus") {
    Stratum surf = umbrella_surface();
    StratumNumerics sn(surf);
    Semivariety locus = singular_locus(semivariety_from_equations(3, {p3("x^2 - z*y^2")}), 2);
    auto pts = sample_box(sn, 40, 1.5, 21);
    int checked = 0;
    for (const Vec& p : pts) {
        double coords[3] = {p[0], p[1], p[2]};
        double worst = 0.0;
        for (std::size_t k = 1; k < locus.pieces[0].equations.size(); ++k)
            worst = std::max(worst, std::fabs(locus.pieces[0].equations[k].eval(
                                        std::span<const double>(coords, 3))));
        if (p.head(2).norm() > 1e-3) {
            CHECK(worst > 1e-9);
            ++checked;
        }
    }
    CHECK(checked > 10);
}

TEST_CASE("filtrate: sphere, cone, umbrella") {
    FiltrateOptions opts;

    Filtration sphere = filtrate(sphere3(), 3, opts);
    REQUIRE(sphere.levels.size() == 1);
    CHECK(sphere.levels[0].dim == 2);

    Filtration cone = filtrate(semivariety_from_equations(3, {p3("x^2 + y^2 - z^2")}), 3, opts);
    REQUIRE(cone.levels.size() == 2);
    CHECK(cone.levels[0].dim == 0);
    CHECK(cone.levels[1].dim == 2);
    CHECK(membership(cone.levels[0].set, v3(0, 0, 0), 1e-9) == Membership::Inside);

    Filtration umbrella =
        filtrate(semivariety_from_equations(3, {p3("x^2 - z*y^2")}), 3, opts);
    REQUIRE(umbrella.levels.size() == 3);
    CHECK(umbrella.levels[0].dim == 0);
    CHECK(umbrella.levels[1].dim == 1);
    CHECK(umbrella.levels[2].dim == 2);
    // The middle level is the z-axis; its samples must have rank-2 normals.
    std::string diag;
    CHECK(verify_filtration(umbrella, 5, &diag, opts));

    // Nesting: sampled points of each level pass membership one level up.
    for (std::size_t k = 0; k + 1 < umbrella.levels.size(); ++k) {
        Stratum st;
        st.id = "level" + std::to_string(k);
        st.carrier = umbrella.levels[k].set;
        StratumNumerics num(st);
        auto pts = sample_box(num, 16, 1.5, 31);
        for (const Vec& p : pts)
            CHECK(membership(umbrella.levels[k + 1].set, p, 1e-7) != Membership::Outside);
    }
}

TEST_CASE("local_components: plane, umbrella sheets, half-plane") {
    ComponentOptions copt;
    copt.n_samples = 56;

    // Full plane at the origin: one essential component.
    Stratum plane;
    plane.id = "zplane";
    plane.carrier = semivariety_from_equations(3, {p3("z")});
    plane.dim = 2;
    StratumNumerics pn(plane);
    StratumNumerics xa(x_axis());
    auto comps = local_components(pn, xa, v3(0, 0, 0), 0.5, 41, copt);
    REQUIRE(comps.size() == 1);
    CHECK(comps[0].essential);

    // Umbrella sheets near (0,0,1) minus the axis: the sample graph must
    // never join samples across the x = 0 or y = 0 walls; the independent
    // count of sheet components there is four (sign of x times sign of y),
    // all essential over the axis.
    Stratum surf = umbrella_surface();
    StratumNumerics sn(surf);
    StratumNumerics za(z_axis());
    auto ucomps = local_components(sn, za, v3(0, 0, 1), 0.3, 41, copt);
    REQUIRE(ucomps.size() == 4);
    std::set<std::pair<int, int>> quadrants;
    for (const auto& c : ucomps) {
        CHECK(c.essential);
        int sx = c.members.front()[0] > 0 ? 1 : -1;
        int sy = c.members.front()[1] > 0 ? 1 : -1;
        for (const Vec& p : c.members) {
            CHECK(p[0] * sx > 0.0);
            CHECK(p[1] * sy > 0.0);
        }
        quadrants.insert({sx, sy});
    }
    CHECK(quadrants.size() == 4);

    // Half-plane over the x-axis at the origin: one essential component
    // (its closure contains a full axis neighborhood).
    Stratum half;
    half.id = "half";
    half.carrier = semivariety_from_equations(3, {p3("z")}, {p3("y")});
    half.dim = 2;
    StratumNumerics hn(half);
    auto hcomps = local_components(hn, xa, v3(0, 0, 0), 0.5, 41, copt);
    REQUIRE(hcomps.size() == 1);
    CHECK(hcomps[0].essential);

    // Umbrella wedges at the origin are NOT essential over the full axis:
    // their closures only cover the nonnegative half-axis.
    auto ocomps = local_components(sn, za, v3(0, 0, 0), 0.3, 41, copt);
    CHECK(ocomps.size() >= 2);
    for (const auto& c : ocomps) CHECK(!c.essential);
}

TEST_CASE("property: component count is stable under doubling n_samples") {
    Stratum surf = umbrella_surface();
    StratumNumerics sn(surf);
    StratumNumerics za(z_axis());
    ComponentOptions base;
    base.n_samples = 48;
    ComponentOptions doubled;
    doubled.n_samples = 96;
    auto c1 = local_components(sn, za, v3(0, 0, 1), 0.3, 17, base);
    auto c2 = local_components(sn, za, v3(0, 0, 1), 0.3, 17, doubled);
    CHECK(c1.size() == c2.size());
    int e1 = 0, e2 = 0;
    for (const auto& c : c1) e1 += c.essential ? 1 : 0;
    for (const auto& c : c2) e2 += c.essential ? 1 : 0;
    CHECK(e1 == e2);
}

TEST_CASE("stratum_contains honors component restriction") {
    // Two rays of the z-axis minus the origin.
    Stratum ray;
    ray.id = "ray_pos";
    ray.carrier = semivariety_from_equations(3, {p3("x"), p3("y")});
    ray.excluded = semivariety_from_equations(3, {p3("x"), p3("y"), p3("z")});
    ray.dim = 1;
    ray.excluded_dim = 0;
    ray.component_restricted = true;
    ray.seeds = {v3(0, 0, 0.8)};
    StratumNumerics rn(ray);
    CHECK(stratum_contains(rn, v3(0, 0, 1.5), {}));
    CHECK(stratum_contains(rn, v3(0, 0, 0.1), {}));
    CHECK(!stratum_contains(rn, v3(0, 0, -0.4), {}));
    CHECK(!stratum_contains(rn, v3(0, 0, 0), {}));
    CHECK(!stratum_contains(rn, v3(1, 0, 1), {}));
}
