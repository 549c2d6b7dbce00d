#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "strat/linalg.hpp"
#include "strat/polynomial.hpp"
#include "strat/rng.hpp"

using namespace strat;

namespace {

const std::vector<std::string> kXYZ{"x", "y", "z"};

Polynomial parse3(const std::string& s) { return parse_polynomial(s, kXYZ); }

// Independent determinant route: Leibniz expansion over permutations.
Polynomial leibniz_det(const PolyMatrix& m) {
    int n = static_cast<int>(m.size());
    int nv = m[0][0].num_vars();
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    Polynomial sum(nv);
    do {
        int inversions = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (perm[i] > perm[j]) ++inversions;
        Polynomial prod = Polynomial::constant(nv, Rational(inversions % 2 ? -1 : 1));
        for (int i = 0; i < n; ++i) prod = prod * m[i][perm[i]];
        sum = sum + prod;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return sum;
}

Polynomial random_poly(Rng& rng, int nv, int max_deg, int n_terms) {
    Polynomial p(nv);
    for (int t = 0; t < n_terms; ++t) {
        Exponents e(nv, 0);
        int deg = static_cast<int>(rng.uniform(0, max_deg + 1));
        for (int d = 0; d < deg; ++d) e[static_cast<int>(rng.uniform(0, nv))] += 1;
        int num = static_cast<int>(rng.uniform(-9, 10));
        int den = 1 + static_cast<int>(rng.uniform(0, 4));
        p.add_term(e, Rational(num, den));
    }
    return p;
}

double eval3(const Polynomial& p, double x, double y, double z) {
    double pt[3] = {x, y, z};
    return p.eval(std::span<const double>(pt, 3));
}

}  // namespace

TEST_CASE("parse: grammar examples") {
    Polynomial p = parse3("x^2 - z*y^2");
    REQUIRE(p.terms().size() == 2);
    CHECK(p.terms().at({2, 0, 0}) == Rational(1));
    CHECK(p.terms().at({0, 2, 1}) == Rational(-1));

    Polynomial zero = parse3("0");
    CHECK(zero.is_zero());
    CHECK(zero.terms().empty());

    Polynomial merged = parse3("1/2*x + 1/2*x");
    REQUIRE(merged.terms().size() == 1);
    CHECK(merged.terms().at({1, 0, 0}) == Rational(1));
}

TEST_CASE("parse: errors carry positions") {
    CHECK_THROWS_AS(parse3("x^2 + @"), ParseError);
    try {
        parse3("x + w^2");
        FAIL("expected unknown-variable error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("unknown variable 'w'") != std::string::npos);
        CHECK(e.position == 4);
    }
    CHECK_THROWS_AS(parse3("1/0*x"), ParseError);
    CHECK_THROWS_AS(parse3(""), ParseError);
    // Desk-scale caps.
    CHECK_THROWS_AS(parse3("x^13"), ParseError);
    CHECK_THROWS_AS(parse3("x^6*y^6*z^6"), ParseError);
    CHECK_THROWS_AS(parse_polynomial("a", {"a", "b", "c", "d", "e", "f", "g"}), ParseError);
}

TEST_CASE("print/parse round trip on canonical form") {
    // Canonical form prints the highest graded-lex term first.
    for (const std::string s :
         {"-y^2*z + x^2", "1/2*x + 3", "-x^3 + 2*x*y*z - 7/3", "0", "x", "-x"}) {
        Polynomial p = parse3(s);
        CHECK(parse3(p.to_string(kXYZ)) == p);
        CHECK(p.to_string(kXYZ) == s);
    }
    Rng rng = Rng::stream(11, {Rng::kTest, 1});
    for (int k = 0; k < 100; ++k) {
        Polynomial p = random_poly(rng, 3, 4, 5);
        CHECK(parse3(p.to_string(kXYZ)) == p);
    }
}

TEST_CASE("eval examples") {
    Polynomial cone = parse3("x^2 + y^2 - z^2");
    CHECK(eval3(cone, 3, 4, 5) == doctest::Approx(0.0));
    Polynomial umbrella = parse3("x^2 - z*y^2");
    CHECK(eval3(umbrella, 1, 1, 1) == doctest::Approx(0.0));
    CHECK(eval3(umbrella, 0, 1, -1) == doctest::Approx(1.0));
    double two[2] = {1.0, 2.0};
    CHECK_THROWS_AS(umbrella.eval(std::span<const double>(two, 2)), std::invalid_argument);
}

TEST_CASE("jacobian examples") {
    auto j1 = jacobian({parse3("x^2 + y^2 - z^2")});
    CHECK(j1[0][0] == parse3("2*x"));
    CHECK(j1[0][1] == parse3("2*y"));
    CHECK(j1[0][2] == parse3("-2*z"));

    auto j2 = jacobian({parse3("x^2 - z*y^2")});
    CHECK(j2[0][0] == parse3("2*x"));
    CHECK(j2[0][1] == parse3("-2*y*z"));
    CHECK(j2[0][2] == parse3("-y^2"));

    auto j3 = jacobian({parse3("x"), parse3("y")});
    CHECK(j3[0][0] == parse3("1"));
    CHECK(j3[0][1] == parse3("0"));
    CHECK(j3[1][1] == parse3("1"));
    CHECK(j3[1][2] == parse3("0"));
}

TEST_CASE("minors: examples and deterministic order") {
    auto j1 = jacobian({parse3("x^2 + y^2 - z^2")});
    auto m1 = minors(j1, 1);
    REQUIRE(m1.size() == 3);
    CHECK(m1[0] == parse3("2*x"));
    CHECK(m1[1] == parse3("2*y"));
    CHECK(m1[2] == parse3("-2*z"));

    auto j2 = jacobian({parse3("x"), parse3("y")});
    auto m2 = minors(j2, 2);
    REQUIRE(m2.size() == 3);
    CHECK(m2[0] == parse3("1"));
    CHECK(m2[1] == parse3("0"));
    CHECK(m2[2] == parse3("0"));

    CHECK_THROWS_AS(minors(j2, 3), std::invalid_argument);
}

TEST_CASE("minors of the umbrella/z system match the independent route") {
    // System {x^2 - z*y^2, z}; minors cross-checked against a Leibniz
    // determinant expansion.
    auto jac = jacobian({parse3("x^2 - z*y^2"), parse3("z")});
    auto lib = minors(jac, 2);
    REQUIRE(lib.size() == 3);

    std::vector<std::pair<int, int>> col_pairs{{0, 1}, {0, 2}, {1, 2}};
    for (std::size_t k = 0; k < col_pairs.size(); ++k) {
        PolyMatrix sub{{jac[0][col_pairs[k].first], jac[0][col_pairs[k].second]},
                       {jac[1][col_pairs[k].first], jac[1][col_pairs[k].second]}};
        CHECK(lib[k] == leibniz_det(sub));
    }
    // Frozen oracle values.
    CHECK(lib[0] == parse3("0"));
    CHECK(lib[1] == parse3("2*x"));
    CHECK(lib[2] == parse3("-2*y*z"));
    // Within {z = 0}, the minors vanish exactly on {x = 0}.
    for (double y : {-0.9, 0.3, 1.4}) {
        double on[3] = {0.0, y, 0.0};
        for (const auto& m : lib) CHECK(std::fabs(m.eval(std::span<const double>(on, 3))) < 1e-15);
        double off[3] = {0.5, y, 0.0};
        double worst = 0.0;
        for (const auto& m : lib)
            worst = std::max(worst, std::fabs(m.eval(std::span<const double>(off, 3))));
        CHECK(worst > 1e-3);
    }
}

TEST_CASE("property: differentiation is linear") {
    Rng rng = Rng::stream(23, {Rng::kTest, 2});
    for (int k = 0; k < 200; ++k) {
        Polynomial p = random_poly(rng, 3, 4, 4);
        Polynomial q = random_poly(rng, 3, 4, 4);
        for (int v = 0; v < 3; ++v)
            CHECK((p + q).derivative(v) == p.derivative(v) + q.derivative(v));
    }
}

TEST_CASE("property: mixed partials commute exactly") {
    Rng rng = Rng::stream(29, {Rng::kTest, 3});
    for (int k = 0; k < 200; ++k) {
        Polynomial p = random_poly(rng, 3, 5, 5);
        for (int a = 0; a < 3; ++a)
            for (int b = a + 1; b < 3; ++b)
                CHECK(p.derivative(a).derivative(b) == p.derivative(b).derivative(a));
    }
}

TEST_CASE("property: derivative matches central finite differences") {
    Rng rng = Rng::stream(31, {Rng::kTest, 4});
    const double h = 1e-5;
    int checked = 0;
    for (int k = 0; k < 60; ++k) {
        Polynomial p = random_poly(rng, 3, 4, 5);
        Vec pt(3);
        for (int i = 0; i < 3; ++i) pt[i] = rng.uniform(-1.0, 1.0);
        for (int v = 0; v < 3; ++v) {
            Vec plus = pt, minus = pt;
            plus[v] += h;
            minus[v] -= h;
            double fd = (p.eval(std::span<const double>(plus.data(), 3)) -
                         p.eval(std::span<const double>(minus.data(), 3))) /
                        (2 * h);
            double exact = p.derivative(v).eval(std::span<const double>(pt.data(), 3));
            if (std::fabs(exact) > 1e-4) {
                CHECK(std::fabs(fd - exact) / std::fabs(exact) < 1e-6);
                ++checked;
            }
        }
    }
    CHECK(checked > 50);
}

TEST_CASE("property: exact rational eval agrees with double eval") {
    Rng rng = Rng::stream(37, {Rng::kTest, 5});
    auto jac = jacobian({parse3("x^2 - z*y^2"), parse3("x*y + z^2 - 1")});
    auto ms = minors(jac, 2);
    for (int k = 0; k < 100; ++k) {
        std::vector<Rational> qpt;
        Vec dpt(3);
        for (int i = 0; i < 3; ++i) {
            int num = static_cast<int>(rng.uniform(-50, 51));
            int den = 1 + static_cast<int>(rng.uniform(0, 50));
            qpt.push_back(Rational(num, den));
            dpt[i] = to_double(qpt.back());
        }
        for (const auto& m : ms) {
            double exact = to_double(m.eval_exact(qpt));
            double approx = m.eval(std::span<const double>(dpt.data(), 3));
            if (std::fabs(exact) > 1e-9)
                CHECK(std::fabs(exact - approx) / std::fabs(exact) < 1e-9);
            else
                CHECK(std::fabs(exact - approx) < 1e-9);
        }
    }
}

TEST_CASE("substitute pins variables exactly") {
    Polynomial p = parse3("x^2 - z*y^2");
    Polynomial on_axis = p.substitute(0, Rational(0)).substitute(1, Rational(0));
    CHECK(on_axis.is_zero());
    Polynomial at_z1 = p.substitute(2, Rational(1));
    CHECK(at_z1 == parse3("x^2 - y^2"));
}

TEST_CASE("rational helpers") {
    Rational q = make_rational(BigInt(6), BigInt(-4));
    CHECK(numerator(q) == -3);
    CHECK(denominator(q) == 2);
    CHECK_THROWS_AS(make_rational(BigInt(1), BigInt(0)), std::invalid_argument);
    CHECK(rational_from_double(0.5) == Rational(1, 2));
    CHECK(rational_from_double(-0.75) == Rational(-3, 4));
    CHECK(to_double(rational_from_double(0.1)) == 0.1);
}
