// Shared stratum/semivariety builders for the test corpus.
#pragma once

#include "strat/semivariety.hpp"

namespace corpus {

using namespace strat;

inline const std::vector<std::string> kXYZ{"x", "y", "z"};
inline const std::vector<std::string> kXYT{"x", "y", "t"};

inline Polynomial p3(const std::string& s) { return parse_polynomial(s, kXYZ); }
inline Polynomial pw(const std::string& s) { return parse_polynomial(s, kXYT); }

inline Vec v3(double a, double b, double c) {
    Vec v(3);
    v << a, b, c;
    return v;
}

// Whitney umbrella x^2 = z y^2: regular surface (axis removed) and z-axis.
inline Stratum umbrella_surface() {
    Stratum s;
    s.id = "surface";
    s.carrier = semivariety_from_equations(3, {p3("x^2 - z*y^2")}, {p3("y^2")});
    s.dim = 2;
    s.seeds = {v3(1.0, 1.0, 1.0), v3(-1.0, 1.0, 1.0)};
    return s;
}

inline Stratum z_axis() {
    Stratum s;
    s.id = "axis";
    s.carrier = semivariety_from_equations(3, {p3("x"), p3("y")});
    s.dim = 1;
    s.seeds = {v3(0, 0, 0.5), v3(0, 0, -0.5)};
    return s;
}

// Double cone x^2 + y^2 = z^2 minus the origin, and the origin.
inline Stratum cone_surface() {
    Stratum s;
    s.id = "cone";
    s.carrier =
        semivariety_from_equations(3, {p3("x^2 + y^2 - z^2")}, {p3("x^2 + y^2 + z^2")});
    s.dim = 2;
    s.seeds = {v3(1.0, 0.0, 1.0), v3(0.0, 1.0, -1.0)};
    return s;
}

inline Stratum origin3() {
    Stratum s;
    s.id = "origin";
    s.carrier = semivariety_from_equations(3, {p3("x"), p3("y"), p3("z")});
    s.dim = 0;
    s.seeds = {v3(0, 0, 0)};
    return s;
}

// Plane {z = 0} minus the x-axis, over the x-axis.
inline Stratum plane_minus_axis() {
    Stratum s;
    s.id = "plane";
    s.carrier = semivariety_from_equations(3, {p3("z")}, {p3("y^2")});
    s.dim = 2;
    s.seeds = {v3(0.0, 0.7, 0.0), v3(0.3, -0.6, 0.0)};
    return s;
}

inline Stratum x_axis() {
    Stratum s;
    s.id = "xaxis";
    s.carrier = semivariety_from_equations(3, {p3("y"), p3("z")});
    s.dim = 1;
    s.seeds = {v3(0.4, 0, 0), v3(-0.5, 0, 0)};
    return s;
}

// Whitney's example y^2 = t^2 x^2 + x^3 over the t-axis (variables x, y, t).
inline Stratum whitney_surface() {
    Stratum s;
    s.id = "surface";
    s.carrier =
        semivariety_from_equations(3, {pw("y^2 - t^2*x^2 - x^3")}, {pw("x^2 + y^2")});
    s.dim = 2;
    s.seeds = {v3(1.0, std::sqrt(2.0), 1.0), v3(1.0, -std::sqrt(2.0), 1.0)};
    return s;
}

inline Stratum t_axis() {
    Stratum s;
    s.id = "axis";
    s.carrier = semivariety_from_equations(3, {pw("x"), pw("y")});
    s.dim = 1;
    s.seeds = {v3(0, 0, 0.5), v3(0, 0, -0.5)};
    return s;
}

inline Semivariety sphere3() {
    return semivariety_from_equations(3, {p3("x^2 + y^2 + z^2 - 1")});
}

}  // namespace corpus
