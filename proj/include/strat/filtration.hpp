#pragma once

#include <cstdint>

#include "strat/sampling.hpp"

namespace strat {

struct FiltrationLevel {
    Semivariety set;
    int dim = -1;
};

// Nested chain V^0 c V^1 c ... c V^d; levels ascend in dimension and each
// level's set contains the previous one (the singular-locus construction
// keeps all parent equations).
struct Filtration {
    std::vector<FiltrationLevel> levels;
};

struct FiltrateError : std::runtime_error {
    explicit FiltrateError(const std::string& msg) : std::runtime_error(msg) {}
};

struct FiltrateOptions {
    int n_probe = 40;
    int empty_attempts = 48;
    double box_radius = 2.0;
    ProjectOptions project;
    std::optional<int> declared_dim;  // top dimension, when the caller knows it
};

// V^d = v; V^{k-1} = singular locus of V^k, iterated until the locus is
// numerically empty or dimension zero is reached. Throws on ambiguous
// dimension estimates and on non-decreasing dimension.
Filtration filtrate(const Semivariety& v, std::uint64_t seed, const FiltrateOptions& opt = {});

// Samples each difference V^k \ V^{k-1} and checks numerical tangent rank
// m - k there; returns false (with a diagnostic) on any mismatch.
bool verify_filtration(const Filtration& f, std::uint64_t seed, std::string* diagnostic,
                       const FiltrateOptions& opt = {});

}  // namespace strat
