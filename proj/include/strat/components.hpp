#pragma once

#include <cstdint>

#include "strat/grassmann.hpp"

namespace strat {

struct WalkOptions {
    double tol_on = 1e-9;
    double tol_rank = 1e-8;
    ProjectOptions project;
    int max_steps = 400;
};

// Approximate distance from p to the semivariety (Newton nearest point per
// piece); +inf when no projection converges onto the set.
double approx_distance_to(const Semivariety& s, const Vec& p, const ProjectOptions& opt = {});

// Newton-corrected chord walk from a to b on the stratum with the given step
// length. Every step must stay on the stratum, keep locality, keep tangent
// continuity, and keep clear of the stratum's excluded set.
bool path_connected(const StratumNumerics& s, const Vec& a, const Vec& b, double step,
                    const WalkOptions& opt = {});

// Directed walk from `from` toward `target`, staying on the stratum. True
// when the walk reaches within `arrive` of the target.
bool walk_reaches(const StratumNumerics& s, const Vec& from, const Vec& target, double arrive,
                  const WalkOptions& opt = {});

// Membership in a component-restricted stratum: on-stratum plus reachable
// from one of the seeds.
bool stratum_contains(const StratumNumerics& s, const Vec& p, const WalkOptions& opt = {});

struct LocalComponent {
    Vec base_point;
    double radius = 0.0;
    std::vector<Vec> members;
    bool essential = false;
};

struct ComponentOptions {
    int n_samples = 48;
    int link_neighbors = 6;
    int grid_half = 4;  // essentiality grid offsets per tangent direction
    WalkOptions walk;
};

// Connected components of the stratum inside ball(x, radius), detected via a
// neighbor graph whose edges are Newton-corrected paths with step
// radius / 20. The essential flag is set when the component's closure covers
// a full grid neighborhood of x inside the small stratum at resolution
// radius / 10.
std::vector<LocalComponent> local_components(const StratumNumerics& j,
                                             const StratumNumerics& i_small, const Vec& x,
                                             double radius, std::uint64_t seed,
                                             const ComponentOptions& opt = {});

// Index of the component the point belongs to (nearest members, path check),
// or -1 when unassignable.
int assign_to_component(const StratumNumerics& j, const std::vector<LocalComponent>& comps,
                        const Vec& p, double step, const WalkOptions& opt = {});

}  // namespace strat
