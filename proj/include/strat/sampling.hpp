#pragma once

#include <cstdint>
#include <limits>
#include <optional>

#include "strat/parallel.hpp"
#include "strat/semivariety.hpp"

namespace strat {

struct ProjectOptions {
    double tol_res = 1e-12;
    double tol_rank = 1e-8;
    double tol_on = 1e-9;
    int max_iter = 60;
};

enum class ProjectStatus { Ok, NoConvergence, InequalityViolated };

struct ProjectResult {
    ProjectStatus status = ProjectStatus::NoConvergence;
    Vec point;
    double residual = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool ok() const { return status == ProjectStatus::Ok; }
};

// Gauss-Newton least-squares projection onto {equations = 0}. Strict
// inequalities are re-checked after convergence; a start that already
// satisfies the residual tolerance is returned unchanged.
ProjectResult newton_project(const BasicSet& s, const Vec& start,
                             const ProjectOptions& opt = {});

// Cached numeric form of a stratum: an owned copy plus per-piece compiled
// systems and the stratum's extra constraint rows. Immutable, safe to share
// across threads.
class StratumNumerics {
public:
    explicit StratumNumerics(Stratum s);

    const Stratum& stratum() const { return stratum_; }
    int ambient() const { return stratum_.ambient(); }
    int pieces() const { return static_cast<int>(systems_.size()); }
    const PolySystem& piece_system(int k) const { return systems_[k]; }

    Vec stacked_residual(int piece, const Vec& p) const;
    Mat stacked_jacobian(int piece, const Vec& p) const;

    // Projects onto the nearest piece whose result lies on the stratum
    // (carrier inside, exclusions out, extra rows satisfied).
    ProjectResult project(const Vec& start, const ProjectOptions& opt = {}) const;

private:
    Stratum stratum_;
    std::vector<PolySystem> systems_;
};

struct Cone {
    Vec direction;     // unit vector v
    double aperture;   // accept directions u with u . v > 1 - aperture
};

struct ShellSpec {
    double r0 = 0.05;
    double gamma = 0.5;
    int n_shells = 10;
    int probes_per_shell = 24;
    std::optional<Cone> cone;
};

// Up to probes_per_shell points of the stratum with |y - x| in
// [r_k/2, 2 r_k] per shell, Newton-projected from random sphere seeds,
// deterministic for a fixed seed; each shell sorted lexicographically.
// Empty shells are reported as empty vectors, not errors.
std::vector<std::vector<Vec>> sample_shells(const StratumNumerics& j, const Vec& x,
                                            const ShellSpec& spec, std::uint64_t seed,
                                            Exec exec = Exec::Parallel,
                                            const ProjectOptions& opt = {});

// Random on-set samples from Newton projection of uniform box seeds.
std::vector<Vec> sample_box(const StratumNumerics& s, int n_samples, double box_radius,
                            std::uint64_t seed, Exec exec = Exec::Parallel,
                            const ProjectOptions& opt = {});

// True when no Newton probe converges onto the set: desk-scale emptiness.
bool probe_empty(const Semivariety& s, int attempts, double box_radius,
                 std::uint64_t seed, const ProjectOptions& opt = {});

struct DimEstimate {
    int dim = -1;
    int votes_for_dim = 0;
    int samples = 0;
    bool ambiguous = false;
    bool no_samples = false;
};

// Ambient dim minus the numerical Jacobian rank at converged samples,
// decided by majority vote. Split votes are reported as ambiguous.
DimEstimate estimate_dim(const Semivariety& s, int n_probe, std::uint64_t seed,
                         double box_radius = 2.0, const ProjectOptions& opt = {});

// Stable hash of a stratum id, used to salt per-stratum random streams.
std::uint64_t stratum_salt(const Stratum& s);

}  // namespace strat
