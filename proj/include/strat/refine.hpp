#pragma once

#include "strat/filtration.hpp"
#include "strat/whitney.hpp"

namespace strat {

struct RefineError : std::runtime_error {
    explicit RefineError(const std::string& msg) : std::runtime_error(msg) {}
};

struct RefineParams {
    CheckParams check;
    double tol_level = 1e-8;
    double tol_grad = 1e-6;
    int n_levels = 8;
    int min_level_points = 10;
    int plane_trials = 64;
    int bisection_iters = 60;
};

// Kuo map value P^a or P^b on the big stratum, relative to the frame of the
// small stratum. Evaluable slightly off the stratum (the tangent plane is
// taken from the Jacobian null space at y).
double kuo_value(const StratumNumerics& j, const KuoFrame& frame, char which, const Vec& y,
                 double tol_rank = 1e-8, double tol_on = 1e-9);

// Numerically regular levels of the Kuo map: low-discrepancy candidates in
// (0, s+1), each validated by a nonzero tangential finite-difference
// gradient at sampled level points. Throws no-valid-levels when every
// candidate is rejected.
std::vector<double> find_regular_levels(const StratumNumerics& j, const KuoFrame& frame,
                                        char which, int n_levels, std::uint64_t seed,
                                        const RefineParams& params);

// Sampled level set {P = eps} on the big stratum: a codimension-1 sampled
// stratum accumulating at the frame base when straddling pairs exist at
// every tail shell.
struct LevelStratum {
    std::string id, parent_id;
    char which = 'b';
    double level = 0.0;
    Vec base;
    std::vector<Vec> carrier;
    std::vector<double> residuals;  // |P - level| per carrier point
};

LevelStratum level_stratum(const StratumNumerics& j, const KuoFrame& frame, char which,
                           double eps, std::uint64_t seed, const RefineParams& params);

// Builds the runtime stratum for a sampled Kuo level set (carrier equations
// of the parent plus one numeric row P - eps).
Stratum level_as_stratum(const LevelStratum& ls, const Stratum& parent,
                         const KuoFrame& frame, const RefineParams& params);

// Critical locus of the projection along l restricted to the stratum:
// points where the tangent space meets l nontrivially. Exact defining
// system (parent equations + maximal minors of J * basis(l)) when the
// carrier is polynomial.
struct CriticalStratum {
    std::string id, parent_id;
    OrientedPlane l;
    std::vector<Vec> carrier;
    Semivariety defining;  // parent equations + minor equations
    int dim = -1;
};

CriticalStratum critical_locus(const StratumNumerics& j, const OrientedPlane& l,
                               std::uint64_t seed, const RefineParams& params);

struct RefineOutcome {
    int case_used = 0;  // 1 = regular levels, 2 = critical locus, 0 = anomaly only
    std::vector<LevelStratum> levels;
    std::vector<CriticalStratum> criticals;
    std::vector<Vec> frontier_points;  // sampled V_i^p representatives
    bool anomaly = false;
    bool monotonicity_ok = true;
    double monotonicity_worst = 0.0;
    std::string notes;
};

// Lemma-2 reduction at the irregular points of a probe: level strata when
// the Kuo limit values split (case 1), a separating-plane critical locus
// when only the limit planes split (case 2); both-unique is recorded as an
// anomaly rather than guessed.
RefineOutcome refine_pair(const StratumNumerics& j, const StratumNumerics& i,
                          const SingProbe& probe, char which, const RefineParams& params);

// ---------------------------------------------------------------------------
// Certificates.

enum class CertStatus { Certified, Refuted, Incomplete };

const char* cert_status_name(CertStatus s);

struct CertificateStratum {
    Stratum stratum;
    std::string kind = "filtration";  // filtration | level | critical
    std::string parent;
    char level_which = 0;
    double level_value = 0.0;
    Vec level_base;
    Mat level_frame;                   // small-stratum frame used for P
    std::vector<Vec> carrier_samples;  // sampled carriers (level strata)
};

struct PairProbeRecord {
    std::string j_id, i_id;
    std::vector<Vec> points;
    std::vector<Verdict> a_status, b_status;
};

struct StratificationCertificate {
    int schema_version = 1;
    char mode = 'b';
    std::uint64_t seed = 0;
    int max_depth = 4;
    int rounds_used = 0;
    std::vector<CertificateStratum> strata;
    std::vector<std::pair<std::string, std::string>> frontier;  // (j, i): i in closure(j)
    std::vector<PairProbeRecord> probes;
    CertStatus status = CertStatus::Incomplete;
    std::vector<std::string> notes;
};

struct StratifyParams {
    RefineParams refine;
    FiltrateOptions filtrate;
    int max_depth = 4;
    int pair_samples = 8;      // probe points per (j, i) pair
    int stratum_samples = 24;  // box samples per stratum for seeds/splitting
    int cloud_samples = 120;
    double box_radius = 2.0;
};

// Theorem-1 driver: filtration, frontier-driven splitting, pair probes,
// Lemma-2 refinement rounds, certificate assembly.
StratificationCertificate stratify(const Semivariety& v, char mode,
                                   const StratifyParams& params);

struct CertifyResult {
    CertStatus status = CertStatus::Incomplete;
    std::vector<std::string> failures;
    int cloud_points = 0;
    int orphan_points = 0;
    int multi_points = 0;
    int reprobed = 0;
    int verdict_mismatches = 0;
};

// Independent re-check with a fresh seed: membership partition on a random
// cloud, sampled frontier condition per pair, and re-classification of 20%
// of the probed triples.
CertifyResult certify(const StratificationCertificate& cert, const Semivariety& v,
                      const StratifyParams& params, std::uint64_t fresh_seed);

}  // namespace strat
