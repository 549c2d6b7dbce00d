#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "strat/refine.hpp"

namespace strat {

using ojson = nlohmann::ordered_json;

// Parsed problem file: ambient space, semivariety, optional declared strata
// and base points, raw parameter overrides.
struct ProblemFile {
    int schema_version = 1;
    std::string name;
    int ambient_dim = 0;
    std::vector<std::string> variables;
    Semivariety semivariety;
    std::vector<Stratum> strata;
    std::vector<Vec> base_points;
    ojson params = ojson::object();
};

struct ProblemError : std::runtime_error {
    explicit ProblemError(const std::string& msg) : std::runtime_error(msg) {}
};

ProblemFile problem_from_json(const ojson& j);
ojson problem_to_json(const ProblemFile& p);
ProblemFile load_problem(const std::string& path);

// Canonical serialization: fixed key order (insertion order), 2-space
// indent, floats at 17 significant digits. Byte-identical across runs.
std::string canonical_dump(const ojson& j, int indent = 2);

ojson vec_to_json(const Vec& v);
Vec vec_from_json(const ojson& j);

ojson semivariety_to_json(const Semivariety& s, const std::vector<std::string>& variables);
Semivariety semivariety_from_json(const ojson& j, const std::vector<std::string>& variables);

// CSV trace dump: shell_index, radius, y coordinates, P^a, P^b.
void write_trace_csv(std::ostream& out, const KuoTrace& trace);

ojson witness_to_json(const Witness& w);
ojson verdict_to_json(const TripleVerdict& v);
ojson probe_to_json(const SingProbe& p);

ojson certificate_to_json(const StratificationCertificate& cert,
                          const std::vector<std::string>& variables);
StratificationCertificate certificate_from_json(const ojson& j);

}  // namespace strat
