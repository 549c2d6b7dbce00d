#include "strat/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace strat {

namespace {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void dump_rec(const ojson& j, std::string& out, int indent, int depth) {
    std::string pad(static_cast<std::size_t>(indent) * depth, ' ');
    std::string pad_in(static_cast<std::size_t>(indent) * (depth + 1), ' ');
    switch (j.type()) {
        case ojson::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                out += pad_in + ojson(it.key()).dump() + ": ";
                dump_rec(it.value(), out, indent, depth + 1);
            }
            out += "\n" + pad + "}";
            return;
        }
        case ojson::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            bool first = true;
            for (const auto& el : j) {
                if (!first) out += ",\n";
                first = false;
                out += pad_in;
                dump_rec(el, out, indent, depth + 1);
            }
            out += "\n" + pad + "]";
            return;
        }
        case ojson::value_t::number_float:
            out += format_double(j.get<double>());
            return;
        default:
            out += j.dump();
            return;
    }
}

std::vector<Polynomial> polys_from_json(const ojson& arr,
                                        const std::vector<std::string>& variables) {
    std::vector<Polynomial> out;
    for (const auto& s : arr) out.push_back(parse_polynomial(s.get<std::string>(), variables));
    return out;
}

ojson polys_to_json(const std::vector<Polynomial>& polys,
                    const std::vector<std::string>& variables) {
    ojson arr = ojson::array();
    for (const auto& p : polys) arr.push_back(p.to_string(variables));
    return arr;
}

}  // namespace

std::string canonical_dump(const ojson& j, int indent) {
    std::string out;
    dump_rec(j, out, indent, 0);
    out += "\n";
    return out;
}

ojson vec_to_json(const Vec& v) {
    ojson arr = ojson::array();
    for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Vec vec_from_json(const ojson& j) {
    Vec v(static_cast<int>(j.size()));
    int k = 0;
    for (const auto& el : j) v[k++] = el.get<double>();
    return v;
}

ojson semivariety_to_json(const Semivariety& s, const std::vector<std::string>& variables) {
    ojson pieces = ojson::array();
    for (const auto& piece : s.pieces) {
        ojson p = ojson::object();
        p["equations"] = polys_to_json(piece.equations, variables);
        p["inequalities"] = polys_to_json(piece.strict_inequalities, variables);
        pieces.push_back(p);
    }
    ojson out = ojson::object();
    out["pieces"] = pieces;
    return out;
}

Semivariety semivariety_from_json(const ojson& j, const std::vector<std::string>& variables) {
    Semivariety s;
    s.ambient_dim = static_cast<int>(variables.size());
    if (!j.contains("pieces")) throw ProblemError("semivariety block lacks 'pieces'");
    for (const auto& pj : j.at("pieces")) {
        BasicSet piece;
        piece.ambient_dim = s.ambient_dim;
        if (pj.contains("equations")) piece.equations = polys_from_json(pj["equations"], variables);
        if (pj.contains("inequalities"))
            piece.strict_inequalities = polys_from_json(pj["inequalities"], variables);
        s.pieces.push_back(std::move(piece));
    }
    s.validate();
    return s;
}

ProblemFile problem_from_json(const ojson& j) {
    ProblemFile p;
    p.schema_version = j.value("schema_version", 1);
    p.name = j.value("name", std::string());
    if (!j.contains("variables")) throw ProblemError("problem lacks 'variables'");
    for (const auto& v : j.at("variables")) p.variables.push_back(v.get<std::string>());
    p.ambient_dim = j.value("ambient_dim", static_cast<int>(p.variables.size()));
    if (p.ambient_dim != static_cast<int>(p.variables.size()))
        throw ProblemError("ambient_dim != number of variables");
    if (static_cast<int>(p.variables.size()) > kMaxVars)
        throw ProblemError("too many variables (cap " + std::to_string(kMaxVars) + ")");
    if (j.contains("semivariety"))
        p.semivariety = semivariety_from_json(j.at("semivariety"), p.variables);
    else
        p.semivariety.ambient_dim = p.ambient_dim;
    if (j.contains("strata")) {
        for (const auto& sj : j.at("strata")) {
            Stratum st;
            st.id = sj.value("id", std::string("stratum") +
                                       std::to_string(p.strata.size()));
            st.carrier = semivariety_from_json(sj, p.variables);
            if (sj.contains("excluded"))
                st.excluded = semivariety_from_json(sj.at("excluded"), p.variables);
            st.dim = sj.value("dim", -1);
            st.excluded_dim = sj.value("excluded_dim", -1);
            st.component_restricted = sj.value("component_restricted", false);
            if (sj.contains("seed_points"))
                for (const auto& pt : sj.at("seed_points")) st.seeds.push_back(vec_from_json(pt));
            p.strata.push_back(std::move(st));
        }
    }
    if (j.contains("base_points"))
        for (const auto& pt : j.at("base_points")) p.base_points.push_back(vec_from_json(pt));
    if (j.contains("params")) p.params = j.at("params");
    return p;
}

ojson problem_to_json(const ProblemFile& p) {
    ojson j = ojson::object();
    j["schema_version"] = p.schema_version;
    if (!p.name.empty()) j["name"] = p.name;
    j["ambient_dim"] = p.ambient_dim;
    j["variables"] = p.variables;
    j["semivariety"] = semivariety_to_json(p.semivariety, p.variables);
    if (!p.strata.empty()) {
        ojson strata = ojson::array();
        for (const auto& st : p.strata) {
            ojson sj = semivariety_to_json(st.carrier, p.variables);
            ojson rec = ojson::object();
            rec["id"] = st.id;
            rec["dim"] = st.dim;
            rec["pieces"] = sj["pieces"];
            if (!st.excluded.trivially_empty()) {
                rec["excluded"] = semivariety_to_json(st.excluded, p.variables);
                rec["excluded_dim"] = st.excluded_dim;
            }
            if (st.component_restricted) rec["component_restricted"] = true;
            ojson seeds = ojson::array();
            for (const auto& s : st.seeds) seeds.push_back(vec_to_json(s));
            rec["seed_points"] = seeds;
            strata.push_back(rec);
        }
        j["strata"] = strata;
    }
    if (!p.base_points.empty()) {
        ojson pts = ojson::array();
        for (const auto& b : p.base_points) pts.push_back(vec_to_json(b));
        j["base_points"] = pts;
    }
    if (!p.params.empty()) j["params"] = p.params;
    return j;
}

ProblemFile load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ProblemError("cannot open problem file: " + path);
    ojson j;
    try {
        in >> j;
    } catch (const std::exception& ex) {
        throw ProblemError("invalid JSON in " + path + ": " + ex.what());
    }
    return problem_from_json(j);
}

void write_trace_csv(std::ostream& out, const KuoTrace& trace) {
    int m = static_cast<int>(trace.base.size());
    out << "shell_index,radius";
    for (int k = 0; k < m; ++k) out << ",y" << k;
    out << ",P^a,P^b\n";
    for (const auto& e : trace.entries) {
        out << e.shell << "," << format_double(e.shell_radius);
        for (int k = 0; k < m; ++k) out << "," << format_double(e.y[k]);
        out << "," << format_double(e.pa) << "," << format_double(e.pb) << "\n";
    }
}

ojson witness_to_json(const Witness& w) {
    ojson j = ojson::object();
    j["condition"] = std::string(1, w.condition);
    j["cluster_value"] = w.cluster_value;
    ojson pts = ojson::array();
    for (const auto& p : w.points) pts.push_back(vec_to_json(p));
    j["points"] = pts;
    if (w.limit_plane) {
        ojson cols = ojson::array();
        for (int c = 0; c < w.limit_plane->dim(); ++c)
            cols.push_back(vec_to_json(w.limit_plane->basis.col(c)));
        j["limit_plane"] = cols;
    }
    if (w.secant) j["secant"] = vec_to_json(*w.secant);
    if (!w.note.empty()) j["note"] = w.note;
    return j;
}

namespace {

ojson condition_to_json(const ConditionReport& c) {
    ojson j = ojson::object();
    j["status"] = verdict_name(c.status);
    j["kuo_max_cluster"] = c.kuo_max_cluster;
    j["direct_max_cluster"] = c.direct_max_cluster;
    j["kuo_cluster_count"] = c.kuo_cluster_count;
    j["detectors_agree"] = c.detectors_agree;
    if (c.witness) j["witness"] = witness_to_json(*c.witness);
    if (!c.note.empty()) j["note"] = c.note;
    return j;
}

}  // namespace

ojson verdict_to_json(const TripleVerdict& v) {
    ojson j = ojson::object();
    j["pair"] = ojson::array({v.j_id, v.i_id});
    j["x"] = vec_to_json(v.x);
    if (!v.error.empty()) {
        j["error"] = v.error;
        j["frontier_empty"] = v.frontier_empty;
        return j;
    }
    j["a"] = condition_to_json(v.a);
    j["b"] = condition_to_json(v.b);
    j["populated_shells"] = v.populated_shells;
    j["plane_cluster_count"] = v.plane_cluster_count;
    j["n_components"] = v.n_components;
    j["n_essential"] = v.n_essential;
    j["essential_a"] = verdict_name(v.essential_a);
    j["essential_b"] = verdict_name(v.essential_b);
    ojson comps = ojson::array();
    for (const auto& c : v.components) {
        ojson cj = ojson::object();
        cj["essential"] = c.essential;
        cj["members"] = c.n_members;
        cj["trace_entries"] = c.n_trace_entries;
        cj["a_status"] = verdict_name(c.a_status);
        cj["b_status"] = verdict_name(c.b_status);
        cj["kuo_a_max"] = c.kuo_a_max;
        cj["kuo_b_max"] = c.kuo_b_max;
        comps.push_back(cj);
    }
    j["components"] = comps;
    return j;
}

ojson probe_to_json(const SingProbe& p) {
    ojson j = ojson::object();
    ojson pts = ojson::array();
    for (const auto& x : p.points) pts.push_back(vec_to_json(x));
    j["points"] = pts;
    ojson verdicts = ojson::array();
    for (const auto& v : p.verdicts) verdicts.push_back(verdict_to_json(v));
    j["verdicts"] = verdicts;
    j["dropped_not_in_frontier"] = p.dropped_not_in_frontier;
    j["irregular_fraction_a"] = p.irregular_fraction_a;
    j["irregular_fraction_b"] = p.irregular_fraction_b;
    j["codim_ok_a"] = p.codim_ok_a;
    j["codim_ok_b"] = p.codim_ok_b;
    return j;
}

ojson certificate_to_json(const StratificationCertificate& cert,
                          const std::vector<std::string>& variables) {
    ojson j = ojson::object();
    j["schema_version"] = cert.schema_version;
    j["mode"] = std::string(1, cert.mode);
    j["seed"] = cert.seed;
    j["max_depth"] = cert.max_depth;
    j["rounds_used"] = cert.rounds_used;
    j["variables"] = variables;
    ojson strata = ojson::array();
    for (const auto& rec : cert.strata) {
        ojson sj = ojson::object();
        sj["id"] = rec.stratum.id;
        sj["kind"] = rec.kind;
        sj["dim"] = rec.stratum.dim;
        sj["carrier"] = semivariety_to_json(rec.stratum.carrier, variables);
        if (!rec.stratum.excluded.trivially_empty()) {
            sj["excluded"] = semivariety_to_json(rec.stratum.excluded, variables);
            sj["excluded_dim"] = rec.stratum.excluded_dim;
        }
        if (rec.stratum.component_restricted) sj["component_restricted"] = true;
        ojson seeds = ojson::array();
        for (const auto& s : rec.stratum.seeds) seeds.push_back(vec_to_json(s));
        sj["seeds"] = seeds;
        if (rec.kind == "level") {
            sj["parent"] = rec.parent;
            sj["level_which"] = std::string(1, rec.level_which);
            sj["level_value"] = rec.level_value;
            sj["level_base"] = vec_to_json(rec.level_base);
            ojson cols = ojson::array();
            for (int c = 0; c < rec.level_frame.cols(); ++c)
                cols.push_back(vec_to_json(rec.level_frame.col(c)));
            sj["level_frame"] = cols;
        }
        if (rec.kind == "critical") sj["parent"] = rec.parent;
        if (!rec.carrier_samples.empty()) {
            ojson cs = ojson::array();
            for (const auto& p : rec.carrier_samples) cs.push_back(vec_to_json(p));
            sj["carrier_samples"] = cs;
        }
        strata.push_back(sj);
    }
    j["strata"] = strata;
    ojson frontier = ojson::array();
    for (const auto& [a, b] : cert.frontier) frontier.push_back(ojson::array({a, b}));
    j["frontier"] = frontier;
    ojson probes = ojson::array();
    for (const auto& rec : cert.probes) {
        ojson pj = ojson::object();
        pj["j"] = rec.j_id;
        pj["i"] = rec.i_id;
        ojson pts = ojson::array();
        for (const auto& p : rec.points) pts.push_back(vec_to_json(p));
        pj["points"] = pts;
        ojson as = ojson::array(), bs = ojson::array();
        for (auto v : rec.a_status) as.push_back(verdict_name(v));
        for (auto v : rec.b_status) bs.push_back(verdict_name(v));
        pj["a_status"] = as;
        pj["b_status"] = bs;
        probes.push_back(pj);
    }
    j["probes"] = probes;
    j["status"] = cert_status_name(cert.status);
    j["notes"] = cert.notes;
    return j;
}

namespace {

Verdict verdict_from_name(const std::string& s) {
    if (s == "regular") return Verdict::Regular;
    if (s == "irregular") return Verdict::Irregular;
    return Verdict::Inconclusive;
}

}  // namespace

StratificationCertificate certificate_from_json(const ojson& j) {
    StratificationCertificate cert;
    cert.schema_version = j.value("schema_version", 1);
    cert.mode = j.value("mode", std::string("b"))[0];
    cert.seed = j.value("seed", 0ull);
    cert.max_depth = j.value("max_depth", 4);
    cert.rounds_used = j.value("rounds_used", 0);
    std::vector<std::string> variables;
    for (const auto& v : j.at("variables")) variables.push_back(v.get<std::string>());

    for (const auto& sj : j.at("strata")) {
        CertificateStratum rec;
        rec.kind = sj.value("kind", std::string("filtration"));
        Stratum st;
        st.id = sj.at("id").get<std::string>();
        st.dim = sj.value("dim", -1);
        st.carrier = semivariety_from_json(sj.at("carrier"), variables);
        if (sj.contains("excluded")) {
            st.excluded = semivariety_from_json(sj.at("excluded"), variables);
            st.excluded_dim = sj.value("excluded_dim", -1);
        }
        st.component_restricted = sj.value("component_restricted", false);
        if (sj.contains("seeds"))
            for (const auto& p : sj.at("seeds")) st.seeds.push_back(vec_from_json(p));
        if (rec.kind == "level") {
            rec.parent = sj.value("parent", std::string());
            rec.level_which = sj.value("level_which", std::string("b"))[0];
            rec.level_value = sj.value("level_value", 0.0);
            rec.level_base = vec_from_json(sj.at("level_base"));
            const auto& cols = sj.at("level_frame");
            rec.level_frame =
                Mat(rec.level_base.size(), static_cast<Eigen::Index>(cols.size()));
            int c = 0;
            for (const auto& col : cols) rec.level_frame.col(c++) = vec_from_json(col);
        }
        if (rec.kind == "critical") rec.parent = sj.value("parent", std::string());
        if (sj.contains("carrier_samples"))
            for (const auto& p : sj.at("carrier_samples"))
                rec.carrier_samples.push_back(vec_from_json(p));
        rec.stratum = std::move(st);
        cert.strata.push_back(std::move(rec));
    }
    // Rebuild the numeric constraint of level strata from the recorded
    // frame and parent carrier.
    for (auto& rec : cert.strata) {
        if (rec.kind != "level") continue;
        const CertificateStratum* parent = nullptr;
        for (const auto& other : cert.strata)
            if (other.stratum.id == rec.parent) parent = &other;
        if (!parent) continue;
        LevelStratum ls;
        ls.id = rec.stratum.id;
        ls.parent_id = rec.parent;
        ls.which = rec.level_which;
        ls.level = rec.level_value;
        ls.base = rec.level_base;
        ls.carrier = rec.carrier_samples;
        KuoFrame frame{rec.level_base, rec.level_frame};
        RefineParams defaults;
        rec.stratum = level_as_stratum(ls, parent->stratum, frame, defaults);
        rec.stratum.id = ls.id;
    }
    if (j.contains("frontier"))
        for (const auto& e : j.at("frontier"))
            cert.frontier.emplace_back(e.at(0).get<std::string>(), e.at(1).get<std::string>());
    if (j.contains("probes")) {
        for (const auto& pj : j.at("probes")) {
            PairProbeRecord rec;
            rec.j_id = pj.at("j").get<std::string>();
            rec.i_id = pj.at("i").get<std::string>();
            for (const auto& p : pj.at("points")) rec.points.push_back(vec_from_json(p));
            for (const auto& s : pj.at("a_status"))
                rec.a_status.push_back(verdict_from_name(s.get<std::string>()));
            for (const auto& s : pj.at("b_status"))
                rec.b_status.push_back(verdict_from_name(s.get<std::string>()));
            cert.probes.push_back(std::move(rec));
        }
    }
    std::string status = j.value("status", std::string("incomplete"));
    cert.status = status == "certified"  ? CertStatus::Certified
                  : status == "refuted" ? CertStatus::Refuted
                                        : CertStatus::Incomplete;
    if (j.contains("notes"))
        for (const auto& n : j.at("notes")) cert.notes.push_back(n.get<std::string>());
    return cert;
}

}  // namespace strat
