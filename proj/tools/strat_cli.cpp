// Command-line front end: parse problem files, run filtration, pair checks,
// Kuo traces, refinement and stratification; emit reports and certificates.
//
// Exit codes: 0 success/regular/certified; 1 usage or input error;
// 2 definitive negative (irregular or refuted); 3 inconclusive/incomplete.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "strat/report.hpp"
#include "strat/rng.hpp"

using namespace strat;

namespace {

struct CommonFlags {
    std::string problem_path;
    std::string mode = "b";
    std::uint64_t seed = 0;
    double tol_rank = 1e-8;
    double tol_kuo = 1e-6;
    std::string radii;          // r0,gamma,n
    std::string shells_probes;  // probes per shell
    int max_depth = 4;
    std::string out_dir;
    bool dump_traces = false;
    std::string pair;  // j,i stratum ids
    std::string x;     // comma-separated coordinates
};

std::vector<double> parse_csv_doubles(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

CheckParams build_check_params(const ProblemFile& p, const CommonFlags& f) {
    CheckParams c;
    c.seed = f.seed;
    c.tol_rank = f.tol_rank;
    c.tol_kuo = f.tol_kuo;
    // Problem-file defaults, overridden by explicit flags.
    const ojson& pp = p.params;
    if (pp.contains("tol_on")) c.tol_on = pp["tol_on"].get<double>();
    if (pp.contains("tol_res")) c.tol_res = pp["tol_res"].get<double>();
    if (pp.contains("component_radius"))
        c.component_radius = pp["component_radius"].get<double>();
    if (pp.contains("component_samples"))
        c.component_samples = pp["component_samples"].get<int>();
    if (!f.radii.empty()) {
        auto r = parse_csv_doubles(f.radii);
        if (r.size() != 3) throw ProblemError("--radii expects r0,gamma,n");
        c.shells.r0 = r[0];
        c.shells.gamma = r[1];
        c.shells.n_shells = static_cast<int>(r[2]);
    } else if (pp.contains("radii")) {
        auto r = pp["radii"];
        c.shells.r0 = r.at(0).get<double>();
        c.shells.gamma = r.at(1).get<double>();
        c.shells.n_shells = r.at(2).get<int>();
    }
    if (!f.shells_probes.empty())
        c.shells.probes_per_shell = std::stoi(f.shells_probes);
    else if (pp.contains("probes_per_shell"))
        c.shells.probes_per_shell = pp["probes_per_shell"].get<int>();
    return c;
}

const Stratum* find_stratum(const ProblemFile& p, const std::string& id) {
    for (const auto& s : p.strata)
        if (s.id == id) return &s;
    return nullptr;
}

void emit(const ojson& report, const CommonFlags& f, const std::string& artifact_name) {
    std::string text = canonical_dump(report);
    std::cout << text;
    if (!f.out_dir.empty()) {
        std::filesystem::create_directories(f.out_dir);
        std::ofstream out(std::filesystem::path(f.out_dir) / artifact_name);
        out << text;
    }
}

ojson report_header(const std::string& command, const CommonFlags& f) {
    ojson j = ojson::object();
    j["schema_version"] = 1;
    j["command"] = command;
    j["problem"] = f.problem_path;
    j["mode"] = f.mode;
    j["seed"] = f.seed;
    return j;
}

int exit_code_for(Verdict v) {
    if (v == Verdict::Regular) return 0;
    if (v == Verdict::Irregular) return 2;
    return 3;
}

int exit_code_for(CertStatus s) {
    if (s == CertStatus::Certified) return 0;
    if (s == CertStatus::Refuted) return 2;
    return 3;
}

int run_parse(const CommonFlags& f) {
    ProblemFile p = load_problem(f.problem_path);
    ojson j = report_header("parse", f);
    j["canonical"] = problem_to_json(p);
    emit(j, f, "parse.json");
    std::cerr << "parsed " << f.problem_path << ": ambient R^" << p.ambient_dim << ", "
              << p.semivariety.pieces.size() << " piece(s), " << p.strata.size()
              << " declared strata\n";
    return 0;
}

int run_filtrate(const CommonFlags& f) {
    ProblemFile p = load_problem(f.problem_path);
    FiltrateOptions opts;
    if (p.params.contains("declared_dim")) opts.declared_dim = p.params["declared_dim"].get<int>();
    Filtration filt = filtrate(p.semivariety, f.seed, opts);
    ojson j = report_header("filtrate", f);
    ojson levels = ojson::array();
    for (const auto& lv : filt.levels) {
        ojson level = ojson::object();
        level["dim"] = lv.dim;
        level["set"] = semivariety_to_json(lv.set, p.variables);
        levels.push_back(level);
    }
    j["levels"] = levels;
    std::string diag;
    j["verified"] = verify_filtration(filt, f.seed + 3, &diag);
    if (!diag.empty()) j["diagnostic"] = diag;
    emit(j, f, "filtration.json");
    std::cerr << "filtration with " << filt.levels.size() << " level(s)\n";
    return 0;
}

struct PairContext {
    ProblemFile problem;
    const Stratum* j = nullptr;
    const Stratum* i = nullptr;
    Vec x;
};

PairContext load_pair(const CommonFlags& f) {
    PairContext ctx;
    ctx.problem = load_problem(f.problem_path);
    if (f.pair.empty()) throw ProblemError("--pair j_id,i_id is required");
    auto comma = f.pair.find(',');
    if (comma == std::string::npos) throw ProblemError("--pair expects two ids");
    std::string jid = f.pair.substr(0, comma), iid = f.pair.substr(comma + 1);
    ctx.j = find_stratum(ctx.problem, jid);
    ctx.i = find_stratum(ctx.problem, iid);
    if (!ctx.j) throw ProblemError("unknown stratum id '" + jid + "'");
    if (!ctx.i) throw ProblemError("unknown stratum id '" + iid + "'");
    if (!f.x.empty()) {
        auto coords = parse_csv_doubles(f.x);
        if (static_cast<int>(coords.size()) != ctx.problem.ambient_dim)
            throw ProblemError("--x has wrong dimension");
        ctx.x = Eigen::Map<Vec>(coords.data(), coords.size());
    } else if (!ctx.problem.base_points.empty()) {
        ctx.x = ctx.problem.base_points.front();
    } else {
        throw ProblemError("no base point: pass --x or add base_points to the problem");
    }
    return ctx;
}

int run_check_pair(const CommonFlags& f) {
    PairContext ctx = load_pair(f);
    CheckParams params = build_check_params(ctx.problem, f);
    StratumNumerics nj(*ctx.j), ni(*ctx.i);
    TripleVerdict v = classify_triple(nj, ni, ctx.x, params);
    ojson j = report_header("check-pair", f);
    j["verdict"] = verdict_to_json(v);
    emit(j, f, "check_pair.json");
    if (!v.ok()) {
        std::cerr << "error: " << v.error << "\n";
        return 1;
    }
    Verdict decide = f.mode == "a" ? v.a.status : v.b.status;
    std::cerr << "triple (" << v.j_id << ", " << v.i_id << ", x): a "
              << verdict_name(v.a.status) << ", b " << verdict_name(v.b.status) << "\n";
    return exit_code_for(decide);
}

int run_kuo_trace(const CommonFlags& f) {
    PairContext ctx = load_pair(f);
    CheckParams params = build_check_params(ctx.problem, f);
    StratumNumerics nj(*ctx.j), ni(*ctx.i);
    KuoFrame frame = kuo_frame(ni, ctx.x, params.tol_rank, params.tol_on);
    KuoTrace trace = build_trace(nj, frame, params.shells, params.seed, params.tol_rank,
                                 params.tol_on, params.exec);
    std::ostringstream csv;
    write_trace_csv(csv, trace);
    if (!f.out_dir.empty()) {
        std::filesystem::create_directories(f.out_dir);
        std::ofstream out(std::filesystem::path(f.out_dir) / "trace.csv");
        out << csv.str();
    }
    if (f.dump_traces || f.out_dir.empty()) std::cout << csv.str();
    std::cerr << "trace with " << trace.entries.size() << " samples over "
              << trace.populated_shells() << " populated shells\n";
    return 0;
}

int run_refine(const CommonFlags& f) {
    PairContext ctx = load_pair(f);
    CheckParams params = build_check_params(ctx.problem, f);
    StratumNumerics nj(*ctx.j), ni(*ctx.i);

    std::vector<Vec> points =
        f.x.empty() ? ctx.problem.base_points : std::vector<Vec>{ctx.x};
    SingProbe probe;
    for (const Vec& p : points) {
        TripleVerdict v = classify_triple(nj, ni, p, params);
        if (!v.ok()) continue;
        probe.points.push_back(p);
        probe.verdicts.push_back(v);
    }
    RefineParams rp;
    rp.check = params;
    char mode = f.mode[0];
    RefineOutcome ro = refine_pair(nj, ni, probe, mode, rp);
    ojson j = report_header("refine", f);
    j["case_used"] = ro.case_used;
    j["anomaly"] = ro.anomaly;
    j["monotonicity_ok"] = ro.monotonicity_ok;
    ojson levels = ojson::array();
    for (const auto& ls : ro.levels) {
        ojson lj = ojson::object();
        lj["id"] = ls.id;
        lj["parent"] = ls.parent_id;
        lj["which"] = std::string(1, ls.which);
        lj["level"] = ls.level;
        ojson carrier = ojson::array();
        for (const auto& p : ls.carrier) carrier.push_back(vec_to_json(p));
        lj["carrier"] = carrier;
        levels.push_back(lj);
    }
    j["level_strata"] = levels;
    ojson crits = ojson::array();
    for (const auto& cs : ro.criticals) {
        ojson cj = ojson::object();
        cj["id"] = cs.id;
        cj["parent"] = cs.parent_id;
        cj["dim"] = cs.dim;
        cj["defining"] = semivariety_to_json(cs.defining, ctx.problem.variables);
        ojson carrier = ojson::array();
        for (const auto& p : cs.carrier) carrier.push_back(vec_to_json(p));
        cj["carrier"] = carrier;
        crits.push_back(cj);
    }
    j["critical_strata"] = crits;
    if (!ro.notes.empty()) j["notes"] = ro.notes;
    emit(j, f, "refine.json");
    std::cerr << "refine: case " << ro.case_used << ", " << ro.levels.size()
              << " level strata, " << ro.criticals.size() << " critical strata\n";
    if (ro.levels.empty() && ro.criticals.empty()) return ro.anomaly ? 3 : 2;
    return 0;
}

StratifyParams build_stratify_params(const ProblemFile& p, const CommonFlags& f) {
    StratifyParams sp;
    sp.refine.check = build_check_params(p, f);
    sp.max_depth = f.max_depth;
    if (p.params.contains("declared_dim"))
        sp.filtrate.declared_dim = p.params["declared_dim"].get<int>();
    if (p.params.contains("box_radius")) {
        sp.box_radius = p.params["box_radius"].get<double>();
        sp.filtrate.box_radius = sp.box_radius;
    }
    if (p.params.contains("cloud_samples"))
        sp.cloud_samples = p.params["cloud_samples"].get<int>();
    return sp;
}

int run_stratify(const CommonFlags& f) {
    ProblemFile p = load_problem(f.problem_path);
    StratifyParams sp = build_stratify_params(p, f);
    StratificationCertificate cert = stratify(p.semivariety, f.mode[0], sp);
    ojson j = report_header("stratify", f);
    j["certificate"] = certificate_to_json(cert, p.variables);
    emit(j, f, "certificate.json");
    std::cerr << "stratify: " << cert_status_name(cert.status) << " with "
              << cert.strata.size() << " strata after " << cert.rounds_used << " round(s)\n";
    return exit_code_for(cert.status);
}

int run_certify(const CommonFlags& f, const std::string& cert_path) {
    ProblemFile p = load_problem(f.problem_path);
    std::ifstream in(cert_path);
    if (!in) throw ProblemError("cannot open certificate file: " + cert_path);
    ojson cj;
    in >> cj;
    StratificationCertificate cert = certificate_from_json(cj);
    StratifyParams sp = build_stratify_params(p, f);
    std::uint64_t fresh = f.seed == cert.seed ? f.seed + 0x9e3779b9ull : f.seed;
    CertifyResult res = certify(cert, p.semivariety, sp, fresh);
    ojson j = report_header("certify", f);
    j["fresh_seed"] = fresh;
    j["status"] = cert_status_name(res.status);
    j["cloud_points"] = res.cloud_points;
    j["orphan_points"] = res.orphan_points;
    j["multi_points"] = res.multi_points;
    j["reprobed"] = res.reprobed;
    j["verdict_mismatches"] = res.verdict_mismatches;
    j["failures"] = res.failures;
    emit(j, f, "certify.json");
    std::cerr << "certify: " << cert_status_name(res.status) << "\n";
    return exit_code_for(res.status);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical Whitney stratification toolkit"};
    app.require_subcommand(1);

    CommonFlags f;
    std::string cert_path;

    auto add_common = [&](CLI::App* cmd, bool needs_problem = true) {
        if (needs_problem)
            cmd->add_option("problem", f.problem_path, "problem JSON file")->required();
        cmd->add_option("--mode", f.mode, "regularity mode: a or b")
            ->check(CLI::IsMember({"a", "b"}));
        cmd->add_option("--seed", f.seed, "random seed (all randomness derives from it)");
        cmd->add_option("--tol-rank", f.tol_rank, "relative singular value threshold");
        cmd->add_option("--tol-kuo", f.tol_kuo, "Kuo limit threshold");
        cmd->add_option("--radii", f.radii, "shell radii r0,gamma,n");
        cmd->add_option("--shells-probes", f.shells_probes, "probes per shell");
        cmd->add_option("--max-depth", f.max_depth, "refinement round budget");
        cmd->add_option("--out", f.out_dir, "artifact output directory");
        cmd->add_flag("--dump-traces", f.dump_traces, "dump Kuo traces as CSV");
        cmd->add_option("--pair", f.pair, "stratum pair j_id,i_id");
        cmd->add_option("--x", f.x, "base point coordinates, comma separated");
    };

    auto* c_parse = app.add_subcommand("parse", "parse and canonicalize a problem file");
    add_common(c_parse);
    auto* c_filtrate = app.add_subcommand("filtrate", "singular-locus filtration");
    add_common(c_filtrate);
    auto* c_check = app.add_subcommand("check-pair", "classify a triple (V_j, V_i, x)");
    add_common(c_check);
    auto* c_trace = app.add_subcommand("kuo-trace", "dump a Kuo trace along shells");
    add_common(c_trace);
    auto* c_refine = app.add_subcommand("refine", "Lemma-2 refinement of an irregular pair");
    add_common(c_refine);
    auto* c_stratify = app.add_subcommand("stratify", "compute a certified stratification");
    add_common(c_stratify);
    auto* c_certify = app.add_subcommand("certify", "independently re-check a certificate");
    add_common(c_certify);
    c_certify->add_option("certificate", cert_path, "certificate JSON file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_parse->parsed()) return run_parse(f);
        if (c_filtrate->parsed()) return run_filtrate(f);
        if (c_check->parsed()) return run_check_pair(f);
        if (c_trace->parsed()) return run_kuo_trace(f);
        if (c_refine->parsed()) return run_refine(f);
        if (c_stratify->parsed()) return run_stratify(f);
        if (c_certify->parsed()) return run_certify(f, cert_path);
    } catch (const ParseError& ex) {
        std::cerr << "parse error: " << ex.what() << "\n";
        return 1;
    } catch (const ProblemError& ex) {
        std::cerr << "input error: " << ex.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& ex) {
        std::cerr << "usage error: " << ex.what() << "\n";
        return 1;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 1;
}
