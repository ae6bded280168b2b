#include "u21/cli.hpp"

#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "u21/prover.hpp"

namespace u21::cli {

namespace {

using nlohmann::ordered_json;

struct RunConfig {
    int p = 3;
    int f = 1;
    std::string K = "K0";
    int precision = 8;
    std::string char_spec = "0,0";
    std::string weight = "generic";  // generic | character | steinberg
    std::string format = "text";     // text | json | csv
    int depth = 6;
    int m_max = 2;
    std::string out_file;
    std::string in_file;

    Tag tag() const { return K == "K0" ? Tag::K0 : Tag::K1; }

    ordered_json to_json() const {
        return ordered_json{{"p", p},           {"f", f},
                            {"K", K},           {"precision", precision},
                            {"char", char_spec}, {"weight", weight},
                            {"depth", depth},   {"m_max", m_max}};
    }

    void validate() const {
        if (p < 3 || p % 2 == 0) throw UsageError("p must be an odd prime");
        if (K != "K0" && K != "K1") throw UsageError("K must be K0 or K1");
        if (precision < 2 * m_max + 4)
            throw UsageError("precision must be at least 2*m_max + 4");
        if (weight != "generic" && weight != "character" && weight != "steinberg")
            throw UsageError("weight must be generic, character or steinberg");
        if (format != "text" && format != "json" && format != "csv")
            throw UsageError("format must be text, json or csv");
    }
};

TorusCharacter parse_char_spec(const FieldTower& tw, const std::string& s) {
    size_t comma = s.find(',');
    if (comma == std::string::npos) throw UsageError("character spec must be 'a,b'");
    try {
        long a = std::stol(s.substr(0, comma));
        long b = std::stol(s.substr(comma + 1));
        return TorusCharacter::normalized(tw, a, b);
    } catch (const std::exception&) {
        throw UsageError("character spec must be 'a,b' with integers");
    }
}

ResidueScalar parse_scalar(const FieldTower& tw, const std::string& s) {
    try {
        if (s.rfind("g^", 0) == 0) return tw.from_index(tw.exp_idx(std::stol(s.substr(2))));
        return tw.from_int(std::stol(s));
    } catch (const UsageError&) {
        throw;
    } catch (const std::exception&) {
        throw UsageError("scalar must be an integer or g^k");
    }
}

WeightDescriptor weight_from_config(const FieldTower& tw, const RunConfig& cfg) {
    WeightDescriptor w;
    w.chi_sigma = parse_char_spec(tw, cfg.char_spec);
    if (cfg.weight == "steinberg") {
        w.steinberg_twist = true;
        w.dim_gt_one = true;
    } else if (cfg.weight == "character") {
        w.steinberg_twist = false;
        w.dim_gt_one = false;
    } else {
        w.steinberg_twist = false;
        w.dim_gt_one = true;
    }
    return w;
}

void emit(const RunConfig& cfg, const ordered_json& doc, const std::string& text,
          std::ostream& out) {
    std::ostream* dst = &out;
    std::ofstream file;
    if (!cfg.out_file.empty()) {
        file.open(cfg.out_file);
        if (!file) throw UsageError("cannot open output file " + cfg.out_file);
        dst = &file;
    }
    if (cfg.format == "json")
        *dst << doc.dump(2) << "\n";
    else
        *dst << text;
}

// ---------------------------------------------------------------------------
// certificate JSON

ordered_json step_to_json(const TraceStep& s) {
    ordered_json j;
    j["step"] = s.index;
    j["rule"] = rule_name(s.rule);
    j["paper_anchor"] = s.anchor;
    j["inputs"] = s.inputs;
    j["output"] = s.out_vec ? s.out_vec->str() : (s.out_poly ? s.out_poly->str() : "");
    if (s.op) j["op"] = op_name(*s.op);
    if (!s.multipliers.empty()) {
        std::vector<std::string> ms;
        for (auto& m : s.multipliers) ms.push_back(m.str());
        j["multipliers"] = ms;
    }
    if (s.target) j["target"] = *s.target;
    return j;
}

TraceStep step_from_json(const FieldTower& tw, const ordered_json& j) {
    TraceStep s;
    s.index = j.at("step").get<int>();
    auto r = parse_rule(j.at("rule").get<std::string>());
    if (!r) throw UsageError("unknown rule in certificate");
    s.rule = *r;
    s.anchor = j.at("paper_anchor").get<std::string>();
    s.inputs = j.at("inputs").get<std::vector<std::string>>();
    std::string outstr = j.at("output").get<std::string>();
    bool poly_output = s.rule == Rule::ExtractConstraint || s.rule == Rule::UnitContradiction;
    if (s.rule == Rule::RefuteHypothesis) {
        // refutation carries no payload
    } else if (poly_output) {
        s.out_poly = Poly::parse(tw, outstr);
    } else {
        s.out_vec = ModuleVector::parse(tw, outstr);
    }
    if (j.contains("op")) {
        auto op = parse_op(j.at("op").get<std::string>());
        if (!op) throw UsageError("unknown operator in certificate");
        s.op = *op;
    }
    if (j.contains("multipliers"))
        for (auto& m : j.at("multipliers")) s.multipliers.push_back(Poly::parse(tw, m.get<std::string>()));
    if (j.contains("target")) s.target = j.at("target").get<int>();
    return s;
}

ordered_json certificate_json(const Verdict& v) {
    ordered_json cert;
    cert["verdict"] = v.kind == Verdict::Kind::Contradiction ? "contradiction" : "inconclusive";
    std::vector<std::string> cs;
    for (auto& c : v.constraints) cs.push_back(c.str());
    cert["constraints"] = cs;
    cert["lambda_free"] = check_lambda_independence(v.trace);
    if (v.kind == Verdict::Kind::Inconclusive) {
        std::vector<std::string> rs;
        for (auto& c : v.residual) rs.push_back(c.str());
        cert["residual"] = rs;
    }
    ordered_json steps = ordered_json::array();
    for (auto& s : v.trace.steps) steps.push_back(step_to_json(s));
    cert["steps"] = steps;
    return cert;
}

// ---------------------------------------------------------------------------
// subcommands

int cmd_constants(const RunConfig& cfg, bool all_chars, std::ostream& out) {
    FieldTower tw(cfg.p, cfg.f, cfg.precision);
    Tag tag = cfg.tag();
    std::vector<TorusCharacter> chars;
    if (all_chars) chars = all_characters(tw);
    else chars = {parse_char_spec(tw, cfg.char_spec)};

    ordered_json results = ordered_json::array();
    std::ostringstream text;
    if (cfg.format == "csv") text << "a,b,c_minus,d_n,d_0,class\n";
    for (const auto& chi : chars) {
        WeightDescriptor w = weight_from_config(tw, cfg);
        w.chi_sigma = chi;
        ResidueScalar cminus = char_sum(tw, chi, tag, SumKind::Big);
        ResidueScalar dn = char_sum(tw, chi, tag, SumKind::Small);
        ResidueScalar dz = d0(tw, w);
        WeightClass cls = classify_weight(tw, chi, tag);
        std::string cls_s = cls == WeightClass::Degenerate ? "degenerate" : "regular";
        results.push_back(ordered_json{{"char", chi.str()},
                                       {"c_minus", cminus.str()},
                                       {"d_n", dn.str()},
                                       {"d_0", dz.str()},
                                       {"class", cls_s}});
        if (cfg.format == "csv")
            text << chi.a << "," << chi.b << "," << cminus.str() << "," << dn.str() << ","
                 << dz.str() << "," << cls_s << "\n";
        else
            text << "char (" << chi.str() << "): c_minus=" << cminus.str() << " d_n=" << dn.str()
                 << " d_0=" << dz.str() << " class=" << cls_s << "\n";
    }
    ordered_json doc{{"command", "constants"}, {"config", cfg.to_json()}, {"results", results}};
    emit(cfg, doc, text.str(), out);
    return 0;
}

int cmd_classify(const RunConfig& cfg, std::ostream& out) {
    FieldTower tw(cfg.p, cfg.f, cfg.precision);
    Tag tag = cfg.tag();
    ordered_json results = ordered_json::array();
    std::ostringstream text;
    if (cfg.format == "csv") text << "a,b,class,big_sum\n";
    int degenerate = 0;
    for (const auto& chi : all_characters(tw)) {
        // classify_weight verifies the degenerate value identity internally
        WeightClass cls = classify_weight(tw, chi, tag);
        ResidueScalar sum = char_sum(tw, chi, tag, SumKind::Big);
        if (cls == WeightClass::Degenerate) ++degenerate;
        std::string cls_s = cls == WeightClass::Degenerate ? "degenerate" : "regular";
        results.push_back(
            ordered_json{{"char", chi.str()}, {"class", cls_s}, {"big_sum", sum.str()}});
        if (cfg.format == "csv")
            text << chi.a << "," << chi.b << "," << cls_s << "," << sum.str() << "\n";
        else
            text << "char (" << chi.str() << "): " << cls_s << " big_sum=" << sum.str() << "\n";
    }
    text << "degenerate: " << degenerate << " of " << results.size()
         << "; value identity holds on all degenerate characters\n";
    ordered_json doc{{"command", "classify"}, {"config", cfg.to_json()}, {"results", results}};
    emit(cfg, doc, text.str(), out);
    return 0;
}

int cmd_verify_group(const RunConfig& cfg, std::ostream& out) {
    FieldTower tw(cfg.p, cfg.f, cfg.precision);
    Tag tag = cfg.tag();
    ordered_json results = ordered_json::array();
    std::ostringstream text;
    bool ok = true;
    auto report = [&](const std::string& name, bool pass, const std::string& detail) {
        ok = ok && pass;
        results.push_back(ordered_json{{"check", name}, {"status", pass ? "ok" : "fail"},
                                       {"detail", detail}});
        text << name << ": " << (pass ? "ok" : "FAIL") << (detail.empty() ? "" : " (" + detail + ")")
             << "\n";
    };

    ParahoricInfo info = parahoric_info(tw, tag);
    report("n_K + m_K = 1", info.n_K + info.m_K == 1,
           "n_K=" + std::to_string(info.n_K) + " m_K=" + std::to_string(info.m_K));

    // L-group laws
    {
        auto L3 = enumerate_L(tw, 3);
        auto L1 = enumerate_L(tw, 1);
        bool laws = L3.size() == static_cast<size_t>(tw.q() * tw.q() * tw.q()) &&
                    L1.size() == static_cast<size_t>(tw.q());
        for (const auto& a : L1)
            for (const auto& b : L3)
                laws = laws && L_equal(L_mul(a, b), L_mul(b, a));  // centrality
        size_t cap = tw.q() == 3 ? L3.size() : 9;  // exhaustive at q=3, sampled beyond
        for (size_t i = 0; i < cap && laws; ++i)
            for (size_t j = 0; j < cap && laws; ++j) {
                laws = laws && L_equal(L_mul(L3[i], L_inverse(L3[i])), L_identity(tw));
                for (size_t k = 0; k < cap && laws; ++k)
                    laws = laws && L_equal(L_mul(L_mul(L3[i], L3[j]), L3[k]),
                                           L_mul(L3[i], L_mul(L3[j], L3[k])));
            }
        report("L-group laws", laws,
               "|L|=" + std::to_string(L3.size()) + ", central subgroup " + std::to_string(L1.size()));
    }

    // flip identities
    {
        bool flips = true;
        int count = 0;
        for (FlipSide side : {FlipSide::LowerToUpper, FlipSide::UpperToLower})
            for (int n = 1; n <= 2; ++n)
                for (auto t : flip_valid_units(tw, tag, side)) {
                    try {
                        verify_flip(tw, n, t, tag, side);
                        ++count;
                    } catch (const Error&) {
                        flips = false;
                    }
                }
        report("flip identities (n <= 2)", flips, std::to_string(count) + " identities");
    }

    // Bruhat exclusivity over a transversal of K/K^1 (full at q = 3)
    {
        bool bruhat = true;
        long iw = 0, big = 0;
        if (tw.q() == 3) {
            for (const auto& gam : enumerate_Gamma(tw, tag)) {
                GroupElement g = gamma_section(gam);
                BruhatResult r = bruhat_cell(g, tag);
                bool in_iw = is_member(g, Subgroup::Iwahori, tag);
                bruhat = bruhat && (r.big_cell != in_iw);
                if (r.big_cell) {
                    ++big;
                    GroupElement recon = *r.i1 * beta_K(tw, tag) * *r.i2;
                    bruhat = bruhat && recon == g;
                } else {
                    ++iw;
                }
            }
        } else {
            for (const auto& u : enumerate_unipotent(tw, tag)) {
                GroupElement g = gamma_section(u);
                bruhat = bruhat && !bruhat_cell(g, tag).big_cell;
                GroupElement gb = g * beta_K(tw, tag);
                BruhatResult r = bruhat_cell(gb, tag);
                bruhat = bruhat && r.big_cell && (*r.i1 * beta_K(tw, tag) * *r.i2) == gb;
                ++iw;
                ++big;
            }
        }
        report("Bruhat cells", bruhat,
               "iwahori=" + std::to_string(iw) + " big=" + std::to_string(big));
    }

    ordered_json doc{{"command", "verify-group"}, {"config", cfg.to_json()}, {"results", results}};
    emit(cfg, doc, text.str(), out);
    return ok ? 0 : 1;
}

int cmd_verify_module(const RunConfig& cfg, std::ostream& out) {
    FieldTower tw(cfg.p, cfg.f, cfg.precision);
    Tag tag = cfg.tag();
    WeightModel model = build_steinberg(tw, tag);
    WeightDescriptor w = WeightDescriptor::steinberg();
    ConstantsPack pack = make_pack(tw, w, tag);
    std::vector<int> probes;
    for (int j = -cfg.m_max; j <= cfg.m_max; ++j) probes.push_back(j);

    ordered_json results = ordered_json::array();
    std::ostringstream text;
    bool ok = true;
    for (OpName op : {OpName::S_K, OpName::S_minus})
        for (int n = -cfg.m_max; n <= cfg.m_max; ++n) {
            ModuleVector closed = apply_op(op, ModuleVector::basis(tw, n), pack);
            bool match = true;
            auto got = oracle_apply(op, n, model, probes, cfg.m_max);
            for (auto& [j, val] : got) {
                std::vector<ResidueScalar> want = predicted_value(closed, model, j);
                match = match && val == want;
            }
            ok = ok && match;
            results.push_back(ordered_json{{"op", op_name(op)},
                                           {"n", n},
                                           {"probes", static_cast<int>(probes.size())},
                                           {"status", match ? "ok" : "fail"}});
            text << op_name(op) << " f[" << n << "]: " << (match ? "ok" : "FAIL") << "\n";
        }
    ordered_json doc{{"command", "verify-module"}, {"config", cfg.to_json()}, {"results", results}};
    emit(cfg, doc, text.str(), out);
    return ok ? 0 : 1;
}

int cmd_eigenvalue(const RunConfig& cfg, const std::string& eps_alpha,
                   const std::string& eps_char, std::ostream& out) {
    FieldTower tw(cfg.p, cfg.f, cfg.precision);
    Tag tag = cfg.tag();
    TorusCharacter chi = parse_char_spec(tw, cfg.char_spec);
    UnramifiedCharacter eps;
    eps.value_at_alpha = parse_scalar(tw, eps_alpha);
    eps.restriction = eps_char.empty() ? char_conjugate(tw, chi, tag)
                                       : parse_char_spec(tw, eps_char);
    ResidueScalar val = hecke_eigenvalue(tw, eps, chi, tag);
    ordered_json results = ordered_json::array();
    results.push_back(ordered_json{{"char", chi.str()},
                                   {"eps_alpha", eps.value_at_alpha.str()},
                                   {"eps_restriction", eps.restriction.str()},
                                   {"eigenvalue", val.str()}});
    std::ostringstream text;
    text << "eigenvalue = " << val.str() << "\n";
    ordered_json doc{{"command", "eigenvalue"}, {"config", cfg.to_json()}, {"results", results}};
    emit(cfg, doc, text.str(), out);
    return 0;
}

int cmd_prove(const RunConfig& cfg, std::ostream& out) {
    FieldTower tw(cfg.p, cfg.f, cfg.precision);
    Tag tag = cfg.tag();
    WeightDescriptor w = weight_from_config(tw, cfg);
    Verdict v = prove_conjecture(tw, w, tag, cfg.depth);
    // the certificate must replay cleanly before it is emitted
    validate_trace(v.trace, make_pack(tw, w, tag));
    ordered_json doc{{"command", "prove"}, {"config", cfg.to_json()},
                     {"results", ordered_json::array()}, {"certificate", certificate_json(v)}};
    std::ostringstream text;
    text << "verdict: "
         << (v.kind == Verdict::Kind::Contradiction ? "contradiction" : "inconclusive") << "\n";
    text << "constraints:";
    for (auto& c : v.constraints) text << " " << c.str();
    text << "\n" << trace_to_text(v.trace);
    emit(cfg, doc, text.str(), out);
    return v.kind == Verdict::Kind::Contradiction ? 0 : 2;
}

int cmd_check_cert(const RunConfig& cfg, std::ostream& out) {
    std::ifstream in(cfg.in_file);
    if (!in) throw UsageError("cannot open certificate file " + cfg.in_file);
    ordered_json doc = ordered_json::parse(in);
    const auto& jcfg = doc.at("config");
    RunConfig cc = cfg;
    cc.p = jcfg.at("p").get<int>();
    cc.f = jcfg.at("f").get<int>();
    cc.K = jcfg.at("K").get<std::string>();
    cc.precision = jcfg.at("precision").get<int>();
    cc.char_spec = jcfg.at("char").get<std::string>();
    cc.weight = jcfg.at("weight").get<std::string>();
    FieldTower tw(cc.p, cc.f, cc.precision);
    WeightDescriptor w = weight_from_config(tw, cc);
    DerivationTrace trace;
    for (const auto& js : doc.at("certificate").at("steps"))
        trace.steps.push_back(step_from_json(tw, js));
    validate_trace(trace, make_pack(tw, w, cc.tag()));
    bool lf = check_lambda_independence(trace);
    if (doc.at("certificate").at("lambda_free").get<bool>() != lf)
        throw IdentityFails("lambda_free flag does not match the trace");
    out << "certificate valid: " << trace.steps.size() << " steps\n";
    return 0;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"exact verification engine for rank-one unitary Hecke modules"};
    app.require_subcommand(1);

    RunConfig cfg;
    app.add_option("--p", cfg.p, "odd residue characteristic");
    app.add_option("--f", cfg.f, "residue degree: q = p^f");
    app.add_option("--K", cfg.K, "maximal compact: K0 or K1");
    app.add_option("--precision", cfg.precision, "series precision");
    app.add_option("--char", cfg.char_spec, "torus character 'a,b'");
    app.add_option("--weight", cfg.weight, "weight kind: generic, character, steinberg");
    app.add_option("--format", cfg.format, "output format: text, json, csv");
    app.add_option("--depth", cfg.depth, "derivation depth bound");
    app.add_option("--m-max", cfg.m_max, "support-level cap");
    app.add_option("--out", cfg.out_file, "write output to a file");

    bool all_chars = false;
    std::string eps_alpha = "1", eps_char;

    auto* c_constants = app.add_subcommand("constants", "structure constant table");
    c_constants->add_flag("--all-chars", all_chars, "sweep all characters");
    auto* c_classify = app.add_subcommand("classify", "degenerate/regular sweep with value check");
    auto* c_vgroup = app.add_subcommand("verify-group", "flips, Bruhat cells, filtration, L-laws");
    auto* c_vmodule = app.add_subcommand("verify-module", "oracle vs closed forms on the basis");
    auto* c_eigen = app.add_subcommand("eigenvalue", "principal-series Hecke eigenvalue");
    c_eigen->add_option("--eps-alpha", eps_alpha, "value of the unramified character at alpha");
    c_eigen->add_option("--eps-char", eps_char, "restriction of eps (default: compatible)");
    auto* c_prove = app.add_subcommand("prove", "derivation certificates");
    auto* c_check = app.add_subcommand("check-cert", "re-validate a certificate");
    c_check->add_option("file", cfg.in_file, "certificate JSON file")->required();
    c_check->group("");  // hidden
    for (auto* sub : {c_constants, c_classify, c_vgroup, c_vmodule, c_eigen, c_prove, c_check})
        sub->fallthrough();  // global flags may follow the subcommand

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            // --help goes to stdout with exit 0
            out << app.help();
            return 0;
        }
        err << "usage error: " << e.what() << "\n";
        return 3;
    }

    try {
        cfg.validate();
        if (*c_constants) return cmd_constants(cfg, all_chars, out);
        if (*c_classify) return cmd_classify(cfg, out);
        if (*c_vgroup) return cmd_verify_group(cfg, out);
        if (*c_vmodule) return cmd_verify_module(cfg, out);
        if (*c_eigen) return cmd_eigenvalue(cfg, eps_alpha, eps_char, out);
        if (*c_prove) return cmd_prove(cfg, out);
        if (*c_check) return cmd_check_cert(cfg, out);
        throw UsageError("no subcommand");
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        err << "verification failure: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        // malformed input files land here (JSON parse errors and the like)
        err << "verification failure: " << e.what() << "\n";
        return 1;
    }
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, out, err);
}

} // namespace u21::cli
