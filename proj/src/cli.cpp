#include "qus/cli.hpp"

#include "qus/dsl.hpp"
#include "qus/sampler.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace qus::cli {

namespace {

using Json = nlohmann::ordered_json;

std::string fmt_weight(double w) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", w);
    return buf;
}

std::string weights_text(std::span<const double> w) {
    std::string out = "[";
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) out += ", ";
        out += fmt_weight(w[i]);
    }
    return out + "]";
}

std::string kernel_text(const Kernel<double>& k) {
    std::string out = k.domain->name() + " -> " + k.codomain->name() + " = { ";
    for (std::size_t r = 0; r < k.domain->size(); ++r) {
        if (r) out += "; ";
        out += k.domain->point(r) + ": " + weights_text(k.row(r));
    }
    return out + " }";
}

// Line-oriented key=value report with a JSON twin.
struct Report {
    std::vector<std::string> lines;
    Json j = Json::object();

    void add(const std::string& key, const std::string& value) {
        lines.push_back(key + "=" + value);
        j[key] = value;
    }
    void add(const std::string& key, bool value) {
        lines.push_back(key + "=" + (value ? "true" : "false"));
        j[key] = value;
    }
    void add(const std::string& key, std::uint64_t value) {
        lines.push_back(key + "=" + std::to_string(value));
        j[key] = value;
    }
    void add_weight(const std::string& key, double value) {
        lines.push_back(key + "=" + fmt_weight(value));
        j[key] = value;
    }
    void add_weights(const std::string& key, std::span<const double> w) {
        lines.push_back(key + "=" + weights_text(w));
        j[key] = std::vector<double>(w.begin(), w.end());
    }

    void print(std::ostream& out, bool json_mode) const {
        if (json_mode) {
            out << j.dump() << "\n";
        } else {
            for (const auto& l : lines) out << l << "\n";
        }
    }
};

dsl::ParsedModel load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("cannot open model file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return dsl::parse_model(ss.str());
}

// '{A, B}' or '{}' on the command line
std::vector<std::string> parse_set_arg(const std::string& raw) {
    std::string s = raw;
    auto trim = [](std::string& x) {
        while (!x.empty() && (x.front() == ' ' || x.front() == '\t')) x.erase(x.begin());
        while (!x.empty() && (x.back() == ' ' || x.back() == '\t')) x.pop_back();
    };
    trim(s);
    if (s.size() < 2 || s.front() != '{' || s.back() != '}')
        throw DomainError("set literal must look like '{A, B}' or '{}': got '" + raw + "'");
    s = s.substr(1, s.size() - 2);
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(s);
    while (std::getline(ss, cur, ',')) {
        trim(cur);
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

std::string set_text(const std::vector<std::string>& s) {
    std::string out = "{";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += ", ";
        out += s[i];
    }
    return out + "}";
}

// one draw per (sample, node), on disjoint seed paths
std::vector<std::size_t> ancestral_counts(const CbnModel& m, int target, std::size_t n,
                                          const Seed& root, std::size_t given) {
    const Cdag& g = m.graph();
    const SpacePtr& js = m.input_space();
    std::vector<std::size_t> counts(m.space(target)->size(), 0);
    std::vector<int> vals(g.node_count(), -1);
    std::vector<int> jcoords(g.input_count());
    for (std::size_t k = 0; k < n; ++k) {
        Seed sk = seed_child(root, k);
        if (g.input_count() > 0) {
            if (js->is_product()) {
                js->split_index(given, jcoords);
            } else {
                jcoords[0] = static_cast<int>(given);
            }
            for (std::size_t jv = 0; jv < g.input_count(); ++jv) vals[jv] = jcoords[jv];
        }
        for (int v : g.topological_order()) {
            if (g.is_input(v)) continue;
            const Kernel<double>& kv = m.kernel(v);
            std::size_t pidx = 0;
            for (int p : m.canonical_parents(v))
                pidx = pidx * m.space(p)->size() + static_cast<std::size_t>(vals[static_cast<std::size_t>(p)]);
            vals[static_cast<std::size_t>(v)] =
                quantile_index(kv.row(pidx), uniform(seed_child(sk, static_cast<std::uint64_t>(v))));
        }
        counts[static_cast<std::size_t>(vals[static_cast<std::size_t>(target)])]++;
    }
    return counts;
}

struct Options {
    std::string file;
    std::string graph_or_cbn;
    std::string set_a, set_b, set_c;
    std::string cbn_name;
    std::string kernel_name;
    std::string node;
    std::string family;
    std::string given;
    std::string grid = "0,0.05,0.1,0.15,0.2,0.25,0.3,0.35,0.4,0.45,0.5,"
                       "0.55,0.6,0.65,0.7,0.75,0.8,0.85,0.9,0.95,1";
    std::uint64_t seed = 0;
    std::uint64_t n = 100000;
    std::size_t prefix = 1;
    std::size_t max_set_size = 2;
    double tol = 1e-12;
    bool json = false;
    bool converse = false;
    bool dump = false;
    Fallback fallback = Fallback::uniform;
};

int cmd_check(const Options& o, std::ostream& out) {
    dsl::ParsedModel m = load(o.file);
    if (o.dump) {
        out << dsl::serialize(m);
        return 0;
    }
    Report r;
    r.add("ok", true);
    r.add("spaces", static_cast<std::uint64_t>(m.spaces.size()));
    r.add("dists", static_cast<std::uint64_t>(m.dists.size()));
    r.add("kernels", static_cast<std::uint64_t>(m.kernels.size()));
    r.add("graphs", static_cast<std::uint64_t>(m.graphs.size()));
    r.add("cbns", static_cast<std::uint64_t>(m.cbns.size()));
    r.add("families", static_cast<std::uint64_t>(m.families.size()));
    r.add("queries", static_cast<std::uint64_t>(m.queries().size()));
    r.print(out, o.json);
    return 0;
}

int cmd_dsep(const Options& o, std::ostream& out) {
    dsl::ParsedModel m = load(o.file);
    const Cdag& g = m.sole_graph(o.graph_or_cbn);
    auto a = parse_set_arg(o.set_a), b = parse_set_arg(o.set_b), c = parse_set_arg(o.set_c);
    bool sep = d_separated(g, a, b, c);
    Report r;
    r.add("query", "dsep " + set_text(a) + " _||_ " + set_text(b) + " | " + set_text(c));
    r.add("result", sep);
    r.print(out, o.json);
    return 0;
}

int cmd_tci(const Options& o, std::ostream& out) {
    dsl::ParsedModel m = load(o.file);
    const CbnModel& cbn = m.sole_cbn(o.cbn_name);
    auto a = parse_set_arg(o.set_a), b = parse_set_arg(o.set_b), c = parse_set_arg(o.set_c);
    TciWitness wit = tci_on_model(cbn, a, b, c, o.tol);
    Report r;
    r.add("query", "tci " + set_text(a) + " _||_ " + set_text(b) + " | " + set_text(c));
    r.add("holds", wit.holds);
    r.add_weight("max_dev", wit.max_dev);
    if (wit.holds && wit.q) {
        r.add("q", kernel_text(*wit.q));
    } else if (wit.counterexample) {
        const auto& ce = *wit.counterexample;
        r.add("counterexample", "t:" + std::to_string(ce.t) + ",x:" + std::to_string(ce.x) +
                                    ",y:" + std::to_string(ce.y) + ",z:" + std::to_string(ce.z));
    }
    r.print(out, o.json);
    return 0;
}

int cmd_gmp(const Options& o, std::ostream& out) {
    dsl::ParsedModel m = load(o.file);
    const CbnModel& cbn = m.sole_cbn(o.cbn_name);
    GmpReport rep = gmp_sweep(cbn, o.max_set_size, o.converse, o.tol);
    Report r;
    r.add("max_set_size", static_cast<std::uint64_t>(o.max_set_size));
    r.add("triples", static_cast<std::uint64_t>(rep.triples));
    r.add("dsep", static_cast<std::uint64_t>(rep.dsep_count));
    r.add("violations", static_cast<std::uint64_t>(rep.violations.size()));
    if (rep.converse_checked)
        r.add("tci_without_dsep", static_cast<std::uint64_t>(rep.tci_holds_without_dsep));
    for (std::size_t i = 0; i < rep.violations.size(); ++i) {
        const auto& v = rep.violations[i];
        r.add("violation_" + std::to_string(i),
              set_text(v.a) + " _||_ " + set_text(v.b) + " | " + set_text(v.c));
    }
    r.print(out, o.json);
    return 0;
}

int cmd_joint(const Options& o, std::ostream& out) {
    dsl::ParsedModel m = load(o.file);
    const CbnModel& cbn = m.sole_cbn(o.cbn_name);
    Kernel<double> joint = joint_kernel(cbn);
    Report r;
    r.add("domain", joint.domain->name());
    r.add("codomain", joint.codomain->name());
    for (std::size_t t = 0; t < joint.domain->size(); ++t)
        r.add_weights("row[" + joint.domain->point(t) + "]", joint.row(t));
    r.print(out, o.json);
    return 0;
}

int cmd_disintegrate(const Options& o, std::ostream& out) {
    dsl::ParsedModel m = load(o.file);
    auto it = m.kernels.find(o.kernel_name);
    if (it == m.kernels.end()) throw DomainError("no kernel named '" + o.kernel_name + "'");
    Disintegration<double> dis = disintegrate(it->second, o.fallback);
    Report r;
    r.add("kernel", o.kernel_name);
    r.add("marg", kernel_text(dis.marg));
    r.add("cond", kernel_text(dis.cond));
    r.add("factorization_ok", check_factorization(it->second, dis.cond, o.tol));
    r.print(out, o.json);
    return 0;
}

int cmd_detcheck(const Options& o, std::ostream& out) {
    dsl::ParsedModel m = load(o.file);
    auto it = m.kernels.find(o.kernel_name);
    if (it == m.kernels.end()) throw DomainError("no kernel named '" + o.kernel_name + "'");
    const Kernel<double>& k = it->second;
    bool zo = is_zero_one_deterministic(k, o.tol);
    bool cp = is_copy_deterministic(k, o.tol);
    Report r;
    r.add("kernel", o.kernel_name);
    r.add("zero_one_deterministic", zo);
    r.add("copy_deterministic", cp);
    if (zo) {
        FnPoint g = extract_function(k, o.tol);
        std::string tab = "[";
        for (std::size_t z = 0; z < g.table.size(); ++z) {
            if (z) tab += ", ";
            tab += g.codomain->point(static_cast<std::size_t>(g.table[z]));
        }
        r.add("function", tab + "]");
    }
    r.print(out, o.json);
    return 0;
}

int cmd_definetti(const Options& o, std::ostream& out) {
    dsl::ParsedModel m = load(o.file);
    auto it = m.kernels.find(o.kernel_name);
    if (it == m.kernels.end()) throw DomainError("no kernel named '" + o.kernel_name + "'");
    std::vector<double> grid;
    {
        std::istringstream ss(o.grid);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (tok.empty()) continue;
            grid.push_back(std::strtod(tok.c_str(), nullptr));
        }
    }
    bool ex = is_exchangeable(it->second, o.tol);
    auto fits = definetti_mixture(it->second, grid);
    Report r;
    r.add("kernel", o.kernel_name);
    r.add("exchangeable", ex);
    r.add_weights("grid", {fits.front().grid.data(), fits.front().grid.size()});
    for (std::size_t z = 0; z < fits.size(); ++z) {
        const std::string zl = it->second.domain->point(z);
        r.add_weights("weights[" + zl + "]", {fits[z].weights.data(), fits[z].weights.size()});
        r.add_weight("residual[" + zl + "]", fits[z].max_residual);
    }
    r.print(out, o.json);
    return 0;
}

int cmd_sample(const Options& o, std::ostream& out) {
    dsl::ParsedModel m = load(o.file);
    if (o.n == 0) throw DomainError("sample: need --n >= 1");
    Seed root = seed_root(o.seed);
    Report r;
    r.add("seed", o.seed);
    r.add("n", o.n);

    if (!o.node.empty()) {
        const CbnModel& cbn = m.sole_cbn(o.cbn_name);
        int target = cbn.graph().require_node(o.node);
        std::size_t given = 0;
        if (cbn.graph().input_count() > 0) {
            if (o.given.empty() && cbn.input_space()->size() > 1)
                throw DomainError("sample: model has input nodes; pass --given <input point>");
            if (!o.given.empty()) {
                int gi = cbn.input_space()->index_of(o.given);
                if (gi < 0) throw DomainError("sample: unknown input point '" + o.given + "'");
                given = static_cast<std::size_t>(gi);
            }
        }
        r.add("node", o.node);
        auto counts = ancestral_counts(cbn, target, o.n, root, given);
        const SpacePtr& sp = cbn.space(target);
        for (std::size_t i = 0; i < counts.size(); ++i)
            r.add_weight("freq[" + sp->point(i) + "]",
                         static_cast<double>(counts[i]) / static_cast<double>(o.n));
        r.print(out, o.json);
        return 0;
    }

    if (!o.family.empty()) {
        auto it = m.families.find(o.family);
        if (it == m.families.end()) throw DomainError("no family named '" + o.family + "'");
        const dsl::FamilyDef& fam = it->second;
        if (o.prefix < 1 || o.prefix > fam.depth)
            throw DomainError("sample: --prefix must be in [1, depth=" + std::to_string(fam.depth) + "]");
        int z = 0;
        if (!o.given.empty()) {
            z = fam.model.z_space->index_of(o.given);
            if (z < 0) throw DomainError("sample: unknown Z point '" + o.given + "'");
        } else if (fam.model.z_space->size() > 1) {
            throw DomainError("sample: family has a nontrivial Z; pass --given <z point>");
        }
        r.add("family", o.family);
        r.add("prefix", static_cast<std::uint64_t>(o.prefix));
        SequenceSampler ext = extend(fam.model);
        Dist<double> emp = prefix_marginal(ext, o.prefix - 1, z, o.n, root);
        for (std::size_t i = 0; i < emp.size(); ++i)
            r.add_weight("freq[" + emp.space->point(i) + "]", emp.w[i]);
        r.print(out, o.json);
        return 0;
    }

    throw DomainError("sample: pass --node or --family");
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"finite Markov-kernel calculus for causal models"};
    app.require_subcommand(1);
    Options o;

    app.add_flag("--json", o.json, "emit one JSON object per query");

    auto add_common = [&](CLI::App* c) {
        c->add_option("file", o.file, "model file")->required();
    };

    CLI::App* check = app.add_subcommand("check", "parse and validate a model file");
    add_common(check);
    check->add_flag("--dump", o.dump, "print the canonical serialization");

    CLI::App* dsep = app.add_subcommand("dsep", "decide a d-separation query");
    add_common(dsep);
    dsep->add_option("graph", o.graph_or_cbn, "graph name")->required();
    dsep->add_option("A", o.set_a, "source set, e.g. '{Z}'")->required();
    dsep->add_option("B", o.set_b, "target set")->required();
    dsep->add_option("C", o.set_c, "conditioning set")->required();

    CLI::App* tci = app.add_subcommand("tci", "decide transitional conditional independence");
    add_common(tci);
    tci->add_option("A", o.set_a, "left set")->required();
    tci->add_option("B", o.set_b, "right set")->required();
    tci->add_option("C", o.set_c, "conditioning set")->required();
    tci->add_option("--cbn", o.cbn_name, "cbn name (defaults to the only one)");
    tci->add_option("--tol", o.tol, "atomwise tolerance");

    CLI::App* gmp = app.add_subcommand("gmp", "global Markov property sweep");
    add_common(gmp);
    gmp->add_option("--cbn", o.cbn_name, "cbn name");
    gmp->add_option("--max-set-size", o.max_set_size, "max |A|,|B|,|C|");
    gmp->add_flag("--converse", o.converse, "also count TCI holds without d-separation");
    gmp->add_option("--tol", o.tol, "atomwise tolerance");

    CLI::App* joint = app.add_subcommand("joint", "print the joint kernel of a cbn");
    add_common(joint);
    joint->add_option("--cbn", o.cbn_name, "cbn name");

    CLI::App* dis = app.add_subcommand("disintegrate", "factor a kernel Z->(X x Y)");
    add_common(dis);
    dis->add_option("kernel", o.kernel_name, "kernel name")->required();
    dis->add_option("--tol", o.tol, "atomwise tolerance");
    std::string fb = "uniform";
    dis->add_option("--fallback", fb, "zero-mass rows: uniform|dirac");

    CLI::App* det = app.add_subcommand("detcheck", "deterministic-kernel diagnostics");
    add_common(det);
    det->add_option("kernel", o.kernel_name, "kernel name")->required();
    det->add_option("--tol", o.tol, "atomwise tolerance");

    CLI::App* defin = app.add_subcommand("definetti", "grid mixture diagnostic for X^n kernels");
    add_common(defin);
    defin->add_option("kernel", o.kernel_name, "kernel name")->required();
    defin->add_option("--grid", o.grid, "comma-separated success probabilities");
    defin->add_option("--tol", o.tol, "atomwise tolerance");

    CLI::App* sample = app.add_subcommand("sample", "empirical frequencies via the seed tree");
    add_common(sample);
    sample->add_option("--node", o.node, "cbn node to sample");
    sample->add_option("--family", o.family, "sequence family to sample");
    sample->add_option("--prefix", o.prefix, "prefix length for --family");
    sample->add_option("--cbn", o.cbn_name, "cbn name");
    sample->add_option("--given", o.given, "input point (cbn) or Z point (family)");
    sample->add_option("--n", o.n, "sample count");
    sample->add_option("--seed", o.seed, "64-bit seed");

    std::vector<const char*> argv;
    argv.push_back("qus");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 1;
    }

    if (dis->parsed()) {
        if (fb == "dirac")
            o.fallback = Fallback::dirac_first;
        else if (fb != "uniform")
            throw DomainError("--fallback must be uniform or dirac");
    }

    try {
        if (check->parsed()) return cmd_check(o, out);
        if (dsep->parsed()) return cmd_dsep(o, out);
        if (tci->parsed()) return cmd_tci(o, out);
        if (gmp->parsed()) return cmd_gmp(o, out);
        if (joint->parsed()) return cmd_joint(o, out);
        if (dis->parsed()) return cmd_disintegrate(o, out);
        if (det->parsed()) return cmd_detcheck(o, out);
        if (defin->parsed()) return cmd_definetti(o, out);
        if (sample->parsed()) return cmd_sample(o, out);
    } catch (const DslError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const InternalError& e) {
        err << "internal error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 1;
}

} // namespace qus::cli
