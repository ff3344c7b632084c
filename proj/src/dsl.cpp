#include "qus/dsl.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace qus::dsl {

namespace {

enum class Tok {
    word,
    lbrace,
    rbrace,
    lbracket,
    rbracket,
    lparen,
    rparen,
    colon,
    semi,
    comma,
    star,
    equals,
    bar,
    arrow,
    indep,  // _||_
    end,
};

struct Token {
    Tok kind;
    std::string text;
    int line, col;
};

const char* tok_name(Tok t) {
    switch (t) {
        case Tok::word: return "name";
        case Tok::lbrace: return "'{'";
        case Tok::rbrace: return "'}'";
        case Tok::lbracket: return "'['";
        case Tok::rbracket: return "']'";
        case Tok::lparen: return "'('";
        case Tok::rparen: return "')'";
        case Tok::colon: return "':'";
        case Tok::semi: return "';'";
        case Tok::comma: return "','";
        case Tok::star: return "'*'";
        case Tok::equals: return "'='";
        case Tok::bar: return "'|'";
        case Tok::arrow: return "'->'";
        case Tok::indep: return "'_||_'";
        case Tok::end: return "end of input";
    }
    return "?";
}

bool word_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_' || c == '.';
}

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_ws();
            int line = line_, col = col_;
            if (pos_ >= text_.size()) {
                out.push_back({Tok::end, "", line, col});
                return out;
            }
            char c = text_[pos_];
            if (c == '_' && text_.compare(pos_, 4, "_||_") == 0) {
                advance(4);
                out.push_back({Tok::indep, "_||_", line, col});
                continue;
            }
            if (word_char(c)) {
                std::string w;
                while (pos_ < text_.size()) {
                    char d = text_[pos_];
                    if (word_char(d)) {
                        w += d;
                        advance(1);
                        continue;
                    }
                    // exponent sign inside a numeric literal
                    if ((d == '+' || d == '-') && !w.empty() &&
                        (w.back() == 'e' || w.back() == 'E') && pos_ + 1 < text_.size() &&
                        text_[pos_ + 1] >= '0' && text_[pos_ + 1] <= '9' &&
                        (w[0] >= '0' && w[0] <= '9')) {
                        w += d;
                        advance(1);
                        continue;
                    }
                    break;
                }
                out.push_back({Tok::word, std::move(w), line, col});
                continue;
            }
            switch (c) {
                case '{': push_punct(out, Tok::lbrace, line, col); break;
                case '}': push_punct(out, Tok::rbrace, line, col); break;
                case '[': push_punct(out, Tok::lbracket, line, col); break;
                case ']': push_punct(out, Tok::rbracket, line, col); break;
                case '(': push_punct(out, Tok::lparen, line, col); break;
                case ')': push_punct(out, Tok::rparen, line, col); break;
                case ':': push_punct(out, Tok::colon, line, col); break;
                case ';': push_punct(out, Tok::semi, line, col); break;
                case ',': push_punct(out, Tok::comma, line, col); break;
                case '*': push_punct(out, Tok::star, line, col); break;
                case '=': push_punct(out, Tok::equals, line, col); break;
                case '|': push_punct(out, Tok::bar, line, col); break;
                case '-':
                    if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
                        advance(2);
                        out.push_back({Tok::arrow, "->", line, col});
                        break;
                    }
                    throw DslError(line, col, "stray '-' (expected '->')");
                default:
                    throw DslError(line, col, std::string("unexpected character '") + c + "'");
            }
        }
    }

private:
    void push_punct(std::vector<Token>& out, Tok t, int line, int col) {
        advance(1);
        out.push_back({t, "", line, col});
    }

    void skip_ws() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance(1);
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance(1);
            } else {
                return;
            }
        }
    }

    void advance(std::size_t n) {
        for (std::size_t i = 0; i < n && pos_ < text_.size(); ++i) {
            if (text_[pos_] == '\n') {
                ++line_;
                col_ = 1;
            } else {
                ++col_;
            }
            ++pos_;
        }
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;
};

// Weight vectors are accepted when they sum to 1 within this tolerance and
// then normalized exactly once, so reserialization is stable.
constexpr double kParseWeightTol = 1e-9;

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    ParsedModel run() {
        while (!at(Tok::end)) {
            const Token& t = peek();
            if (t.kind != Tok::word)
                throw DslError(t.line, t.col, std::string("expected a declaration, got ") + tok_name(t.kind));
            if (t.text == "space")
                parse_space();
            else if (t.text == "dist")
                parse_dist();
            else if (t.text == "kernel")
                parse_kernel();
            else if (t.text == "graph")
                parse_graph();
            else if (t.text == "cbn")
                parse_cbn();
            else if (t.text == "family")
                parse_family();
            else if (t.text == "query")
                parse_query();
            else
                throw DslError(t.line, t.col, "unknown declaration '" + t.text + "'");
        }
        return std::move(model_);
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    bool at(Tok k) const { return peek().kind == k; }

    Token eat(Tok k) {
        const Token& t = peek();
        if (t.kind != k)
            throw DslError(t.line, t.col, std::string("expected ") + tok_name(k) + ", got " +
                                              (t.kind == Tok::word ? "'" + t.text + "'" : tok_name(t.kind)));
        ++pos_;
        return t;
    }

    Token eat_word(const char* what) {
        const Token& t = peek();
        if (t.kind != Tok::word)
            throw DslError(t.line, t.col, std::string("expected ") + what + ", got " + tok_name(t.kind));
        ++pos_;
        return t;
    }

    void eat_keyword(const char* kw) {
        Token t = eat_word(kw);
        if (t.text != kw) throw DslError(t.line, t.col, std::string("expected '") + kw + "'");
    }

    double parse_number() {
        Token t = eat_word("a number");
        const char* s = t.text.c_str();
        char* end = nullptr;
        double v = std::strtod(s, &end);
        if (end != s + t.text.size() || !std::isfinite(v))
            throw DslError(t.line, t.col, "malformed number '" + t.text + "'");
        return v;
    }

    std::size_t parse_count() {
        Token t = eat_word("a count");
        char* end = nullptr;
        unsigned long long v = std::strtoull(t.text.c_str(), &end, 10);
        if (end != t.text.c_str() + t.text.size())
            throw DslError(t.line, t.col, "malformed count '" + t.text + "'");
        return static_cast<std::size_t>(v);
    }

    // [w, w, ...] validated against `space`, normalized once
    std::vector<double> parse_weights(const SpacePtr& space) {
        Token open = eat(Tok::lbracket);
        std::vector<double> w;
        if (!at(Tok::rbracket)) {
            w.push_back(parse_number());
            while (at(Tok::comma)) {
                eat(Tok::comma);
                w.push_back(parse_number());
            }
        }
        eat(Tok::rbracket);
        if (w.size() != space->size())
            throw DslError(open.line, open.col,
                           "expected " + std::to_string(space->size()) + " weights for space '" +
                               space->name() + "', got " + std::to_string(w.size()));
        double total = 0.0;
        for (double v : w) {
            if (v < 0.0) throw DslError(open.line, open.col, "negative weight");
            total += v;
        }
        if (std::fabs(total - 1.0) > kParseWeightTol)
            throw DslError(open.line, open.col,
                           "weights sum to " + std::to_string(total) + ", not 1");
        // One division brings the sum inside the core 1e-12 invariant; raw
        // weights already inside it are kept, so reserialization is stable.
        if (std::fabs(total - 1.0) > 1e-12)
            for (double& v : w) v /= total;
        return w;
    }

    template <class M>
    void check_fresh(const M& map, const Token& name, const char* kind) {
        if (map.count(name.text))
            throw DslError(name.line, name.col,
                           std::string("duplicate ") + kind + " name '" + name.text + "'");
    }

    SpacePtr lookup_space(const Token& t) {
        auto it = model_.spaces.find(t.text);
        if (it == model_.spaces.end())
            throw DslError(t.line, t.col, "unknown space '" + t.text + "'");
        return it->second;
    }

    void parse_space() {
        eat_keyword("space");
        Token name = eat_word("a space name");
        check_fresh(model_.spaces, name, "space");
        eat(Tok::equals);
        eat(Tok::lbrace);
        std::vector<std::string> atoms;
        atoms.push_back(eat_word("an atom").text);
        while (at(Tok::comma)) {
            eat(Tok::comma);
            atoms.push_back(eat_word("an atom").text);
        }
        eat(Tok::rbrace);
        try {
            model_.spaces.emplace(name.text, Space::make(name.text, atoms));
        } catch (const Error& e) {
            throw DslError(name.line, name.col, e.what());
        }
        model_.decls.push_back(SpaceDecl{name.text});
    }

    void parse_dist() {
        eat_keyword("dist");
        Token name = eat_word("a dist name");
        check_fresh(model_.dists, name, "dist");
        eat(Tok::colon);
        SpacePtr space = lookup_space(eat_word("a space name"));
        eat(Tok::equals);
        std::vector<double> w = parse_weights(space);
        model_.dists.emplace(name.text, Dist<double>(space, std::move(w)));
        model_.decls.push_back(DistDecl{name.text, space->name()});
    }

    void parse_kernel() {
        eat_keyword("kernel");
        Token name = eat_word("a kernel name");
        check_fresh(model_.kernels, name, "kernel");
        eat(Tok::colon);
        std::vector<std::string> dom_names;
        std::vector<SpacePtr> dom_spaces;
        {
            Token t = eat_word("a space name");
            dom_names.push_back(t.text);
            dom_spaces.push_back(lookup_space(t));
        }
        while (at(Tok::star)) {
            eat(Tok::star);
            Token t = eat_word("a space name");
            dom_names.push_back(t.text);
            dom_spaces.push_back(lookup_space(t));
        }
        eat(Tok::arrow);
        std::vector<std::string> cod_names;
        std::vector<SpacePtr> cod_spaces;
        {
            Token t = eat_word("a space name");
            cod_names.push_back(t.text);
            cod_spaces.push_back(lookup_space(t));
        }
        while (at(Tok::star)) {
            eat(Tok::star);
            Token t = eat_word("a space name");
            cod_names.push_back(t.text);
            cod_spaces.push_back(lookup_space(t));
        }
        SpacePtr cod, dom;
        try {
            cod = cod_spaces.size() == 1 ? cod_spaces[0] : Space::product(cod_spaces);
            dom = dom_spaces.size() == 1 ? dom_spaces[0] : Space::product(dom_spaces);
        } catch (const Error& e) {
            throw DslError(name.line, name.col, e.what());
        }

        eat(Tok::equals);
        eat(Tok::lbrace);
        std::vector<bool> seen(dom->size(), false);
        std::vector<double> table(dom->size() * cod->size(), 0.0);
        while (true) {
            Token keytok = peek();
            std::size_t row = parse_row_key(dom, dom_spaces);
            if (seen[row])
                throw DslError(keytok.line, keytok.col, "duplicate kernel row for '" + dom->point(row) + "'");
            seen[row] = true;
            eat(Tok::colon);
            std::vector<double> w = parse_weights(cod);
            std::copy(w.begin(), w.end(), table.begin() + static_cast<long>(row * cod->size()));
            if (at(Tok::semi)) {
                eat(Tok::semi);
                if (at(Tok::rbrace)) break;  // trailing separator
                continue;
            }
            break;
        }
        Token close = eat(Tok::rbrace);
        for (std::size_t r = 0; r < dom->size(); ++r)
            if (!seen[r])
                throw DslError(close.line, close.col,
                               "kernel '" + name.text + "' missing row for '" + dom->point(r) + "'");
        model_.kernels.emplace(name.text, Kernel<double>(dom, cod, std::move(table)));
        model_.decls.push_back(KernelDecl{name.text, dom_names, cod_names});
    }

    // atom, or (atom, atom, ...) matching the domain's factor count
    std::size_t parse_row_key(const SpacePtr& dom, const std::vector<SpacePtr>& factors) {
        if (factors.size() == 1) {
            Token t = eat_word("a domain point");
            int idx = dom->index_of(t.text);
            if (idx < 0)
                throw DslError(t.line, t.col,
                               "'" + t.text + "' is not a point of space '" + dom->name() + "'");
            return static_cast<std::size_t>(idx);
        }
        Token open = eat(Tok::lparen);
        std::vector<int> coords;
        for (std::size_t k = 0; k < factors.size(); ++k) {
            if (k) eat(Tok::comma);
            Token t = eat_word("an atom");
            int idx = factors[k]->index_of(t.text);
            if (idx < 0)
                throw DslError(t.line, t.col,
                               "'" + t.text + "' is not a point of space '" + factors[k]->name() + "'");
            coords.push_back(idx);
        }
        eat(Tok::rparen);
        (void)open;
        return dom->tuple_index(coords);
    }

    std::vector<std::string> parse_id_list_until(Tok stop) {
        std::vector<std::string> out;
        if (at(stop)) return out;
        out.push_back(eat_word("a node id").text);
        while (at(Tok::comma)) {
            eat(Tok::comma);
            out.push_back(eat_word("a node id").text);
        }
        return out;
    }

    void parse_graph() {
        eat_keyword("graph");
        Token name = eat_word("a graph name");
        check_fresh(model_.graphs, name, "graph");
        eat(Tok::lbrace);
        eat_keyword("inputs");
        eat(Tok::colon);
        std::vector<std::string> inputs = parse_id_list_until(Tok::semi);
        eat(Tok::semi);
        eat_keyword("outputs");
        eat(Tok::colon);
        std::vector<std::string> outputs = parse_id_list_until(Tok::semi);
        eat(Tok::semi);
        eat_keyword("edges");
        eat(Tok::colon);
        std::vector<std::pair<std::string, std::string>> edges;
        if (!at(Tok::rbrace)) {
            auto edge = [&] {
                std::string from = eat_word("a node id").text;
                eat(Tok::arrow);
                std::string to = eat_word("a node id").text;
                edges.emplace_back(std::move(from), std::move(to));
            };
            edge();
            while (at(Tok::comma)) {
                eat(Tok::comma);
                edge();
            }
        }
        eat(Tok::rbrace);
        try {
            model_.graphs.emplace(name.text, Cdag::make(inputs, outputs, edges));
        } catch (const Error& e) {
            throw DslError(name.line, name.col, e.what());
        }
        model_.decls.push_back(GraphDecl{name.text});
    }

    void parse_cbn() {
        eat_keyword("cbn");
        Token name = eat_word("a cbn name");
        check_fresh(model_.cbns, name, "cbn");
        eat(Tok::lbrace);
        eat_keyword("graph");
        eat(Tok::colon);
        Token gname = eat_word("a graph name");
        auto git = model_.graphs.find(gname.text);
        if (git == model_.graphs.end())
            throw DslError(gname.line, gname.col, "unknown graph '" + gname.text + "'");

        CbnDecl decl;
        decl.name = name.text;
        decl.graph = gname.text;

        std::map<std::string, SpacePtr> spaces;
        std::map<std::string, Kernel<double>> kernels;
        while (at(Tok::semi)) {
            eat(Tok::semi);
            if (at(Tok::rbrace)) break;
            Token kw = eat_word("'space', 'dist' or 'kernel'");
            Token node = eat_word("a node id");
            eat(Tok::colon);
            Token ref = eat_word("a name");
            if (git->second.node_index(node.text) < 0)
                throw DslError(node.line, node.col,
                               "'" + node.text + "' is not a node of graph '" + gname.text + "'");
            if (kw.text == "space") {
                spaces[node.text] = lookup_space(ref);
                decl.space_bind.emplace_back(node.text, ref.text);
            } else if (kw.text == "dist") {
                auto it = model_.dists.find(ref.text);
                if (it == model_.dists.end())
                    throw DslError(ref.line, ref.col, "unknown dist '" + ref.text + "'");
                kernels.emplace(node.text, as_kernel(it->second));
                decl.dist_bind.emplace_back(node.text, ref.text);
            } else if (kw.text == "kernel") {
                auto it = model_.kernels.find(ref.text);
                if (it == model_.kernels.end())
                    throw DslError(ref.line, ref.col, "unknown kernel '" + ref.text + "'");
                kernels.emplace(node.text, it->second);
                decl.kernel_bind.emplace_back(node.text, ref.text);
            } else {
                throw DslError(kw.line, kw.col, "expected 'space', 'dist' or 'kernel'");
            }
        }
        eat(Tok::rbrace);
        try {
            model_.cbns.emplace(name.text, CbnModel::make(git->second, spaces, kernels));
        } catch (const Error& e) {
            throw DslError(name.line, name.col, e.what());
        }
        model_.decls.push_back(std::move(decl));
    }

    void parse_family() {
        eat_keyword("family");
        Token name = eat_word("a family name");
        check_fresh(model_.families, name, "family");
        eat(Tok::colon);
        SpacePtr z = lookup_space(eat_word("a space name"));
        eat(Tok::arrow);
        SpacePtr x = lookup_space(eat_word("a space name"));
        eat_keyword("depth");
        std::size_t depth = parse_count();
        if (depth == 0) throw DslError(name.line, name.col, "family depth must be >= 1");
        eat(Tok::lbrace);
        eat_keyword("base");
        eat(Tok::colon);
        Token basetok = eat_word("a kernel or dist name");
        Kernel<double> base;
        if (auto it = model_.kernels.find(basetok.text); it != model_.kernels.end()) {
            base = it->second;
        } else if (auto dt = model_.dists.find(basetok.text); dt != model_.dists.end()) {
            base = constant_kernel(z, dt->second);
        } else {
            throw DslError(basetok.line, basetok.col, "unknown kernel or dist '" + basetok.text + "'");
        }
        if (!same_points(base.domain, z) || !same_points(base.codomain, x))
            throw DslError(basetok.line, basetok.col, "family base must be a kernel Z -> X");

        FamilyDecl decl{name.text, z->name(), x->name(), depth, basetok.text, std::nullopt};
        FamilyDef def;
        if (at(Tok::semi)) {
            eat(Tok::semi);
            if (!at(Tok::rbrace)) {
                eat_keyword("step");
                eat(Tok::colon);
                Token steptok = eat_word("a kernel name");
                auto it = model_.kernels.find(steptok.text);
                if (it == model_.kernels.end())
                    throw DslError(steptok.line, steptok.col, "unknown kernel '" + steptok.text + "'");
                try {
                    def.model = markov_family(base, it->second);
                } catch (const Error& e) {
                    throw DslError(steptok.line, steptok.col, e.what());
                }
                decl.step = steptok.text;
                if (at(Tok::semi)) eat(Tok::semi);
            }
        }
        if (!decl.step) def.model = iid_family(base);
        eat(Tok::rbrace);
        def.depth = depth;
        model_.families.emplace(name.text, std::move(def));
        model_.decls.push_back(std::move(decl));
    }

    std::vector<std::string> parse_node_set() {
        eat(Tok::lbrace);
        std::vector<std::string> out = parse_id_list_until(Tok::rbrace);
        eat(Tok::rbrace);
        return out;
    }

    void parse_query() {
        Token q = eat_word("query");
        (void)q;
        Token kind = eat_word("a query kind");
        if (kind.text != "dsep" && kind.text != "tci")
            throw DslError(kind.line, kind.col, "unknown query kind '" + kind.text + "'");
        Token target = eat_word("a graph or cbn name");
        QueryDecl decl;
        decl.kind = kind.text;
        decl.target = target.text;
        decl.line = kind.line;
        decl.col = kind.col;
        eat(Tok::colon);
        decl.a = parse_node_set();
        eat(Tok::indep);
        decl.b = parse_node_set();
        eat(Tok::bar);
        decl.c = parse_node_set();

        const Cdag* g = nullptr;
        if (decl.kind == "dsep") {
            auto it = model_.graphs.find(decl.target);
            if (it == model_.graphs.end())
                throw DslError(target.line, target.col, "unknown graph '" + decl.target + "'");
            g = &it->second;
        } else {
            auto it = model_.cbns.find(decl.target);
            if (it == model_.cbns.end())
                throw DslError(target.line, target.col, "unknown cbn '" + decl.target + "'");
            g = &it->second.graph();
        }
        for (const auto& set : {decl.a, decl.b, decl.c})
            for (const auto& nm : set)
                if (g->node_index(nm) < 0)
                    throw DslError(target.line, target.col,
                                   "query names unknown node '" + nm + "'");
        model_.decls.push_back(std::move(decl));
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    ParsedModel model_;
};

std::string fmt_weight(double w) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", w);
    return buf;
}

std::string join(const std::vector<std::string>& xs, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += sep;
        out += xs[i];
    }
    return out;
}

std::string weights_text(std::span<const double> w) {
    std::string out = "[";
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) out += ", ";
        out += fmt_weight(w[i]);
    }
    out += "]";
    return out;
}

struct Serializer {
    const ParsedModel& m;
    std::ostringstream out;

    void operator()(const SpaceDecl& d) {
        out << "space " << d.name << " = {" << join(m.spaces.at(d.name)->points(), ", ") << "}\n";
    }
    void operator()(const DistDecl& d) {
        const auto& dist = m.dists.at(d.name);
        out << "dist " << d.name << " : " << d.space << " = "
            << weights_text({dist.w.data(), dist.w.size()}) << "\n";
    }
    void operator()(const KernelDecl& d) {
        const auto& k = m.kernels.at(d.name);
        out << "kernel " << d.name << " : " << join(d.domain, " * ") << " -> "
            << join(d.codomain, " * ") << " = {\n";
        for (std::size_t r = 0; r < k.domain->size(); ++r) {
            out << "  " << k.domain->point(r) << ": " << weights_text(k.row(r));
            out << (r + 1 < k.domain->size() ? ";\n" : "\n");
        }
        out << "}\n";
    }
    void operator()(const GraphDecl& d) {
        const Cdag& g = m.graphs.at(d.name);
        std::vector<std::string> edges;
        for (auto [f, t] : g.edges()) edges.push_back(g.node_name(f) + "->" + g.node_name(t));
        out << "graph " << d.name << " { inputs: " << join(g.input_names(), ", ")
            << "; outputs: " << join(g.output_names(), ", ") << "; edges: " << join(edges, ", ")
            << (edges.empty() ? "}" : " }") << "\n";
    }
    void operator()(const CbnDecl& d) {
        out << "cbn " << d.name << " {\n  graph: " << d.graph;
        for (const auto& [node, space] : d.space_bind) out << ";\n  space " << node << ": " << space;
        for (const auto& [node, dist] : d.dist_bind) out << ";\n  dist " << node << ": " << dist;
        for (const auto& [node, kern] : d.kernel_bind) out << ";\n  kernel " << node << ": " << kern;
        out << "\n}\n";
    }
    void operator()(const FamilyDecl& d) {
        out << "family " << d.name << " : " << d.z << " -> " << d.x << " depth " << d.depth
            << " { base: " << d.base;
        if (d.step) out << "; step: " << *d.step;
        out << " }\n";
    }
    void operator()(const QueryDecl& d) {
        out << "query " << d.kind << " " << d.target << " : {" << join(d.a, ", ") << "} _||_ {"
            << join(d.b, ", ") << "} | {" << join(d.c, ", ") << "}\n";
    }
};

} // namespace

std::vector<QueryDecl> ParsedModel::queries() const {
    std::vector<QueryDecl> out;
    for (const auto& d : decls)
        if (const auto* q = std::get_if<QueryDecl>(&d)) out.push_back(*q);
    return out;
}

const CbnModel& ParsedModel::sole_cbn(const std::string& name) const {
    if (!name.empty()) {
        auto it = cbns.find(name);
        if (it == cbns.end()) throw DomainError("no cbn named '" + name + "'");
        return it->second;
    }
    if (cbns.size() != 1)
        throw DomainError("model has " + std::to_string(cbns.size()) +
                          " cbn declarations; select one with --cbn");
    return cbns.begin()->second;
}

const Cdag& ParsedModel::sole_graph(const std::string& name) const {
    if (!name.empty()) {
        auto it = graphs.find(name);
        if (it == graphs.end()) throw DomainError("no graph named '" + name + "'");
        return it->second;
    }
    if (graphs.size() != 1)
        throw DomainError("model has " + std::to_string(graphs.size()) +
                          " graph declarations; name one explicitly");
    return graphs.begin()->second;
}

ParsedModel parse_model(const std::string& text) {
    Lexer lexer(text);
    Parser parser(lexer.run());
    return parser.run();
}

std::string serialize(const ParsedModel& m) {
    Serializer s{m, {}};
    for (const auto& d : m.decls) std::visit(s, d);
    return std::move(s.out).str();
}

} // namespace qus::dsl
