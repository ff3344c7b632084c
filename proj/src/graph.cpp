#include "qus/graph.hpp"

#include <algorithm>
#include <queue>
#include <unordered_map>
#include <unordered_set>

namespace qus {

Cdag Cdag::make(std::vector<std::string> inputs, std::vector<std::string> outputs,
                std::vector<std::pair<std::string, std::string>> edges) {
    Cdag g;
    g.n_inputs_ = inputs.size();
    g.names_ = std::move(inputs);
    g.names_.insert(g.names_.end(), outputs.begin(), outputs.end());

    std::unordered_set<std::string> seen;
    for (const auto& n : g.names_)
        if (!seen.insert(n).second) throw DomainError("graph: duplicate node id '" + n + "'");

    const std::size_t n = g.names_.size();
    g.parents_.resize(n);
    g.children_.resize(n);
    std::vector<std::unordered_set<int>> have(n);
    for (auto& [from, to] : edges) {
        int f = g.node_index(from), t = g.node_index(to);
        if (f < 0) throw DomainError("graph: unknown edge tail '" + from + "'");
        if (t < 0) throw DomainError("graph: unknown edge head '" + to + "'");
        if (g.is_input(t)) throw DomainError("graph: edge into input node '" + to + "'");
        if (f == t) throw DomainError("graph: self-loop at '" + from + "'");
        if (!have[static_cast<std::size_t>(f)].insert(t).second) continue;  // drop duplicates
        g.children_[static_cast<std::size_t>(f)].push_back(t);
        g.parents_[static_cast<std::size_t>(t)].push_back(f);
        g.edges_.emplace_back(f, t);
    }
    for (auto& v : g.parents_) std::sort(v.begin(), v.end());
    for (auto& v : g.children_) std::sort(v.begin(), v.end());

    // Stable Kahn; also the acyclicity check.
    std::vector<int> indeg(n);
    for (std::size_t v = 0; v < n; ++v) indeg[v] = static_cast<int>(g.parents_[v].size());
    std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
    for (std::size_t v = 0; v < n; ++v)
        if (indeg[v] == 0) ready.push(static_cast<int>(v));
    while (!ready.empty()) {
        int v = ready.top();
        ready.pop();
        g.topo_.push_back(v);
        for (int c : g.children_[static_cast<std::size_t>(v)])
            if (--indeg[static_cast<std::size_t>(c)] == 0) ready.push(c);
    }
    if (g.topo_.size() != n) throw DomainError("graph: directed cycle detected");
    return g;
}

int Cdag::node_index(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return static_cast<int>(i);
    return -1;
}

int Cdag::require_node(const std::string& name) const {
    int v = node_index(name);
    if (v < 0) throw DomainError("graph: unknown node '" + name + "'");
    return v;
}

std::vector<std::string> Cdag::input_names() const {
    return {names_.begin(), names_.begin() + static_cast<long>(n_inputs_)};
}

std::vector<std::string> Cdag::output_names() const {
    return {names_.begin() + static_cast<long>(n_inputs_), names_.end()};
}

bool Cdag::has_edge(int from, int to) const {
    const auto& ch = children_.at(static_cast<std::size_t>(from));
    return std::binary_search(ch.begin(), ch.end(), to);
}

std::vector<int> Cdag::relatives(int v, Relative kind) const {
    if (v < 0 || v >= static_cast<int>(node_count())) throw DomainError("relatives: unknown node");
    if (kind == Relative::parents) return parents(v);
    if (kind == Relative::children) return children(v);
    const bool down = kind == Relative::descendants;
    std::vector<bool> seen(node_count(), false);
    std::vector<int> stack{v}, out;
    seen[static_cast<std::size_t>(v)] = true;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        out.push_back(u);
        for (int w : down ? children(u) : parents(u))
            if (!seen[static_cast<std::size_t>(w)]) {
                seen[static_cast<std::size_t>(w)] = true;
                stack.push_back(w);
            }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<bool> Cdag::ancestor_closure(const std::vector<bool>& of) const {
    std::vector<bool> seen = of;
    std::vector<int> stack;
    for (std::size_t v = 0; v < node_count(); ++v)
        if (of[v]) stack.push_back(static_cast<int>(v));
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int p : parents(u))
            if (!seen[static_cast<std::size_t>(p)]) {
                seen[static_cast<std::size_t>(p)] = true;
                stack.push_back(p);
            }
    }
    return seen;
}

bool walk_valid(const Cdag& g, const Walk& w) {
    if (w.nodes.empty()) return false;
    if (w.forward.size() + 1 != w.nodes.size()) return false;
    for (int v : w.nodes)
        if (v < 0 || v >= static_cast<int>(g.node_count())) return false;
    for (std::size_t k = 0; k < w.forward.size(); ++k) {
        int a = w.nodes[k], b = w.nodes[k + 1];
        if (w.forward[k] ? !g.has_edge(a, b) : !g.has_edge(b, a)) return false;
    }
    return true;
}

bool is_d_blocked(const Cdag& g, const Walk& w, const std::vector<bool>& c) {
    if (!walk_valid(g, w)) throw DomainError("is_d_blocked: invalid walk");
    auto in_c = [&](int v) { return c[static_cast<std::size_t>(v)]; };
    if (in_c(w.nodes.front()) || in_c(w.nodes.back())) return true;
    for (std::size_t k = 1; k + 1 <= w.forward.size(); ++k) {
        // arrow into v_k from the left iff forward[k-1]; from the right iff !forward[k]
        bool collider = w.forward[k - 1] && !w.forward[k];
        if (collider ? !in_c(w.nodes[k]) : in_c(w.nodes[k])) return true;
    }
    return false;
}

namespace {

// Orientation of the edge we arrived by, relative to the node.
enum Arrived : int { kIn = 0, kOut = 1 };

} // namespace

bool d_separated_masks(const Cdag& g, const std::vector<bool>& a, const std::vector<bool>& b,
                       const std::vector<bool>& c) {
    const std::size_t n = g.node_count();
    if (a.size() != n || b.size() != n || c.size() != n)
        throw DomainError("d_separated: set mask size mismatch");

    // Target side is J u B.
    std::vector<bool> target = b;
    for (std::size_t v = 0; v < g.input_count(); ++v) target[v] = true;

    // Trivial walks.
    for (std::size_t v = 0; v < n; ++v)
        if (a[v] && target[v] && !c[v]) return false;

    std::vector<bool> anc_c = g.ancestor_closure(c);
    std::vector<bool> seen(2 * n, false);
    std::vector<std::pair<int, Arrived>> stack;

    auto visit = [&](int v, Arrived o) {
        std::size_t key = 2 * static_cast<std::size_t>(v) + static_cast<std::size_t>(o);
        if (!seen[key]) {
            seen[key] = true;
            stack.emplace_back(v, o);
        }
    };

    for (std::size_t v = 0; v < n; ++v) {
        if (!a[v] || c[v]) continue;  // a source in C blocks at its own endpoint
        for (int ch : g.children(static_cast<int>(v))) visit(ch, kIn);
        for (int p : g.parents(static_cast<int>(v))) visit(p, kOut);
    }

    while (!stack.empty()) {
        auto [m, o] = stack.back();
        stack.pop_back();
        std::size_t mi = static_cast<std::size_t>(m);
        if (target[mi] && !c[mi]) return false;  // open walk ends here
        if (o == kIn) {
            if (!c[mi])
                for (int ch : g.children(m)) visit(ch, kIn);  // chain
            if (anc_c[mi])
                for (int p : g.parents(m)) visit(p, kOut);  // collider, opened via An(C)
        } else {
            if (!c[mi]) {
                for (int ch : g.children(m)) visit(ch, kIn);  // fork
                for (int p : g.parents(m)) visit(p, kOut);    // chain
            }
        }
    }
    return true;
}

std::vector<bool> node_set(const Cdag& g, const std::vector<std::string>& names) {
    std::vector<bool> mask(g.node_count(), false);
    for (const auto& nm : names) mask[static_cast<std::size_t>(g.require_node(nm))] = true;
    return mask;
}

bool d_separated(const Cdag& g, const std::vector<std::string>& a,
                 const std::vector<std::string>& b, const std::vector<std::string>& c) {
    return d_separated_masks(g, node_set(g, a), node_set(g, b), node_set(g, c));
}

Cdag extend_graph(const Cdag& g, const std::vector<std::string>& w_nodes) {
    std::vector<bool> chosen(g.node_count(), false);
    for (const auto& nm : w_nodes) {
        int v = g.require_node(nm);
        if (g.is_input(v)) throw DomainError("extend_graph: '" + nm + "' is not an output node");
        chosen[static_cast<std::size_t>(v)] = true;
    }
    std::vector<std::string> inputs = g.input_names();
    std::vector<std::pair<std::string, std::string>> edges;
    for (auto [f, t] : g.edges()) edges.emplace_back(g.node_name(f), g.node_name(t));
    for (const auto& out : g.output_names()) {
        if (!chosen[static_cast<std::size_t>(g.require_node(out))]) continue;
        std::string iw = "I_" + out;
        if (g.node_index(iw) >= 0)
            throw DomainError("extend_graph: generated input id '" + iw + "' collides");
        inputs.push_back(iw);
        edges.emplace_back(iw, out);
    }
    return Cdag::make(std::move(inputs), g.output_names(), std::move(edges));
}

} // namespace qus
