#pragma once

#include "qus/error.hpp"

#include <string>
#include <vector>

namespace qus {

// A conditional DAG: input nodes J (never edge heads), output nodes V, and
// directed edges with no non-trivial directed cycle. Node indices run over
// J then V in declaration order; that order is canonical everywhere.
class Cdag {
public:
    static Cdag make(std::vector<std::string> inputs, std::vector<std::string> outputs,
                     std::vector<std::pair<std::string, std::string>> edges);

    std::size_t node_count() const { return names_.size(); }
    std::size_t input_count() const { return n_inputs_; }
    const std::vector<std::string>& node_names() const { return names_; }
    const std::string& node_name(int v) const { return names_.at(static_cast<std::size_t>(v)); }
    int node_index(const std::string& name) const;  // -1 if unknown
    int require_node(const std::string& name) const;
    bool is_input(int v) const { return v < static_cast<int>(n_inputs_); }

    std::vector<std::string> input_names() const;
    std::vector<std::string> output_names() const;

    const std::vector<int>& parents(int v) const { return parents_.at(static_cast<std::size_t>(v)); }
    const std::vector<int>& children(int v) const { return children_.at(static_cast<std::size_t>(v)); }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    bool has_edge(int from, int to) const;

    // Stable Kahn order: among ready nodes the smallest declaration index
    // goes first, so the order is deterministic.
    const std::vector<int>& topological_order() const { return topo_; }

    enum class Relative { parents, children, ancestors, descendants };
    // Ancestors/descendants include v itself (trivial directed walk).
    std::vector<int> relatives(int v, Relative kind) const;

    std::vector<bool> ancestor_closure(const std::vector<bool>& of) const;

private:
    std::vector<std::string> names_;
    std::size_t n_inputs_ = 0;
    std::vector<std::vector<int>> parents_, children_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<int> topo_;
};

// A walk: nodes v0..vn with the orientation of each step; forward[k] means
// the edge nodes[k] -> nodes[k+1] is traversed head-first. Repeats allowed;
// n = 0 is the trivial walk.
struct Walk {
    std::vector<int> nodes;
    std::vector<bool> forward;
};

bool walk_valid(const Cdag& g, const Walk& w);

// d-blocked by C: an endpoint in C, a non-collider middle in C, or a
// collider middle not in C. (Walk semantics; no ancestor closure here.)
bool is_d_blocked(const Cdag& g, const Walk& w, const std::vector<bool>& c);

// A is d-separated from B given C iff every walk from A to J u B is
// C-d-blocked. Note the asymmetric inclusion of J in the target side.
// Implemented as reachability over (node, incoming-orientation) states with
// colliders opened through the ancestor closure of C.
bool d_separated_masks(const Cdag& g, const std::vector<bool>& a, const std::vector<bool>& b,
                       const std::vector<bool>& c);

// Name-based front: resolves ids and runs the mask algorithm.
bool d_separated(const Cdag& g, const std::vector<std::string>& a,
                 const std::vector<std::string>& b, const std::vector<std::string>& c);

std::vector<bool> node_set(const Cdag& g, const std::vector<std::string>& names);

// Adds a fresh input I_w with the single edge I_w -> w for each w in W
// (W a subset of the outputs, taken in output declaration order).
Cdag extend_graph(const Cdag& g, const std::vector<std::string>& w_nodes);

} // namespace qus
