#pragma once

#include "qus/cbn.hpp"
#include "qus/extension.hpp"

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace qus::dsl {

// Syntactic declaration records, kept in file order for serialization.
struct SpaceDecl {
    std::string name;
};
struct DistDecl {
    std::string name, space;
};
struct KernelDecl {
    std::string name;
    std::vector<std::string> domain;
    std::vector<std::string> codomain;
};
struct GraphDecl {
    std::string name;
};
struct CbnDecl {
    std::string name, graph;
    std::vector<std::pair<std::string, std::string>> space_bind;   // node -> space name
    std::vector<std::pair<std::string, std::string>> dist_bind;    // node -> dist name
    std::vector<std::pair<std::string, std::string>> kernel_bind;  // node -> kernel name
};
struct FamilyDecl {
    std::string name, z, x;
    std::size_t depth = 0;
    std::string base;
    std::optional<std::string> step;
};
struct QueryDecl {
    std::string kind;    // dsep | tci
    std::string target;  // graph name (dsep) or cbn name (tci)
    std::vector<std::string> a, b, c;
    int line = 0, col = 0;
};

using Decl = std::variant<SpaceDecl, DistDecl, KernelDecl, GraphDecl, CbnDecl, FamilyDecl, QueryDecl>;

struct FamilyDef {
    SequenceModel model;
    std::size_t depth = 0;
};

// A parsed and fully resolved model file. Names are unique per kind and
// forward references are rejected; parse(serialize(m)) round-trips.
struct ParsedModel {
    std::vector<Decl> decls;
    std::map<std::string, SpacePtr> spaces;
    std::map<std::string, Dist<double>> dists;
    std::map<std::string, Kernel<double>> kernels;
    std::map<std::string, Cdag> graphs;
    std::map<std::string, CbnModel> cbns;
    std::map<std::string, FamilyDef> families;

    std::vector<QueryDecl> queries() const;
    // The model's only CBN; name may select one explicitly.
    const CbnModel& sole_cbn(const std::string& name = "") const;
    const Cdag& sole_graph(const std::string& name = "") const;
};

// Throws DslError with a 1-based line/column on any rejection.
ParsedModel parse_model(const std::string& text);

// Canonical text: declaration order preserved, weights at 17 significant
// digits, stable under reserialization.
std::string serialize(const ParsedModel& m);

} // namespace qus::dsl
