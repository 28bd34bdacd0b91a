#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "kr/group_algebra.hpp"
#include "kr/perm_group.hpp"
#include "kr/realize.hpp"
#include "kr/reeb.hpp"

namespace kr {

struct GraphAut {
  Perm vertex_perm;
  Perm edge_perm;
  friend bool operator==(const GraphAut&, const GraphAut&) = default;
};

struct AutGroup {
  std::vector<GraphAut> generators;
  std::optional<std::uint64_t> order;
};

struct AutOptions {
  std::uint64_t cap = 5000;
  std::uint64_t node_limit = 1'000'000;
};

// Full group of value- and incidence-preserving automorphisms. Throws
// ContractError("Overflow") past opts.cap elements or the node limit.
AutGroup value_preserving_auts(const ReebGraph& g, AutOptions opts = {});

// Every automorphism, identity first (same limits as above).
std::vector<GraphAut> all_value_preserving_auts(const ReebGraph& g, AutOptions opts = {});

// Throws ContractError("NotAnAutomorphism").
void validate_graph_aut(const ReebGraph& g, const GraphAut& a);

GraphAut identity_aut(const ReebGraph& g);
GraphAut compose(const GraphAut& a, const GraphAut& b);

// Pushes a field symmetry through the per-triangle element lists of g.
GraphAut induced_graph_aut(const ScalarField& f, const ReebGraph& g, const SymmetrySpec& sym);
GraphAut induced_graph_aut(const ConstructionRecord& rec, const ReebGraph& g, const SymmetrySpec& sym);

// Acts on vertex ids 0..V-1 followed by edge ids V..V+E-1.
Perm to_point_perm(const ReebGraph& g, const GraphAut& a);
PermGroup generated_group(const ReebGraph& g, const std::vector<GraphAut>& gens, std::uint64_t cap);

// Throws ContractError("IncompleteRecord").
GroupTerm structural_group(const ConstructionRecord& rec);

nlohmann::json aut_group_to_json(const AutGroup& a);

}  // namespace kr
