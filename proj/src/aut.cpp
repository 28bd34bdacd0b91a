#include "kr/aut.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <unordered_set>

#include "kr/errors.hpp"

namespace kr {

namespace {

// Points are vertices 0..V-1 then edges V..V+E-1. Each point lists its
// neighbours tagged with the incidence role (0 lower end, 1 upper end).
struct Incidence {
  std::size_t nv = 0;
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> nbrs;
};

Incidence incidence(const ReebGraph& g) {
  Incidence inc;
  inc.nv = g.vertices.size();
  inc.nbrs.resize(g.vertices.size() + g.edges.size());
  for (const auto& e : g.edges) {
    auto ep = static_cast<std::uint32_t>(inc.nv + e.id);
    inc.nbrs[ep] = {{0, e.lower}, {1, e.upper}};
    inc.nbrs[e.lower].push_back({0, ep});
    inc.nbrs[e.upper].push_back({1, ep});
  }
  return inc;
}

using Colouring = std::vector<std::uint32_t>;
using Dictionary = std::map<std::vector<std::uint64_t>, std::uint32_t>;

std::uint32_t intern(Dictionary& dict, std::vector<std::uint64_t> key) {
  auto [it, inserted] = dict.emplace(std::move(key), static_cast<std::uint32_t>(dict.size()));
  return it->second;
}

Colouring initial_colouring(const ReebGraph& g, Dictionary& dict) {
  Colouring c;
  for (const auto& v : g.vertices)
    c.push_back(intern(dict, {0, std::bit_cast<std::uint64_t>(v.value), v.critical_points.size(), g.degree(v.id),
                              v.boundary ? 1u : 0u}));
  for (const auto& e : g.edges)
    c.push_back(intern(dict, {1, std::bit_cast<std::uint64_t>(e.lo), std::bit_cast<std::uint64_t>(e.hi)}));
  return c;
}

std::size_t class_count(const Colouring& c) {
  std::vector<std::uint32_t> s(c);
  std::sort(s.begin(), s.end());
  return static_cast<std::size_t>(std::unique(s.begin(), s.end()) - s.begin());
}

std::vector<std::uint32_t> histogram(const Colouring& c) {
  std::vector<std::uint32_t> s(c);
  std::sort(s.begin(), s.end());
  return s;
}

// Refines both colourings in lockstep. False if they become incompatible.
bool refine_pair(const Incidence& inc, Colouring& a, Colouring& b, Dictionary& dict) {
  auto step = [&](const Colouring& c) {
    Colouring out(c.size());
    for (std::size_t p = 0; p < c.size(); ++p) {
      std::vector<std::uint64_t> key{c[p]};
      std::vector<std::uint64_t> around;
      for (auto [role, q] : inc.nbrs[p]) around.push_back((static_cast<std::uint64_t>(role) << 32) | c[q]);
      std::sort(around.begin(), around.end());
      key.push_back(~0ull);
      key.insert(key.end(), around.begin(), around.end());
      out[p] = intern(dict, std::move(key));
    }
    return out;
  };
  std::size_t classes = class_count(a);
  while (true) {
    a = step(a);
    b = step(b);
    if (histogram(a) != histogram(b)) return false;
    std::size_t now = class_count(a);
    if (now == classes) return true;
    classes = now;
  }
}

struct AutSearch {
  const ReebGraph& g;
  const Incidence inc;
  AutOptions opts;
  Dictionary dict;
  std::vector<GraphAut> found;
  std::uint64_t nodes = 0;

  AutSearch(const ReebGraph& graph, AutOptions o) : g(graph), inc(incidence(graph)), opts(o) {}

  void run() {
    Colouring left = initial_colouring(g, dict);
    Colouring right = left;
    if (!refine_pair(inc, left, right, dict)) return;
    descend(left, right);
  }

  void descend(const Colouring& left, const Colouring& right) {
    if (++nodes > opts.node_limit)
      throw ContractError("Overflow", "automorphism search exceeded its node limit");
    // Smallest non-singleton cell of the left colouring.
    std::map<std::uint32_t, std::size_t> size;
    for (auto c : left) ++size[c];
    std::int64_t target = -1;
    std::size_t best = ~std::size_t{0};
    for (std::size_t p = 0; p < left.size(); ++p) {
      auto s = size[left[p]];
      if (s > 1 && s < best) {
        best = s;
        target = static_cast<std::int64_t>(p);
      }
    }
    if (target < 0) {
      leaf(left, right);
      return;
    }
    const auto colour = left[target];
    const auto fresh = intern(dict, {2, colour, nodes});
    for (std::size_t q = 0; q < right.size(); ++q) {
      if (right[q] != colour) continue;
      Colouring l = left, r = right;
      l[target] = fresh;
      r[q] = fresh;
      if (!refine_pair(inc, l, r, dict)) continue;
      descend(l, r);
    }
  }

  void leaf(const Colouring& left, const Colouring& right) {
    std::map<std::uint32_t, std::uint32_t> where;
    for (std::uint32_t q = 0; q < right.size(); ++q) where[right[q]] = q;
    GraphAut a;
    a.vertex_perm.resize(g.vertices.size());
    a.edge_perm.resize(g.edges.size());
    for (std::uint32_t p = 0; p < left.size(); ++p) {
      auto q = where.at(left[p]);
      if (p < inc.nv) {
        if (q >= inc.nv) return;
        a.vertex_perm[p] = q;
      } else {
        if (q < inc.nv) return;
        a.edge_perm[p - inc.nv] = static_cast<std::uint32_t>(q - inc.nv);
      }
    }
    try {
      validate_graph_aut(g, a);
    } catch (const ContractError&) {
      return;
    }
    found.push_back(std::move(a));
    if (found.size() > opts.cap)
      throw ContractError("Overflow", "automorphism group exceeds cap " + std::to_string(opts.cap));
  }
};

}  // namespace

void validate_graph_aut(const ReebGraph& g, const GraphAut& a) {
  auto fail = [](const std::string& why) { throw ContractError("NotAnAutomorphism", why); };
  if (a.vertex_perm.size() != g.vertices.size() || a.edge_perm.size() != g.edges.size())
    fail("permutation sizes do not match the graph");
  if (!is_bijection(a.vertex_perm) || !is_bijection(a.edge_perm)) fail("not a bijection");
  for (const auto& v : g.vertices) {
    const auto& w = g.vertices[a.vertex_perm[v.id]];
    if (w.value != v.value) fail("vertex value not preserved");
    if (w.critical_points.size() != v.critical_points.size() || w.boundary != v.boundary)
      fail("vertex type not preserved");
  }
  for (const auto& e : g.edges) {
    const auto& d = g.edges[a.edge_perm[e.id]];
    if (d.lo != e.lo || d.hi != e.hi) fail("edge interval not preserved");
    if (d.lower != a.vertex_perm[e.lower] || d.upper != a.vertex_perm[e.upper]) fail("incidence not preserved");
  }
}

GraphAut identity_aut(const ReebGraph& g) {
  return {identity_perm(g.vertices.size()), identity_perm(g.edges.size())};
}

GraphAut compose(const GraphAut& a, const GraphAut& b) {
  return {compose(a.vertex_perm, b.vertex_perm), compose(a.edge_perm, b.edge_perm)};
}

std::vector<GraphAut> all_value_preserving_auts(const ReebGraph& g, AutOptions opts) {
  AutSearch s(g, opts);
  s.run();
  auto id = identity_aut(g);
  auto it = std::find(s.found.begin(), s.found.end(), id);
  if (it == s.found.end()) throw ContractError("InternalAssertion", "identity missing from automorphism search");
  std::iter_swap(s.found.begin(), it);
  return std::move(s.found);
}

Perm to_point_perm(const ReebGraph& g, const GraphAut& a) {
  const auto nv = static_cast<std::uint32_t>(g.vertices.size());
  Perm p(a.vertex_perm);
  for (auto e : a.edge_perm) p.push_back(nv + e);
  return p;
}

AutGroup value_preserving_auts(const ReebGraph& g, AutOptions opts) {
  auto all = all_value_preserving_auts(g, opts);
  AutGroup out;
  out.order = all.size();
  // Greedy generators: add any element outside the group generated so far.
  PermGroup pg{static_cast<std::uint32_t>(g.vertices.size() + g.edges.size()), {}, {}};
  std::unordered_set<Perm, PermHash> reached{to_point_perm(g, all.front())};
  for (const auto& a : all) {
    auto p = to_point_perm(g, a);
    if (reached.count(p)) continue;
    out.generators.push_back(a);
    pg.generators.push_back(p);
    auto elems = closure(pg, opts.cap);
    reached.clear();
    for (auto& e : *elems) reached.insert(std::move(e));
  }
  return out;
}

GraphAut induced_graph_aut(const ScalarField& f, const ReebGraph& g, const SymmetrySpec& sym) {
  auto fail = [](const std::string& why) { throw ContractError("NotAnAutomorphism", why); };
  if (g.touch_offsets.size() != f.triangle_count() + 1) fail("graph carries no triangle incidence; rebuild it");
  constexpr std::uint32_t kUnset = ~0u;
  Perm vmap(g.vertices.size(), kUnset), emap(g.edges.size(), kUnset);
  auto assign = [&](Perm& map, std::uint32_t from, std::uint32_t to) {
    if (map[from] == kUnset) map[from] = to;
    else if (map[from] != to) fail("symmetry splits a Reeb element");
  };
  for (std::size_t t = 0; t < f.triangle_count(); ++t) {
    std::size_t u = map_triangle(f, sym, t);
    auto a0 = g.touch_offsets[t], a1 = g.touch_offsets[t + 1];
    auto b0 = g.touch_offsets[u], b1 = g.touch_offsets[u + 1];
    if (a1 - a0 != b1 - b0) fail("triangle image crosses different levels");
    for (std::uint32_t k = 0; k < a1 - a0; ++k) {
      const auto& x = g.touches[a0 + k];
      const auto& y = g.touches[b0 + k];
      if (x.is_vertex != y.is_vertex) fail("vertex sent to an edge");
      assign(x.is_vertex ? vmap : emap, x.id, y.id);
    }
  }
  if (std::find(vmap.begin(), vmap.end(), kUnset) != vmap.end() ||
      std::find(emap.begin(), emap.end(), kUnset) != emap.end())
    fail("some Reeb element is met by no triangle");
  GraphAut a{std::move(vmap), std::move(emap)};
  validate_graph_aut(g, a);
  return a;
}

GraphAut induced_graph_aut(const ConstructionRecord& rec, const ReebGraph& g, const SymmetrySpec& sym) {
  return induced_graph_aut(rec.field, g, sym);
}

PermGroup generated_group(const ReebGraph& g, const std::vector<GraphAut>& gens, std::uint64_t cap) {
  PermGroup pg{static_cast<std::uint32_t>(g.vertices.size() + g.edges.size()), {}, {}};
  for (const auto& a : gens) pg.generators.push_back(to_point_perm(g, a));
  if (!enumerate_elements(pg, cap))
    throw ContractError("Overflow", "generated group exceeds cap " + std::to_string(cap));
  return pg;
}

namespace {

GroupTerm slot_group(const Slot& s) { return s.sub_record ? structural_group(*s.sub_record) : GroupTerm::triv(); }

}  // namespace

GroupTerm structural_group(const ConstructionRecord& rec) {
  auto incomplete = [](const std::string& why) { throw ContractError("IncompleteRecord", why); };
  switch (rec.kind) {
    case CaseKind::Circuit:
      if (rec.slots.empty()) incomplete("circuit record without cylinder slots");
      return normalize(GroupTerm::wr(slot_group(rec.slots[0]), rec.n));
    case CaseKind::TreeLattice: {
      // One factor per orbit of squares, represented by its first slot.
      std::map<int, GroupTerm> reps;
      for (const auto& s : rec.slots) reps.emplace(s.orbit_tag, slot_group(s));
      if (reps.size() != 4) incomplete("tree record must carry four square orbits");
      std::vector<GroupTerm> factors;
      for (auto& [tag, t] : reps) factors.push_back(t);
      return normalize(GroupTerm::wr2(GroupTerm::prod(std::move(factors)), rec.n, rec.m));
    }
    case CaseKind::Disk:
      switch (rec.shape) {
        case DiskShape::Single:
          return GroupTerm::triv();
        case DiskShape::Product: {
          if (rec.slots.size() < 2) incomplete("product disk needs at least two slots");
          std::vector<GroupTerm> factors;
          for (const auto& s : rec.slots) factors.push_back(slot_group(s));
          return normalize(GroupTerm::prod(std::move(factors)));
        }
        case DiskShape::Cyclic:
          if (rec.slots.size() != rec.n) incomplete("cyclic disk slot count differs from n");
          return normalize(GroupTerm::wr(slot_group(rec.slots[0]), rec.n));
      }
  }
  incomplete("unknown record kind");
  return {};
}

nlohmann::json aut_group_to_json(const AutGroup& a) {
  nlohmann::json gens = nlohmann::json::array();
  for (const auto& g : a.generators) gens.push_back({g.vertex_perm, g.edge_perm});
  nlohmann::json out{{"generators", gens}};
  out["order"] = a.order ? nlohmann::json(*a.order) : nlohmann::json(nullptr);
  return out;
}

}  // namespace kr
