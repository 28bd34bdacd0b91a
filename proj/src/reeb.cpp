#include "kr/reeb.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "kr/errors.hpp"
#include "kr/union_find.hpp"

namespace kr {

std::size_t ReebGraph::degree(std::uint32_t v) const {
  std::size_t d = 0;
  for (const auto& e : edges) d += (e.lower == v) + (e.upper == v);
  return d;
}

namespace {

constexpr std::int64_t kNone = -1;

// Union-find that only pays for the entries it touches, so it can be reused
// across many sweeps over a large id space.
class SparseUnionFind {
 public:
  explicit SparseUnionFind(std::size_t n) : parent_(n, kFree) {}

  void touch(std::uint32_t x) {
    if (parent_[x] == kFree) {
      parent_[x] = x;
      touched_.push_back(x);
    }
  }
  bool touched(std::uint32_t x) const { return parent_[x] != kFree; }
  std::uint32_t find(std::uint32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    touch(a);
    touch(b);
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }
  void clear() {
    for (auto x : touched_) parent_[x] = kFree;
    touched_.clear();
  }
  const std::vector<std::uint32_t>& touched_list() const { return touched_; }

 private:
  static constexpr std::uint32_t kFree = ~0u;
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> touched_;
};

struct LevelNode {
  std::size_t level = 0;
  std::vector<CriticalPoint> critical_points;
  bool boundary = false;
  bool real() const { return boundary || !critical_points.empty(); }
};

struct SlabNode {
  std::int64_t lower = kNone;
  std::int64_t upper = kNone;
};

struct TriangleRange {
  double lo, hi;
};

// Mesh edge -> up to two incident triangles.
std::vector<std::array<std::int64_t, 2>> edge_triangles(const ScalarField& f) {
  std::vector<std::array<std::int64_t, 2>> et(f.edge_id_space(), {kNone, kNone});
  for (std::size_t t = 0; t < f.triangle_count(); ++t) {
    for (auto e : f.triangle_edges(t)) {
      auto& slot = et[e];
      (slot[0] == kNone ? slot[0] : slot[1]) = static_cast<std::int64_t>(t);
    }
  }
  return et;
}

}  // namespace

ReebGraph build_reeb(const ScalarField& f) {
  validate_field(f);
  const auto cps = classify_vertices(f);
  const std::uint32_t nv = static_cast<std::uint32_t>(f.vertex_count());
  const std::size_t nt = f.triangle_count();

  std::vector<std::int64_t> cp_of_vertex(nv, kNone);
  std::set<double> level_set;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    cp_of_vertex[f.index(cps[i].vertex.x, cps[i].vertex.y)] = static_cast<std::int64_t>(i);
    level_set.insert(cps[i].value);
  }
  for (std::uint32_t v = 0; v < nv; ++v)
    if (f.is_boundary(v)) level_set.insert(f.value(v));
  const std::vector<double> levels(level_set.begin(), level_set.end());

  std::vector<TriangleRange> range(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    auto tv = f.triangle_vertices(t);
    double a = f.value(tv[0]), b = f.value(tv[1]), c = f.value(tv[2]);
    range[t] = {std::min({a, b, c}), std::max({a, b, c})};
  }
  const auto et = edge_triangles(f);

  // Triangles sorted by lower end, to find the ones touching a level quickly.
  std::vector<std::uint32_t> by_lo(nt);
  for (std::size_t t = 0; t < nt; ++t) by_lo[t] = static_cast<std::uint32_t>(t);
  std::sort(by_lo.begin(), by_lo.end(), [&](auto a, auto b) { return range[a].lo < range[b].lo; });
  auto touching = [&](double lo_bound, double hi_bound, bool closed, std::vector<std::uint32_t>& out) {
    out.clear();
    auto end = closed ? std::upper_bound(by_lo.begin(), by_lo.end(), hi_bound,
                                         [&](double x, std::uint32_t t) { return x < range[t].lo; })
                      : std::lower_bound(by_lo.begin(), by_lo.end(), hi_bound,
                                         [&](std::uint32_t t, double x) { return range[t].lo < x; });
    for (auto it = by_lo.begin(); it != end; ++it) {
      bool reach = closed ? range[*it].hi >= lo_bound : range[*it].hi > lo_bound;
      if (reach) out.push_back(*it);
    }
    std::sort(out.begin(), out.end());
  };

  // Level components. Features: vertex v -> v, mesh edge e -> nv + e.
  std::vector<LevelNode> level_nodes;
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> level_tri_node(levels.size());
  SparseUnionFind feat(nv + f.edge_id_space());
  std::vector<std::uint32_t> tris;
  for (std::size_t li = 0; li < levels.size(); ++li) {
    const double c = levels[li];
    touching(c, c, true, tris);
    std::vector<std::uint32_t> first_feature(tris.size());
    for (std::size_t k = 0; k < tris.size(); ++k) {
      const auto t = tris[k];
      auto tv = f.triangle_vertices(t);
      std::int64_t first = kNone;
      auto add = [&](std::uint32_t id) {
        feat.touch(id);
        if (first == kNone) first = id;
        else feat.unite(static_cast<std::uint32_t>(first), id);
      };
      for (auto v : tv)
        if (f.value(v) == c) add(v);
      for (auto e : f.triangle_edges(t)) {
        auto ends = f.edge_vertices(e);
        double a = f.value(ends[0]), b = f.value(ends[1]);
        if (std::min(a, b) < c && c < std::max(a, b)) add(nv + e);
      }
      first_feature[k] = static_cast<std::uint32_t>(first);
    }
    std::unordered_map<std::uint32_t, std::uint32_t> node_of_root;
    auto node_for = [&](std::uint32_t feature) {
      auto root = feat.find(feature);
      auto [it, inserted] = node_of_root.emplace(root, static_cast<std::uint32_t>(level_nodes.size()));
      if (inserted) level_nodes.push_back(LevelNode{li, {}, false});
      return it->second;
    };
    for (std::size_t k = 0; k < tris.size(); ++k)
      level_tri_node[li].emplace_back(tris[k], node_for(first_feature[k]));
    for (auto id : feat.touched_list()) {
      if (id >= nv) continue;
      auto& node = level_nodes[node_for(id)];
      if (cp_of_vertex[id] != kNone) node.critical_points.push_back(cps[cp_of_vertex[id]]);
      if (f.is_boundary(id)) node.boundary = true;
    }
    feat.clear();
  }
  for (auto& node : level_nodes)
    std::sort(node.critical_points.begin(), node.critical_points.end(),
              [](const CriticalPoint& a, const CriticalPoint& b) { return a.vertex < b.vertex; });

  auto node_at = [&](std::size_t li, std::uint32_t t) -> std::int64_t {
    const auto& list = level_tri_node[li];
    auto it = std::lower_bound(list.begin(), list.end(), std::make_pair(t, 0u));
    if (it == list.end() || it->first != t) return kNone;
    return it->second;
  };

  // (triangle, sweep position, raw id): even positions are levels (raw = level
  // node), odd positions are slabs (raw = slab).
  struct Touch {
    std::uint32_t t, key, raw;
  };
  std::vector<Touch> raw_touches;
  for (std::size_t li = 0; li < levels.size(); ++li)
    for (auto [t, node] : level_tri_node[li]) raw_touches.push_back({t, static_cast<std::uint32_t>(2 * li), node});

  // Slab components between consecutive levels.
  std::vector<SlabNode> slabs;
  std::vector<std::int64_t> first_slab_of_triangle(nt, kNone);
  SparseUnionFind slab_uf(nt);
  for (std::size_t li = 0; li + 1 < levels.size(); ++li) {
    const double lo = levels[li], hi = levels[li + 1];
    touching(lo, hi, false, tris);
    for (auto t : tris) slab_uf.touch(t);
    auto in_slab = [&](std::int64_t t) { return t != kNone && slab_uf.touched(static_cast<std::uint32_t>(t)); };
    for (auto t : tris) {
      for (auto e : f.triangle_edges(t)) {
        auto ends = f.edge_vertices(e);
        double a = f.value(ends[0]), b = f.value(ends[1]);
        if (!(std::min(a, b) < hi && std::max(a, b) > lo)) continue;
        for (auto other : et[e])
          if (other != static_cast<std::int64_t>(t) && in_slab(other))
            slab_uf.unite(t, static_cast<std::uint32_t>(other));
      }
    }
    std::unordered_map<std::uint32_t, std::uint32_t> slab_of_root;
    for (auto t : tris) {
      auto root = slab_uf.find(t);
      auto [it, inserted] = slab_of_root.emplace(root, static_cast<std::uint32_t>(slabs.size()));
      if (inserted) slabs.push_back({});
      auto& s = slabs[it->second];
      if (first_slab_of_triangle[t] == kNone) first_slab_of_triangle[t] = it->second;
      raw_touches.push_back({t, static_cast<std::uint32_t>(2 * li + 1), it->second});
      auto attach = [&](std::int64_t& slot, std::int64_t node) {
        if (node == kNone) return;
        if (slot != kNone && slot != node)
          throw ContractError("InternalAssertion", "regular region touches two level components");
        slot = node;
      };
      if (range[t].lo <= lo) attach(s.lower, node_at(li, t));
      if (range[t].hi >= hi) attach(s.upper, node_at(li + 1, t));
    }
    slab_uf.clear();
  }
  for (const auto& s : slabs)
    if (s.lower == kNone || s.upper == kNone)
      throw ContractError("InternalAssertion", "regular region without both ends");

  // Splice regular level components (exactly one region below and above).
  std::vector<std::vector<std::uint32_t>> below(level_nodes.size()), above(level_nodes.size());
  for (std::uint32_t s = 0; s < slabs.size(); ++s) {
    above[slabs[s].lower].push_back(s);
    below[slabs[s].upper].push_back(s);
  }
  UnionFind merged(slabs.size());
  for (std::size_t n = 0; n < level_nodes.size(); ++n) {
    if (level_nodes[n].real()) continue;
    if (below[n].size() != 1 || above[n].size() != 1)
      throw ContractError("InternalAssertion", "regular level component is not a pass-through");
    merged.unite(below[n][0], above[n][0]);
  }

  ReebGraph g;
  std::vector<std::int64_t> vertex_of_node(level_nodes.size(), kNone);
  for (std::size_t n = 0; n < level_nodes.size(); ++n) {
    if (!level_nodes[n].real()) continue;
    vertex_of_node[n] = static_cast<std::int64_t>(g.vertices.size());
    ReebGraph::Vertex v;
    v.id = static_cast<std::uint32_t>(g.vertices.size());
    v.value = levels[level_nodes[n].level];
    v.critical_points = level_nodes[n].critical_points;
    v.boundary = level_nodes[n].boundary;
    g.vertices.push_back(std::move(v));
  }
  std::vector<std::int64_t> edge_of_root(slabs.size(), kNone);
  std::vector<std::int64_t> edge_of_slab(slabs.size(), kNone);
  for (std::uint32_t s = 0; s < slabs.size(); ++s) {
    auto root = merged.find(s);
    if (edge_of_root[root] == kNone) {
      edge_of_root[root] = static_cast<std::int64_t>(g.edges.size());
      ReebGraph::Edge e;
      e.id = static_cast<std::uint32_t>(g.edges.size());
      g.edges.push_back(e);
    }
    edge_of_slab[s] = edge_of_root[root];
  }
  std::vector<bool> has_lower(g.edges.size(), false), has_upper(g.edges.size(), false);
  for (std::uint32_t s = 0; s < slabs.size(); ++s) {
    auto& e = g.edges[edge_of_slab[s]];
    if (auto v = vertex_of_node[slabs[s].lower]; v != kNone) {
      e.lower = static_cast<std::uint32_t>(v);
      has_lower[e.id] = true;
    }
    if (auto v = vertex_of_node[slabs[s].upper]; v != kNone) {
      e.upper = static_cast<std::uint32_t>(v);
      has_upper[e.id] = true;
    }
  }
  for (auto& e : g.edges) {
    if (!has_lower[e.id] || !has_upper[e.id])
      throw ContractError("InternalAssertion", "Reeb edge is missing an endpoint");
    e.lo = g.vertices[e.lower].value;
    e.hi = g.vertices[e.upper].value;
  }

  // Cell map: lowest critical component a triangle touches, else its region.
  g.cell_map.assign(nt, {});
  std::vector<bool> assigned(nt, false);
  for (std::size_t li = 0; li < levels.size(); ++li) {
    for (auto [t, node] : level_tri_node[li]) {
      if (assigned[t] || vertex_of_node[node] == kNone) continue;
      g.cell_map[t] = {true, static_cast<std::uint32_t>(vertex_of_node[node])};
      assigned[t] = true;
    }
  }
  for (std::size_t t = 0; t < nt; ++t) {
    if (assigned[t]) continue;
    if (first_slab_of_triangle[t] == kNone)
      throw ContractError("InternalAssertion", "triangle outside every level and region");
    g.cell_map[t] = {false, static_cast<std::uint32_t>(edge_of_slab[first_slab_of_triangle[t]])};
  }
  for (std::uint32_t t = 0; t < nt; ++t) {
    const auto& el = g.cell_map[t];
    (el.is_vertex ? g.vertices[el.id].component_cells : g.edges[el.id].region_cells).push_back(t);
  }

  std::sort(raw_touches.begin(), raw_touches.end(),
            [](const Touch& a, const Touch& b) { return a.t != b.t ? a.t < b.t : a.key < b.key; });
  g.touch_offsets.assign(nt + 1, 0);
  g.touches.reserve(raw_touches.size());
  for (const auto& tc : raw_touches) {
    ++g.touch_offsets[tc.t + 1];
    if (tc.key % 2 == 1) {
      g.touches.push_back({false, static_cast<std::uint32_t>(edge_of_slab[tc.raw])});
    } else if (vertex_of_node[tc.raw] != kNone) {
      g.touches.push_back({true, static_cast<std::uint32_t>(vertex_of_node[tc.raw])});
    } else {
      g.touches.push_back({false, static_cast<std::uint32_t>(edge_of_slab[below[tc.raw][0]])});
    }
  }
  for (std::size_t t = 0; t < nt; ++t) g.touch_offsets[t + 1] += g.touch_offsets[t];

  UnionFind conn(g.vertices.size());
  std::size_t parts = g.vertices.size();
  for (const auto& e : g.edges) parts -= conn.unite(e.lower, e.upper);
  if (parts != 1) throw ContractError("InternalAssertion", "Reeb graph is disconnected");
  return g;
}

bool is_simple(const ScalarField&, const ReebGraph& g) {
  for (const auto& v : g.vertices)
    if (v.critical_points.size() > 1) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Shape

ShapeReport classify_shape(const ReebGraph& g, bool torus) {
  ShapeReport r;
  r.betti1 = static_cast<int>(g.edges.size()) - static_cast<int>(g.vertices.size()) + 1;
  if (r.betti1 > 1 && torus)
    throw ContractError("ShapeViolation", "torus Reeb graph has first Betti number " + std::to_string(r.betti1));
  r.circuit = r.betti1 == 1;
  if (!r.circuit) return r;

  std::vector<std::size_t> deg(g.vertices.size(), 0);
  for (const auto& e : g.edges) {
    ++deg[e.lower];
    ++deg[e.upper];
  }
  std::vector<bool> edge_alive(g.edges.size(), true);
  std::vector<std::uint32_t> leaves;
  for (std::uint32_t v = 0; v < deg.size(); ++v)
    if (deg[v] == 1) leaves.push_back(v);
  while (!leaves.empty()) {
    auto v = leaves.back();
    leaves.pop_back();
    for (const auto& e : g.edges) {
      if (!edge_alive[e.id] || (e.lower != v && e.upper != v)) continue;
      edge_alive[e.id] = false;
      --deg[v];
      auto other = e.lower == v ? e.upper : e.lower;
      if (--deg[other] == 1) leaves.push_back(other);
      break;
    }
  }
  std::int64_t start = kNone;
  for (const auto& e : g.edges)
    if (edge_alive[e.id]) {
      start = e.lower;
      break;
    }
  std::vector<bool> used(g.edges.size(), false);
  auto v = static_cast<std::uint32_t>(start);
  while (true) {
    std::int64_t next = kNone;
    for (const auto& e : g.edges) {
      if (edge_alive[e.id] && !used[e.id] && (e.lower == v || e.upper == v)) {
        next = e.id;
        break;
      }
    }
    if (next == kNone) break;
    used[next] = true;
    r.cycle_vertices.push_back(v);
    r.cycle_edges.push_back(static_cast<std::uint32_t>(next));
    const auto& e = g.edges[next];
    v = e.lower == v ? e.upper : e.lower;
  }
  return r;
}

std::vector<ComplementComponent> complement_components(const ReebGraph& g, const ScalarField& f,
                                                       std::uint32_t vertex) {
  const std::size_t nt = f.triangle_count();
  std::vector<bool> outside(nt);
  for (std::size_t t = 0; t < nt; ++t) outside[t] = !(g.cell_map[t].is_vertex && g.cell_map[t].id == vertex);
  const auto et = edge_triangles(f);
  UnionFind uf(nt);
  for (std::size_t e = 0; e < et.size(); ++e) {
    auto [a, b] = et[e];
    if (a != kNone && b != kNone && outside[a] && outside[b])
      uf.unite(static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b));
  }
  std::map<std::uint32_t, std::vector<std::uint32_t>> groups;
  for (std::uint32_t t = 0; t < nt; ++t)
    if (outside[t]) groups[uf.find(t)].push_back(t);

  std::vector<ComplementComponent> out;
  for (const auto& [root, members] : groups) {
    std::set<std::uint32_t> verts;
    std::map<std::uint32_t, int> edge_count;
    for (auto t : members) {
      for (auto v : f.triangle_vertices(t)) verts.insert(v);
      for (auto e : f.triangle_edges(t)) ++edge_count[e];
    }
    ComplementComponent c;
    c.triangles = members.size();
    c.euler = static_cast<long>(verts.size()) - static_cast<long>(edge_count.size()) +
              static_cast<long>(members.size());
    std::map<std::uint32_t, std::uint32_t> local;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> bedges;
    for (const auto& [e, count] : edge_count) {
      if (count != 1) continue;
      auto ends = f.edge_vertices(e);
      for (auto v : ends) local.emplace(v, static_cast<std::uint32_t>(local.size()));
      bedges.emplace_back(local[ends[0]], local[ends[1]]);
    }
    UnionFind buf(local.size());
    int curves = static_cast<int>(local.size());
    for (auto [a, b] : bedges) curves -= buf.unite(a, b);
    c.boundary_curves = curves;
    out.push_back(c);
  }
  return out;
}

std::uint32_t find_special_vertex(const ReebGraph& g, const ScalarField& f) {
  if (f.kind() != DomainKind::Torus) throw ContractError("NotATree", "special vertices exist on torus fields only");
  if (classify_shape(g).circuit) throw ContractError("NotATree", "Reeb graph has a circuit");
  std::vector<std::uint32_t> found;
  for (const auto& v : g.vertices) {
    auto comps = complement_components(g, f, v.id);
    if (!comps.empty() && std::all_of(comps.begin(), comps.end(), [](const auto& c) { return c.is_disk(); }))
      found.push_back(v.id);
  }
  if (found.empty()) throw ContractError("NoSpecialVertex", "no vertex has a complement made of disks");
  if (found.size() > 1) throw ContractError("MultipleSpecialVertices", "more than one special vertex");
  return found.front();
}

// ---------------------------------------------------------------------------
// Level sets and cylinders

int level_component_count(const ScalarField& f, double t) {
  for (double x : f.values())
    if (x == t) throw InputError("CriticalValue", "level hits a grid vertex");
  SparseUnionFind uf(f.edge_id_space());
  auto crosses = [&](std::uint32_t e) {
    auto ends = f.edge_vertices(e);
    double a = f.value(ends[0]), b = f.value(ends[1]);
    return std::min(a, b) < t && t < std::max(a, b);
  };
  for (std::size_t tri = 0; tri < f.triangle_count(); ++tri) {
    std::int64_t first = kNone;
    for (auto e : f.triangle_edges(tri)) {
      if (!crosses(e)) continue;
      uf.touch(e);
      if (first == kNone) first = e;
      else uf.unite(static_cast<std::uint32_t>(first), e);
    }
  }
  std::set<std::uint32_t> roots;
  for (auto e : uf.touched_list()) roots.insert(uf.find(e));
  return static_cast<int>(roots.size());
}

int edges_spanning(const ReebGraph& g, double t) {
  return static_cast<int>(std::count_if(g.edges.begin(), g.edges.end(),
                                        [&](const auto& e) { return e.lo < t && t < e.hi; }));
}

std::vector<std::vector<std::uint32_t>> decompose_cylinders(const ReebGraph& g, const ScalarField& f,
                                                            std::uint32_t e) {
  auto shape = classify_shape(g, f.kind() == DomainKind::Torus);
  if (!shape.circuit) throw ContractError("NotACircuit", "Reeb graph is a tree");
  auto pos = std::find(shape.cycle_edges.begin(), shape.cycle_edges.end(), e);
  if (pos == shape.cycle_edges.end()) throw ContractError("NotACircuit", "edge is not on the circuit");
  const std::size_t len = shape.cycle_edges.size();
  const std::size_t start = static_cast<std::size_t>(pos - shape.cycle_edges.begin());

  // Orientation of each cycle edge along the traversal.
  auto ascending = [&](std::size_t i) {
    auto from = shape.cycle_vertices[i];
    return g.edges[shape.cycle_edges[i]].lower == from;
  };
  double c = 0.5 * (g.edges[e].lo + g.edges[e].hi);
  if (std::find(f.values().begin(), f.values().end(), c) != f.values().end()) {
    double above = g.edges[e].hi;
    for (double x : f.values())
      if (x > c && x < above) above = x;
    c = 0.5 * (c + above);
  }

  // Cut edges: same orientation as e and spanning c, in cyclic order from e.
  std::vector<std::uint32_t> cuts;
  std::vector<bool> cut_ascending;
  for (std::size_t k = 0; k < len; ++k) {
    std::size_t i = (start + k) % len;
    const auto& ed = g.edges[shape.cycle_edges[i]];
    if (ascending(i) == ascending(start) && ed.lo < c && c < ed.hi) {
      cuts.push_back(ed.id);
      cut_ascending.push_back(ascending(i));
    }
  }
  if (cuts.empty()) throw ContractError("NotACircuit", "no circuit-crossing component at the cut value");

  const std::size_t nt = f.triangle_count();
  // side: -1 not on a cut, else 2*cut + (1 if forward side of the cut).
  std::vector<std::int64_t> side(nt, kNone);
  for (std::size_t k = 0; k < cuts.size(); ++k) {
    for (auto t : g.edges[cuts[k]].region_cells) {
      auto tv = f.triangle_vertices(t);
      double centroid = (f.value(tv[0]) + f.value(tv[1]) + f.value(tv[2])) / 3.0;
      bool upper = centroid >= c;
      bool forward = upper == cut_ascending[k];
      side[t] = static_cast<std::int64_t>(2 * k + (forward ? 1 : 0));
    }
  }
  const auto et = edge_triangles(f);
  UnionFind uf(nt);
  for (const auto& [a, b] : et) {
    if (a == kNone || b == kNone) continue;
    if (side[a] != kNone && side[b] != kNone && side[a] / 2 == side[b] / 2 && side[a] != side[b]) continue;
    uf.unite(static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b));
  }
  // Cylinder k starts on the forward side of cut k.
  std::vector<std::vector<std::uint32_t>> out(cuts.size());
  std::map<std::uint32_t, std::size_t> cyl_of_root;
  for (std::size_t k = 0; k < cuts.size(); ++k) {
    for (auto t : g.edges[cuts[k]].region_cells) {
      if (side[t] == static_cast<std::int64_t>(2 * k + 1)) {
        cyl_of_root.emplace(uf.find(t), k);
        break;
      }
    }
  }
  if (cyl_of_root.size() != cuts.size())
    throw ContractError("InternalAssertion", "cut curves do not separate the torus into cylinders");
  for (std::uint32_t t = 0; t < nt; ++t) {
    auto it = cyl_of_root.find(uf.find(t));
    if (it == cyl_of_root.end()) throw ContractError("InternalAssertion", "triangle outside every cylinder");
    out[it->second].push_back(t);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Export

std::string export_dot(const ReebGraph& g) {
  std::ostringstream os;
  os << "graph reeb {\n";
  char buf[64];
  for (const auto& v : g.vertices) {
    std::snprintf(buf, sizeof buf, "%.6g", v.value);
    os << "  v" << v.id << " [label=\"" << buf;
    if (v.critical_points.size() > 1) os << " x" << v.critical_points.size();
    if (v.boundary) os << " (boundary)";
    os << "\"];\n";
  }
  for (const auto& e : g.edges) os << "  v" << e.lower << " -- v" << e.upper << ";\n";
  os << "}\n";
  return os.str();
}

nlohmann::json export_json(const ReebGraph& g, bool with_cells) {
  using nlohmann::json;
  json vs = json::array(), es = json::array();
  for (const auto& v : g.vertices) {
    json cps = json::array();
    for (const auto& cp : v.critical_points)
      cps.push_back({{"x", cp.vertex.x}, {"y", cp.vertex.y}, {"kind", to_string(cp.kind)}, {"value", cp.value}});
    json jv{{"id", v.id}, {"value", v.value}, {"boundary", v.boundary}, {"critical_points", cps}};
    if (with_cells) jv["cells"] = v.component_cells;
    vs.push_back(std::move(jv));
  }
  for (const auto& e : g.edges) {
    json je{{"id", e.id}, {"endpoints", {e.lower, e.upper}}, {"value_interval", {e.lo, e.hi}}};
    if (with_cells) je["cells"] = e.region_cells;
    es.push_back(std::move(je));
  }
  json out{{"vertices", vs}, {"edges", es}};
  if (with_cells) {
    json cm = json::array();
    for (const auto& el : g.cell_map) cm.push_back(json::array({el.is_vertex ? "v" : "e", el.id}));
    out["cell_map"] = cm;
  }
  return out;
}

ReebGraph import_json(const nlohmann::json& j) {
  try {
    ReebGraph g;
    for (const auto& jv : j.at("vertices")) {
      ReebGraph::Vertex v;
      v.id = jv.at("id").get<std::uint32_t>();
      v.value = jv.at("value").get<double>();
      v.boundary = jv.at("boundary").get<bool>();
      for (const auto& jc : jv.at("critical_points")) {
        std::string k = jc.at("kind").get<std::string>();
        CriticalKind kind = k == "min" ? CriticalKind::Minimum
                            : k == "max" ? CriticalKind::Maximum
                                         : CriticalKind::Saddle;
        v.critical_points.push_back({{jc.at("x").get<int>(), jc.at("y").get<int>()}, kind, jc.at("value").get<double>()});
      }
      if (jv.contains("cells")) v.component_cells = jv.at("cells").get<std::vector<std::uint32_t>>();
      g.vertices.push_back(std::move(v));
    }
    for (const auto& je : j.at("edges")) {
      ReebGraph::Edge e;
      e.id = je.at("id").get<std::uint32_t>();
      e.lower = je.at("endpoints").at(0).get<std::uint32_t>();
      e.upper = je.at("endpoints").at(1).get<std::uint32_t>();
      e.lo = je.at("value_interval").at(0).get<double>();
      e.hi = je.at("value_interval").at(1).get<double>();
      if (je.contains("cells")) e.region_cells = je.at("cells").get<std::vector<std::uint32_t>>();
      g.edges.push_back(std::move(e));
    }
    if (j.contains("cell_map"))
      for (const auto& c : j.at("cell_map"))
        g.cell_map.push_back({c.at(0).get<std::string>() == "v", c.at(1).get<std::uint32_t>()});
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("MalformedJson", e.what());
  }
}

}  // namespace kr
