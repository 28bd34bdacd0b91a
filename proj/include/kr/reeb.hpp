#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kr/scalar_field.hpp"
#include "kr/vendor_json.hpp"

namespace kr {

// Kronrod-Reeb graph of a PL field.
//
// Vertices are the connected components of critical levels that hold a
// critical point, plus one degree-1 vertex per boundary circle of a disk or
// cylinder. Edges are the regular families between them. `cell_map[t]` is
// the element (vertex or edge) containing triangle t.
struct ReebGraph {
  struct Vertex {
    std::uint32_t id = 0;
    double value = 0.0;
    std::vector<CriticalPoint> critical_points;
    std::vector<std::uint32_t> component_cells;
    bool boundary = false;
  };
  struct Edge {
    std::uint32_t id = 0;
    std::uint32_t lower = 0;
    std::uint32_t upper = 0;
    double lo = 0.0;
    double hi = 0.0;
    std::vector<std::uint32_t> region_cells;
  };
  struct Element {
    bool is_vertex = true;
    std::uint32_t id = 0;
    friend bool operator==(const Element&, const Element&) = default;
  };

  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
  std::vector<Element> cell_map;
  // Every element each triangle meets, in increasing value order (level
  // piece, region piece, level piece, ...). Two triangles with identical
  // values produce aligned lists. Not serialized.
  std::vector<std::uint32_t> touch_offsets;
  std::vector<Element> touches;

  std::size_t degree(std::uint32_t v) const;
};

ReebGraph build_reeb(const ScalarField& f);

struct ShapeReport {
  int betti1 = 0;
  bool circuit = false;
  // Alternating vertex and edge ids around the circuit (v0, e0, v1, e1, ...).
  std::vector<std::uint32_t> cycle_vertices;
  std::vector<std::uint32_t> cycle_edges;
  std::optional<std::uint32_t> special_vertex;
};

// Throws ContractError("ShapeViolation") if betti1 > 1 and `torus` is set.
ShapeReport classify_shape(const ReebGraph& g, bool torus = true);

// Complement components of one vertex's cell set, with their Euler data.
struct ComplementComponent {
  long euler = 0;
  int boundary_curves = 0;
  std::size_t triangles = 0;
  bool is_disk() const { return euler == 1 && boundary_curves == 1; }
};
std::vector<ComplementComponent> complement_components(const ReebGraph& g, const ScalarField& f,
                                                       std::uint32_t vertex);

std::uint32_t find_special_vertex(const ReebGraph& g, const ScalarField& f);

// Triangle sets of the cylinders cut out by the circuit-crossing level curves
// at the midpoint of edge `e`, in cyclic order.
std::vector<std::vector<std::uint32_t>> decompose_cylinders(const ReebGraph& g, const ScalarField& f,
                                                            std::uint32_t e);

// Components of f^-1(t) for a value t hit by no vertex, by flood fill over
// crossing mesh edges.
int level_component_count(const ScalarField& f, double t);
// Number of Reeb edges whose open value interval contains t.
int edges_spanning(const ReebGraph& g, double t);

std::string export_dot(const ReebGraph& g);
nlohmann::json export_json(const ReebGraph& g, bool with_cells = true);
ReebGraph import_json(const nlohmann::json& j);

}  // namespace kr
