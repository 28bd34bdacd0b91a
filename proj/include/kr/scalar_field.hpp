#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "kr/vendor_json.hpp"

namespace kr {

enum class DomainKind { Torus, Disk, Cylinder };

const char* to_string(DomainKind k);
DomainKind domain_kind_from_string(const std::string& s);

struct GridCoord {
  int x = 0;
  int y = 0;
  friend bool operator==(const GridCoord&, const GridCoord&) = default;
  friend auto operator<=>(const GridCoord&, const GridCoord&) = default;
};

// Piecewise-linear function on a triangulated grid.
//
// Vertex (x, y) lives at index y * width + x. Every unit square is split by
// its lower-left to upper-right diagonal, so an interior vertex has the six
// link neighbours E, NE, N, W, SW, S (in that cyclic order). A torus wraps
// both axes, a cylinder wraps x only, a disk wraps neither.
//
// Triangles are addressed through their anchor square (the square whose
// lower-left corner is the anchor vertex): triangle 2a is the lower one
// (anchor, +x, +x+y) and 2a+1 the upper one (anchor, +x+y, +y). Mesh edges
// are 3 * vertex + {0: horizontal, 1: vertical, 2: diagonal}.
class ScalarField {
 public:
  static constexpr std::array<std::pair<int, int>, 6> kLink{{{1, 0}, {1, 1}, {0, 1}, {-1, 0}, {-1, -1}, {0, -1}}};

  ScalarField() = default;
  ScalarField(DomainKind kind, int width, int height, std::vector<double> values);

  DomainKind kind() const { return kind_; }
  int width() const { return width_; }
  int height() const { return height_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t vertex_count() const { return values_.size(); }

  double value(std::uint32_t v) const { return values_[v]; }
  double at(int x, int y) const { return values_[index(x, y)]; }

  bool wraps_x() const { return kind_ != DomainKind::Disk; }
  bool wraps_y() const { return kind_ == DomainKind::Torus; }

  std::uint32_t index(int x, int y) const { return static_cast<std::uint32_t>(y * width_ + x); }
  GridCoord coord(std::uint32_t v) const {
    return {static_cast<int>(v % width_), static_cast<int>(v / width_)};
  }

  // Wrapped vertex index, or -1 outside a non-periodic domain.
  std::int64_t vertex_at(int x, int y) const;
  std::int64_t neighbor(std::uint32_t v, int k) const;
  bool is_boundary(std::uint32_t v) const;

  int anchors_x() const { return wraps_x() ? width_ : width_ - 1; }
  int anchors_y() const { return wraps_y() ? height_ : height_ - 1; }
  std::size_t triangle_count() const { return 2u * anchors_x() * anchors_y(); }
  std::array<std::uint32_t, 3> triangle_vertices(std::size_t t) const;
  std::array<std::uint32_t, 3> triangle_edges(std::size_t t) const;
  GridCoord triangle_anchor(std::size_t t) const;
  std::size_t triangle_at(int ax, int ay, int upper) const;

  std::size_t edge_id_space() const { return 3u * values_.size(); }
  std::array<std::uint32_t, 2> edge_vertices(std::uint32_t e) const;

  friend bool operator==(const ScalarField&, const ScalarField&) = default;

 private:
  DomainKind kind_ = DomainKind::Torus;
  int width_ = 0;
  int height_ = 0;
  std::vector<double> values_;
};

// Throws InputError("InvalidField") naming the first violated invariant.
void validate_field(const ScalarField& f);

enum class CriticalKind { Minimum, Saddle, Maximum };
const char* to_string(CriticalKind k);

struct CriticalPoint {
  GridCoord vertex;
  CriticalKind kind = CriticalKind::Minimum;
  double value = 0.0;
  friend bool operator==(const CriticalPoint&, const CriticalPoint&) = default;
};

struct MorseCounts {
  int c0 = 0;
  int c1 = 0;
  int c2 = 0;
  friend bool operator==(const MorseCounts&, const MorseCounts&) = default;
};

// Sign changes of (neighbour - centre) around the 6-link of an interior vertex.
int link_sign_changes(const ScalarField& f, std::uint32_t v);

// Critical points in vertex-index order. Throws ContractError("DegenerateVertex").
std::vector<CriticalPoint> classify_vertices(const ScalarField& f);
MorseCounts morse_counts(const ScalarField& f);
MorseCounts tally(const std::vector<CriticalPoint>& cps);
int euler_characteristic(DomainKind k);
bool euler_check(const ScalarField& f);
bool is_generic(const ScalarField& f);

struct ReebGraph;
// Every Reeb vertex holding critical points holds exactly one.
bool is_simple(const ScalarField& f, const ReebGraph& g);

struct ValueWindow {
  double lo = 0.0;
  double hi = 0.0;
};

struct ImplantResult {
  ScalarField field;
  // Host position of sub vertex (1, 1); the block holds the sub's interior.
  GridCoord block_origin;
  int block_width = 0;
  int block_height = 0;
  // True when the sub interior was copied vertex for vertex.
  bool exact = true;
};

// Replaces the cap of `cap_center` above `cap_level` by `sub` rescaled into
// `window`. Critical points outside the cap are preserved.
ImplantResult implant(const ScalarField& host, GridCoord cap_center, double cap_level,
                      const ScalarField& sub, ValueWindow window);

nlohmann::json field_to_json(const ScalarField& f);
ScalarField field_from_json(const nlohmann::json& j);
std::string save_field(const ScalarField& f);
ScalarField load_field(const std::string& bytes);

// Binary 8-bit PGM, minimum -> 0, maximum -> 255, top row = highest y.
std::string export_pgm(const ScalarField& f);

// Deterministic tie breaking: vertices tied with a link neighbour are shifted
// by eps * rank(vertex), eps = 1e-9 * value range, capped below half the
// smallest nonzero neighbour gap.
ScalarField perturb_ties(const ScalarField& f);

}  // namespace kr
