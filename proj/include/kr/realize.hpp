#pragma once

#include <cstdint>
#include <memory>
#include <variant>
#include <vector>

#include "kr/group_algebra.hpp"
#include "kr/scalar_field.hpp"

namespace kr {

enum class CaseKind { Circuit, TreeLattice, Disk };
const char* to_string(CaseKind k);
CaseKind case_kind_from_string(const std::string& s);

// How a disk record combines its slots.
enum class DiskShape { Single, Product, Cyclic };

struct GridTranslation {
  int dx = 0;
  int dy = 0;
  friend bool operator==(const GridTranslation&, const GridTranslation&) = default;
};

// Anchor squares [x0, x1) x [y0, y1) move by (dx, dy); squares outside every
// region stay put.
struct TranslatedRegion {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  int dx = 0, dy = 0;
  friend bool operator==(const TranslatedRegion&, const TranslatedRegion&) = default;
};

struct SlotPermutation {
  std::vector<std::uint32_t> cycle;
  std::vector<TranslatedRegion> regions;
  friend bool operator==(const SlotPermutation&, const SlotPermutation&) = default;
};

using SymmetrySpec = std::variant<GridTranslation, SlotPermutation>;

struct ConstructionRecord;

struct Slot {
  std::vector<std::uint32_t> cells;  // grid vertex indices
  std::shared_ptr<const ConstructionRecord> sub_record;  // null: trivial
  int orbit_tag = 0;
};

struct SlotBijection {
  std::uint32_t from = 0;
  std::uint32_t to = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
};

struct ConstructionRecord {
  CaseKind kind = CaseKind::Disk;
  DiskShape shape = DiskShape::Single;
  GroupTerm term;
  std::uint64_t n = 1;
  std::uint64_t m = 1;
  bool simple_mode = false;
  ScalarField field;
  std::vector<Slot> slots;
  std::vector<SlotBijection> slot_bijections;
  std::vector<SymmetrySpec> expected_symmetries;
  MorseCounts counts;
};

// Largest grid side the constructions may grow to (KR_GRID_CAP, default 4096).
int grid_cap();

// Disk realization of a class-P term; `simple_mode` staggers saddle values so
// the field is simple, which needs a P2 term.
ConstructionRecord realize_disk(const GroupTerm& t, bool simple_mode = false);
ConstructionRecord realize_torus_circuit(const GroupTerm& a, std::uint64_t n);
ConstructionRecord realize_torus_tree(const GroupTerm& a, std::uint64_t n, std::uint64_t m);
ConstructionRecord realize_simple(const GroupTerm& a, std::uint64_t n);

std::vector<SymmetrySpec> expected_symmetries(const ConstructionRecord& rec);

// Throws ContractError naming the broken record invariant.
void check_record(const ConstructionRecord& rec);

// Applies a symmetry to grid vertices: true if the field is reproduced
// bit for bit on every moved triangle.
bool symmetry_preserves_field(const ScalarField& f, const SymmetrySpec& s);

// Image of triangle t under a symmetry.
std::size_t map_triangle(const ScalarField& f, const SymmetrySpec& s, std::size_t t);

nlohmann::json record_to_json(const ConstructionRecord& rec);
ConstructionRecord record_from_json(const nlohmann::json& j);

}  // namespace kr
