#include <algorithm>
#include <set>

#include "kr/errors.hpp"
#include "kr/realize.hpp"

namespace kr {

std::size_t map_triangle(const ScalarField& f, const SymmetrySpec& s, std::size_t t) {
  auto a = f.triangle_anchor(t);
  const int upper = static_cast<int>(t % 2);
  int dx = 0, dy = 0;
  if (const auto* g = std::get_if<GridTranslation>(&s)) {
    if (f.kind() != DomainKind::Torus) throw ContractError("NotAnAutomorphism", "grid translations need a torus");
    dx = g->dx;
    dy = g->dy;
  } else {
    for (const auto& r : std::get<SlotPermutation>(s).regions) {
      if (a.x >= r.x0 && a.x < r.x1 && a.y >= r.y0 && a.y < r.y1) {
        dx = r.dx;
        dy = r.dy;
        break;
      }
    }
  }
  int x = a.x + dx, y = a.y + dy;
  if (f.wraps_x()) x = ((x % f.width()) + f.width()) % f.width();
  if (f.wraps_y()) y = ((y % f.height()) + f.height()) % f.height();
  if (x < 0 || y < 0 || x >= f.anchors_x() || y >= f.anchors_y())
    throw ContractError("NotAnAutomorphism", "symmetry moves a triangle off the grid");
  return f.triangle_at(x, y, upper);
}

bool symmetry_preserves_field(const ScalarField& f, const SymmetrySpec& s) {
  std::vector<bool> hit(f.triangle_count(), false);
  for (std::size_t t = 0; t < f.triangle_count(); ++t) {
    std::size_t u;
    try {
      u = map_triangle(f, s, t);
    } catch (const ContractError&) {
      return false;
    }
    if (hit[u]) return false;
    hit[u] = true;
    auto a = f.triangle_vertices(t), b = f.triangle_vertices(u);
    for (int k = 0; k < 3; ++k)
      if (f.value(a[k]) != f.value(b[k])) return false;
  }
  return true;
}

void check_record(const ConstructionRecord& rec) {
  auto fail = [](const std::string& why) { throw ContractError("RecordViolation", why); };
  const auto& f = rec.field;
  std::set<std::uint32_t> seen;
  for (const auto& s : rec.slots)
    for (auto v : s.cells) {
      if (v >= f.vertex_count()) fail("slot cell outside the grid");
      if (!seen.insert(v).second) fail("slots overlap");
    }
  for (const auto& b : rec.slot_bijections) {
    if (b.from >= rec.slots.size() || b.to >= rec.slots.size()) fail("bijection names a missing slot");
    const auto& from = rec.slots[b.from].cells;
    const auto& to = rec.slots[b.to].cells;
    if (b.pairs.size() != from.size() || b.pairs.size() != to.size()) fail("bijection size differs from its slots");
    std::set<std::uint32_t> img;
    for (auto [u, v] : b.pairs) {
      if (!std::binary_search(from.begin(), from.end(), u) || !std::binary_search(to.begin(), to.end(), v))
        fail("bijection pair outside its slots");
      if (f.value(u) != f.value(v)) fail("bijection does not preserve values");
      img.insert(v);
    }
    if (img.size() != to.size()) fail("bijection is not onto");
  }
  for (const auto& s : rec.expected_symmetries)
    if (!symmetry_preserves_field(f, s)) fail("expected symmetry does not preserve the field");
}

// ---------------------------------------------------------------------------
// JSON. The record never embeds fields; the top-level field is stored in its
// own file.

namespace {

const char* shape_name(DiskShape s) {
  switch (s) {
    case DiskShape::Single: return "single";
    case DiskShape::Product: return "product";
    case DiskShape::Cyclic: return "cyclic";
  }
  return "?";
}

DiskShape shape_from(const std::string& s) {
  if (s == "single") return DiskShape::Single;
  if (s == "product") return DiskShape::Product;
  if (s == "cyclic") return DiskShape::Cyclic;
  throw InputError("MalformedJson", "unknown disk shape '" + s + "'");
}

nlohmann::json symmetry_to_json(const SymmetrySpec& s) {
  if (const auto* g = std::get_if<GridTranslation>(&s)) return {{"type", "translation"}, {"dx", g->dx}, {"dy", g->dy}};
  const auto& p = std::get<SlotPermutation>(s);
  nlohmann::json regions = nlohmann::json::array();
  for (const auto& r : p.regions) regions.push_back({r.x0, r.y0, r.x1, r.y1, r.dx, r.dy});
  return {{"type", "slot_permutation"}, {"cycle", p.cycle}, {"regions", regions}};
}

SymmetrySpec symmetry_from_json(const nlohmann::json& j) {
  auto type = j.at("type").get<std::string>();
  if (type == "translation") return GridTranslation{j.at("dx").get<int>(), j.at("dy").get<int>()};
  if (type != "slot_permutation") throw InputError("MalformedJson", "unknown symmetry type '" + type + "'");
  SlotPermutation p;
  p.cycle = j.at("cycle").get<std::vector<std::uint32_t>>();
  for (const auto& r : j.at("regions")) {
    auto v = r.get<std::vector<int>>();
    if (v.size() != 6) throw InputError("MalformedJson", "region needs six integers");
    p.regions.push_back({v[0], v[1], v[2], v[3], v[4], v[5]});
  }
  return p;
}

}  // namespace

nlohmann::json record_to_json(const ConstructionRecord& rec) {
  using nlohmann::json;
  json slots = json::array();
  for (const auto& s : rec.slots)
    slots.push_back({{"cells", s.cells},
                     {"orbit_tag", s.orbit_tag},
                     {"sub_record", s.sub_record ? record_to_json(*s.sub_record) : json(nullptr)}});
  json bij = json::array();
  for (const auto& b : rec.slot_bijections) {
    json pairs = json::array();
    for (auto [u, v] : b.pairs) pairs.push_back({u, v});
    bij.push_back({{"from", b.from}, {"to", b.to}, {"pairs", pairs}});
  }
  json syms = json::array();
  for (const auto& s : rec.expected_symmetries) syms.push_back(symmetry_to_json(s));
  return {{"case", to_string(rec.kind)},
          {"shape", shape_name(rec.shape)},
          {"term", format_term(rec.term)},
          {"n", rec.n},
          {"m", rec.m},
          {"simple", rec.simple_mode},
          {"grid", {rec.field.width(), rec.field.height()}},
          {"counts", {rec.counts.c0, rec.counts.c1, rec.counts.c2}},
          {"slots", slots},
          {"slot_bijections", bij},
          {"expected_symmetries", syms}};
}

ConstructionRecord record_from_json(const nlohmann::json& j) {
  try {
    ConstructionRecord rec;
    rec.kind = case_kind_from_string(j.at("case").get<std::string>());
    rec.shape = shape_from(j.at("shape").get<std::string>());
    rec.term = parse_term(j.at("term").get<std::string>());
    rec.n = j.at("n").get<std::uint64_t>();
    rec.m = j.at("m").get<std::uint64_t>();
    rec.simple_mode = j.at("simple").get<bool>();
    auto counts = j.at("counts").get<std::vector<int>>();
    if (counts.size() != 3) throw InputError("MalformedJson", "counts needs three entries");
    rec.counts = {counts[0], counts[1], counts[2]};
    for (const auto& js : j.at("slots")) {
      Slot s;
      s.cells = js.at("cells").get<std::vector<std::uint32_t>>();
      s.orbit_tag = js.at("orbit_tag").get<int>();
      if (!js.at("sub_record").is_null())
        s.sub_record = std::make_shared<const ConstructionRecord>(record_from_json(js.at("sub_record")));
      rec.slots.push_back(std::move(s));
    }
    for (const auto& jb : j.at("slot_bijections")) {
      SlotBijection b{jb.at("from").get<std::uint32_t>(), jb.at("to").get<std::uint32_t>(), {}};
      for (const auto& p : jb.at("pairs")) b.pairs.emplace_back(p.at(0).get<std::uint32_t>(), p.at(1).get<std::uint32_t>());
      rec.slot_bijections.push_back(std::move(b));
    }
    for (const auto& s : j.at("expected_symmetries")) rec.expected_symmetries.push_back(symmetry_from_json(s));
    return rec;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("MalformedJson", e.what());
  }
}

}  // namespace kr
