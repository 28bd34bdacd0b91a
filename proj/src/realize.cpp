#include "kr/realize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numbers>
#include <optional>
#include <string>

#include "kr/errors.hpp"
#include "kr/reeb.hpp"

namespace kr {

int grid_cap() {
  if (const char* env = std::getenv("KR_GRID_CAP")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 8 && v <= 1 << 16) return static_cast<int>(v);
    throw InputError("InvalidParameter", "KR_GRID_CAP must be an integer in [8, 65536]");
  }
  return 4096;
}

namespace {

void check_grid(int w, int h) {
  int cap = grid_cap();
  if (w > cap || h > cap)
    throw ContractError("GridCapExceeded", "construction needs a " + std::to_string(w) + "x" + std::to_string(h) +
                                               " grid, above the cap " + std::to_string(cap));
}

// Piecewise-linear interpolation through integer knots.
std::vector<double> interpolate(const std::vector<std::pair<int, double>>& knots) {
  std::vector<double> out(knots.back().first + 1);
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    auto [x0, v0] = knots[k];
    auto [x1, v1] = knots[k + 1];
    for (int x = x0; x <= x1; ++x) out[x] = x == x1 ? v1 : v0 + (v1 - v0) * (x - x0) / (x1 - x0);
  }
  return out;
}

// Host coordinates of sub vertex (x, y) are (origin.x + x - 1, origin.y + y - 1).
std::vector<SymmetrySpec> lift_symmetries(const ConstructionRecord& sub, GridCoord origin) {
  const int ws = sub.field.width(), hs = sub.field.height();
  std::vector<SymmetrySpec> out;
  for (const auto& s : sub.expected_symmetries) {
    const auto* sp = std::get_if<SlotPermutation>(&s);
    if (!sp) throw ContractError("InternalAssertion", "disk records only carry slot permutations");
    SlotPermutation lifted{sp->cycle, {}};
    for (const auto& r : sp->regions) {
      TranslatedRegion q = r;
      q.x0 = std::max(r.x0, 1);
      q.y0 = std::max(r.y0, 1);
      q.x1 = std::min(r.x1, ws - 2);
      q.y1 = std::min(r.y1, hs - 2);
      if (q.x0 >= q.x1 || q.y0 >= q.y1) continue;
      q.x0 += origin.x - 1;
      q.x1 += origin.x - 1;
      q.y0 += origin.y - 1;
      q.y1 += origin.y - 1;
      lifted.regions.push_back(q);
    }
    out.push_back(std::move(lifted));
  }
  return out;
}

// Columns of the sub block on either side of the cap centre, and rows
// below/above it, as placed by implant().
struct BlockExtent {
  int left = 0, right = 0, down = 0, up = 0;
};

BlockExtent block_extent(const ScalarField& sub) {
  const int bw = sub.width() - 2, bh = sub.height() - 2;
  const int cx = (sub.width() - 1) / 2 - 1, cy = (sub.height() - 1) / 2 - 1;
  return {cx, bw - 1 - cx, cy, bh - 1 - cy};
}

ImplantResult implant_exact(const ScalarField& host, GridCoord centre, double cap_level, const ScalarField& sub,
                            ValueWindow window) {
  auto r = implant(host, centre, cap_level, sub, window);
  if (!r.exact) throw ContractError("DegenerateVertex", "implanted block did not fit its cap; refine the host grid");
  return r;
}

std::vector<std::uint32_t> rect_vertices(const ScalarField& f, int x0, int y0, int x1, int y1) {
  std::vector<std::uint32_t> out;
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) out.push_back(static_cast<std::uint32_t>(f.vertex_at(x, y)));
  std::sort(out.begin(), out.end());
  return out;
}

SlotBijection translation_bijection(const ScalarField& f, const Slot& from, std::uint32_t from_id,
                                    std::uint32_t to_id, int dx, int dy) {
  SlotBijection b{from_id, to_id, {}};
  for (auto v : from.cells) {
    auto c = f.coord(v);
    auto w = f.vertex_at(c.x + dx, c.y + dy);
    if (w < 0) throw ContractError("InternalAssertion", "slot bijection leaves the grid");
    b.pairs.emplace_back(v, static_cast<std::uint32_t>(w));
  }
  return b;
}

// ---------------------------------------------------------------------------
// Disk: f = A(x) * B(y), A a chain of hills, B unimodal with peak 1 at y0.

constexpr int kRamp = 3;
constexpr double kPlateauDrop = 0.06;
// Differs from kPlateauDrop so no A step cancels a B step next to the peak.
constexpr double kPlateauDropY = 0.047;

struct HillPlan {
  double hi = 1.0;
  double lo = 0.0;
  std::shared_ptr<const ConstructionRecord> sub;
  int orbit = 0;
};

struct ChainPlan {
  std::optional<double> lead, tail;
  std::vector<HillPlan> hills;
  std::vector<double> valleys;
};

struct ChainLayout {
  ScalarField field;
  int y0 = 0;
  std::vector<int> peak_x, left_x, right_x;  // right_x: sigma column or frame after the hill
};

int hill_half_width(const HillPlan& h) {
  if (!h.sub) return 1;
  auto e = block_extent(h.sub->field);
  return std::max(e.left, e.right) + 1;
}

int hill_half_height(const HillPlan& h) {
  if (!h.sub) return 1;
  auto e = block_extent(h.sub->field);
  return std::max(e.down, e.up) + 1;
}

ChainLayout lay_out_chain(const ChainPlan& plan) {
  ChainLayout lay;
  std::vector<std::pair<int, double>> knots{{0, 0.0}};
  int x = 0;
  if (plan.lead) {
    x = 2;
    knots.emplace_back(x, *plan.lead);
  }
  for (std::size_t i = 0; i < plan.hills.size(); ++i) {
    const auto& h = plan.hills[i];
    const int r = hill_half_width(h);
    lay.left_x.push_back(x);
    knots.emplace_back(x + kRamp, h.hi * (1 - kPlateauDrop));
    knots.emplace_back(x + kRamp + r, h.hi);
    knots.emplace_back(x + kRamp + 2 * r, h.hi * (1 - kPlateauDrop));
    lay.peak_x.push_back(x + kRamp + r);
    x += 2 * (kRamp + r);
    lay.right_x.push_back(x);
    if (i + 1 < plan.hills.size()) {
      knots.emplace_back(x, plan.valleys[i]);
    } else if (plan.tail) {
      knots.emplace_back(x, *plan.tail);
      x += 2;
    }
  }
  knots.emplace_back(x, 0.0);
  const auto a = interpolate(knots);
  const int w = static_cast<int>(a.size());

  int ry = 1;
  for (const auto& h : plan.hills) ry = std::max(ry, hill_half_height(h));
  lay.y0 = kRamp + ry;
  const int h = 2 * lay.y0 + 1;
  check_grid(w, h);

  // The collar exponent only breaks accidental link ties between the two
  // factors; try a few before giving up.
  for (double p : {1.37, 1.23, 1.51, 1.11, 1.67}) {
    std::vector<double> b(h);
    for (int y = 0; y < h; ++y) {
      int d = std::abs(y - lay.y0);
      b[y] = d <= ry ? 1.0 - kPlateauDropY * d / ry
                     : (1.0 - kPlateauDropY) * std::pow(static_cast<double>(lay.y0 - d) / kRamp, p);
    }
    std::vector<double> vals(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y)
      for (int xx = 0; xx < w; ++xx) vals[static_cast<std::size_t>(y) * w + xx] = a[xx] * b[y];
    ScalarField f(DomainKind::Disk, w, h, std::move(vals));
    try {
      validate_field(f);
    } catch (const InputError&) {
      continue;
    }
    lay.field = std::move(f);
    return lay;
  }
  throw ContractError("DegenerateVertex", "could not lay out a tie-free disk chain");
}

std::map<std::string, std::shared_ptr<const ConstructionRecord>>& disk_cache_for(bool simple) {
  thread_local std::map<std::string, std::shared_ptr<const ConstructionRecord>> cache[2];
  return cache[simple ? 1 : 0];
}

std::shared_ptr<const ConstructionRecord> sub_disk(const GroupTerm& t, bool simple) {
  if (t.kind == GroupTerm::Kind::Triv) return nullptr;
  auto& cache = disk_cache_for(simple);
  auto key = format_term(t);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto rec = std::make_shared<const ConstructionRecord>(realize_disk(t, simple));
  cache.emplace(key, rec);
  return rec;
}

// Implants every hill's sub disk and collects slots and lifted symmetries.
ScalarField implant_hills(const ChainPlan& plan, const ChainLayout& lay, const std::vector<double>& cap_levels,
                          std::vector<std::vector<SymmetrySpec>>& lifted) {
  ScalarField f = lay.field;
  lifted.assign(plan.hills.size(), {});
  for (std::size_t i = 0; i < plan.hills.size(); ++i) {
    const auto& h = plan.hills[i];
    if (!h.sub) continue;
    auto r = implant_exact(f, {lay.peak_x[i], lay.y0}, cap_levels[i], h.sub->field, {h.lo, h.hi});
    lifted[i] = lift_symmetries(*h.sub, r.block_origin);
    f = std::move(r.field);
  }
  return f;
}

ConstructionRecord disk_single() {
  ChainPlan plan;
  plan.hills.push_back({1.0, 0.0, nullptr, 0});
  auto lay = lay_out_chain(plan);
  ConstructionRecord rec;
  rec.kind = CaseKind::Disk;
  rec.shape = DiskShape::Single;
  rec.term = GroupTerm::triv();
  rec.field = std::move(lay.field);
  return rec;
}

ConstructionRecord disk_product(const GroupTerm& t, bool simple) {
  const std::size_t k = t.children.size();
  const double width = 0.8 / static_cast<double>(k);
  ChainPlan plan;
  for (std::size_t i = 0; i < k; ++i) {
    HillPlan h;
    h.lo = 0.1 + width * static_cast<double>(i);
    h.hi = 0.1 + width * static_cast<double>(i + 1) - 0.05 * width;
    h.sub = sub_disk(t.children[i], simple);
    h.orbit = static_cast<int>(i);
    plan.hills.push_back(h);
  }
  for (std::size_t j = 1; j < k; ++j)
    plan.valleys.push_back(simple ? 0.02 + 0.02 * static_cast<double>(j) / static_cast<double>(k) : 0.05);
  auto lay = lay_out_chain(plan);

  std::vector<double> caps;
  for (std::size_t i = 0; i < k; ++i) {
    double left = i == 0 ? 0.0 : plan.valleys[i - 1];
    double right = i + 1 == k ? 0.0 : plan.valleys[i];
    caps.push_back(0.5 * (std::max(left, right) + plan.hills[i].lo));
  }
  std::vector<std::vector<SymmetrySpec>> lifted;
  ConstructionRecord rec;
  rec.kind = CaseKind::Disk;
  rec.shape = DiskShape::Product;
  rec.term = t;
  rec.simple_mode = simple;
  rec.field = implant_hills(plan, lay, caps, lifted);
  const int h = rec.field.height();
  for (std::size_t i = 0; i < k; ++i) {
    rec.slots.push_back({rect_vertices(rec.field, lay.left_x[i] + 1, 1, lay.right_x[i], h - 1),
                         plan.hills[i].sub, static_cast<int>(i)});
    for (auto& s : lifted[i]) rec.expected_symmetries.push_back(std::move(s));
  }
  return rec;
}

ConstructionRecord disk_cyclic(const GroupTerm& t, bool simple) {
  const std::uint64_t n = t.n;
  constexpr double kSigma = 0.3;
  auto sub = sub_disk(t.base(), simple);
  ChainPlan plan;
  // Simple mode needs one saddle per level: two petals around one valley and
  // no centre hill. Otherwise a centre hill sits left of the petal strips.
  const bool centred = !(simple && n == 2);
  if (centred) plan.hills.push_back({0.95, 0.0, nullptr, -1});
  else plan.lead = kSigma;
  for (std::uint64_t j = 0; j < n; ++j) plan.hills.push_back({0.9, 0.6, sub, 0});
  plan.valleys.assign(plan.hills.size() - 1, kSigma);
  plan.tail = kSigma;
  auto lay = lay_out_chain(plan);

  std::vector<double> caps(plan.hills.size(), 0.5 * (kSigma + 0.6));
  std::vector<std::vector<SymmetrySpec>> lifted;
  ConstructionRecord rec;
  rec.kind = CaseKind::Disk;
  rec.shape = DiskShape::Cyclic;
  rec.term = t;
  rec.n = n;
  rec.simple_mode = simple;
  rec.field = implant_hills(plan, lay, caps, lifted);

  // Petal strip j spans [sigma column before petal j, sigma column after it).
  const std::size_t first = centred ? 1 : 0;
  std::vector<int> strip_x;
  for (std::uint64_t j = 0; j < n; ++j) strip_x.push_back(lay.left_x[first + j]);
  strip_x.push_back(lay.right_x[first + n - 1]);
  const int w = strip_x[1] - strip_x[0];
  const int h = rec.field.height();
  for (std::uint64_t j = 0; j < n; ++j)
    rec.slots.push_back({rect_vertices(rec.field, strip_x[j], 1, strip_x[j + 1], h - 1), sub, 0});
  for (std::uint64_t j = 1; j < n; ++j)
    rec.slot_bijections.push_back(translation_bijection(rec.field, rec.slots[0], 0, static_cast<std::uint32_t>(j),
                                                        static_cast<int>(j) * w, 0));
  SlotPermutation cycle;
  for (std::uint64_t j = 0; j < n; ++j) cycle.cycle.push_back(static_cast<std::uint32_t>(j));
  const int anchors_y = rec.field.anchors_y();
  cycle.regions.push_back({strip_x[0], 0, strip_x[n - 1], anchors_y, w, 0});
  cycle.regions.push_back({strip_x[n - 1], 0, strip_x[n], anchors_y, -static_cast<int>(n - 1) * w, 0});
  rec.expected_symmetries.push_back(std::move(cycle));
  for (auto& s : lifted[first]) rec.expected_symmetries.push_back(std::move(s));
  return rec;
}

// ---------------------------------------------------------------------------
// Torus helpers

void require_class(const GroupTerm& a, bool p2) {
  auto c = class_of(a);
  if (!c.in_P) throw InputError("NotInP", "base term " + format_term(a) + " is not in class P");
  if (p2 && !c.in_P2) throw InputError("NotInP2", "base term " + format_term(a) + " is not in class P2");
}

// Circuit base: n bands of X(x) + Y(y).
ConstructionRecord circuit(const GroupTerm& a_in, std::uint64_t n, bool simple) {
  if (n < 1) throw InputError("InvalidParameter", "n must be at least 1");
  const GroupTerm a = normalize(a_in);
  require_class(a, simple);
  auto sub = sub_disk(a, simple);

  int rp = 2, rq = 3;
  if (sub) {
    auto e = block_extent(sub->field);
    rp = std::max(rp, std::max(e.left, e.right) + 1);
    rq = std::max(rq, std::max(e.down, e.up) + 1);
  }
  const int bw = std::max(16, 2 * (rp + 6));
  const int h = std::max(32, 2 * (rq + 8));
  if (static_cast<std::uint64_t>(bw) * n > static_cast<std::uint64_t>(grid_cap())) check_grid(grid_cap() + 1, h);
  const int w = bw * static_cast<int>(n);
  check_grid(w, h);

  auto profile = [](int d, int half, int plateau, double top, double plateau_drop, double bottom) {
    if (d <= plateau) return top - plateau_drop * d / plateau;
    return top - plateau_drop - (top - plateau_drop - bottom) * (d - plateau) / (half - plateau);
  };
  std::vector<double> vals(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    double yv = profile(std::abs(y - h / 2), h / 2, rq, 0.25, 0.07, -0.25);
    for (int x = 0; x < w; ++x) {
      double xv = profile(std::abs(x % bw - bw / 2), bw / 2, rp, 0.75, 0.1, -0.75);
      vals[static_cast<std::size_t>(y) * w + x] = xv + yv;
    }
  }
  ScalarField f(DomainKind::Torus, w, h, std::move(vals));
  validate_field(f);

  ConstructionRecord rec;
  rec.kind = CaseKind::Circuit;
  rec.term = a;
  rec.n = n;
  rec.simple_mode = simple;
  std::vector<SymmetrySpec> lifted;
  if (sub) {
    // Identical implants in every band keep the bands congruent.
    for (std::uint64_t i = 0; i < n; ++i) {
      auto r = implant_exact(f, {static_cast<int>(i) * bw + bw / 2, h / 2}, 0.55, sub->field, {0.6, 0.95});
      if (i == 0) lifted = lift_symmetries(*sub, r.block_origin);
      f = std::move(r.field);
    }
  }
  rec.field = std::move(f);
  for (std::uint64_t i = 0; i < n; ++i)
    rec.slots.push_back(
        {rect_vertices(rec.field, static_cast<int>(i) * bw, 0, static_cast<int>(i + 1) * bw, h), sub, 0});
  for (std::uint64_t i = 1; i < n; ++i)
    rec.slot_bijections.push_back(translation_bijection(rec.field, rec.slots[0], 0, static_cast<std::uint32_t>(i),
                                                        static_cast<int>(i) * bw, 0));
  rec.expected_symmetries.push_back(GridTranslation{bw, 0});
  for (auto& s : lifted) rec.expected_symmetries.push_back(std::move(s));
  rec.counts = morse_counts(rec.field);
  return rec;
}

}  // namespace

const char* to_string(CaseKind k) {
  switch (k) {
    case CaseKind::Circuit: return "circuit";
    case CaseKind::TreeLattice: return "tree";
    case CaseKind::Disk: return "disk";
  }
  return "?";
}

CaseKind case_kind_from_string(const std::string& s) {
  if (s == "circuit") return CaseKind::Circuit;
  if (s == "tree") return CaseKind::TreeLattice;
  if (s == "disk") return CaseKind::Disk;
  throw InputError("InvalidParameter", "unknown case '" + s + "'");
}

// The term is realized as written: Prod(1,1) gives two hills even though it
// normalizes to 1.
ConstructionRecord realize_disk(const GroupTerm& t, bool simple_mode) {
  require_class(t, simple_mode);
  ConstructionRecord rec;
  switch (t.kind) {
    case GroupTerm::Kind::Triv: rec = disk_single(); break;
    case GroupTerm::Kind::Prod: rec = disk_product(t, simple_mode); break;
    case GroupTerm::Kind::WrC: rec = disk_cyclic(t, simple_mode); break;
    case GroupTerm::Kind::WrCC: throw InputError("NotInP", "disk terms cannot contain wr2");
  }
  rec.simple_mode = simple_mode;
  rec.counts = morse_counts(rec.field);
  if (!euler_check(rec.field)) throw ContractError("InternalAssertion", "disk realization breaks c0 - c1 + c2 = 1");
  return rec;
}

ConstructionRecord realize_torus_circuit(const GroupTerm& a, std::uint64_t n) { return circuit(a, n, false); }

ConstructionRecord realize_simple(const GroupTerm& a, std::uint64_t n) {
  auto rec = circuit(a, n, true);
  if (!is_simple(rec.field, build_reeb(rec.field)))
    throw ContractError("SimplicityViolation", "simple realization has a critical component with two points");
  return rec;
}

ConstructionRecord realize_torus_tree(const GroupTerm& a_in, std::uint64_t n, std::uint64_t m) {
  if (n < 1 || m < 1) throw InputError("InvalidParameter", "n and m must be at least 1");
  const GroupTerm a = normalize(a_in);
  require_class(a, false);
  auto sub = sub_disk(a, false);

  // Lattice unit: sx grid columns and sy grid rows per square. Each square
  // holds a*S(i)*T(j) normalised so its extremum is exactly a.
  constexpr double kShiftX = 0.3, kShiftY = 0.55, kFit = 0.62;
  auto factor = [](int s, double shift) {
    std::vector<double> v(s);
    for (int i = 0; i < s; ++i) v[i] = std::sin(std::numbers::pi * (i + shift) / s);
    double top = *std::max_element(v.begin(), v.end());
    for (auto& x : v) x /= top;
    return v;
  };
  auto argmax = [](const std::vector<double>& v) {
    return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
  };
  // Smallest unit whose normalised factor stays above kFit across the block.
  auto fit_unit = [&](int before, int after, double shift) {
    for (int s = 4;; ++s) {
      auto v = factor(s, shift);
      int p = argmax(v);
      if (p - before < 1 || p + after > s - 1) continue;
      bool ok = true;
      for (int i = p - before; i <= p + after; ++i) ok = ok && v[i] > kFit;
      if (ok) return s;
      if (s > grid_cap()) check_grid(s, s);
    }
  };
  int sx = 4, sy = 4;
  if (sub) {
    auto e = block_extent(sub->field);
    sx = fit_unit(e.left + 1, e.right + 1, kShiftX);
    sy = fit_unit(e.down + 1, e.up + 1, kShiftY);
  }
  const int kx = static_cast<int>(2 * n), ky = static_cast<int>(2 * m * n);
  const int w = kx * sx, h = ky * sy;
  check_grid(w, h);
  const auto sv = factor(sx, kShiftX), tv = factor(sy, kShiftY);
  auto amplitude = [](int k, int l) {
    bool ke = k % 2 == 0, le = l % 2 == 0;
    if (ke && le) return 1.0;
    if (!ke && !le) return 2.0;
    return ke ? -2.0 : -1.0;
  };
  std::vector<double> vals(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      int i = x % sx, j = y % sy;
      vals[static_cast<std::size_t>(y) * w + x] =
          (i == 0 && j == 0) ? 0.0 : amplitude(x / sx, y / sy) * sv[i] * tv[j];
    }
  ScalarField f(DomainKind::Torus, w, h, std::move(vals));
  validate_field(f);

  ConstructionRecord rec;
  rec.kind = CaseKind::TreeLattice;
  rec.term = a;
  rec.n = n;
  rec.m = m;
  std::vector<SymmetrySpec> lifted;
  const int px = argmax(sv), py = argmax(tv);
  if (sub) {
    for (int l = 0; l < ky; l += 2)
      for (int k = 0; k < kx; k += 2) {
        auto r = implant_exact(f, {k * sx + px, l * sy + py}, 0.3, sub->field, {0.6, 0.95});
        if (k == 0 && l == 0) lifted = lift_symmetries(*sub, r.block_origin);
        f = std::move(r.field);
      }
  }
  rec.field = std::move(f);

  // Orbit tags: 1 (even, even), 2 (odd, odd), 3 (odd, even), 4 (even, odd).
  std::map<int, std::uint32_t> representative;
  for (int l = 0; l < ky; ++l)
    for (int k = 0; k < kx; ++k) {
      int tag = k % 2 == 0 ? (l % 2 == 0 ? 1 : 4) : (l % 2 == 0 ? 3 : 2);
      auto id = static_cast<std::uint32_t>(rec.slots.size());
      rec.slots.push_back({rect_vertices(rec.field, k * sx, l * sy, (k + 1) * sx, (l + 1) * sy),
                           tag == 1 ? sub : nullptr, tag});
      auto [it, fresh] = representative.emplace(tag, id);
      if (!fresh) {
        auto rep = rec.field.coord(rec.slots[it->second].cells.front());
        auto here = rec.field.coord(rec.slots[id].cells.front());
        rec.slot_bijections.push_back(
            translation_bijection(rec.field, rec.slots[it->second], it->second, id, here.x - rep.x, here.y - rep.y));
      }
    }
  rec.expected_symmetries.push_back(GridTranslation{2 * sx, 0});
  rec.expected_symmetries.push_back(GridTranslation{0, 2 * sy});
  for (auto& s : lifted) rec.expected_symmetries.push_back(std::move(s));
  rec.counts = morse_counts(rec.field);
  return rec;
}

std::vector<SymmetrySpec> expected_symmetries(const ConstructionRecord& rec) { return rec.expected_symmetries; }

}  // namespace kr
