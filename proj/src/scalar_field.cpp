#include "kr/scalar_field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "kr/errors.hpp"
#include "kr/union_find.hpp"

namespace kr {

const char* to_string(DomainKind k) {
  switch (k) {
    case DomainKind::Torus: return "torus";
    case DomainKind::Disk: return "disk";
    case DomainKind::Cylinder: return "cylinder";
  }
  return "?";
}

DomainKind domain_kind_from_string(const std::string& s) {
  if (s == "torus") return DomainKind::Torus;
  if (s == "disk") return DomainKind::Disk;
  if (s == "cylinder") return DomainKind::Cylinder;
  throw InputError("InvalidField", "unknown domain kind '" + s + "'");
}

const char* to_string(CriticalKind k) {
  switch (k) {
    case CriticalKind::Minimum: return "min";
    case CriticalKind::Saddle: return "saddle";
    case CriticalKind::Maximum: return "max";
  }
  return "?";
}

ScalarField::ScalarField(DomainKind kind, int width, int height, std::vector<double> values)
    : kind_(kind), width_(width), height_(height), values_(std::move(values)) {
  if (width_ < 8 || height_ < 8)
    throw InputError("InvalidField", "grid must be at least 8x8");
  if (values_.size() != static_cast<std::size_t>(width_) * height_)
    throw InputError("InvalidField", "values length does not match width*height");
}

std::int64_t ScalarField::vertex_at(int x, int y) const {
  if (wraps_x()) {
    x %= width_;
    if (x < 0) x += width_;
  } else if (x < 0 || x >= width_) {
    return -1;
  }
  if (wraps_y()) {
    y %= height_;
    if (y < 0) y += height_;
  } else if (y < 0 || y >= height_) {
    return -1;
  }
  return index(x, y);
}

std::int64_t ScalarField::neighbor(std::uint32_t v, int k) const {
  auto c = coord(v);
  return vertex_at(c.x + kLink[k].first, c.y + kLink[k].second);
}

bool ScalarField::is_boundary(std::uint32_t v) const {
  auto c = coord(v);
  switch (kind_) {
    case DomainKind::Torus: return false;
    case DomainKind::Cylinder: return c.y == 0 || c.y == height_ - 1;
    case DomainKind::Disk: return c.x == 0 || c.y == 0 || c.x == width_ - 1 || c.y == height_ - 1;
  }
  return false;
}

GridCoord ScalarField::triangle_anchor(std::size_t t) const {
  std::size_t a = t / 2;
  return {static_cast<int>(a % anchors_x()), static_cast<int>(a / anchors_x())};
}

std::size_t ScalarField::triangle_at(int ax, int ay, int upper) const {
  return 2u * (static_cast<std::size_t>(ay) * anchors_x() + ax) + upper;
}

std::array<std::uint32_t, 3> ScalarField::triangle_vertices(std::size_t t) const {
  auto a = triangle_anchor(t);
  auto v = [&](int dx, int dy) { return static_cast<std::uint32_t>(vertex_at(a.x + dx, a.y + dy)); };
  if (t % 2 == 0) return {v(0, 0), v(1, 0), v(1, 1)};
  return {v(0, 0), v(1, 1), v(0, 1)};
}

std::array<std::uint32_t, 3> ScalarField::triangle_edges(std::size_t t) const {
  auto a = triangle_anchor(t);
  auto e = [&](int dx, int dy, int type) {
    return static_cast<std::uint32_t>(3 * vertex_at(a.x + dx, a.y + dy) + type);
  };
  if (t % 2 == 0) return {e(0, 0, 0), e(1, 0, 1), e(0, 0, 2)};
  return {e(0, 0, 2), e(0, 1, 0), e(0, 0, 1)};
}

std::array<std::uint32_t, 2> ScalarField::edge_vertices(std::uint32_t e) const {
  std::uint32_t v = e / 3;
  auto c = coord(v);
  static constexpr std::array<std::pair<int, int>, 3> kDir{{{1, 0}, {0, 1}, {1, 1}}};
  auto d = kDir[e % 3];
  return {v, static_cast<std::uint32_t>(vertex_at(c.x + d.first, c.y + d.second))};
}

// ---------------------------------------------------------------------------

void validate_field(const ScalarField& f) {
  const int w = f.width(), h = f.height();
  for (double x : f.values())
    if (!std::isfinite(x)) throw InputError("InvalidField", "non-finite value");

  if (f.kind() == DomainKind::Disk) {
    const double b = f.at(0, 0);
    int above = 0, below = 0;
    for (std::uint32_t v = 0; v < f.vertex_count(); ++v) {
      auto c = f.coord(v);
      if (f.is_boundary(v)) {
        if (f.value(v) != b) throw InputError("InvalidField", "disk frame is not constant");
      } else if (c.x == 1 || c.y == 1 || c.x == w - 2 || c.y == h - 2) {
        (f.value(v) > b ? above : below) += 1;
        if (f.value(v) == b) throw InputError("InvalidField", "collar vertex equals frame value");
      }
    }
    if (above && below) throw InputError("InvalidField", "collar ring is not on one side of the frame value");
  } else if (f.kind() == DomainKind::Cylinder) {
    for (int x = 0; x < w; ++x) {
      if (f.at(x, 0) != f.at(0, 0) || f.at(x, h - 1) != f.at(0, h - 1))
        throw InputError("InvalidField", "cylinder boundary row is not constant");
    }
  }

  for (std::uint32_t v = 0; v < f.vertex_count(); ++v) {
    if (f.is_boundary(v)) continue;
    for (int k = 0; k < 6; ++k) {
      auto u = f.neighbor(v, k);
      if (f.value(static_cast<std::uint32_t>(u)) == f.value(v)) {
        auto c = f.coord(v);
        throw InputError("InvalidField", "vertex (" + std::to_string(c.x) + "," + std::to_string(c.y) +
                                             ") equals a link neighbour");
      }
    }
  }
}

int link_sign_changes(const ScalarField& f, std::uint32_t v) {
  std::array<bool, 6> higher{};
  for (int k = 0; k < 6; ++k) higher[k] = f.value(static_cast<std::uint32_t>(f.neighbor(v, k))) > f.value(v);
  int changes = 0;
  for (int k = 0; k < 6; ++k) changes += higher[k] != higher[(k + 1) % 6];
  return changes;
}

std::vector<CriticalPoint> classify_vertices(const ScalarField& f) {
  std::vector<CriticalPoint> out;
  for (std::uint32_t v = 0; v < f.vertex_count(); ++v) {
    if (f.is_boundary(v)) continue;
    const int changes = link_sign_changes(f, v);
    if (changes == 2) continue;
    auto c = f.coord(v);
    if (changes >= 6)
      throw ContractError("DegenerateVertex",
                          "monkey saddle at (" + std::to_string(c.x) + "," + std::to_string(c.y) + ")");
    CriticalKind kind = CriticalKind::Saddle;
    if (changes == 0) {
      kind = f.value(static_cast<std::uint32_t>(f.neighbor(v, 0))) < f.value(v) ? CriticalKind::Maximum
                                                                                  : CriticalKind::Minimum;
    }
    out.push_back({c, kind, f.value(v)});
  }
  return out;
}

MorseCounts tally(const std::vector<CriticalPoint>& cps) {
  MorseCounts m;
  for (const auto& cp : cps) {
    switch (cp.kind) {
      case CriticalKind::Minimum: ++m.c0; break;
      case CriticalKind::Saddle: ++m.c1; break;
      case CriticalKind::Maximum: ++m.c2; break;
    }
  }
  return m;
}

MorseCounts morse_counts(const ScalarField& f) { return tally(classify_vertices(f)); }

int euler_characteristic(DomainKind k) { return k == DomainKind::Disk ? 1 : 0; }

bool euler_check(const ScalarField& f) {
  auto m = morse_counts(f);
  return m.c0 - m.c1 + m.c2 == euler_characteristic(f.kind());
}

bool is_generic(const ScalarField& f) {
  std::set<double> seen;
  for (const auto& cp : classify_vertices(f))
    if (!seen.insert(cp.value).second) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Implant

namespace {

std::vector<CriticalKind> critical_map(const ScalarField& f, std::vector<bool>& is_critical) {
  std::vector<CriticalKind> kinds(f.vertex_count(), CriticalKind::Minimum);
  is_critical.assign(f.vertex_count(), false);
  for (const auto& cp : classify_vertices(f)) {
    auto v = f.index(cp.vertex.x, cp.vertex.y);
    kinds[v] = cp.kind;
    is_critical[v] = true;
  }
  return kinds;
}

ScalarField negated(const ScalarField& f) {
  std::vector<double> vals(f.values());
  for (auto& x : vals) x = -x;
  return ScalarField(f.kind(), f.width(), f.height(), std::move(vals));
}

// Induced subcomplex on `inside` is a closed disk: Euler characteristic 1,
// no dangling edges, one boundary curve.
bool induced_is_disk(const ScalarField& f, const std::vector<bool>& inside) {
  std::map<std::uint32_t, int> edge_tris;
  long vertices = 0, edges = 0, triangles = 0;
  for (std::uint32_t v = 0; v < f.vertex_count(); ++v) {
    if (!inside[v]) continue;
    ++vertices;
    for (int type = 0; type < 3; ++type) {
      auto e = 3 * v + type;
      auto ends = f.edge_vertices(e);
      if (ends[1] == static_cast<std::uint32_t>(-1)) continue;
      if (inside[ends[1]]) {
        ++edges;
        edge_tris[e] = 0;
      }
    }
  }
  for (std::size_t t = 0; t < f.triangle_count(); ++t) {
    auto tv = f.triangle_vertices(t);
    if (!(inside[tv[0]] && inside[tv[1]] && inside[tv[2]])) continue;
    ++triangles;
    for (auto e : f.triangle_edges(t)) ++edge_tris[e];
  }
  if (vertices - edges + triangles != 1) return false;
  UnionFind boundary(f.vertex_count());
  std::set<std::uint32_t> boundary_vertices;
  for (const auto& [e, count] : edge_tris) {
    if (count == 0) return false;
    if (count == 1) {
      auto ends = f.edge_vertices(e);
      boundary.unite(ends[0], ends[1]);
      boundary_vertices.insert(ends[0]);
      boundary_vertices.insert(ends[1]);
    }
  }
  std::set<std::uint32_t> roots;
  for (auto v : boundary_vertices) roots.insert(boundary.find(v));
  return roots.size() == 1 || (vertices == 1 && roots.empty());
}

double bilinear(const ScalarField& f, double x, double y) {
  int x0 = std::clamp(static_cast<int>(std::floor(x)), 0, f.width() - 2);
  int y0 = std::clamp(static_cast<int>(std::floor(y)), 0, f.height() - 2);
  double tx = x - x0, ty = y - y0;
  return (1 - tx) * (1 - ty) * f.at(x0, y0) + tx * (1 - ty) * f.at(x0 + 1, y0) +
         (1 - tx) * ty * f.at(x0, y0 + 1) + tx * ty * f.at(x0 + 1, y0 + 1);
}

ImplantResult implant_max(const ScalarField& host, GridCoord cap_center, double cap_level,
                          const ScalarField& sub, ValueWindow window) {
  std::vector<bool> is_critical;
  auto kinds = critical_map(host, is_critical);
  const auto centre = host.index(cap_center.x, cap_center.y);

  // Cap: component of {f > cap_level} containing the centre.
  std::vector<bool> in_cap(host.vertex_count(), false);
  std::vector<std::uint32_t> cap{centre};
  in_cap[centre] = true;
  for (std::size_t head = 0; head < cap.size(); ++head) {
    for (int k = 0; k < 6; ++k) {
      auto u = host.neighbor(cap[head], k);
      if (u < 0) continue;
      auto uu = static_cast<std::uint32_t>(u);
      if (!in_cap[uu] && host.value(uu) > cap_level) {
        in_cap[uu] = true;
        cap.push_back(uu);
      }
    }
  }
  for (auto v : cap) {
    if (host.is_boundary(v)) throw ContractError("CapNotDisk", "cap reaches the domain boundary");
    if (v != centre && is_critical[v])
      throw ContractError("CapContainsOtherCritical", "cap holds another critical point");
  }
  if (!induced_is_disk(host, in_cap)) throw ContractError("CapNotDisk", "cap is not a topological disk");
  if (!(cap_level < window.lo && window.lo < window.hi && window.hi <= host.value(centre)))
    throw ContractError("WindowOutOfRange", "window must lie in (cap_level, host value at centre]");

  validate_field(sub);
  if (sub.kind() != DomainKind::Disk) throw InputError("InvalidField", "implanted field must be a disk");
  const double frame = sub.at(0, 0);
  if (!(sub.at(1, 1) > frame)) throw InputError("InvalidField", "implanted disk must rise from its frame");
  const double sub_max = *std::max_element(sub.values().begin(), sub.values().end());
  const int sub_w = sub.width() - 2, sub_h = sub.height() - 2;
  const int sub_cx = (sub.width() - 1) / 2 - 1, sub_cy = (sub.height() - 1) / 2 - 1;

  auto block_fits = [&](int bw, int bh, int ox, int oy) {
    for (int j = 0; j < bh; ++j)
      for (int i = 0; i < bw; ++i) {
        auto v = host.vertex_at(ox + i, oy + j);
        if (v < 0 || !in_cap[static_cast<std::uint32_t>(v)]) return false;
      }
    return true;
  };

  int bw = sub_w, bh = sub_h;
  int ox = cap_center.x - sub_cx, oy = cap_center.y - sub_cy;
  bool exact = true;
  while (!block_fits(bw, bh, ox, oy)) {
    exact = false;
    if (bw <= 3 || bh <= 3)
      throw ContractError("DegenerateVertex", "cap too small for the implanted disk; refine the host grid");
    bw -= 2;
    bh = std::max(3, static_cast<int>(std::lround(static_cast<double>(sub_h) * bw / sub_w)) | 1);
    ox = cap_center.x - bw / 2;
    oy = cap_center.y - bh / 2;
  }

  std::vector<bool> in_block(host.vertex_count(), false);
  std::vector<double> out(host.values());
  auto rescale = [&](double s) { return window.lo + (window.hi - window.lo) * (s - frame) / (sub_max - frame); };
  for (int j = 0; j < bh; ++j) {
    for (int i = 0; i < bw; ++i) {
      auto v = static_cast<std::uint32_t>(host.vertex_at(ox + i, oy + j));
      in_block[v] = true;
      double s = exact ? sub.at(i + 1, j + 1)
                       : bilinear(sub, 1.0 + i * (sub_w - 1.0) / (bw - 1), 1.0 + j * (sub_h - 1.0) / (bh - 1));
      out[v] = rescale(s);
    }
  }
  double collar_max = cap_level;
  for (auto v : cap)
    if (!in_block[v]) collar_max = std::max(collar_max, host.value(v));
  if (collar_max > cap_level) {
    const double scale = 0.98 * (window.lo - cap_level) / (collar_max - cap_level);
    for (auto v : cap)
      if (!in_block[v]) out[v] = cap_level + (host.value(v) - cap_level) * scale;
  }

  ScalarField result(host.kind(), host.width(), host.height(), std::move(out));
  try {
    validate_field(result);
  } catch (const InputError& e) {
    throw ContractError("DegenerateVertex", std::string("implant produced a tie: ") + e.what());
  }
  auto after = classify_vertices(result);
  auto host_counts = tally(classify_vertices(host));
  auto sub_counts = morse_counts(sub);
  MorseCounts expected{host_counts.c0 + sub_counts.c0, host_counts.c1 + sub_counts.c1,
                       host_counts.c2 - 1 + sub_counts.c2};
  if (tally(after) != expected)
    throw ContractError("DegenerateVertex", "implant changed the critical structure; refine resolution");
  for (const auto& cp : after) {
    auto v = result.index(cp.vertex.x, cp.vertex.y);
    if (!in_cap[v] && (!is_critical[v] || kinds[v] != cp.kind))
      throw ContractError("DegenerateVertex", "implant disturbed a critical point outside the cap");
  }
  return {std::move(result), {((ox % host.width()) + host.width()) % host.width(),
                              ((oy % host.height()) + host.height()) % host.height()},
          bw, bh, exact};
}

}  // namespace

ImplantResult implant(const ScalarField& host, GridCoord cap_center, double cap_level,
                      const ScalarField& sub, ValueWindow window) {
  auto v = host.vertex_at(cap_center.x, cap_center.y);
  if (v < 0 || host.is_boundary(static_cast<std::uint32_t>(v)))
    throw ContractError("CapNotDisk", "cap centre is not an interior vertex");
  if (link_sign_changes(host, static_cast<std::uint32_t>(v)) != 0)
    throw ContractError("CapNotDisk", "cap centre is not an extremum");
  bool is_max = host.value(static_cast<std::uint32_t>(host.neighbor(static_cast<std::uint32_t>(v), 0))) <
                host.value(static_cast<std::uint32_t>(v));
  if (is_max) return implant_max(host, cap_center, cap_level, sub, window);
  // A minimum cap is a maximum cap of -f; the implanted disk appears upside down.
  auto r = implant_max(negated(host), cap_center, -cap_level, sub, {-window.hi, -window.lo});
  r.field = negated(r.field);
  return r;
}

// ---------------------------------------------------------------------------
// Serialization

nlohmann::json field_to_json(const ScalarField& f) {
  return nlohmann::json{{"kind", to_string(f.kind())},
                        {"width", f.width()},
                        {"height", f.height()},
                        {"values", f.values()}};
}

ScalarField field_from_json(const nlohmann::json& j) {
  try {
    ScalarField f(domain_kind_from_string(j.at("kind").get<std::string>()), j.at("width").get<int>(),
                  j.at("height").get<int>(), j.at("values").get<std::vector<double>>());
    validate_field(f);
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("InvalidField", e.what());
  }
}

std::string save_field(const ScalarField& f) { return field_to_json(f).dump(); }

ScalarField load_field(const std::string& bytes) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::exception& e) {
    throw InputError("MalformedJson", e.what());
  }
  return field_from_json(j);
}

std::string export_pgm(const ScalarField& f) {
  auto [lo, hi] = std::minmax_element(f.values().begin(), f.values().end());
  const double range = *hi - *lo;
  std::string out = "P5\n" + std::to_string(f.width()) + " " + std::to_string(f.height()) + "\n255\n";
  for (int y = f.height() - 1; y >= 0; --y) {
    for (int x = 0; x < f.width(); ++x) {
      double t = range > 0 ? (f.at(x, y) - *lo) / range : 0.0;
      out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * t))));
    }
  }
  return out;
}

ScalarField perturb_ties(const ScalarField& f) {
  auto [lo, hi] = std::minmax_element(f.values().begin(), f.values().end());
  double eps = 1e-9 * (*hi - *lo);
  double min_gap = std::numeric_limits<double>::infinity();
  std::vector<std::uint32_t> tied;
  for (std::uint32_t v = 0; v < f.vertex_count(); ++v) {
    if (f.is_boundary(v)) continue;
    bool tie = false;
    for (int k = 0; k < 6; ++k) {
      double d = std::abs(f.value(static_cast<std::uint32_t>(f.neighbor(v, k))) - f.value(v));
      if (d == 0) tie = true;
      else min_gap = std::min(min_gap, d);
    }
    if (tie) tied.push_back(v);
  }
  if (tied.empty()) return f;
  // Ranks are bounded by the vertex count, keep the largest shift under half a gap.
  const double n = static_cast<double>(f.vertex_count());
  if (std::isfinite(min_gap)) eps = std::min(eps, 0.5 * min_gap / (n + 1));
  if (eps == 0) eps = 1e-12;
  std::vector<double> vals(f.values());
  for (auto v : tied) vals[v] += eps * (v + 1);
  return ScalarField(f.kind(), f.width(), f.height(), std::move(vals));
}

}  // namespace kr
