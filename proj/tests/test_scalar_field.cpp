#include <doctest.h>

#include <cmath>
#include <set>
#include <tuple>

#include "kr/errors.hpp"
#include "kr/realize.hpp"
#include "kr/reeb.hpp"
#include "kr/scalar_field.hpp"
#include "fixtures.hpp"

using namespace kr;
using kr::testing::bump_disk;
using kr::testing::error_code;

namespace {

ScalarField affine(const ScalarField& f, double scale, double shift) {
  auto v = f.values();
  for (auto& x : v) x = scale * x + shift;
  return ScalarField(f.kind(), f.width(), f.height(), std::move(v));
}

ScalarField translated(const ScalarField& f, int dx, int dy) {
  std::vector<double> v(f.vertex_count());
  for (int y = 0; y < f.height(); ++y)
    for (int x = 0; x < f.width(); ++x)
      v[f.index((x + dx) % f.width(), (y + dy) % f.height())] = f.at(x, y);
  return ScalarField(f.kind(), f.width(), f.height(), std::move(v));
}

}  // namespace

TEST_CASE("grid geometry") {
  ScalarField t(DomainKind::Torus, 8, 9, std::vector<double>(72, 0.0));
  CHECK(t.triangle_count() == 2u * 72u);
  CHECK(t.vertex_at(-1, 0) == 7);
  CHECK(t.vertex_at(0, 9) == 0);
  CHECK_FALSE(t.is_boundary(0));
  auto tri = t.triangle_vertices(0);
  CHECK(tri[0] == 0);
  CHECK(tri[1] == 1);
  CHECK(tri[2] == 9);
  auto up = t.triangle_vertices(1);
  CHECK(up[1] == 9);
  CHECK(up[2] == 8);
  CHECK(t.triangle_at(3, 4, 1) == 2u * (4u * 8u + 3u) + 1u);

  ScalarField d(DomainKind::Disk, 8, 8, std::vector<double>(64, 0.0));
  CHECK(d.vertex_at(-1, 0) == -1);
  CHECK(d.is_boundary(0));
  CHECK(d.is_boundary(d.index(7, 3)));
  CHECK_FALSE(d.is_boundary(d.index(1, 1)));
  CHECK(d.triangle_count() == 2u * 49u);

  ScalarField c(DomainKind::Cylinder, 8, 8, std::vector<double>(64, 0.0));
  CHECK(c.vertex_at(-1, 3) == c.index(7, 3));
  CHECK(c.is_boundary(c.index(3, 0)));
  CHECK_FALSE(c.is_boundary(c.index(0, 3)));
}

TEST_CASE("construction rejects bad sizes") {
  CHECK_THROWS_AS(ScalarField(DomainKind::Torus, 4, 8, std::vector<double>(32, 0.0)), InputError);
  CHECK_THROWS_AS(ScalarField(DomainKind::Torus, 8, 8, std::vector<double>(63, 0.0)), InputError);
}

TEST_CASE("classify_vertices examples") {
  // A tilted plane has no interior critical points; the frame rule is not
  // needed for classification.
  std::vector<double> plane(100);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 10; ++x) plane[static_cast<std::size_t>(y * 10 + x)] = 1.0 * x + std::sqrt(3.0) * y;
  CHECK(classify_vertices(ScalarField(DomainKind::Disk, 10, 10, plane)).empty());

  auto bump = bump_disk();
  validate_field(bump);
  auto cps = classify_vertices(bump);
  REQUIRE(cps.size() == 1);
  CHECK(cps[0].kind == CriticalKind::Maximum);
  CHECK(cps[0].vertex == GridCoord{6, 6});
  CHECK(morse_counts(bump) == MorseCounts{0, 0, 1});
  CHECK(euler_check(bump));
  CHECK(is_generic(bump));
  CHECK(is_simple(bump, build_reeb(bump)));

  auto circ = realize_torus_circuit(GroupTerm::triv(), 1).field;
  auto cc = classify_vertices(circ);
  CHECK(tally(cc) == MorseCounts{1, 2, 1});
  for (const auto& cp : cc) {
    CAPTURE(to_string(cp.kind));
    if (cp.kind == CriticalKind::Maximum) CHECK(cp.value == doctest::Approx(1.0));
    if (cp.kind == CriticalKind::Minimum) CHECK(cp.value == doctest::Approx(-1.0));
    if (cp.kind == CriticalKind::Saddle) CHECK(std::abs(cp.value) == doctest::Approx(0.5));
  }
}

TEST_CASE("monkey saddle is degenerate") {
  std::vector<double> v(100, 5.0);
  ScalarField base(DomainKind::Torus, 10, 10, v);
  auto c = base.index(5, 5);
  v[c] = 0.0;
  for (int k = 0; k < 6; ++k) v[static_cast<std::size_t>(base.neighbor(c, k))] = (k % 2) ? 1.0 : -1.0;
  ScalarField f(DomainKind::Torus, 10, 10, v);
  CHECK(link_sign_changes(f, c) == 6);
  CHECK(error_code([&] { classify_vertices(f); }) == "DegenerateVertex");
}

TEST_CASE("morse counts of realized fields") {
  auto c3 = realize_torus_circuit(GroupTerm::triv(), 3).field;
  CHECK(morse_counts(c3) == MorseCounts{3, 6, 3});
  CHECK_FALSE(is_generic(c3));
  auto c2 = realize_torus_circuit(GroupTerm::triv(), 2).field;
  CHECK_FALSE(is_generic(c2));

  auto tree = realize_torus_tree(GroupTerm::triv(), 2, 1).field;
  CHECK(morse_counts(tree) == MorseCounts{8, 16, 8});
  CHECK(euler_check(tree));
  CHECK_FALSE(is_generic(tree));

  auto t11 = realize_torus_tree(GroupTerm::triv(), 1, 1).field;
  CHECK_FALSE(is_simple(t11, build_reeb(t11)));
  auto s2 = realize_simple(GroupTerm::triv(), 2).field;
  CHECK(is_simple(s2, build_reeb(s2)));
}

TEST_CASE("euler_check fails when a saddle is removed") {
  auto f = realize_torus_circuit(GroupTerm::triv(), 1).field;
  auto cps = classify_vertices(f);
  auto v = f.values();
  for (const auto& cp : cps) {
    if (cp.kind != CriticalKind::Saddle) continue;
    // A nondegenerate edit keeps the balance on a torus, so tie the saddle
    // with its highest neighbour: it reads as an extremum while no neighbour
    // changes its view.
    auto idx = f.index(cp.vertex.x, cp.vertex.y);
    double hi = -1e9;
    for (int k = 0; k < 6; ++k) hi = std::max(hi, f.value(static_cast<std::uint32_t>(f.neighbor(idx, k))));
    v[idx] = hi;
    break;
  }
  CHECK_FALSE(euler_check(ScalarField(f.kind(), f.width(), f.height(), v)));
}

TEST_CASE("classification is invariant under affine rescaling") {
  auto f = realize_torus_tree(GroupTerm::triv(), 1, 1).field;
  auto base = classify_vertices(f);
  auto g = classify_vertices(affine(f, 3.5, -7.0));
  REQUIRE(base.size() == g.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK(base[i].vertex == g[i].vertex);
    CHECK(base[i].kind == g[i].kind);
  }
}

TEST_CASE("classification commutes with torus translations") {
  auto f = realize_torus_circuit(GroupTerm::wr(GroupTerm::triv(), 2), 2).field;
  const int dx = 3, dy = 5;
  auto moved = classify_vertices(translated(f, dx, dy));
  auto base = classify_vertices(f);
  REQUIRE(base.size() == moved.size());
  std::set<std::tuple<int, int, int>> a, b;
  for (const auto& cp : base)
    a.insert({(cp.vertex.x + dx) % f.width(), (cp.vertex.y + dy) % f.height(), static_cast<int>(cp.kind)});
  for (const auto& cp : moved) b.insert({cp.vertex.x, cp.vertex.y, static_cast<int>(cp.kind)});
  CHECK(a == b);
}

TEST_CASE("validate_field") {
  validate_field(bump_disk());
  auto v = bump_disk().values();
  v[0] = 1.0;
  CHECK(error_code([&] { validate_field(ScalarField(DomainKind::Disk, 12, 12, v)); }) == "InvalidField");

  std::vector<double> tie(64);
  for (std::size_t i = 0; i < tie.size(); ++i) tie[i] = static_cast<double>(i);
  tie[9] = tie[10];
  CHECK_THROWS_AS(validate_field(ScalarField(DomainKind::Torus, 8, 8, tie)), InputError);

  std::vector<double> cyl(64);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) cyl[static_cast<std::size_t>(y * 8 + x)] = y + 0.01 * ((y > 0 && y < 7) ? x : 0);
  validate_field(ScalarField(DomainKind::Cylinder, 8, 8, cyl));
  cyl[3] = 0.5;
  CHECK_THROWS_AS(validate_field(ScalarField(DomainKind::Cylinder, 8, 8, cyl)), InputError);
}

TEST_CASE("perturb_ties breaks neighbour ties only") {
  std::vector<double> v(100);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 10; ++x) v[static_cast<std::size_t>(y * 10 + x)] = std::sin(0.7 * x) + std::cos(1.3 * y);
  v[55] = v[56];
  ScalarField f(DomainKind::Torus, 10, 10, v);
  CHECK_THROWS(validate_field(f));
  auto g = perturb_ties(f);
  validate_field(g);
  for (std::uint32_t i = 0; i < g.vertex_count(); ++i) CHECK(std::abs(g.value(i) - f.value(i)) < 1e-6);
  CHECK(perturb_ties(g) == g);
}

TEST_CASE("implant") {
  auto host = realize_torus_circuit(GroupTerm::triv(), 1).field;
  GridCoord top{}, saddle{};
  for (const auto& cp : classify_vertices(host)) {
    if (cp.kind == CriticalKind::Maximum) top = cp.vertex;
    if (cp.kind == CriticalKind::Saddle) saddle = cp.vertex;
  }
  auto outside = [](const ScalarField& f, const ImplantResult& r) {
    std::vector<CriticalPoint> out;
    for (const auto& cp : classify_vertices(f)) {
      bool inside = cp.vertex.x >= r.block_origin.x - 2 && cp.vertex.x < r.block_origin.x + r.block_width + 2 &&
                    cp.vertex.y >= r.block_origin.y - 2 && cp.vertex.y < r.block_origin.y + r.block_height + 2;
      if (!inside) out.push_back(cp);
    }
    return out;
  };

  SUBCASE("trivial sub keeps the counts") {
    auto sub = realize_disk(GroupTerm::triv()).field;
    auto r = implant(host, top, 0.6, sub, {0.7, 0.95});
    CHECK(morse_counts(r.field) == morse_counts(host));
    CHECK(outside(r.field, r) == outside(host, r));
  }
  SUBCASE("cyclic sub adds its critical points") {
    auto big = bump_disk(64, 40, 32, 20, 1000.0);
    auto sub = realize_disk(GroupTerm::wr(GroupTerm::triv(), 2)).field;
    auto r = implant(big, {32, 20}, 300.0, sub, {400.0, 990.0});
    CHECK(r.exact);
    auto mc = morse_counts(r.field);
    auto ms = morse_counts(sub);
    CHECK(mc.c2 == ms.c2);
    CHECK(mc.c1 == ms.c1);
    CHECK(mc.c0 == ms.c0);
    CHECK(euler_check(r.field));
    CHECK(outside(r.field, r).empty());
  }
  SUBCASE("errors") {
    auto sub = realize_disk(GroupTerm::triv()).field;
    CHECK(error_code([&] { implant(host, saddle, 0.6, sub, {0.7, 0.95}); }) == "CapNotDisk");
    CHECK(error_code([&] { implant(host, top, 0.6, sub, {0.5, 0.95}); }) == "WindowOutOfRange");
    CHECK(error_code([&] { implant(host, top, -0.6, sub, {0.7, 0.95}); }) != "");
  }
}

TEST_CASE("serialization round trip") {
  auto f = realize_torus_tree(GroupTerm::triv(), 1, 1).field;
  auto g = load_field(save_field(f));
  CHECK(g == f);
  auto j = field_to_json(bump_disk());
  CHECK(j["kind"] == "disk");
  CHECK(field_from_json(j) == bump_disk());

  auto bad = j;
  bad["values"].erase(bad["values"].begin());
  CHECK(error_code([&] { field_from_json(bad); }) == "InvalidField");
  auto frame = j;
  frame["values"][0] = 3.0;
  CHECK(error_code([&] { field_from_json(frame); }) == "InvalidField");
  CHECK(error_code([&] { load_field("{\"kind\": \"torus\""); }) == "MalformedJson");
  CHECK(error_code([&] { load_field("{\"kind\": \"sphere\", \"width\": 8, \"height\": 8, \"values\": []}"); }) ==
        "InvalidField");
}

TEST_CASE("pgm export") {
  auto f = bump_disk();
  auto pgm = export_pgm(f);
  std::string header = "P5\n12 12\n255\n";
  REQUIRE(pgm.size() == header.size() + 144);
  CHECK(pgm.substr(0, header.size()) == header);
  // Top row is the highest y; the peak at (6, 6) is the only 255.
  auto px = [&](int x, int y) { return static_cast<unsigned char>(pgm[header.size() + (11 - y) * 12 + x]); };
  CHECK(px(6, 6) == 255);
  CHECK(px(0, 0) == 0);
}
