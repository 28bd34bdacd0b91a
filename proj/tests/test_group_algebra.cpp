#include <doctest.h>

#include "kr/errors.hpp"
#include "kr/group_algebra.hpp"
#include "term_gen.hpp"

using namespace kr;
using K = GroupTerm::Kind;

namespace {
GroupTerm T() { return GroupTerm::triv(); }
GroupTerm C(std::uint64_t n) { return GroupTerm::wr(T(), n); }
}  // namespace

TEST_CASE("parse_term examples") {
  CHECK(parse_term("1") == T());
  CHECK(parse_term("wr(1,3)") == C(3));
  CHECK(parse_term(" cyc( 3 ) ") == C(3));
  CHECK(parse_term("wr2(wr(1,2),2,1)") == GroupTerm::wr2(C(2), 2, 1));
  auto p = parse_term("prod(1, wr(1,2))");
  CHECK(p.kind == K::Prod);
  CHECK(p.children.size() == 2);
}

TEST_CASE("parse_term errors") {
  for (const char* bad : {"", "2", "wr(1)", "wr(1,0)", "prod(1)", "wr(1,2", "wr(1,2))", "wr2(1,1,0)", "xyz", "wr(1,-1)"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_term(bad), InputError);
  }
  try {
    parse_term("wr(1,2");
  } catch (const InputError& e) {
    CHECK(e.code() == "SyntaxError");
  }
}

TEST_CASE("format_term examples") {
  CHECK(format_term(T()) == "1");
  CHECK(format_term(C(3)) == "wr(1,3)");
  CHECK(format_term(GroupTerm::prod({C(2), C(3)})) == "prod(wr(1,2),wr(1,3))");
  CHECK(format_term(GroupTerm::wr2(T(), 2, 3)) == "wr2(1,2,3)");
}

TEST_CASE("normalize examples") {
  auto t = GroupTerm::prod({C(3), C(2)});
  CHECK(normalize(GroupTerm::wr(t, 1)) == normalize(t));
  CHECK(normalize(GroupTerm::prod({T(), T()})) == T());
  auto nested = normalize(GroupTerm::prod({GroupTerm::prod({C(3), C(2)}), GroupTerm::wr(T(), 4)}));
  REQUIRE(nested.kind == K::Prod);
  REQUIRE(nested.children.size() == 3);
  CHECK(nested.children[0] == C(2));
  CHECK(nested.children[1] == C(3));
  CHECK(nested.children[2] == C(4));
  CHECK(normalize(GroupTerm::prod({C(2), T()})) == C(2));
}

TEST_CASE("canonical order ranks constructors") {
  CHECK(compare_terms(T(), C(2)) < 0);
  CHECK(compare_terms(C(2), GroupTerm::wr2(T(), 1, 1)) < 0);
  CHECK(compare_terms(GroupTerm::wr2(T(), 1, 1), GroupTerm::prod({C(2), C(2)})) < 0);
  CHECK(compare_terms(C(2), C(3)) < 0);
  CHECK(compare_terms(C(3), C(3)) == 0);
}

TEST_CASE("order examples") {
  CHECK(order(T()) == 1);
  CHECK(order(C(3)) == 3);
  CHECK(order(GroupTerm::wr(C(2), 3)) == 24);
  CHECK(order(GroupTerm::wr2(T(), 2, 1)) == 4);
  CHECK(order(GroupTerm::wr2(C(2), 2, 1)) == 64);
  CHECK(order(GroupTerm::prod({C(2), C(3)})) == 6);
  CHECK(order_to_string(order(GroupTerm::wr(C(2), 5))) == "160");
}

TEST_CASE("order overflow is reported") {
  GroupTerm t = C(2);
  for (int i = 0; i < 8; ++i) t = GroupTerm::wr(t, 100);
  try {
    (void)order(t);
    FAIL("expected overflow");
  } catch (const ContractError& e) {
    CHECK(e.code() == "OrderOverflow");
  }
}

TEST_CASE("class_of examples") {
  auto c5 = class_of(C(5));
  CHECK(c5.in_P);
  CHECK_FALSE(c5.in_P2);
  CHECK(c5.in_E1);
  CHECK_FALSE(c5.in_E0);
  // A wr Z_n with A trivial (hence in P2) puts Z_5 in E2.
  CHECK(c5.in_E2);

  auto c22 = class_of(GroupTerm::wr(C(2), 2));
  CHECK(c22.in_P2);
  CHECK(c22.in_E2);

  auto w = class_of(GroupTerm::wr2(T(), 2, 1));
  CHECK(w.in_E0);
  CHECK_FALSE(w.in_P);
  CHECK_FALSE(w.in_E1);

  CHECK_FALSE(class_of(GroupTerm::wr(C(3), 2)).in_E2);
  CHECK_FALSE(class_of(GroupTerm::wr2(GroupTerm::wr2(T(), 1, 1), 1, 1)).in_E0);
}

TEST_CASE("perm_rep examples") {
  auto triv = perm_rep(T());
  CHECK(triv.degree == 1);
  CHECK(triv.generators.empty());

  auto z4 = perm_rep(C(4));
  CHECK(z4.degree == 4);
  REQUIRE(z4.generators.size() == 1);
  CHECK(perm_order(z4.generators[0]) == 4);

  auto v4 = perm_rep(GroupTerm::wr2(T(), 2, 1));
  CHECK(v4.degree == 4);
  REQUIRE(v4.generators.size() == 2);
  CHECK(compose(v4.generators[0], v4.generators[1]) == compose(v4.generators[1], v4.generators[0]));
  CHECK(enumerate_elements(v4, 100) == 4u);

  CHECK_THROWS_AS(perm_rep(GroupTerm::wr(C(4), 8), PermRepOptions{16}), ContractError);
}

TEST_CASE("enumerate_elements examples") {
  auto g = perm_rep(C(3));
  CHECK(enumerate_elements(g, 100) == 3u);
  CHECK(g.order == 3u);
  auto h = perm_rep(GroupTerm::wr(C(2), 3));
  CHECK(enumerate_elements(h, 100) == 24u);
  auto o = perm_rep(GroupTerm::wr(C(2), 5));
  CHECK_FALSE(enumerate_elements(o, 100).has_value());
}

TEST_CASE("is_isomorphic examples") {
  auto t = GroupTerm::prod({C(2), C(3)});
  CHECK(is_isomorphic(perm_rep(GroupTerm::wr(t, 1)), perm_rep(t), 5000) == IsoResult::Isomorphic);
  CHECK(is_isomorphic(perm_rep(GroupTerm::wr2(T(), 2, 1)), perm_rep(C(4)), 5000) == IsoResult::NotIsomorphic);
  CHECK(is_isomorphic(perm_rep(t), perm_rep(C(6)), 5000) == IsoResult::Isomorphic);
  CHECK(is_isomorphic(perm_rep(GroupTerm::wr(C(2), 5)), perm_rep(GroupTerm::wr(C(2), 5)), 100) == IsoResult::Undecided);
  // Z2 wr Z2 (dihedral of order 8) against Z2 x Z4.
  CHECK(is_isomorphic(perm_rep(GroupTerm::wr(C(2), 2)), perm_rep(GroupTerm::prod({C(2), C(4)})), 5000) ==
        IsoResult::NotIsomorphic);
}

TEST_CASE("perm group helpers") {
  Perm p{1, 2, 0};
  CHECK(is_bijection(p));
  CHECK_FALSE(is_bijection(Perm{0, 0}));
  CHECK(is_identity(compose(p, inverse(p))));
  CHECK(compose(Perm{1, 0, 2}, Perm{0, 2, 1}) == Perm{2, 0, 1});
  CHECK_THROWS(check_perm_group(PermGroup{3, {Perm{0, 0, 1}}, std::nullopt}));
}

TEST_CASE("term json round trip") {
  auto t = parse_term("prod(wr2(wr(1,2),2,1),wr(1,3))");
  CHECK(term_from_json(term_to_json(t)) == t);
  CHECK_THROWS_AS(term_from_json(nlohmann::json{{"k", "bogus"}}), InputError);
}

TEST_CASE("randomized properties") {
  std::mt19937_64 rng(12345);
  for (int i = 0; i < 200; ++i) {
    GroupTerm t = kr::testing::random_small_term(rng, 2000);
    CAPTURE(format_term(t));
    GroupTerm nt = normalize(t);
    CHECK(parse_term(format_term(t)) == t);
    CHECK(normalize(nt) == nt);
    CHECK(order(nt) == order(t));
    auto c = class_of(nt);
    if (c.in_P2) CHECK(c.in_P);
    if (c.in_P) CHECK(c.in_E1);
    auto g = perm_rep(t);
    CHECK(enumerate_elements(g, 2000) == static_cast<std::uint64_t>(order(t)));
    if (order(t) <= 500) CHECK(is_isomorphic(g, perm_rep(nt), 5000) == IsoResult::Isomorphic);
  }
}
