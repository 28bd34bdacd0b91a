#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "kr/perm_group.hpp"
#include "kr/vendor_json.hpp"

namespace kr {

// Syntax tree for the groups built from the trivial group by direct
// products and wreath products with Z_n and Z_n x Z_{mn}.
//
// Prod keeps its factors in `children`; WrC and WrCC keep the base group in
// `children[0]`. `n` and `m` are only meaningful for the wreath kinds.
struct GroupTerm {
  enum class Kind { Triv, Prod, WrC, WrCC };

  Kind kind = Kind::Triv;
  std::vector<GroupTerm> children;
  std::uint64_t n = 1;
  std::uint64_t m = 1;

  static GroupTerm triv() { return {}; }
  static GroupTerm prod(std::vector<GroupTerm> factors);
  static GroupTerm wr(GroupTerm base, std::uint64_t n);
  static GroupTerm wr2(GroupTerm base, std::uint64_t n, std::uint64_t m);

  const GroupTerm& base() const { return children.at(0); }

  friend bool operator==(const GroupTerm&, const GroupTerm&) = default;
};

using Order = unsigned __int128;

struct ClassFlags {
  bool in_P = false;
  bool in_P2 = false;
  bool in_E0 = false;
  bool in_E1 = false;
  bool in_E2 = false;

  friend bool operator==(const ClassFlags&, const ClassFlags&) = default;
};

GroupTerm parse_term(std::string_view text);
std::string format_term(const GroupTerm& t);
GroupTerm normalize(const GroupTerm& t);

// Throws ContractError("OrderOverflow") above 2^126.
Order order(const GroupTerm& t);
std::string order_to_string(Order o);

// Canonical total order used to sort product factors: negative, zero or
// positive like strcmp.
int compare_terms(const GroupTerm& a, const GroupTerm& b);

ClassFlags class_of(const GroupTerm& t);

struct PermRepOptions {
  std::uint32_t degree_cap = 1u << 20;
};
PermGroup perm_rep(const GroupTerm& t, PermRepOptions opts = {});

nlohmann::json term_to_json(const GroupTerm& t);
GroupTerm term_from_json(const nlohmann::json& j);

}  // namespace kr
