#include "kr/group_algebra.hpp"

#include <algorithm>
#include <cctype>
#include <limits>

#include "kr/errors.hpp"

namespace kr {

GroupTerm GroupTerm::prod(std::vector<GroupTerm> factors) {
  if (factors.empty()) throw InputError("BadTerm", "product needs at least one factor");
  GroupTerm t;
  t.kind = Kind::Prod;
  t.children = std::move(factors);
  return t;
}

GroupTerm GroupTerm::wr(GroupTerm base, std::uint64_t n) {
  if (n < 1) throw InputError("BadTerm", "wreath index must be >= 1");
  GroupTerm t;
  t.kind = Kind::WrC;
  t.children.push_back(std::move(base));
  t.n = n;
  return t;
}

GroupTerm GroupTerm::wr2(GroupTerm base, std::uint64_t n, std::uint64_t m) {
  if (n < 1 || m < 1) throw InputError("BadTerm", "wreath indices must be >= 1");
  GroupTerm t;
  t.kind = Kind::WrCC;
  t.children.push_back(std::move(base));
  t.n = n;
  t.m = m;
  return t;
}

// ---------------------------------------------------------------------------
// Grammar

namespace {

class TermParser {
 public:
  explicit TermParser(std::string_view text) : text_(text) {}

  GroupTerm parse() {
    GroupTerm t = term();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input");
    return t;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw InputError("SyntaxError", msg + " at position " + std::to_string(pos_));
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(std::string_view tok) {
    skip_ws();
    if (text_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  void expect(std::string_view tok) {
    if (!accept(tok)) fail("expected '" + std::string(tok) + "'");
  }

  std::uint64_t integer() {
    skip_ws();
    std::size_t start = pos_;
    std::uint64_t value = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      std::uint64_t digit = static_cast<std::uint64_t>(text_[pos_] - '0');
      if (value > (std::numeric_limits<std::uint32_t>::max() - digit) / 10) fail("integer too large");
      value = value * 10 + digit;
      ++pos_;
    }
    if (pos_ == start) fail("expected integer");
    if (value < 1) {
      pos_ = start;
      fail("integer must be >= 1");
    }
    return value;
  }

  GroupTerm term() {
    skip_ws();
    // Longest keywords first: "wr2(" shares a prefix with "wr(".
    if (accept("wr2(")) {
      GroupTerm base = term();
      expect(",");
      auto n = integer();
      expect(",");
      auto m = integer();
      expect(")");
      return GroupTerm::wr2(std::move(base), n, m);
    }
    if (accept("wr(")) {
      GroupTerm base = term();
      expect(",");
      auto n = integer();
      expect(")");
      return GroupTerm::wr(std::move(base), n);
    }
    if (accept("cyc(")) {
      auto n = integer();
      expect(")");
      return GroupTerm::wr(GroupTerm::triv(), n);
    }
    if (accept("prod(")) {
      std::vector<GroupTerm> factors{term()};
      while (accept(",")) factors.push_back(term());
      if (factors.size() < 2) fail("prod needs at least two factors");
      expect(")");
      return GroupTerm::prod(std::move(factors));
    }
    if (accept("1")) return GroupTerm::triv();
    fail("expected term");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

GroupTerm parse_term(std::string_view text) { return TermParser(text).parse(); }

std::string format_term(const GroupTerm& t) {
  switch (t.kind) {
    case GroupTerm::Kind::Triv:
      return "1";
    case GroupTerm::Kind::WrC:
      return "wr(" + format_term(t.base()) + "," + std::to_string(t.n) + ")";
    case GroupTerm::Kind::WrCC:
      return "wr2(" + format_term(t.base()) + "," + std::to_string(t.n) + "," + std::to_string(t.m) + ")";
    case GroupTerm::Kind::Prod: {
      std::string s = "prod(";
      for (std::size_t i = 0; i < t.children.size(); ++i) {
        if (i) s += ",";
        s += format_term(t.children[i]);
      }
      return s + ")";
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Orders

namespace {

constexpr Order kOrderBound = Order(1) << 126;

Order checked_mul(Order a, Order b) {
  if (a != 0 && b > kOrderBound / a) throw ContractError("OrderOverflow", "group order exceeds 2^126");
  return a * b;
}

Order checked_pow(Order base, std::uint64_t e) {
  Order r = 1;
  for (std::uint64_t i = 0; i < e; ++i) {
    r = checked_mul(r, base);
    if (base == 1) break;
  }
  return r;
}

Order saturating_order(const GroupTerm& t) {
  try {
    return order(t);
  } catch (const ContractError&) {
    return kOrderBound + 1;
  }
}

int kind_rank(GroupTerm::Kind k) {
  switch (k) {
    case GroupTerm::Kind::Triv: return 0;
    case GroupTerm::Kind::WrC: return 1;
    case GroupTerm::Kind::WrCC: return 2;
    case GroupTerm::Kind::Prod: return 3;
  }
  return 4;
}

template <typename T>
int three_way(const T& a, const T& b) {
  return a < b ? -1 : (b < a ? 1 : 0);
}

}  // namespace

Order order(const GroupTerm& t) {
  switch (t.kind) {
    case GroupTerm::Kind::Triv:
      return 1;
    case GroupTerm::Kind::Prod: {
      Order r = 1;
      for (const auto& f : t.children) r = checked_mul(r, order(f));
      return r;
    }
    case GroupTerm::Kind::WrC:
      return checked_mul(checked_pow(order(t.base()), t.n), t.n);
    case GroupTerm::Kind::WrCC: {
      Order blocks = checked_mul(t.n, checked_mul(t.m, t.n));
      return checked_mul(checked_pow(order(t.base()), static_cast<std::uint64_t>(blocks)), blocks);
    }
  }
  return 1;
}

std::string order_to_string(Order o) {
  if (o == 0) return "0";
  std::string s;
  while (o > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(o % 10)));
    o /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

int compare_terms(const GroupTerm& a, const GroupTerm& b) {
  if (int c = three_way(kind_rank(a.kind), kind_rank(b.kind))) return c;
  if (int c = three_way(saturating_order(a), saturating_order(b))) return c;
  std::size_t common = std::min(a.children.size(), b.children.size());
  for (std::size_t i = 0; i < common; ++i)
    if (int c = compare_terms(a.children[i], b.children[i])) return c;
  if (int c = three_way(a.children.size(), b.children.size())) return c;
  if (int c = three_way(a.n, b.n)) return c;
  return three_way(a.m, b.m);
}

GroupTerm normalize(const GroupTerm& t) {
  switch (t.kind) {
    case GroupTerm::Kind::Triv:
      return t;
    case GroupTerm::Kind::WrC: {
      GroupTerm base = normalize(t.base());
      if (t.n == 1) return base;
      return GroupTerm::wr(std::move(base), t.n);
    }
    case GroupTerm::Kind::WrCC:
      return GroupTerm::wr2(normalize(t.base()), t.n, t.m);
    case GroupTerm::Kind::Prod: {
      std::vector<GroupTerm> flat;
      for (const auto& f : t.children) {
        GroupTerm nf = normalize(f);
        if (nf.kind == GroupTerm::Kind::Triv) continue;
        if (nf.kind == GroupTerm::Kind::Prod) {
          for (auto& g : nf.children) flat.push_back(std::move(g));
        } else {
          flat.push_back(std::move(nf));
        }
      }
      if (flat.empty()) return GroupTerm::triv();
      if (flat.size() == 1) return std::move(flat.front());
      std::stable_sort(flat.begin(), flat.end(),
                       [](const GroupTerm& a, const GroupTerm& b) { return compare_terms(a, b) < 0; });
      return GroupTerm::prod(std::move(flat));
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Classes

namespace {

bool has_wrcc(const GroupTerm& t) {
  if (t.kind == GroupTerm::Kind::WrCC) return true;
  return std::any_of(t.children.begin(), t.children.end(), has_wrcc);
}

bool indices_in_1_2(const GroupTerm& t) {
  if (t.kind == GroupTerm::Kind::WrC && t.n > 2) return false;
  return std::all_of(t.children.begin(), t.children.end(), indices_in_1_2);
}

}  // namespace

ClassFlags class_of(const GroupTerm& t) {
  ClassFlags c;
  c.in_P = !has_wrcc(t);
  c.in_P2 = c.in_P && indices_in_1_2(t);
  // Every P-term is A wr Z_1 for itself, so E1 coincides with P.
  c.in_E1 = c.in_P;
  // E2: A wr Z_n with A in P2, either at the top or with n = 1.
  bool top_wrc_over_p2 = t.kind == GroupTerm::Kind::WrC && class_of(t.base()).in_P2;
  c.in_E2 = c.in_P2 || top_wrc_over_p2;
  c.in_E0 = t.kind == GroupTerm::Kind::WrCC && !has_wrcc(t.base());
  return c;
}

// ---------------------------------------------------------------------------
// Permutation representations

namespace {

void check_degree(std::uint64_t degree, const PermRepOptions& opts) {
  if (degree > opts.degree_cap)
    throw ContractError("DegreeCap", "permutation degree " + std::to_string(degree) + " exceeds cap");
}

// Lifts a generator acting on {0..d-1} to a block at `offset` in degree `total`.
Perm embed(const Perm& p, std::uint32_t offset, std::uint32_t total) {
  Perm r = identity_perm(total);
  for (std::uint32_t i = 0; i < p.size(); ++i) r[offset + i] = offset + p[i];
  return r;
}

}  // namespace

PermGroup perm_rep(const GroupTerm& t, PermRepOptions opts) {
  switch (t.kind) {
    case GroupTerm::Kind::Triv:
      return PermGroup{1, {}, std::nullopt};
    case GroupTerm::Kind::Prod: {
      std::vector<PermGroup> parts;
      std::uint64_t total = 0;
      for (const auto& f : t.children) {
        parts.push_back(perm_rep(f, opts));
        total += parts.back().degree;
        check_degree(total, opts);
      }
      PermGroup g{static_cast<std::uint32_t>(total), {}, std::nullopt};
      std::uint32_t offset = 0;
      for (const auto& p : parts) {
        for (const auto& gen : p.generators) g.generators.push_back(embed(gen, offset, g.degree));
        offset += p.degree;
      }
      return g;
    }
    case GroupTerm::Kind::WrC: {
      PermGroup base = perm_rep(t.base(), opts);
      std::uint64_t degree = t.n * base.degree;
      check_degree(degree, opts);
      PermGroup g{static_cast<std::uint32_t>(degree), {}, std::nullopt};
      for (const auto& gen : base.generators) g.generators.push_back(embed(gen, 0, g.degree));
      if (t.n > 1) {
        Perm shift(g.degree);
        for (std::uint32_t b = 0; b < t.n; ++b)
          for (std::uint32_t i = 0; i < base.degree; ++i)
            shift[b * base.degree + i] = static_cast<std::uint32_t>(((b + 1) % t.n) * base.degree + i);
        g.generators.push_back(std::move(shift));
      }
      return g;
    }
    case GroupTerm::Kind::WrCC: {
      PermGroup base = perm_rep(t.base(), opts);
      const std::uint64_t rows = t.n;
      const std::uint64_t cols = t.m * t.n;
      std::uint64_t degree = rows * cols * base.degree;
      check_degree(degree, opts);
      PermGroup g{static_cast<std::uint32_t>(degree), {}, std::nullopt};
      for (const auto& gen : base.generators) g.generators.push_back(embed(gen, 0, g.degree));
      auto block_shift = [&](std::uint64_t di, std::uint64_t dj) {
        Perm p(g.degree);
        for (std::uint64_t i = 0; i < rows; ++i)
          for (std::uint64_t j = 0; j < cols; ++j) {
            std::uint64_t from = i * cols + j;
            std::uint64_t to = ((i + di) % rows) * cols + (j + dj) % cols;
            for (std::uint32_t k = 0; k < base.degree; ++k)
              p[from * base.degree + k] = static_cast<std::uint32_t>(to * base.degree + k);
          }
        return p;
      };
      if (rows > 1) g.generators.push_back(block_shift(1, 0));
      if (cols > 1) g.generators.push_back(block_shift(0, 1));
      return g;
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::json term_to_json(const GroupTerm& t) {
  using nlohmann::json;
  switch (t.kind) {
    case GroupTerm::Kind::Triv:
      return json{{"k", "triv"}};
    case GroupTerm::Kind::Prod: {
      json f = json::array();
      for (const auto& c : t.children) f.push_back(term_to_json(c));
      return json{{"k", "prod"}, {"f", f}};
    }
    case GroupTerm::Kind::WrC:
      return json{{"k", "wr"}, {"b", term_to_json(t.base())}, {"n", t.n}};
    case GroupTerm::Kind::WrCC:
      return json{{"k", "wr2"}, {"b", term_to_json(t.base())}, {"n", t.n}, {"m", t.m}};
  }
  return {};
}

GroupTerm term_from_json(const nlohmann::json& j) {
  try {
    const std::string k = j.at("k").get<std::string>();
    if (k == "triv") return GroupTerm::triv();
    if (k == "prod") {
      std::vector<GroupTerm> f;
      for (const auto& c : j.at("f")) f.push_back(term_from_json(c));
      return GroupTerm::prod(std::move(f));
    }
    if (k == "wr") return GroupTerm::wr(term_from_json(j.at("b")), j.at("n").get<std::uint64_t>());
    if (k == "wr2")
      return GroupTerm::wr2(term_from_json(j.at("b")), j.at("n").get<std::uint64_t>(),
                            j.at("m").get<std::uint64_t>());
    throw InputError("BadTerm", "unknown term kind '" + k + "'");
  } catch (const nlohmann::json::exception& e) {
    throw InputError("BadTerm", e.what());
  }
}

}  // namespace kr
