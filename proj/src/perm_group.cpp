#include "kr/perm_group.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "kr/errors.hpp"
#include "kr/union_find.hpp"

namespace kr {

Perm identity_perm(std::size_t degree) {
  Perm p(degree);
  std::iota(p.begin(), p.end(), 0u);
  return p;
}

bool is_identity(const Perm& p) {
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] != i) return false;
  return true;
}

bool is_bijection(const Perm& p) {
  std::vector<bool> seen(p.size(), false);
  for (auto x : p) {
    if (x >= p.size() || seen[x]) return false;
    seen[x] = true;
  }
  return true;
}

Perm compose(const Perm& a, const Perm& b) {
  Perm r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = b[a[i]];
  return r;
}

Perm inverse(const Perm& p) {
  Perm r(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) r[p[i]] = static_cast<std::uint32_t>(i);
  return r;
}

std::uint64_t perm_order(const Perm& p) {
  std::vector<bool> seen(p.size(), false);
  std::uint64_t result = 1;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (seen[i]) continue;
    std::uint64_t len = 0;
    for (std::size_t j = i; !seen[j]; j = p[j]) {
      seen[j] = true;
      ++len;
    }
    result = std::lcm(result, len);
  }
  return result;
}

std::size_t PermHash::operator()(const Perm& p) const noexcept {
  std::size_t h = 1469598103934665603ull;
  for (auto x : p) {
    h ^= x;
    h *= 1099511628211ull;
  }
  return h;
}

void check_perm_group(const PermGroup& g) {
  if (g.degree == 0) throw InputError("BadPermGroup", "degree must be positive");
  for (const auto& gen : g.generators) {
    if (gen.size() != g.degree || !is_bijection(gen))
      throw InputError("BadPermGroup", "generator is not a bijection of the point set");
  }
}

std::optional<std::vector<Perm>> closure(const PermGroup& g, std::uint64_t cap) {
  check_perm_group(g);
  std::vector<Perm> elements{identity_perm(g.degree)};
  std::unordered_set<Perm, PermHash> seen{elements.front()};
  for (std::size_t head = 0; head < elements.size(); ++head) {
    for (const auto& gen : g.generators) {
      Perm next = compose(elements[head], gen);
      if (seen.insert(next).second) {
        if (elements.size() >= cap) return std::nullopt;
        elements.push_back(std::move(next));
      }
    }
  }
  return elements;
}

std::optional<std::uint64_t> enumerate_elements(PermGroup& g, std::uint64_t cap) {
  auto elems = closure(g, cap);
  if (!elems) return std::nullopt;
  g.order = elems->size();
  return g.order;
}

bool contains(std::span<const Perm> elements, const Perm& p) {
  return std::find(elements.begin(), elements.end(), p) != elements.end();
}

namespace {

// Multiplication-free description of a small group: its elements, their
// orders and conjugacy-class sizes, indexed for lookup.
struct GroupTable {
  std::vector<Perm> elements;
  std::unordered_map<Perm, std::uint32_t, PermHash> index;
  std::vector<Perm> generators;
  std::vector<std::uint64_t> element_order;
  std::vector<std::uint32_t> class_of;
  std::vector<std::uint32_t> class_size;

  std::uint32_t lookup(const Perm& p) const { return index.at(p); }
  std::pair<std::uint64_t, std::uint32_t> signature(std::uint32_t i) const {
    return {element_order[i], class_size[class_of[i]]};
  }
};

std::optional<GroupTable> build_table(const PermGroup& g, std::uint64_t cap) {
  auto elems = closure(g, cap);
  if (!elems) return std::nullopt;
  GroupTable t;
  t.elements = std::move(*elems);
  for (std::uint32_t i = 0; i < t.elements.size(); ++i) t.index.emplace(t.elements[i], i);
  std::unordered_set<Perm, PermHash> unique_gens;
  for (const auto& gen : g.generators)
    if (!is_identity(gen) && unique_gens.insert(gen).second) t.generators.push_back(gen);

  t.element_order.resize(t.elements.size());
  for (std::size_t i = 0; i < t.elements.size(); ++i) t.element_order[i] = perm_order(t.elements[i]);

  UnionFind classes(t.elements.size());
  std::vector<Perm> inverses;
  for (const auto& gen : t.generators) inverses.push_back(inverse(gen));
  for (std::uint32_t i = 0; i < t.elements.size(); ++i) {
    for (std::size_t k = 0; k < t.generators.size(); ++k) {
      Perm conj = compose(compose(inverses[k], t.elements[i]), t.generators[k]);
      classes.unite(i, t.lookup(conj));
    }
  }
  t.class_of.resize(t.elements.size());
  std::vector<std::uint32_t> counts(t.elements.size(), 0);
  for (std::uint32_t i = 0; i < t.elements.size(); ++i) {
    t.class_of[i] = classes.find(i);
    ++counts[t.class_of[i]];
  }
  t.class_size = std::move(counts);
  return t;
}

bool is_abelian(const GroupTable& t) {
  for (std::size_t i = 0; i < t.generators.size(); ++i)
    for (std::size_t j = i + 1; j < t.generators.size(); ++j)
      if (compose(t.generators[i], t.generators[j]) != compose(t.generators[j], t.generators[i]))
        return false;
  return true;
}

// Extends generator images to a map on all of G by walking G's Cayley graph;
// succeeds iff the extension is a well-defined injective homomorphism.
bool extends_to_isomorphism(const GroupTable& g, const GroupTable& h,
                            const std::vector<std::uint32_t>& images) {
  constexpr std::uint32_t kUnset = ~0u;
  std::vector<std::uint32_t> phi(g.elements.size(), kUnset);
  std::vector<bool> used(h.elements.size(), false);
  phi[0] = h.lookup(identity_perm(h.elements[0].size()));
  used[phi[0]] = true;
  std::vector<std::uint32_t> queue{0};
  for (std::size_t head = 0; head < queue.size(); ++head) {
    std::uint32_t x = queue[head];
    for (std::size_t k = 0; k < g.generators.size(); ++k) {
      std::uint32_t y = g.lookup(compose(g.elements[x], g.generators[k]));
      std::uint32_t target = h.lookup(compose(h.elements[phi[x]], h.elements[images[k]]));
      if (phi[y] == kUnset) {
        if (used[target]) return false;
        used[target] = true;
        phi[y] = target;
        queue.push_back(y);
      } else if (phi[y] != target) {
        return false;
      }
    }
  }
  return queue.size() == g.elements.size();
}

struct IsoSearch {
  const GroupTable& g;
  const GroupTable& h;
  std::vector<std::uint32_t> gen_index;  // generator k as an element of G
  std::vector<std::vector<std::uint32_t>> candidates;
  std::vector<std::uint32_t> images;
  std::uint64_t nodes = 0;
  std::uint64_t node_limit = 5'000'000;
  bool aborted = false;

  bool consistent(std::size_t k) const {
    for (std::size_t i = 0; i <= k; ++i) {
      for (std::size_t j : {i, k}) {
        auto gp = g.lookup(compose(g.elements[gen_index[i]], g.elements[gen_index[j]]));
        auto hp = h.lookup(compose(h.elements[images[i]], h.elements[images[j]]));
        if (g.signature(gp) != h.signature(hp)) return false;
      }
    }
    return true;
  }

  bool search(std::size_t k) {
    if (k == gen_index.size()) return extends_to_isomorphism(g, h, images);
    for (auto c : candidates[k]) {
      if (++nodes > node_limit) {
        aborted = true;
        return false;
      }
      images[k] = c;
      if (consistent(k) && search(k + 1)) return true;
      if (aborted) return false;
    }
    return false;
  }
};

}  // namespace

IsoResult is_isomorphic(const PermGroup& g, const PermGroup& h, std::uint64_t cap) {
  auto tg = build_table(g, cap);
  auto th = build_table(h, cap);
  if (!tg || !th) return IsoResult::Undecided;
  if (tg->elements.size() != th->elements.size()) return IsoResult::NotIsomorphic;
  if (is_abelian(*tg) != is_abelian(*th)) return IsoResult::NotIsomorphic;

  std::map<std::pair<std::uint64_t, std::uint32_t>, std::size_t> sig_g, sig_h;
  for (std::uint32_t i = 0; i < tg->elements.size(); ++i) ++sig_g[tg->signature(i)];
  for (std::uint32_t i = 0; i < th->elements.size(); ++i) ++sig_h[th->signature(i)];
  if (sig_g != sig_h) return IsoResult::NotIsomorphic;
  if (tg->generators.empty()) return IsoResult::Isomorphic;

  IsoSearch s{*tg, *th, {}, {}, {}};
  for (const auto& gen : tg->generators) s.gen_index.push_back(tg->lookup(gen));
  s.images.resize(s.gen_index.size());
  for (std::size_t k = 0; k < s.gen_index.size(); ++k) {
    auto sig = tg->signature(s.gen_index[k]);
    std::vector<std::uint32_t> cand;
    std::unordered_set<std::uint32_t> classes_taken;
    for (std::uint32_t i = 0; i < th->elements.size(); ++i) {
      if (th->signature(i) != sig) continue;
      // The first image only matters up to conjugation in H.
      if (k == 0 && !classes_taken.insert(th->class_of[i]).second) continue;
      cand.push_back(i);
    }
    s.candidates.push_back(std::move(cand));
  }
  if (s.search(0)) return IsoResult::Isomorphic;
  return s.aborted ? IsoResult::Undecided : IsoResult::NotIsomorphic;
}

}  // namespace kr
