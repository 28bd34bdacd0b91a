#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace kr {

using Perm = std::vector<std::uint32_t>;

Perm identity_perm(std::size_t degree);
bool is_identity(const Perm& p);
bool is_bijection(const Perm& p);
// Apply a, then b.
Perm compose(const Perm& a, const Perm& b);
Perm inverse(const Perm& p);
std::uint64_t perm_order(const Perm& p);

struct PermHash {
  std::size_t operator()(const Perm& p) const noexcept;
};

struct PermGroup {
  std::uint32_t degree = 1;
  std::vector<Perm> generators;
  std::optional<std::uint64_t> order;
};

// Validates degree and that every generator is a bijection of {0..degree-1}.
void check_perm_group(const PermGroup& g);

// All elements of the generated group, or nullopt once more than cap elements
// have been found. Element 0 is the identity.
std::optional<std::vector<Perm>> closure(const PermGroup& g, std::uint64_t cap);

// Exact order if <= cap (also stored in g.order), otherwise nullopt (Overflow).
std::optional<std::uint64_t> enumerate_elements(PermGroup& g, std::uint64_t cap);

bool contains(std::span<const Perm> elements, const Perm& p);

enum class IsoResult { Isomorphic, NotIsomorphic, Undecided };

// Abstract-group isomorphism of two small permutation groups.
IsoResult is_isomorphic(const PermGroup& g, const PermGroup& h, std::uint64_t cap);

}  // namespace kr
