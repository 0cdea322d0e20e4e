#pragma once

#include "hecke/numeric.hpp"

#include <cstdint>
#include <variant>
#include <vector>

namespace hecke {

class Element;

/// Affine coordinates (shift, scale) for the map x -> scale*x + shift with scale > 0.
struct AffineCoords {
  Rational shift;
  Rational scale;
  bool operator==(const AffineCoords&) const = default;
};

/// Reduced free-product word as parallel arrays: factors[i] names the child group of
/// letters[i]. Invariants: adjacent factors differ and no letter is a child identity.
struct Word {
  std::vector<std::uint32_t> factors;
  std::vector<Element> letters;
  bool operator==(const Word&) const;
};

/**
 * Group element payload. Interpretation belongs to the owning Group family:
 *  - IntVec   coordinates in a finitely generated abelian group
 *  - PermVec  images 0..n-1 of a permutation
 *  - AffineCoords  (shift, scale) pair of exact rationals
 *  - Tuple    coordinates in a direct/semidirect product or an extension
 *  - Word     reduced free-product word
 *
 * Payloads produced by Group operations are always canonical, so operator== is
 * equality in the group.
 */
class Element {
public:
  using IntVec = std::vector<Int>;
  using PermVec = std::vector<std::uint32_t>;
  using Tuple = std::vector<Element>;
  using Payload = std::variant<IntVec, PermVec, AffineCoords, Tuple, Word>;

  Element() : payload_(IntVec{}) {}
  explicit Element(Payload p) : payload_(std::move(p)) {}

  const Payload& payload() const { return payload_; }
  Payload& payload() { return payload_; }

  bool operator==(const Element& o) const { return payload_ == o.payload_; }

private:
  Payload payload_;
};

inline bool Word::operator==(const Word& o) const {
  return factors == o.factors && letters == o.letters;
}

/**
 * Deterministic total order on elements: payload kind, then a size measure
 * (L1 weight for integer vectors, tuple arity, word letter count), then
 * lexicographic payload comparison. Canonical double-coset representatives and
 * report key ordering use this order; it has no algebraic meaning.
 */
int element_cmp(const Element& a, const Element& b);

struct ElementLess {
  bool operator()(const Element& a, const Element& b) const { return element_cmp(a, b) < 0; }
};

std::size_t element_hash(const Element& e);

struct ElementHash {
  std::size_t operator()(const Element& e) const { return element_hash(e); }
};

}  // namespace hecke
