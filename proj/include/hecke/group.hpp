#pragma once

#include "hecke/element.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace hecke {

class Group;
using GroupPtr = std::shared_ptr<const Group>;

/// Generator word: (generator index, exponent) pairs multiplied left to right.
using GenWord = std::vector<std::pair<std::size_t, long long>>;

enum class GroupKind {
  abelian,
  symmetric,
  affine,
  free_product,
  direct_product,
  semidirect,
  extension,
};

/**
 * A group family oracle. Every operation returns canonical payloads, so Element
 * equality is equality in the group. Oracles are immutable and thread-safe;
 * anything budgeted (coset search, word balls) lives in the pair layer.
 *
 * The generator list is finite and its order is fixed; BFS enumeration, word
 * lengths, and generator-image homomorphisms all refer to this order.
 */
class Group {
public:
  virtual ~Group() = default;

  const std::string& name() const { return name_; }
  GroupKind kind() const { return kind_; }

  virtual Element identity() const = 0;
  virtual Element multiply(const Element& a, const Element& b) const = 0;
  virtual Element inverse(const Element& a) const = 0;
  /// Renormalizes a structurally valid payload (idempotent on canonical input).
  virtual Element canonicalize(const Element& a) const = 0;
  /// Throws std::invalid_argument when the payload does not belong to this family.
  virtual void validate(const Element& a) const = 0;

  const std::vector<Element>& generators() const { return gens_; }
  const std::vector<std::string>& generator_names() const { return gen_names_; }

  virtual std::string format(const Element& a) const = 0;

  /// Defining relators over the generator list (a sample set; may be empty for
  /// families without a usable presentation, like the affine family).
  virtual std::vector<GenWord> relators() const { return {}; }

  /// Expresses a as a generator word, or nullopt for families without a
  /// normal-form decomposition.
  virtual std::optional<GenWord> decompose(const Element& a) const {
    (void)a;
    return std::nullopt;
  }

  /// Closed-form word length over the built-in generators, when one exists.
  virtual std::optional<double> native_word_length(const Element& a) const {
    (void)a;
    return std::nullopt;
  }

  /// Child groups of product-like families; empty otherwise.
  virtual std::vector<GroupPtr> children() const { return {}; }

protected:
  Group(GroupKind kind, std::string name) : kind_(kind), name_(std::move(name)) {}

  GroupKind kind_;
  std::string name_;
  std::vector<Element> gens_;
  std::vector<std::string> gen_names_;
};

Element group_pow(const Group& g, const Element& x, long long e);
Element eval_gen_word(const Group& g, const GenWord& w);

/// Finitely generated abelian group with one coordinate per modulus entry;
/// modulus 0 means an infinite cyclic coordinate.
GroupPtr make_abelian(std::vector<Int> moduli, std::string name = "");
GroupPtr make_integers();
GroupPtr make_cyclic(const Int& n);

/// Symmetric group on {0..n-1}; payload lists images, composition (s*t)(x) = s(t(x)),
/// generators are the adjacent transpositions (i, i+1).
GroupPtr make_symmetric(std::uint32_t n);

/// Rational affine maps x -> a*x + b with a > 0, payload (b, a); the generator list
/// is the unit translation plus one scaling per entry of `scales`.
GroupPtr make_affine(std::vector<Int> scales = {Int(2), Int(3)}, std::string name = "");

GroupPtr make_free_product(std::vector<GroupPtr> children, std::string name = "");
/// Free group of the given rank, as a free product of infinite cyclic factors.
GroupPtr make_free_group(std::size_t rank);

GroupPtr make_direct_product(std::vector<GroupPtr> children, std::string name = "");

/// Automorphism of the kernel attached to one Q-generator: an integer matrix on
/// abelian coordinates, or a permutation of free-product factors.
using KernelAction = std::variant<IntMatrix, std::vector<std::uint32_t>>;

/// Semidirect product N x| Q. The action is supplied per Q-generator and extended
/// to all of Q through Q's generator-word decomposition; the homomorphism property
/// is sample-checked against Q's relators at construction.
GroupPtr make_semidirect(GroupPtr n, GroupPtr q, std::vector<KernelAction> action,
                         std::string name = "");

/// True for free products whose factors are all infinite cyclic (free groups);
/// the probe uses this to switch to the tree fast path.
bool is_free_group_like(const Group& g);

/// Moduli vector of an abelian family oracle, or nullptr for other kinds.
const std::vector<Int>* abelian_moduli(const Group& g);

/**
 * A subgroup of `parent` viewed as a group in its own right. Every operation
 * delegates to the parent; validate additionally enforces the membership
 * predicate. Use this when a pair should live inside a subgroup, since a
 * Subgroup must name its ambient group as parent. Generators must pass the
 * membership predicate; the predicate may be empty to skip the extra check.
 */
GroupPtr make_subgroup_group(GroupPtr parent, std::vector<Element> generators,
                             std::function<bool(const Element&)> member,
                             std::string name = "");

/// All elements of a finite group, by closing the generators under products.
/// Throws std::domain_error when the closure exceeds `cap`.
std::vector<Element> enumerate_finite_group(const Group& g, std::size_t cap = 20000);

}  // namespace hecke
