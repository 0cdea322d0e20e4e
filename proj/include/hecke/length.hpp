#pragma once

#include <functional>
#include <optional>
#include <string>

#include "hecke/hecke_algebra.hpp"

namespace hecke {

/// How a weight was built; consumers use this to pick fast paths.
enum class LengthKind {
  word,
  quotient_word,
  extension_prime,
  finite_averaged,
  max_gamma,
  pullback,
  custom,
};

std::string to_string(LengthKind kind);

/**
 * Nonnegative weight on a group: zero at the identity, symmetric under
 * inversion and subadditive under multiplication. A weight fits a pair
 * when it also vanishes on the subgroup; it is then constant on each
 * double coset. `declared_vanishing` lists subgroups the weight is
 * known to vanish on; the axiom checker spot-checks the claim.
 */
struct LengthFunction {
  std::string name;
  LengthKind kind = LengthKind::custom;
  std::vector<SubgroupPtr> declared_vanishing;
  std::function<double(const Element&)> eval;

  double operator()(const Element& g) const { return eval(g); }
};

/// Constant zero weight, valid on any group.
LengthFunction zero_length();

/**
 * Word length with respect to the group's generators. Uses the group's
 * closed form when available, otherwise an incremental breadth-first
 * search from the identity whose table is shared across calls. Throws
 * std::domain_error when the search exceeds `cap` visited elements.
 */
LengthFunction word_length(GroupPtr g, bool prefer_native = true,
                           std::size_t cap = 2000000);

/**
 * Distance in the coset graph whose edges join Hx and Hxs over the
 * group generators s. This is a weight for the pair only when the
 * subgroup is normal (it is then the word length of the image in the
 * quotient); normality is sample-checked by conjugating the subgroup
 * generators, and std::domain_error reports a failed conjugate.
 */
LengthFunction quotient_word_length(PairPtr pair, std::size_t cap = 2000000);

/**
 * Precomposition with an element map, as used to pull a weight back
 * along a homomorphism. The result is a valid weight whenever `map`
 * respects products, inverses and the identity.
 */
LengthFunction composed_length(std::string name, LengthFunction base,
                               std::function<Element(const Element&)> map,
                               LengthKind kind = LengthKind::pullback);

/**
 * Averaged weight over a finite set: max of base(u x v) over u, v in F.
 * F must contain the identity and be closed under product and inverse,
 * and base must already vanish on F; either failure throws
 * std::domain_error (for the latter the construction would not vanish
 * on F, so it would not be a weight for any pair containing F).
 */
LengthFunction finite_averaged(GroupPtr g, LengthFunction base,
                               std::vector<Element> finite_subgroup);

/**
 * Equivalent weight vanishing on a finite subgroup: zero on the listed
 * elements, otherwise the maximum of base(u x v) over u, v in the list.
 * Unlike `finite_averaged` this does not require base to vanish on the
 * set; the forced zeros keep the axioms intact.
 */
LengthFunction length_vanishing_on(GroupPtr g, LengthFunction base,
                                   std::vector<Element> finite_subgroup);

/**
 * Verifies the axioms on the samples and their pairwise products, plus
 * vanishing on the generators of each declared subgroup; throws
 * std::logic_error naming the first violation.
 */
void check_length_axioms(const Group& g, const LengthFunction& len,
                         const std::vector<Element>& samples);

/// Outcome of a pointwise comparison lower <= a * upper + b on samples.
struct DominationVerdict {
  bool holds = false;
  std::optional<Element> counterexample;
};

/**
 * Checks lower(g) <= a * upper(g) + b on every sample; a and b must be
 * positive or std::invalid_argument is thrown. Establishes dominance
 * only on the samples, never globally.
 */
DominationVerdict dominates(const LengthFunction& upper,
                            const LengthFunction& lower,
                            const std::vector<Element>& samples, double a,
                            double b);

/// Double cosets of weight at most r, found by walking the coset graph.
struct LengthBall {
  std::vector<Element> double_coset_reps;
  /// Right cosets inside the ball, grouped per double coset entry.
  std::vector<std::size_t> right_counts;
  /// True when every frontier coset exceeded r, so no further double
  /// coset of weight <= r is reachable without dipping below r again.
  bool complete = false;
  std::size_t right_coset_total = 0;
};

/**
 * Walks right cosets outward from H by generator steps, keeping those
 * whose weight is at most r, and reports the double cosets met. The
 * walk does not expand past cosets above r, so completeness assumes
 * graph-metric-like weights (all constructors here qualify). Visiting
 * more than `budget` cosets stops the walk with `complete` false.
 */
LengthBall length_ball(PairPtr pair, double r, const LengthFunction& len,
                       std::size_t budget = 200000);

/// Largest weight over the support, measured on right coset representatives.
template <typename S>
double support_length_radius(const HeckeFunction<S>& f,
                             const LengthFunction& len) {
  double radius = 0.0;
  for (const auto& [rep, c] : f.terms()) {
    (void)c;
    for (const auto& u : f.pair().double_coset(rep).right_reps)
      radius = std::max(radius, len(u));
  }
  return radius;
}

/// Weighted norm: sqrt of the sum over right cosets of |f|^2 (1 + len)^{2s}.
template <typename S>
double weighted_norm(const HeckeFunction<S>& f, const LengthFunction& len,
                     double s) {
  double total = 0.0;
  for (const auto& [rep, c] : f.terms()) {
    double cc = scalar_traits<S>::to_dbl(c);
    cc *= cc;
    for (const auto& u : f.pair().double_coset(rep).right_reps)
      total += cc * std::pow(1.0 + len(u), 2.0 * s);
  }
  return std::sqrt(total);
}

}  // namespace hecke
