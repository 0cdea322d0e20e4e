#pragma once

#include "hecke/homomorphism.hpp"
#include "hecke/pair.hpp"

namespace hecke {

/// Result of a budgeted finiteness computation: either a certified
/// value, or an exhausted budget with nothing claimed.
struct FinitenessVerdict {
  bool decided = false;
  std::size_t value = 0;
};

/**
 * Closes the seed under conjugation by the group generators, as a set
 * of canonical elements. A stabilized set generates a normal subgroup
 * containing the seed. Returns nullopt past the budget.
 */
std::optional<std::vector<Element>> conjugation_closed_set(
    const Group& g, std::vector<Element> seed, std::size_t budget = 50000);

/**
 * Index of H inside its normal closure, certified by closing the
 * subgroup generators under conjugation and walking right cosets of H
 * along the closed set. Requires H with generators; undecided results
 * claim nothing about infiniteness.
 */
FinitenessVerdict nearly_normal_check(GroupPtr g, SubgroupPtr h,
                                      std::size_t budget = 50000);

/**
 * Order of the derived subgroup, certified by closing the generator
 * commutators under conjugation and then closing the resulting
 * generating set under multiplication.
 */
FinitenessVerdict fd_group_check(GroupPtr g, std::size_t budget = 50000);

/**
 * The free product of two finite groups over their direct product: the
 * canonical projection (with a section through factor decompositions),
 * its kernel generated by cross-factor commutators, and the pair whose
 * subgroup is the preimage of a chosen K inside the direct product.
 */
struct FreeProductSetup {
  GroupPtr free_product;
  GroupPtr direct_product;
  HomPtr projection;
  SubgroupPtr commutator_kernel;
  SubgroupPtr preimage;
  PairPtr pair;
};

/**
 * Builds the setup; `k_builder` receives the direct product and returns
 * K as one of its subgroups, with generators. Factor groups must be
 * finite within `cap` elements and decomposable over their generators.
 */
FreeProductSetup preimage_pair_builder(
    GroupPtr a, GroupPtr b,
    const std::function<SubgroupPtr(GroupPtr)>& k_builder,
    PairOptions opts = {}, std::size_t cap = 5000);

}  // namespace hecke
