#pragma once

#include <set>

#include "hecke/homomorphism.hpp"
#include "hecke/length.hpp"

namespace hecke {

/**
 * Nested pairs (G, H) and (G, K) with K of finite index in H. The
 * transversal lists right coset representatives of K in H, with the
 * identity in slot 0; its length is the index n.
 */
struct TransferContext {
  PairPtr coarse;  // (G, H)
  PairPtr fine;    // (G, K)
  IndexTable transversal;

  std::size_t index() const { return transversal.reps.size(); }
};

/**
 * Resolves the transversal for two pairs over one group. Throws
 * std::invalid_argument when the groups differ or the fine subgroup is
 * not contained in the coarse one, and std::domain_error when the index
 * is not resolved within the budget.
 */
TransferContext make_transfer(PairPtr coarse, PairPtr fine,
                              std::size_t budget = 200000);

/// Constant in the Cauchy-Schwarz bound for averaged pushforwards: c(m) = m.
inline Int cauchy_schwarz_constant(std::size_t m) { return Int(static_cast<long long>(m)); }

/**
 * Lift of a vector along the coset surjection: (lift k)(Kx) = k(Hx).
 * Every H-coset in the support must split into exactly n distinct
 * K-cosets; a collision throws std::logic_error.
 */
template <typename S>
CosetFunction<S> tilde_lift(const TransferContext& t, const CosetFunction<S>& k) {
  CosetFunction<S> out(t.fine);
  const Group& g = t.coarse->group();
  for (const auto& [u, c] : k.terms()) {
    std::set<Element, ElementLess> lifted;
    for (const auto& h : t.transversal.reps) {
      Element v = t.fine->coset_rep(g.multiply(h, u));
      if (!lifted.insert(v).second)
        throw std::logic_error("tilde_lift: transversal landed in one coset twice");
      out.add(v, c);
    }
  }
  return out;
}

/// Lift of a Hecke element: (lift f)(KxK) = f(HxH).
template <typename S>
HeckeFunction<S> tilde_lift_hecke(const TransferContext& t,
                                  const HeckeFunction<S>& f) {
  HeckeFunction<S> out(t.fine);
  const Group& g = t.coarse->group();
  for (const auto& [rep, c] : f.terms()) {
    const auto& rec = t.coarse->double_coset(rep);
    std::set<Element, ElementLess> cosets;
    for (const auto& u : rec.right_reps)
      for (const auto& h : t.transversal.reps)
        cosets.insert(t.fine->coset_rep(g.multiply(h, u)));
    if (cosets.size() != rec.right_reps.size() * t.index())
      throw std::logic_error("tilde_lift_hecke: lifted cosets collide");
    std::set<Element, ElementLess> classes;
    for (const auto& v : cosets) classes.insert(t.fine->double_coset_rep(v));
    for (const auto& w : classes) out.add(w, c);
  }
  return out;
}

/// Averaged pushforward: (push f)(HxH) = sum over i, j of f(K h_i x h_j K).
template <typename S>
HeckeFunction<S> bar_push(const TransferContext& t, const HeckeFunction<S>& f) {
  HeckeFunction<S> out(t.coarse);
  const Group& g = t.coarse->group();
  std::set<Element, ElementLess> classes;
  for (const auto& [rep, c] : f.terms()) {
    (void)c;
    classes.insert(t.coarse->double_coset_rep(rep));
  }
  for (const auto& w : classes) {
    S total{};
    for (const auto& hi : t.transversal.reps)
      for (const auto& hj : t.transversal.reps)
        total += f.value(g.multiply(g.multiply(hi, w), hj));
    if (!scalar_traits<S>::is_zero(total)) out.add(w, total);
  }
  return out;
}

/// Averaged pushforward of a vector: (push k)(Hx) = sum over i of k(K h_i x).
template <typename S>
CosetFunction<S> bar_push_vector(const TransferContext& t,
                                 const CosetFunction<S>& k) {
  CosetFunction<S> out(t.coarse);
  const Group& g = t.coarse->group();
  std::set<Element, ElementLess> cosets;
  for (const auto& [u, c] : k.terms()) {
    (void)c;
    cosets.insert(t.coarse->coset_rep(u));
  }
  for (const auto& u : cosets) {
    S total{};
    for (const auto& h : t.transversal.reps) total += k.value(g.multiply(h, u));
    if (!scalar_traits<S>::is_zero(total)) out.add(u, total);
  }
  return out;
}

/// How a homomorphism carries one pair to another.
enum class TransferKind { finite_kernel_pullback, surjection_pushforward };

/**
 * A homomorphism together with the pairs it moves functions between.
 * Pullback: H1 is the preimage of H2 and the kernel is finite, so the
 * induced maps on cosets and double cosets are injective. Pushforward:
 * the map is onto (witnessed by a section), the kernel sits inside H1,
 * and H2 is the image of H1, so the induced maps are bijections.
 */
struct HomTransfer {
  HomPtr phi;
  PairPtr domain_pair;    // (G1, H1)
  PairPtr codomain_pair;  // (G2, H2)
  TransferKind kind = TransferKind::finite_kernel_pullback;
  std::vector<Element> kernel_elements;  // resolved kernel, pullback only
};

/**
 * Pullback setup: H1 = phi^{-1}(H2). The kernel is enumerated and must
 * be finite within `kernel_cap` (std::domain_error otherwise, e.g. for
 * the reduction of the integers mod 6). When a section is available,
 * the generators of H2 are checked to lie in the image.
 */
HomTransfer make_finite_kernel_transfer(HomPtr phi, SubgroupPtr h2,
                                        std::size_t kernel_cap = 10000,
                                        PairOptions opts = {});

/**
 * Pushforward setup: H2 = phi(H1). Requires a section witnessing
 * surjectivity and kernel generators contained in H1; either failure
 * throws std::invalid_argument.
 */
HomTransfer make_surjection_transfer(HomPtr phi, SubgroupPtr h1,
                                     PairOptions opts = {});

/// Moves f across: (out)(H2 phi(x) H2) = f(H1 x H1), zero off the image.
template <typename S>
HeckeFunction<S> transport_to_codomain(const HomTransfer& t,
                                       const HeckeFunction<S>& f) {
  HeckeFunction<S> out(t.codomain_pair);
  std::set<Element, ElementLess> images;
  for (const auto& [rep, c] : f.terms()) {
    Element w = t.codomain_pair->double_coset_rep(t.phi->apply(rep));
    if (!images.insert(w).second)
      throw std::logic_error("transport_to_codomain: support classes collide");
    out.add(w, c);
  }
  return out;
}

/// Inverse transport along the section: (out)(H1 s(y) H1) = f(H2 y H2).
template <typename S>
HeckeFunction<S> transport_to_domain(const HomTransfer& t,
                                     const HeckeFunction<S>& f) {
  HeckeFunction<S> out(t.domain_pair);
  std::set<Element, ElementLess> images;
  for (const auto& [rep, c] : f.terms()) {
    Element w = t.domain_pair->double_coset_rep(t.phi->lift(rep));
    if (!images.insert(w).second)
      throw std::logic_error("transport_to_domain: support classes collide");
    out.add(w, c);
  }
  return out;
}

/// Coset-level transport: (out)(H2 phi(x)) = k(H1 x).
template <typename S>
CosetFunction<S> transport_vector_to_codomain(const HomTransfer& t,
                                              const CosetFunction<S>& k) {
  CosetFunction<S> out(t.codomain_pair);
  std::set<Element, ElementLess> images;
  for (const auto& [u, c] : k.terms()) {
    Element v = t.codomain_pair->coset_rep(t.phi->apply(u));
    if (!images.insert(v).second)
      throw std::logic_error("transport_vector_to_codomain: cosets collide");
    out.add(v, c);
  }
  return out;
}

/// Coset-level inverse transport along the section.
template <typename S>
CosetFunction<S> transport_vector_to_domain(const HomTransfer& t,
                                            const CosetFunction<S>& k) {
  CosetFunction<S> out(t.domain_pair);
  std::set<Element, ElementLess> images;
  for (const auto& [u, c] : k.terms()) {
    Element v = t.domain_pair->coset_rep(t.phi->lift(u));
    if (!images.insert(v).second)
      throw std::logic_error("transport_vector_to_domain: cosets collide");
    out.add(v, c);
  }
  return out;
}

/// Weight on the domain from a weight on the codomain: len after phi.
LengthFunction pullback_length(const HomTransfer& t, LengthFunction codomain_len);

/// Weight on the codomain from a weight on the domain: len after the section.
LengthFunction pushforward_length(const HomTransfer& t, LengthFunction domain_len);

/**
 * Outcome of a strong commensurability check on two subgroups: both
 * indices over the intersection are certified finite, or the coset
 * walk ran out of budget and nothing is claimed.
 */
struct CommensurabilityVerdict {
  bool decided = false;
  std::size_t index_in_first = 0;
  std::size_t index_in_second = 0;
  SubgroupPtr intersection;
};

CommensurabilityVerdict strongly_commensurable(GroupPtr g, SubgroupPtr a,
                                               SubgroupPtr b,
                                               std::size_t budget = 200000);

/// Checks H against its conjugate by x, the membership test for the
/// commensurator of H in the parent group.
CommensurabilityVerdict in_commensurator(GroupPtr g, SubgroupPtr h,
                                         const Element& x,
                                         std::size_t budget = 200000);

}  // namespace hecke
