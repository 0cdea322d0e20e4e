#include "hecke/transfer.hpp"

#include <stdexcept>

namespace hecke {

TransferContext make_transfer(PairPtr coarse, PairPtr fine, std::size_t budget) {
  if (!coarse || !fine)
    throw std::invalid_argument("make_transfer: missing pair");
  if (coarse->group_ptr().get() != fine->group_ptr().get())
    throw std::invalid_argument("make_transfer: pairs must share one group");
  IndexTable table =
      subgroup_index_table(coarse->group(), coarse->sub(), fine->sub(), budget);
  if (!table.closed)
    throw std::domain_error(
        "make_transfer: subgroup index not resolved within the budget");
  return {std::move(coarse), std::move(fine), std::move(table)};
}

HomTransfer make_finite_kernel_transfer(HomPtr phi, SubgroupPtr h2,
                                        std::size_t kernel_cap,
                                        PairOptions opts) {
  if (!phi || !h2)
    throw std::invalid_argument("finite kernel transfer: missing data");
  if (h2->parent_ptr().get() != phi->codomain_ptr().get())
    throw std::invalid_argument(
        "finite kernel transfer: subgroup does not live in the codomain");
  HomTransfer t;
  t.phi = phi;
  t.kind = TransferKind::finite_kernel_pullback;
  t.kernel_elements = finite_kernel_elements(*phi, kernel_cap);
  if (phi->has_section()) {
    // The construction assumes H2 lies in the image; a section lets us
    // spot-check that on the generators.
    for (const auto& s : h2->generators()) {
      if (element_cmp(phi->apply(phi->lift(s)), phi->codomain().canonicalize(s)) != 0)
        throw std::invalid_argument(
            "finite kernel transfer: a subgroup generator escapes the image");
    }
  }
  SubgroupPtr h1 = preimage_subgroup(phi, h2);
  t.domain_pair = make_pair_context(phi->domain_ptr(), std::move(h1), opts);
  t.codomain_pair = make_pair_context(phi->codomain_ptr(), std::move(h2), opts);
  return t;
}

HomTransfer make_surjection_transfer(HomPtr phi, SubgroupPtr h1,
                                     PairOptions opts) {
  if (!phi || !h1)
    throw std::invalid_argument("surjection transfer: missing data");
  if (h1->parent_ptr().get() != phi->domain_ptr().get())
    throw std::invalid_argument(
        "surjection transfer: subgroup does not live in the domain");
  if (!phi->has_section())
    throw std::invalid_argument(
        "surjection transfer: a section must witness surjectivity");
  for (const auto& k : phi->kernel_generators())
    if (!h1->contains(k))
      throw std::invalid_argument(
          "surjection transfer: kernel is not contained in the subgroup");
  HomTransfer t;
  t.phi = phi;
  t.kind = TransferKind::surjection_pushforward;
  SubgroupPtr h2 = image_subgroup(phi, h1);
  t.domain_pair = make_pair_context(phi->domain_ptr(), std::move(h1), opts);
  t.codomain_pair = make_pair_context(phi->codomain_ptr(), std::move(h2), opts);
  return t;
}

LengthFunction pullback_length(const HomTransfer& t, LengthFunction codomain_len) {
  HomPtr phi = t.phi;
  auto len = composed_length(
      "pullback(" + codomain_len.name + ", " + phi->name() + ")",
      std::move(codomain_len), [phi](const Element& x) { return phi->apply(x); },
      LengthKind::pullback);
  len.declared_vanishing.push_back(t.domain_pair->sub_ptr());
  return len;
}

LengthFunction pushforward_length(const HomTransfer& t, LengthFunction domain_len) {
  HomPtr phi = t.phi;
  if (!phi->has_section())
    throw std::invalid_argument("pushforward_length: the homomorphism has no section");
  auto len = composed_length(
      "pushforward(" + domain_len.name + ", " + phi->name() + ")",
      std::move(domain_len), [phi](const Element& y) { return phi->lift(y); },
      LengthKind::pullback);
  len.declared_vanishing.push_back(t.codomain_pair->sub_ptr());
  return len;
}

CommensurabilityVerdict strongly_commensurable(GroupPtr g, SubgroupPtr a,
                                               SubgroupPtr b,
                                               std::size_t budget) {
  if (!g || !a || !b)
    throw std::invalid_argument("strongly_commensurable: missing data");
  CommensurabilityVerdict v;
  v.intersection = intersect_subgroups(a, b);
  IndexTable in_a = subgroup_index_table(*g, *a, *v.intersection, budget);
  if (!in_a.closed) return v;
  IndexTable in_b = subgroup_index_table(*g, *b, *v.intersection, budget);
  if (!in_b.closed) return v;
  v.decided = true;
  v.index_in_first = in_a.reps.size();
  v.index_in_second = in_b.reps.size();
  return v;
}

CommensurabilityVerdict in_commensurator(GroupPtr g, SubgroupPtr h,
                                         const Element& x,
                                         std::size_t budget) {
  return strongly_commensurable(g, h, conjugate_subgroup(h, x), budget);
}

}  // namespace hecke
