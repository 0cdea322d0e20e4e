#include "hecke/structure.hpp"

#include <deque>
#include <set>
#include <stdexcept>

namespace hecke {
namespace {

/// All elements generated by `gens`, by closure under right steps.
std::vector<Element> element_closure(const Group& g, const std::vector<Element>& gens,
                                     std::size_t cap, const char* who) {
  std::set<Element, ElementLess> seen{g.identity()};
  std::deque<Element> queue{g.identity()};
  std::vector<Element> steps;
  for (const auto& s : gens) {
    steps.push_back(g.canonicalize(s));
    steps.push_back(g.canonicalize(g.inverse(s)));
  }
  while (!queue.empty()) {
    Element cur = queue.front();
    queue.pop_front();
    for (const auto& s : steps) {
      Element next = g.canonicalize(g.multiply(cur, s));
      if (seen.count(next)) continue;
      if (seen.size() >= cap)
        throw std::domain_error(std::string(who) +
                                ": element closure exceeded the cap");
      seen.insert(next);
      queue.push_back(next);
    }
  }
  return {seen.begin(), seen.end()};
}

}  // namespace

std::optional<std::vector<Element>> conjugation_closed_set(
    const Group& g, std::vector<Element> seed, std::size_t budget) {
  std::set<Element, ElementLess> set;
  std::deque<Element> queue;
  for (auto& x : seed) {
    Element c = g.canonicalize(x);
    if (set.insert(c).second) queue.push_back(std::move(c));
  }
  std::vector<Element> steps;
  for (const auto& s : g.generators()) {
    steps.push_back(s);
    steps.push_back(g.inverse(s));
  }
  while (!queue.empty()) {
    Element x = queue.front();
    queue.pop_front();
    for (const auto& s : steps) {
      Element y = g.canonicalize(g.multiply(g.multiply(s, x), g.inverse(s)));
      if (set.count(y)) continue;
      if (set.size() >= budget) return std::nullopt;
      set.insert(y);
      queue.push_back(std::move(y));
    }
  }
  return std::vector<Element>(set.begin(), set.end());
}

FinitenessVerdict nearly_normal_check(GroupPtr g, SubgroupPtr h,
                                      std::size_t budget) {
  if (!h->has_generators())
    throw std::invalid_argument("nearly_normal_check: subgroup needs generators");
  auto closed = conjugation_closed_set(*g, h->generators(), budget);
  if (!closed) return {};
  // The stabilized set generates the normal closure, so its right steps
  // reach every coset of H inside it.
  std::vector<Element> steps;
  for (const auto& w : *closed) {
    steps.push_back(w);
    steps.push_back(g->inverse(w));
  }
  std::vector<Element> reps{g->identity()};
  std::deque<Element> queue{g->identity()};
  auto known = [&](const Element& x) {
    for (const auto& r : reps)
      if (h->same_right_coset(r, x)) return true;
    return false;
  };
  while (!queue.empty()) {
    Element cur = queue.front();
    queue.pop_front();
    for (const auto& s : steps) {
      Element next = g->canonicalize(g->multiply(cur, s));
      if (known(next)) continue;
      if (reps.size() >= budget) return {};
      reps.push_back(next);
      queue.push_back(next);
    }
  }
  return {true, reps.size()};
}

FinitenessVerdict fd_group_check(GroupPtr g, std::size_t budget) {
  const auto& gens = g->generators();
  std::vector<Element> comms;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    for (std::size_t j = i + 1; j < gens.size(); ++j) {
      Element xy = g->multiply(gens[i], gens[j]);
      Element yx = g->multiply(gens[j], gens[i]);
      Element c = g->canonicalize(g->multiply(xy, g->inverse(yx)));
      if (element_cmp(c, g->identity()) != 0) comms.push_back(std::move(c));
    }
  }
  auto closed = conjugation_closed_set(*g, std::move(comms), budget);
  if (!closed) return {};
  try {
    return {true, element_closure(*g, *closed, budget, "fd_group_check").size()};
  } catch (const std::domain_error&) {
    return {};
  }
}

FreeProductSetup preimage_pair_builder(
    GroupPtr a, GroupPtr b,
    const std::function<SubgroupPtr(GroupPtr)>& k_builder, PairOptions opts,
    std::size_t cap) {
  FreeProductSetup s;
  s.free_product = make_free_product({a, b});
  s.direct_product = make_direct_product({a, b});
  GroupPtr fp = s.free_product;
  GroupPtr dp = s.direct_product;
  const std::size_t na = a->generators().size();

  auto embed = [fp](const GroupPtr& factor, const Element& x,
                    std::size_t offset) {
    auto word = factor->decompose(factor->canonicalize(x));
    if (!word)
      throw std::domain_error(
          "preimage_pair_builder: factor cannot decompose an element");
    Element out = fp->identity();
    for (const auto& [idx, exp] : *word)
      out = fp->multiply(out, group_pow(*fp, fp->generators().at(offset + idx), exp));
    return out;
  };
  Homomorphism::Config pc;
  pc.domain = fp;
  pc.codomain = dp;
  pc.name = "factor-projection";
  pc.generator_images = dp->generators();
  pc.section = [embed, a, b, dp, na, fp](const Element& y) {
    Element yc = dp->canonicalize(y);
    const auto& tup = std::get<Element::Tuple>(yc.payload());
    return fp->multiply(embed(a, tup.at(0), 0), embed(b, tup.at(1), na));
  };
  // Cross-factor commutators generate the kernel.
  std::vector<Element> ae = element_closure(*a, a->generators(), cap,
                                            "preimage_pair_builder");
  std::vector<Element> be = element_closure(*b, b->generators(), cap,
                                            "preimage_pair_builder");
  for (const auto& u : ae) {
    if (element_cmp(u, a->identity()) == 0) continue;
    Element eu = embed(a, u, 0);
    for (const auto& v : be) {
      if (element_cmp(v, b->identity()) == 0) continue;
      Element ev = embed(b, v, na);
      Element comm = fp->multiply(fp->multiply(eu, ev),
                                  fp->inverse(fp->multiply(ev, eu)));
      pc.kernel_generators.push_back(fp->canonicalize(comm));
    }
  }
  s.projection = make_homomorphism(std::move(pc));
  s.commutator_kernel = kernel_subgroup(s.projection, "commutators");

  SubgroupPtr k = k_builder(dp);
  if (!k || !k->has_generators())
    throw std::invalid_argument(
        "preimage_pair_builder: K needs generators inside the direct product");
  auto kmembers = std::make_shared<std::vector<Element>>(
      element_closure(*dp, k->generators(), cap, "preimage_pair_builder"));
  HomPtr pi = s.projection;

  Subgroup::Config scfg;
  scfg.parent = fp;
  scfg.name = "preimage(" + k->name() + ")";
  scfg.member = [pi, k](const Element& x) { return k->contains(pi->apply(x)); };
  scfg.coset_key = [pi, dp, kmembers](const Element& x) {
    Element y = pi->apply(x);
    Element best = dp->canonicalize(dp->multiply((*kmembers)[0], y));
    for (std::size_t i = 1; i < kmembers->size(); ++i) {
      Element cand = dp->canonicalize(dp->multiply((*kmembers)[i], y));
      if (element_cmp(cand, best) < 0) best = std::move(cand);
    }
    return best;
  };
  scfg.generators = s.projection->kernel_generators();
  for (const auto& kg : k->generators())
    scfg.generators.push_back(fp->canonicalize(pi->lift(kg)));
  s.preimage = make_subgroup(std::move(scfg));
  s.pair = make_pair_context(fp, s.preimage, opts);
  return s;
}

}  // namespace hecke
