#include "hecke/homomorphism.hpp"

#include <set>
#include <stdexcept>

namespace hecke {

Homomorphism::Homomorphism(Config cfg) : cfg_(std::move(cfg)) {
  if (!cfg_.domain || !cfg_.codomain)
    throw std::invalid_argument("homomorphism: missing domain or codomain");
  if (cfg_.generator_images.empty() && !cfg_.evaluate)
    throw std::invalid_argument(
        "homomorphism: need generator images or an evaluator");
  if (!cfg_.generator_images.empty()) {
    if (cfg_.generator_images.size() != cfg_.domain->generators().size())
      throw std::invalid_argument(
          "homomorphism: one image per domain generator required");
    for (auto& img : cfg_.generator_images)
      img = cfg_.codomain->canonicalize(img);
    // The images define a homomorphism only if the domain relators die.
    for (const auto& rel : cfg_.domain->relators()) {
      Element acc = cfg_.codomain->identity();
      for (const auto& [idx, exp] : rel)
        acc = cfg_.codomain->multiply(
            acc, group_pow(*cfg_.codomain, cfg_.generator_images.at(idx), exp));
      if (element_cmp(cfg_.codomain->canonicalize(acc),
                      cfg_.codomain->identity()) != 0)
        throw std::domain_error("homomorphism '" + cfg_.name +
                                "': a domain relator has a nontrivial image");
    }
  }
  for (const auto& k : cfg_.kernel_generators) {
    if (element_cmp(apply(k), cfg_.codomain->identity()) != 0)
      throw std::domain_error("homomorphism '" + cfg_.name +
                              "': kernel generator not in the kernel");
  }
}

Element Homomorphism::apply(const Element& x) const {
  if (!cfg_.generator_images.empty()) {
    auto word = cfg_.domain->decompose(cfg_.domain->canonicalize(x));
    if (!word)
      throw std::domain_error("homomorphism '" + cfg_.name +
                              "': domain cannot decompose the element");
    Element acc = cfg_.codomain->identity();
    for (const auto& [idx, exp] : *word)
      acc = cfg_.codomain->multiply(
          acc, group_pow(*cfg_.codomain, cfg_.generator_images.at(idx), exp));
    return cfg_.codomain->canonicalize(acc);
  }
  return cfg_.codomain->canonicalize(cfg_.evaluate(x));
}

Element Homomorphism::lift(const Element& y) const {
  if (!cfg_.section)
    throw std::logic_error("homomorphism '" + cfg_.name + "': no section");
  return cfg_.domain->canonicalize(cfg_.section(y));
}

void Homomorphism::self_check(
    const std::vector<Element>& domain_samples,
    const std::vector<Element>& codomain_samples) const {
  const Group& dom = *cfg_.domain;
  const Group& cod = *cfg_.codomain;
  if (element_cmp(apply(dom.identity()), cod.identity()) != 0)
    throw std::logic_error("homomorphism '" + cfg_.name +
                           "': identity is not preserved");
  for (const auto& a : domain_samples) {
    for (const auto& b : domain_samples) {
      Element lhs = apply(dom.multiply(a, b));
      Element rhs = cod.canonicalize(cod.multiply(apply(a), apply(b)));
      if (element_cmp(lhs, rhs) != 0)
        throw std::logic_error("homomorphism '" + cfg_.name +
                               "': image of a product mismatches");
    }
  }
  if (cfg_.section) {
    for (const auto& y : codomain_samples) {
      Element yc = cod.canonicalize(y);
      if (element_cmp(apply(lift(yc)), yc) != 0)
        throw std::logic_error("homomorphism '" + cfg_.name +
                               "': section is not a right inverse");
    }
  }
}

HomPtr make_homomorphism(Homomorphism::Config cfg) {
  return std::make_shared<Homomorphism>(std::move(cfg));
}

SubgroupPtr kernel_subgroup(HomPtr phi, std::string name) {
  if (name.empty()) name = "ker(" + phi->name() + ")";
  Subgroup::Config cfg;
  cfg.parent = phi->domain_ptr();
  cfg.name = std::move(name);
  cfg.generators = phi->kernel_generators();
  Element one = phi->codomain().identity();
  cfg.member = [phi, one](const Element& x) {
    return element_cmp(phi->apply(x), one) == 0;
  };
  // Right cosets of the kernel correspond one-to-one to image elements.
  cfg.coset_key = [phi](const Element& x) { return phi->apply(x); };
  return make_subgroup(std::move(cfg));
}

SubgroupPtr preimage_subgroup(HomPtr phi, SubgroupPtr target,
                              std::string name) {
  if (name.empty()) name = "preimage(" + target->name() + ")";
  Subgroup::Config cfg;
  cfg.parent = phi->domain_ptr();
  cfg.name = std::move(name);
  cfg.member = [phi, target](const Element& x) {
    return target->contains(phi->apply(x));
  };
  if (target->has_coset_key())
    cfg.coset_key = [phi, target](const Element& x) {
      return target->coset_key(phi->apply(x));
    };
  return make_subgroup(std::move(cfg));
}

SubgroupPtr image_subgroup(HomPtr phi, SubgroupPtr source, std::string name) {
  if (!phi->has_section())
    throw std::invalid_argument(
        "image subgroup needs a section on the homomorphism");
  for (const auto& k : phi->kernel_generators())
    if (!source->contains(k))
      throw std::invalid_argument(
          "image subgroup: kernel is not contained in the source subgroup");
  if (name.empty()) name = "image(" + source->name() + ")";
  Subgroup::Config cfg;
  cfg.parent = phi->codomain_ptr();
  cfg.name = std::move(name);
  // With the kernel inside the source, membership and right cosets of the
  // image are detected through any preferred preimage.
  cfg.member = [phi, source](const Element& y) {
    return source->contains(phi->lift(y));
  };
  if (source->has_coset_key())
    cfg.coset_key = [phi, source](const Element& y) {
      return source->coset_key(phi->lift(y));
    };
  for (const auto& s : source->generators())
    cfg.generators.push_back(phi->apply(s));
  return make_subgroup(std::move(cfg));
}

std::vector<Element> finite_kernel_elements(const Homomorphism& phi,
                                            std::size_t cap) {
  const Group& g = phi.domain();
  std::set<Element, ElementLess> seen;
  std::vector<Element> frontier{g.identity()};
  seen.insert(g.identity());
  while (!frontier.empty()) {
    std::vector<Element> next;
    for (const auto& x : frontier) {
      for (const auto& k : phi.kernel_generators()) {
        for (const Element& step :
             {g.canonicalize(g.multiply(x, k)),
              g.canonicalize(g.multiply(x, g.inverse(k)))}) {
          if (seen.count(step)) continue;
          if (seen.size() >= cap)
            throw std::domain_error(
                "kernel closure exceeded the cap; kernel may be infinite");
          seen.insert(step);
          next.push_back(step);
        }
      }
    }
    frontier = std::move(next);
  }
  return {seen.begin(), seen.end()};
}

}  // namespace hecke
