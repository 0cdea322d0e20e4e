#pragma once

#include <functional>
#include <memory>

#include "hecke/subgroup.hpp"

namespace hecke {

/**
 * Group homomorphism between two realized groups. Two construction
 * styles: a list of generator images (evaluation goes through the
 * domain's decompose(), and the domain relators are verified to map to
 * the identity at construction), or a direct evaluator (verified only by
 * sampled checks). A section, when supplied, is a right inverse defined
 * on the image; it enables lifting and image subgroups.
 */
class Homomorphism {
public:
  struct Config {
    GroupPtr domain;
    GroupPtr codomain;
    std::string name;
    /// Images of domain generators, aligned with domain->generators().
    std::vector<Element> generator_images;
    /// Direct evaluator; used when generator_images is empty.
    std::function<Element(const Element&)> evaluate;
    /// Optional right inverse defined on the image.
    std::function<Element(const Element&)> section;
    /// Optional generating set of the kernel.
    std::vector<Element> kernel_generators;
  };

  explicit Homomorphism(Config cfg);

  const Group& domain() const { return *cfg_.domain; }
  const Group& codomain() const { return *cfg_.codomain; }
  const GroupPtr& domain_ptr() const { return cfg_.domain; }
  const GroupPtr& codomain_ptr() const { return cfg_.codomain; }
  const std::string& name() const { return cfg_.name; }
  const std::vector<Element>& kernel_generators() const {
    return cfg_.kernel_generators;
  }

  /// Image of x, canonical in the codomain. Throws std::domain_error when
  /// a generator-image map cannot decompose x.
  Element apply(const Element& x) const;

  bool has_section() const { return static_cast<bool>(cfg_.section); }

  /// Preimage of y via the section; throws std::logic_error without one.
  Element lift(const Element& y) const;

  /**
   * Sampled structural checks: multiplicativity on the domain samples,
   * kernel generators map to the identity, and the section is a right
   * inverse on the codomain samples. Throws std::logic_error.
   */
  void self_check(const std::vector<Element>& domain_samples,
                  const std::vector<Element>& codomain_samples = {}) const;

private:
  Config cfg_;
};

using HomPtr = std::shared_ptr<const Homomorphism>;

HomPtr make_homomorphism(Homomorphism::Config cfg);

/// Kernel as a subgroup of the domain; right cosets are keyed by the image.
SubgroupPtr kernel_subgroup(HomPtr phi, std::string name = "");

/// Preimage of a subgroup of the codomain.
SubgroupPtr preimage_subgroup(HomPtr phi, SubgroupPtr target,
                              std::string name = "");

/**
 * Image of a subgroup of the domain, as a subgroup of the codomain.
 * Requires a section and a kernel contained in `source` (checked on the
 * kernel generators); membership tests pull back through the section.
 */
SubgroupPtr image_subgroup(HomPtr phi, SubgroupPtr source,
                           std::string name = "");

/**
 * All elements of a finite kernel, by closing the kernel generators
 * under multiplication. Throws std::domain_error past the cap.
 */
std::vector<Element> finite_kernel_elements(const Homomorphism& phi,
                                            std::size_t cap = 10000);

}  // namespace hecke
