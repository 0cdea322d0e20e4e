#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "hecke/group.hpp"

namespace hecke {

class Subgroup;
using SubgroupPtr = std::shared_ptr<const Subgroup>;

/**
 * A subgroup H of a parent group, given by a membership predicate.
 *
 * Two optional capabilities sharpen what the coset machinery can do:
 *  - generators: a finite generating set for H, needed wherever cosets of a
 *    further subgroup inside H are walked;
 *  - coset_key: a canonical label for the right coset Hx, so that
 *    key(x) == key(y) exactly when Hx == Hy.  Without it, coset identity
 *    falls back to membership tests against registered representatives.
 */
class Subgroup {
public:
  struct Config {
    GroupPtr parent;
    std::string name;
    std::function<bool(const Element&)> member;
    std::vector<Element> generators;
    std::function<Element(const Element&)> coset_key;
    bool known_finite = false;
  };

  explicit Subgroup(Config cfg);

  const Group& parent() const { return *cfg_.parent; }
  const GroupPtr& parent_ptr() const { return cfg_.parent; }
  const std::string& name() const { return cfg_.name; }
  bool contains(const Element& x) const { return cfg_.member(x); }
  const std::vector<Element>& generators() const { return cfg_.generators; }
  bool has_generators() const { return !cfg_.generators.empty(); }
  bool has_coset_key() const { return static_cast<bool>(cfg_.coset_key); }
  bool known_finite() const { return cfg_.known_finite; }

  /// Canonical label of the right coset Hx; requires has_coset_key().
  Element coset_key(const Element& x) const;

  /// Same right coset test: Hx == Hy, via key comparison or membership.
  bool same_right_coset(const Element& x, const Element& y) const;

  /// Samples subgroup closure and key consistency; throws on violation.
  void self_check(int ntrials = 25, std::uint64_t seed = 0xc0de) const;

private:
  Config cfg_;
};

SubgroupPtr make_subgroup(Subgroup::Config cfg);

/// The trivial subgroup {e}.
SubgroupPtr trivial_subgroup(GroupPtr parent);

/// The whole group as a subgroup of itself.
SubgroupPtr whole_group_subgroup(GroupPtr parent);

/// Subgroup of an abelian parent spanned by the given coordinate vectors.
SubgroupPtr lattice_subgroup(GroupPtr parent, const std::vector<std::vector<Int>>& spans,
                             std::string name = "");

/// Integer translations {(n, 1)} inside an affine rational group.
SubgroupPtr integer_translation_subgroup(GroupPtr parent);

/// Finite subgroup given by closing the generating set; throws past the cap.
SubgroupPtr generated_subgroup(GroupPtr parent, std::vector<Element> gens,
                               std::string name = "", std::size_t cap = 20000);

/// Cyclic subgroup of one element; membership is decided exactly for
/// abelian parents, free products, and elements of finite order.
SubgroupPtr cyclic_subgroup(GroupPtr parent, const Element& g, std::string name = "");

/// The conjugate gHg^-1 inside the same parent.
SubgroupPtr conjugate_subgroup(const SubgroupPtr& h, const Element& g);

/// Intersection of two subgroups of the same parent.
SubgroupPtr intersect_subgroups(const SubgroupPtr& a, const SubgroupPtr& b,
                                std::string name = "");

/// Componentwise product subgroup of a direct product parent.
SubgroupPtr product_subgroup(GroupPtr parent, const std::vector<SubgroupPtr>& factors,
                             std::string name = "");

}  // namespace hecke
