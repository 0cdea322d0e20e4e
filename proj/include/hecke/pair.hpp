#pragma once

#include <map>
#include <set>
#include <vector>

#include "hecke/subgroup.hpp"

namespace hecke {

/// A cardinality from a budgeted enumeration: exact when the walk closed,
/// otherwise a lower bound.
struct Count {
  Int value{0};
  bool exact = false;
};

/// One double coset HgH: its registry representative, the right cosets it
/// contains, and the independently computed left coset count.
struct DoubleCosetRecord {
  Element rep;
  std::vector<Element> right_reps;
  std::set<Element, ElementLess> right_set;  // same reps, for membership tests
  bool right_closed = false;
  Count left_count;

  bool holds_coset(const Element& right_rep) const { return right_set.count(right_rep) > 0; }
};

struct PairOptions {
  /// Per-walk node budget for coset searches.
  std::size_t coset_budget = 200000;
};

/**
 * A group together with a subgroup, plus the memoized coset machinery the
 * convolution algebra sits on.
 *
 * Representatives are first-seen canonical elements: the first element asked
 * about in a coset becomes that coset's representative for the lifetime of
 * the pair. Double coset records are frozen at first query. Results are
 * deterministic for a fixed sequence of queries.
 */
class Pair {
public:
  Pair(GroupPtr group, SubgroupPtr sub, PairOptions opts = {});

  const Group& group() const { return *group_; }
  const GroupPtr& group_ptr() const { return group_; }
  const Subgroup& sub() const { return *sub_; }
  const SubgroupPtr& sub_ptr() const { return sub_; }
  const PairOptions& options() const { return opts_; }

  /// Registry representative of the right coset Hx.
  Element coset_rep(const Element& x) const;

  /// Registry representative of the left coset xH (tracked separately).
  Element left_coset_rep(const Element& x) const;

  /// True when Hx == Hy.
  bool same_right_coset(const Element& x, const Element& y) const;

  /// The double coset record for HgH, computed and frozen on first query.
  /// Throws std::domain_error if the right-coset walk exceeds the budget,
  /// leaving nothing frozen.
  const DoubleCosetRecord& double_coset(const Element& g) const;

  /// Representative of HgH (the record's rep).
  Element double_coset_rep(const Element& g) const;

  /// Number of left cosets in HgH; exact=false means budget ran out.
  Count left_coset_count(const Element& g) const;

  /// Number of right cosets in HgH.
  Count right_coset_count(const Element& g) const;

  /// Right-coset representatives reachable from H within the given word
  /// radius over the group generators. Sets closed=true when the walk
  /// saturated (the coset space is finite and fully listed).
  std::vector<Element> right_cosets_in_ball(int radius, bool* closed = nullptr,
                                            std::size_t cap = 0) const;

  /// Checks finiteness of L and R over all double cosets met in a word ball.
  struct NormalityReport {
    bool all_finite = true;
    std::size_t double_cosets_checked = 0;
    std::vector<Element> failures;
  };
  NormalityReport almost_normal_probe(int radius, std::size_t max_failures = 3) const;

private:
  Element registry_lookup(std::map<Element, Element, ElementLess>& by_key,
                          std::vector<Element>& scan_list, const Element& x,
                          bool left) const;
  Count left_coset_count_uncached(const DoubleCosetRecord& rec) const;

  GroupPtr group_;
  SubgroupPtr sub_;
  PairOptions opts_;

  mutable std::map<Element, Element, ElementLess> right_by_key_;
  mutable std::vector<Element> right_scan_;
  mutable std::map<Element, Element, ElementLess> left_by_key_;
  mutable std::vector<Element> left_scan_;
  mutable std::map<Element, DoubleCosetRecord, ElementLess> dc_by_right_rep_;
};

using PairPtr = std::shared_ptr<Pair>;

PairPtr make_pair_context(GroupPtr group, SubgroupPtr sub, PairOptions opts = {});

/// Right-coset representatives of k inside h (index table). Requires h to
/// carry generators; k must be contained in h (sampled precondition).
struct IndexTable {
  std::vector<Element> reps;  // reps[0] is the identity
  bool closed = false;
};
IndexTable subgroup_index_table(const Group& g, const Subgroup& h, const Subgroup& k,
                                std::size_t budget = 200000);

}  // namespace hecke
