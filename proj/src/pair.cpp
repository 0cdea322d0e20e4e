#include "hecke/pair.hpp"

#include <deque>
#include <optional>
#include <set>

namespace hecke {

Pair::Pair(GroupPtr group, SubgroupPtr sub, PairOptions opts)
    : group_(std::move(group)), sub_(std::move(sub)), opts_(opts) {
  if (!group_ || !sub_) throw std::invalid_argument("pair: group and subgroup required");
  if (sub_->parent_ptr().get() != group_.get())
    throw std::invalid_argument("pair: subgroup belongs to a different group");
}

Element Pair::registry_lookup(std::map<Element, Element, ElementLess>& by_key,
                              std::vector<Element>& scan_list, const Element& x,
                              bool left) const {
  Element c = group_->canonicalize(x);
  if (sub_->has_coset_key()) {
    // Left cosets are keyed through inverses: xH == yH iff Hx^-1 == Hy^-1.
    Element key = left ? sub_->coset_key(group_->inverse(c)) : sub_->coset_key(c);
    auto [it, inserted] = by_key.try_emplace(std::move(key), c);
    return it->second;
  }
  for (const auto& rep : scan_list) {
    Element d = left ? group_->multiply(group_->inverse(rep), c)
                     : group_->multiply(c, group_->inverse(rep));
    if (sub_->contains(d)) return rep;
  }
  scan_list.push_back(c);
  return c;
}

Element Pair::coset_rep(const Element& x) const {
  return registry_lookup(right_by_key_, right_scan_, x, false);
}

Element Pair::left_coset_rep(const Element& x) const {
  return registry_lookup(left_by_key_, left_scan_, x, true);
}

bool Pair::same_right_coset(const Element& x, const Element& y) const {
  return sub_->same_right_coset(group_->canonicalize(x), group_->canonicalize(y));
}

const DoubleCosetRecord& Pair::double_coset(const Element& g) const {
  Element start = coset_rep(g);
  if (auto it = dc_by_right_rep_.find(start); it != dc_by_right_rep_.end()) return it->second;

  // Orbit of Hg under right multiplication by subgroup generators.
  std::vector<Element> step;
  for (const auto& h : sub_->generators()) {
    step.push_back(h);
    step.push_back(group_->inverse(h));
  }
  std::map<Element, std::size_t, ElementLess> seen;
  std::vector<Element> reps;
  std::deque<Element> queue;
  seen.emplace(start, 0);
  reps.push_back(start);
  queue.push_back(start);
  bool closed = true;
  while (!queue.empty()) {
    Element cur = queue.front();
    queue.pop_front();
    for (const auto& s : step) {
      Element next = coset_rep(group_->multiply(cur, s));
      if (seen.count(next)) continue;
      if (reps.size() >= opts_.coset_budget) {
        closed = false;
        queue.clear();
        break;
      }
      seen.emplace(next, reps.size());
      reps.push_back(next);
      queue.push_back(next);
    }
  }
  if (!closed)
    throw std::domain_error("pair: double coset walk exceeded the coset budget");

  DoubleCosetRecord rec;
  rec.rep = start;
  rec.right_reps = reps;
  rec.right_set.insert(reps.begin(), reps.end());
  rec.right_closed = true;
  rec.left_count = left_coset_count_uncached(rec);

  // Every right coset in the double coset maps to the same frozen record.
  auto [it, ok] = dc_by_right_rep_.emplace(start, std::move(rec));
  for (std::size_t i = 1; i < it->second.right_reps.size(); ++i)
    dc_by_right_rep_.emplace(it->second.right_reps[i], it->second);
  (void)ok;
  return it->second;
}

Count Pair::left_coset_count_uncached(const DoubleCosetRecord& rec) const {
  // Orbit of gH under left multiplication by subgroup generators, counted
  // with the separate left-coset registry.
  std::vector<Element> step;
  for (const auto& h : sub_->generators()) {
    step.push_back(h);
    step.push_back(group_->inverse(h));
  }
  std::set<Element, ElementLess> seen;
  std::deque<Element> queue;
  Element start = left_coset_rep(rec.rep);
  seen.insert(start);
  queue.push_back(start);
  bool closed = true;
  while (!queue.empty()) {
    Element cur = queue.front();
    queue.pop_front();
    for (const auto& s : step) {
      Element next = left_coset_rep(group_->multiply(s, cur));
      if (seen.count(next)) continue;
      if (seen.size() >= opts_.coset_budget) {
        closed = false;
        queue.clear();
        break;
      }
      seen.insert(next);
      queue.push_back(next);
    }
  }
  return Count{Int(seen.size()), closed};
}

Element Pair::double_coset_rep(const Element& g) const { return double_coset(g).rep; }

Count Pair::left_coset_count(const Element& g) const { return double_coset(g).left_count; }

Count Pair::right_coset_count(const Element& g) const {
  const auto& rec = double_coset(g);
  return Count{Int(rec.right_reps.size()), rec.right_closed};
}

std::vector<Element> Pair::right_cosets_in_ball(int radius, bool* closed,
                                                std::size_t cap) const {
  if (cap == 0) cap = opts_.coset_budget;
  std::vector<Element> step;
  for (const auto& s : group_->generators()) {
    step.push_back(s);
    step.push_back(group_->inverse(s));
  }
  std::set<Element, ElementLess> seen;
  std::vector<Element> out;
  Element start = coset_rep(group_->identity());
  seen.insert(start);
  out.push_back(start);
  std::vector<Element> frontier{start};
  bool saturated = false;
  for (int r = 0; r < radius && !frontier.empty(); ++r) {
    std::vector<Element> next;
    for (const auto& cur : frontier)
      for (const auto& s : step) {
        Element rep = coset_rep(group_->multiply(cur, s));
        if (seen.count(rep)) continue;
        if (out.size() >= cap)
          throw std::domain_error("pair: coset ball exceeded the cap");
        seen.insert(rep);
        out.push_back(rep);
        next.push_back(rep);
      }
    frontier = std::move(next);
  }
  saturated = frontier.empty();
  if (closed) *closed = saturated;
  return out;
}

Pair::NormalityReport Pair::almost_normal_probe(int radius, std::size_t max_failures) const {
  NormalityReport report;
  std::vector<Element> step;
  for (const auto& s : group_->generators()) {
    step.push_back(s);
    step.push_back(group_->inverse(s));
  }
  std::set<Element, ElementLess> ball{group_->identity()};
  std::vector<Element> frontier{group_->identity()};
  for (int r = 0; r < radius; ++r) {
    std::vector<Element> next;
    for (const auto& cur : frontier)
      for (const auto& s : step) {
        Element g = group_->multiply(cur, s);
        if (ball.insert(g).second) next.push_back(g);
      }
    frontier = std::move(next);
  }
  std::set<Element, ElementLess> dc_seen;
  for (const auto& g : ball) {
    try {
      const auto& rec = double_coset(g);
      if (!dc_seen.insert(rec.rep).second) continue;
      ++report.double_cosets_checked;
      if (!rec.right_closed || !rec.left_count.exact) {
        report.all_finite = false;
        if (report.failures.size() < max_failures) report.failures.push_back(g);
      }
    } catch (const std::domain_error&) {
      ++report.double_cosets_checked;
      report.all_finite = false;
      if (report.failures.size() < max_failures) report.failures.push_back(g);
    }
    if (report.failures.size() >= max_failures && !report.all_finite) break;
  }
  return report;
}

PairPtr make_pair_context(GroupPtr group, SubgroupPtr sub, PairOptions opts) {
  return std::make_shared<Pair>(std::move(group), std::move(sub), opts);
}

IndexTable subgroup_index_table(const Group& g, const Subgroup& h, const Subgroup& k,
                                std::size_t budget) {
  if (!h.has_generators())
    throw std::invalid_argument("subgroup_index_table: outer subgroup needs generators");
  for (const auto& gen : k.generators())
    if (!h.contains(gen))
      throw std::invalid_argument("subgroup_index_table: inner subgroup is not contained");
  std::vector<Element> step;
  for (const auto& s : h.generators()) {
    step.push_back(s);
    step.push_back(g.inverse(s));
  }
  // Right cosets of k inside h: orbit of k*e under right multiplication.
  auto same = [&](const Element& x, const Element& y) { return k.same_right_coset(x, y); };
  auto find_rep = [&](std::vector<Element>& reps, const Element& x) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < reps.size(); ++i)
      if (same(reps[i], x)) return i;
    return std::nullopt;
  };
  IndexTable table;
  table.reps.push_back(g.identity());
  std::deque<Element> queue{g.identity()};
  table.closed = true;
  while (!queue.empty()) {
    Element cur = queue.front();
    queue.pop_front();
    for (const auto& s : step) {
      Element next = g.multiply(cur, s);
      if (find_rep(table.reps, next)) continue;
      if (table.reps.size() >= budget) {
        table.closed = false;
        return table;
      }
      table.reps.push_back(next);
      queue.push_back(next);
    }
  }
  return table;
}

}  // namespace hecke
