#include "hecke/length.hpp"

#include <deque>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>

namespace hecke {
namespace {

/// Incremental breadth-first distance table from a start vertex, where
/// the neighbor map is supplied by the caller. Layers are expanded only
/// when a lookup needs them, and the table persists across lookups.
class BfsDistance {
public:
  BfsDistance(Element start, std::size_t cap,
              std::function<std::vector<Element>(const Element&)> neighbors)
      : cap_(cap), neighbors_(std::move(neighbors)) {
    dist_.emplace(start, 0.0);
    frontier_.push_back(std::move(start));
  }

  double lookup(const Element& v) {
    auto it = dist_.find(v);
    while (it == dist_.end()) {
      if (frontier_.empty())
        throw std::domain_error(
            "length: element is not reachable from the generators");
      expand_layer();
      it = dist_.find(v);
    }
    return it->second;
  }

private:
  void expand_layer() {
    ++layer_;
    std::vector<Element> next;
    for (const auto& v : frontier_) {
      for (auto& w : neighbors_(v)) {
        if (dist_.count(w)) continue;
        if (dist_.size() >= cap_)
          throw std::domain_error("length: search cap exceeded");
        dist_.emplace(w, static_cast<double>(layer_));
        next.push_back(std::move(w));
      }
    }
    frontier_ = std::move(next);
  }

  std::size_t cap_;
  std::function<std::vector<Element>(const Element&)> neighbors_;
  std::map<Element, double, ElementLess> dist_;
  std::vector<Element> frontier_;
  std::size_t layer_ = 0;
};

std::vector<Element> generator_steps(const Group& g, const Element& v) {
  std::vector<Element> out;
  for (const auto& s : g.generators()) {
    out.push_back(g.canonicalize(g.multiply(v, s)));
    out.push_back(g.canonicalize(g.multiply(v, g.inverse(s))));
  }
  return out;
}

/// Canonicalizes the listed elements and rejects lists that are not
/// finite subgroups: the identity must appear and the list must be
/// closed under product and inverse.
std::vector<Element> closed_subgroup_elements(const Group& g,
                                              std::vector<Element> elems,
                                              const std::string& who) {
  std::vector<Element> members;
  for (const auto& u : elems) members.push_back(g.canonicalize(u));
  std::set<Element, ElementLess> index(members.begin(), members.end());
  if (!index.count(g.identity()))
    throw std::domain_error(who + ": the set does not contain the identity");
  for (const auto& u : members) {
    if (!index.count(g.canonicalize(g.inverse(u))))
      throw std::domain_error(who + ": the set is not closed under inverse at " +
                              g.format(u));
    for (const auto& v : members) {
      if (!index.count(g.canonicalize(g.multiply(u, v))))
        throw std::domain_error(who +
                                ": the set is not closed under product at " +
                                g.format(u) + " * " + g.format(v));
    }
  }
  return members;
}

SubgroupPtr subgroup_from_elements(GroupPtr g, std::vector<Element> members,
                                   const std::string& name) {
  auto table = std::make_shared<std::vector<Element>>(std::move(members));
  std::vector<Element> gens;
  for (const auto& u : *table)
    if (element_cmp(u, g->identity()) != 0) gens.push_back(u);
  Subgroup::Config cfg;
  cfg.parent = g;
  cfg.name = name;
  cfg.member = [g, table](const Element& x) {
    Element c = g->canonicalize(x);
    for (const auto& u : *table)
      if (element_cmp(u, c) == 0) return true;
    return false;
  };
  cfg.generators = std::move(gens);
  cfg.known_finite = true;
  return make_subgroup(cfg);
}

}  // namespace

std::string to_string(LengthKind kind) {
  switch (kind) {
    case LengthKind::word: return "word";
    case LengthKind::quotient_word: return "quotient-word";
    case LengthKind::extension_prime: return "extension-prime";
    case LengthKind::finite_averaged: return "finite-averaged";
    case LengthKind::max_gamma: return "max-gamma";
    case LengthKind::pullback: return "pullback";
    case LengthKind::custom: return "custom";
  }
  return "custom";
}

LengthFunction zero_length() {
  return {"zero", LengthKind::custom, {}, [](const Element&) { return 0.0; }};
}

LengthFunction word_length(GroupPtr g, bool prefer_native, std::size_t cap) {
  auto bfs = std::make_shared<BfsDistance>(
      g->identity(), cap,
      [g](const Element& v) { return generator_steps(*g, v); });
  auto eval = [g, prefer_native, bfs](const Element& x) {
    Element c = g->canonicalize(x);
    if (prefer_native) {
      if (auto n = g->native_word_length(c)) return *n;
    }
    return bfs->lookup(c);
  };
  return {"word(" + g->name() + ")", LengthKind::word, {}, std::move(eval)};
}

LengthFunction quotient_word_length(PairPtr pair, std::size_t cap) {
  GroupPtr g = pair->group_ptr();
  const Subgroup& sub = pair->sub();
  if (sub.has_generators()) {
    for (const auto& h : sub.generators()) {
      for (const auto& s : g->generators()) {
        for (const Element& t : {s, g->inverse(s)}) {
          Element conj = g->multiply(g->multiply(t, h), g->inverse(t));
          if (!sub.contains(conj))
            throw std::domain_error(
                "quotient_word_length: subgroup fails a normality check, "
                "conjugate " +
                g->format(conj) + " of " + g->format(h) + " is not a member");
        }
      }
    }
  }
  auto bfs = std::make_shared<BfsDistance>(
      pair->coset_rep(g->identity()), cap, [pair, g](const Element& v) {
        std::vector<Element> out;
        for (auto& w : generator_steps(*g, v)) out.push_back(pair->coset_rep(w));
        return out;
      });
  auto eval = [pair, bfs](const Element& x) {
    return bfs->lookup(pair->coset_rep(x));
  };
  return {"quotient-word(" + pair->sub().name() + ")",
          LengthKind::quotient_word,
          {pair->sub_ptr()},
          std::move(eval)};
}

LengthFunction composed_length(std::string name, LengthFunction base,
                               std::function<Element(const Element&)> map,
                               LengthKind kind) {
  auto eval = [base = std::move(base), map = std::move(map)](const Element& x) {
    return base(map(x));
  };
  return {std::move(name), kind, {}, std::move(eval)};
}

LengthFunction finite_averaged(GroupPtr g, LengthFunction base,
                               std::vector<Element> finite_subgroup) {
  auto members = std::make_shared<std::vector<Element>>(closed_subgroup_elements(
      *g, std::move(finite_subgroup), "finite_averaged"));
  for (const auto& u : *members) {
    if (base(u) > 1e-12)
      throw std::domain_error(
          "finite_averaged: base weight does not vanish on the set at " +
          g->format(u) + "; the average would not vanish there either");
  }
  std::string name = "averaged(" + base.name + ")";
  auto sub = subgroup_from_elements(g, *members, name + " support");
  auto eval = [g, base = std::move(base), members](const Element& x) {
    Element c = g->canonicalize(x);
    double best = 0.0;
    for (const auto& u : *members)
      for (const auto& v : *members)
        best = std::max(best, base(g->multiply(g->multiply(u, c), v)));
    return best;
  };
  return {std::move(name), LengthKind::finite_averaged, {std::move(sub)},
          std::move(eval)};
}

LengthFunction length_vanishing_on(GroupPtr g, LengthFunction base,
                                   std::vector<Element> finite_subgroup) {
  auto members = std::make_shared<std::vector<Element>>(closed_subgroup_elements(
      *g, std::move(finite_subgroup), "length_vanishing_on"));
  std::string name = "flattened(" + base.name + ")";
  auto sub = subgroup_from_elements(g, *members, name + " support");
  auto eval = [g, base = std::move(base), members](const Element& x) {
    Element c = g->canonicalize(x);
    for (const auto& u : *members)
      if (element_cmp(u, c) == 0) return 0.0;
    double best = 0.0;
    for (const auto& u : *members)
      for (const auto& v : *members)
        best = std::max(best, base(g->multiply(g->multiply(u, c), v)));
    return best;
  };
  return {std::move(name), LengthKind::finite_averaged, {std::move(sub)},
          std::move(eval)};
}

void check_length_axioms(const Group& g, const LengthFunction& len,
                         const std::vector<Element>& samples) {
  auto fail = [&](const std::string& what, const Element& a) {
    std::ostringstream msg;
    msg << "length axiom violated (" << len.name << "): " << what << " at "
        << g.format(a);
    throw std::logic_error(msg.str());
  };
  if (len(g.identity()) != 0.0) fail("nonzero at identity", g.identity());
  for (const auto& a : samples) {
    double la = len(a);
    if (la < 0.0) fail("negative value", a);
    if (std::abs(len(g.inverse(a)) - la) > 1e-9) fail("asymmetric", a);
  }
  for (const auto& a : samples) {
    for (const auto& b : samples) {
      if (len(g.multiply(a, b)) > len(a) + len(b) + 1e-9)
        fail("not subadditive", g.multiply(a, b));
    }
  }
  for (const auto& sub : len.declared_vanishing) {
    if (!sub) continue;
    if (!sub->has_generators()) continue;
    const auto& gens = sub->generators();
    for (const auto& h : gens) {
      if (std::abs(len(h)) > 1e-9)
        fail("declared vanishing on " + sub->name() + " fails", h);
      if (std::abs(len(g.inverse(h))) > 1e-9)
        fail("declared vanishing on " + sub->name() + " fails", g.inverse(h));
      for (const auto& k : gens) {
        Element hk = g.multiply(h, k);
        if (std::abs(len(hk)) > 1e-9)
          fail("declared vanishing on " + sub->name() + " fails", hk);
      }
    }
  }
}

DominationVerdict dominates(const LengthFunction& upper,
                            const LengthFunction& lower,
                            const std::vector<Element>& samples, double a,
                            double b) {
  if (a <= 0.0 || b <= 0.0)
    throw std::invalid_argument("dominates: constants must be positive");
  for (const auto& x : samples) {
    if (lower(x) > a * upper(x) + b + 1e-9) return {false, x};
  }
  return {true, std::nullopt};
}

LengthBall length_ball(PairPtr pair, double r, const LengthFunction& len,
                       std::size_t budget) {
  const Group& g = pair->group();
  LengthBall ball;
  std::map<Element, std::size_t, ElementLess> dc_slot;
  std::set<Element, ElementLess> visited;
  std::deque<Element> queue;

  // Gate the base coset on the identity element itself: the registry may
  // know the coset under a longer representative from earlier walks.
  Element start = pair->coset_rep(g.identity());
  visited.insert(start);
  ball.complete = true;
  if (len(g.identity()) <= r) queue.push_back(start);

  auto record = [&](const Element& coset) {
    Element dc = pair->double_coset_rep(coset);
    auto [it, fresh] = dc_slot.emplace(dc, ball.double_coset_reps.size());
    if (fresh) {
      if (std::abs(len(dc) - len(coset)) > 1e-9)
        throw std::logic_error(
            "length_ball: weight is not constant on the double coset of " +
            g.format(dc));
      ball.double_coset_reps.push_back(dc);
      ball.right_counts.push_back(0);
    }
    ++ball.right_counts[it->second];
    ++ball.right_coset_total;
  };

  if (!queue.empty()) record(start);
  while (!queue.empty()) {
    Element v = queue.front();
    queue.pop_front();
    for (const auto& s : g.generators()) {
      for (const Element& t : {s, g.inverse(s)}) {
        Element w = pair->coset_rep(g.multiply(v, t));
        if (!visited.insert(w).second) continue;
        if (visited.size() > budget) {
          ball.complete = false;
          return ball;
        }
        if (len(w) > r) continue;
        record(w);
        queue.push_back(w);
      }
    }
  }
  return ball;
}

}  // namespace hecke
