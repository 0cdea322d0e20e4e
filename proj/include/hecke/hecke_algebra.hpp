#pragma once

#include <cmath>

#include "hecke/pair.hpp"

namespace hecke {

template <typename S>
struct scalar_traits;

template <>
struct scalar_traits<Rational> {
  static bool is_zero(const Rational& x) { return x == 0; }
  static double to_dbl(const Rational& x) { return to_double(x); }
};

template <>
struct scalar_traits<double> {
  static bool is_zero(double x) { return x == 0.0; }
  static double to_dbl(double x) { return x; }
};

/**
 * Finitely supported function on the right coset space H\G, stored by
 * registry representative. With S = Rational all arithmetic is exact.
 */
template <typename S>
class CosetFunction {
public:
  explicit CosetFunction(PairPtr pair) : pair_(std::move(pair)) {}

  const Pair& pair() const { return *pair_; }
  const PairPtr& pair_ptr() const { return pair_; }

  void add(const Element& x, const S& c) {
    if (scalar_traits<S>::is_zero(c)) return;
    Element rep = pair_->coset_rep(x);
    auto it = terms_.find(rep);
    if (it == terms_.end()) {
      terms_.emplace(std::move(rep), c);
    } else {
      it->second = it->second + c;
      if (scalar_traits<S>::is_zero(it->second)) terms_.erase(it);
    }
  }

  S value(const Element& x) const {
    auto it = terms_.find(pair_->coset_rep(x));
    return it == terms_.end() ? S(0) : it->second;
  }

  const std::map<Element, S, ElementLess>& terms() const { return terms_; }
  std::size_t support_size() const { return terms_.size(); }

  /// Squared norm in l2(H\G): each right coset counts once.
  S l2_squared() const {
    S total(0);
    for (const auto& [rep, c] : terms_) total = total + c * c;
    return total;
  }

private:
  PairPtr pair_;
  std::map<Element, S, ElementLess> terms_;
};

/**
 * Finitely supported bi-invariant function (an element of the convolution
 * algebra of the pair), stored by double coset representative.
 */
template <typename S>
class HeckeFunction {
public:
  explicit HeckeFunction(PairPtr pair) : pair_(std::move(pair)) {}

  const Pair& pair() const { return *pair_; }
  const PairPtr& pair_ptr() const { return pair_; }

  void add(const Element& g, const S& c) {
    if (scalar_traits<S>::is_zero(c)) return;
    Element rep = pair_->double_coset_rep(g);
    auto it = terms_.find(rep);
    if (it == terms_.end()) {
      terms_.emplace(std::move(rep), c);
    } else {
      it->second = it->second + c;
      if (scalar_traits<S>::is_zero(it->second)) terms_.erase(it);
    }
  }

  /// Coefficient at the double coset of g. Scans the support's frozen
  /// records instead of walking the double coset of g, so evaluation never
  /// spends coset budget on points outside the support.
  S value(const Element& g) const {
    Element rep = pair_->coset_rep(g);
    for (const auto& [dc_rep, c] : terms_)
      if (pair_->double_coset(dc_rep).holds_coset(rep)) return c;
    return S(0);
  }

  const std::map<Element, S, ElementLess>& terms() const { return terms_; }
  std::size_t support_size() const { return terms_.size(); }

  /// Flattens to a coset function: the double coset coefficient lands on
  /// every right coset the double coset contains.
  CosetFunction<S> as_coset_function() const {
    CosetFunction<S> out(pair_);
    for (const auto& [rep, c] : terms_)
      for (const auto& u : pair_->double_coset(rep).right_reps) out.add(u, c);
    return out;
  }

  /// Squared l2(H\G) norm: each double coset contributes its coefficient
  /// squared once per right coset it contains.
  S l2_squared() const {
    S total(0);
    for (const auto& [rep, c] : terms_) {
      Count r = pair_->right_coset_count(rep);
      if (!r.exact) throw std::domain_error("l2_squared: right coset count not exact");
      total = total + c * c * S(r.value.convert_to<long long>());
    }
    return total;
  }

private:
  PairPtr pair_;
  std::map<Element, S, ElementLess> terms_;
};

template <typename S>
HeckeFunction<S> delta_double_coset(PairPtr pair, const Element& g) {
  HeckeFunction<S> f(std::move(pair));
  f.add(g, S(1));
  return f;
}

template <typename S>
CosetFunction<S> delta_coset(PairPtr pair, const Element& g) {
  CosetFunction<S> f(std::move(pair));
  f.add(g, S(1));
  return f;
}

/// Right-coset representatives carrying the support of f.
template <typename S>
std::vector<Element> support_right_reps(const HeckeFunction<S>& f) {
  std::vector<Element> reps;
  for (const auto& [rep, c] : f.terms()) {
    const auto& rec = f.pair().double_coset(rep);
    if (!rec.right_closed)
      throw std::domain_error("support_right_reps: double coset not fully listed");
    reps.insert(reps.end(), rec.right_reps.begin(), rec.right_reps.end());
  }
  return reps;
}

/// Convolution evaluated at one group element:
///   (f * xi)(g) = sum over right coset reps u in supp xi of f(g u^-1) xi(u).
/// The summand is independent of the representative u of Hu because f is
/// invariant under right translation by subgroup elements.
template <typename S>
S convolve_value_at(const HeckeFunction<S>& f, const CosetFunction<S>& xi, const Element& g) {
  const Group& grp = f.pair().group();
  S total(0);
  for (const auto& [u, c] : xi.terms())
    total = total + f.value(grp.multiply(g, grp.inverse(u))) * c;
  return total;
}

/// f * xi as a function on the coset space (the convolution operator lambda(f)
/// applied to xi). Candidate support: cosets H(v u) for v in the right-coset
/// expansion of supp f and u in supp xi.
template <typename S>
CosetFunction<S> convolve(const HeckeFunction<S>& f, const CosetFunction<S>& xi) {
  if (f.pair_ptr().get() != xi.pair_ptr().get())
    throw std::invalid_argument("convolve: operands belong to different pairs");
  const Group& grp = f.pair().group();
  const Pair& pair = f.pair();
  std::vector<Element> freps = support_right_reps(f);
  std::set<Element, ElementLess> candidates;
  for (const auto& [u, c] : xi.terms())
    for (const auto& v : freps) candidates.insert(pair.coset_rep(grp.multiply(v, u)));
  CosetFunction<S> out(f.pair_ptr());
  for (const auto& g : candidates) out.add(g, convolve_value_at(f, xi, g));
  return out;
}

/// Convolution product inside the algebra: both operands bi-invariant, the
/// result re-read off double coset representatives.
template <typename S>
HeckeFunction<S> convolve(const HeckeFunction<S>& f, const HeckeFunction<S>& k) {
  if (f.pair_ptr().get() != k.pair_ptr().get())
    throw std::invalid_argument("convolve: operands belong to different pairs");
  const Pair& pair = f.pair();
  CosetFunction<S> flat = convolve(f, k.as_coset_function());
  HeckeFunction<S> out(f.pair_ptr());
  // Only nonzero cosets reach here, so only genuine support costs a double
  // coset walk. Each double coset is read off once, at its representative.
  for (const auto& [u, c] : flat.terms()) {
    Element d = pair.double_coset_rep(u);
    if (out.terms().count(d)) continue;
    out.add(d, flat.value(d));
  }
  return out;
}

/// Sparse truncation of the operator lambda(f) and a power-iteration lower
/// bound for its norm on l2(H\G).
struct OpNormResult {
  double estimate = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Squared-mass fraction of the final iterate on the outermost coset layer;
  /// small values mean the truncation radius did not bind.
  double boundary_mass = 0.0;
  /// True when the coset walk saturated: the estimate addresses the full space.
  bool space_closed = false;
  std::size_t dimension = 0;
};

OpNormResult operator_norm_estimate(const HeckeFunction<double>& f, int truncation_radius,
                                    int max_iterations = 300, double tolerance = 1e-10);

}  // namespace hecke
