#include <doctest.h>

#include <set>

#include "hecke/hecke_algebra.hpp"
#include "test_support.hpp"

using namespace hecke;

namespace {

Element iv(std::vector<Int> v) { return Element(Element::Payload(std::move(v))); }

Element aff(Rational shift, Rational scale) {
  return Element(Element::Payload(AffineCoords{std::move(shift), std::move(scale)}));
}

Element perm(std::vector<std::uint32_t> v) { return Element(Element::Payload(std::move(v))); }

std::vector<Element> enumerate_group(const Group& g) {
  std::set<Element, ElementLess> seen{g.identity()};
  std::vector<Element> frontier{g.identity()};
  std::vector<Element> step = g.generators();
  for (const auto& x : g.generators()) step.push_back(g.inverse(x));
  while (!frontier.empty()) {
    std::vector<Element> next;
    for (const auto& a : frontier)
      for (const auto& s : step) {
        Element b = g.multiply(a, s);
        if (seen.insert(b).second) next.push_back(b);
      }
    frontier = std::move(next);
  }
  return {seen.begin(), seen.end()};
}

/// Convolution over the whole (finite) group, no coset bookkeeping. Equals
/// |H| times the coset-space convolution when both inputs are H-invariant.
Rational full_group_convolution(const Group& g, const std::vector<Element>& all,
                                const std::function<Rational(const Element&)>& f,
                                const std::function<Rational(const Element&)>& k,
                                const Element& at) {
  Rational total(0);
  for (const auto& x : all) total += f(g.multiply(at, g.inverse(x))) * k(x);
  return total;
}

HeckeFunction<Rational> random_hecke(PairPtr pair, std::mt19937_64& rng, int nterms,
                                     int elt_len = 4, int max_exp = 2) {
  HeckeFunction<Rational> f(pair);
  std::uniform_int_distribution<int> coeff(-3, 3);
  for (int i = 0; i < nterms; ++i)
    f.add(hecke::testsupport::random_element(pair->group(), rng, elt_len, max_exp),
          Rational(coeff(rng)));
  return f;
}

}  // namespace

TEST_CASE("coset-space convolution matches the full-group sum on a symmetric pair") {
  auto s3 = make_symmetric(3);
  Element t01 = perm({1, 0, 2});
  Element t02 = perm({2, 1, 0});
  auto pair = make_pair_context(s3, generated_subgroup(s3, {t01}, "T"));
  auto all = enumerate_group(*s3);
  REQUIRE(all.size() == 6);

  auto chi = delta_double_coset<Rational>(pair, t02);
  auto xi = delta_coset<Rational>(pair, t02);
  auto conv = convolve(chi, xi);

  // Frozen values: contribution 1 at the trivial coset, 0 on H(02), 1 on H(12).
  Element t12 = perm({0, 2, 1});
  CHECK(conv.value(s3->identity()) == 1);
  CHECK(conv.value(t02) == 0);
  CHECK(conv.value(t12) == 1);

  auto f_fn = [&](const Element& x) { return chi.value(x); };
  auto xi_fn = [&](const Element& x) { return xi.value(x); };
  for (const auto& g : all) {
    Rational full = full_group_convolution(*s3, all, f_fn, xi_fn, g);
    CHECK(full == Rational(2) * conv.value(g));  // |H| = 2
  }
}

TEST_CASE("squared indicator of the big double coset in the symmetric pair") {
  auto s3 = make_symmetric(3);
  Element t01 = perm({1, 0, 2});
  Element t02 = perm({2, 1, 0});
  auto pair = make_pair_context(s3, generated_subgroup(s3, {t01}, "T"));
  auto chi = delta_double_coset<Rational>(pair, t02);
  auto sq = convolve(chi, chi);
  CHECK(sq.value(s3->identity()) == 2);
  CHECK(sq.value(t02) == 1);
  CHECK(sq.support_size() == 2);
  CHECK(sq.l2_squared() == Rational(4) + Rational(2));  // 2^2 * 1 + 1^2 * 2
}

TEST_CASE("full-group oracle on a cyclic quotient pair") {
  auto c12 = make_cyclic(Int(12));
  auto pair = make_pair_context(c12, lattice_subgroup(c12, {{Int(3)}}, "3Z12"));
  auto all = enumerate_group(*c12);
  REQUIRE(all.size() == 12);
  auto rng = hecke::testsupport::make_rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    auto f = random_hecke(pair, rng, 2);
    auto k = random_hecke(pair, rng, 2);
    auto conv = convolve(f, k);
    auto f_fn = [&](const Element& x) { return f.value(x); };
    auto k_fn = [&](const Element& x) { return k.value(x); };
    for (const auto& g : all) {
      Rational full = full_group_convolution(*c12, all, f_fn, k_fn, g);
      CHECK(full == Rational(4) * conv.value(g));  // |H| = 4
    }
  }
}

TEST_CASE("convolution values are constant across each double coset") {
  auto g = make_affine();
  auto pair = make_pair_context(g, integer_translation_subgroup(g));
  auto rng = hecke::testsupport::make_rng(29);
  for (int trial = 0; trial < 10; ++trial) {
    auto f = random_hecke(pair, rng, 2, 2, 1);
    auto k = random_hecke(pair, rng, 2, 2, 1);
    auto flat = k.as_coset_function();
    auto conv = convolve(f, k);
    for (const auto& [rep, c] : conv.terms()) {
      for (const auto& u : pair->double_coset(rep).right_reps)
        CHECK(convolve_value_at(f, flat, u) == c);
    }
  }
}

TEST_CASE("convolution is associative with exact coefficients") {
  auto rng = hecke::testsupport::make_rng(101);
  std::vector<PairPtr> pairs;
  auto z = make_integers();
  pairs.push_back(make_pair_context(z, lattice_subgroup(z, {{Int(2)}}, "2Z")));
  auto s3 = make_symmetric(3);
  pairs.push_back(make_pair_context(s3, generated_subgroup(s3, {perm({1, 0, 2})}, "T")));
  auto affg = make_affine();
  pairs.push_back(make_pair_context(affg, integer_translation_subgroup(affg)));
  for (const auto& pair : pairs) {
    // Affine elements grow multiplicatively, so keep their words short.
    const bool affine = pair->group().kind() == GroupKind::affine;
    const int len = affine ? 2 : 4;
    const int exp = affine ? 1 : 2;
    for (int trial = 0; trial < 15; ++trial) {
      auto f = random_hecke(pair, rng, 2, len, exp);
      auto k = random_hecke(pair, rng, 2, len, exp);
      auto m = random_hecke(pair, rng, 2, len, exp);
      auto left = convolve(convolve(f, k), m);
      auto right = convolve(f, convolve(k, m));
      CHECK(left.terms() == right.terms());
    }
  }
}

TEST_CASE("unit of the algebra is the subgroup indicator") {
  auto g = make_affine();
  auto pair = make_pair_context(g, integer_translation_subgroup(g));
  auto rng = hecke::testsupport::make_rng(7);
  auto unit = delta_double_coset<Rational>(pair, g->identity());
  for (int trial = 0; trial < 10; ++trial) {
    auto f = random_hecke(pair, rng, 2, 2, 1);
    CHECK(convolve(unit, f).terms() == f.terms());
    CHECK(convolve(f, unit).terms() == f.terms());
  }
}

TEST_CASE("norms of deltas count right cosets") {
  auto g = make_affine();
  auto pair = make_pair_context(g, integer_translation_subgroup(g));
  auto narrow = delta_double_coset<Rational>(pair, aff(0, 2));
  CHECK(narrow.l2_squared() == 1);  // R((0,2)) = 1
  auto wide = delta_double_coset<Rational>(pair, aff(0, Rational(1, 2)));
  CHECK(wide.l2_squared() == 2);  // R((0,1/2)) = 2
  CHECK(wide.as_coset_function().support_size() == 2);
}

TEST_CASE("operator norm of the two-sided shift approaches two") {
  auto z = make_integers();
  auto pair = make_pair_context(z, trivial_subgroup(z));
  HeckeFunction<double> f(pair);
  f.add(iv({Int(1)}), 1.0);
  f.add(iv({Int(-1)}), 1.0);
  auto result = operator_norm_estimate(f, 60, 4000, 1e-12);
  CHECK(result.dimension == 121);
  CHECK(!result.space_closed);
  CHECK(result.estimate > 1.95);
  CHECK(result.estimate < 2.0 + 1e-9);
}

TEST_CASE("operator norm of the algebra unit is exactly one") {
  auto z = make_integers();
  auto pair = make_pair_context(z, lattice_subgroup(z, {{Int(2)}}, "2Z"));
  HeckeFunction<double> unit(pair);
  unit.add(iv({Int(0)}), 1.0);
  auto result = operator_norm_estimate(unit, 5);
  CHECK(result.estimate == 1.0);
  CHECK(result.space_closed);
  CHECK(result.converged);
}
