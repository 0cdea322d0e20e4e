#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "hecke/probe.hpp"

using namespace hecke;

namespace {

Element iv(std::vector<Int> v) { return Element(Element::Payload(std::move(v))); }

PairPtr integer_pair(long long n) {
  auto z = make_integers();
  return make_pair_context(z, lattice_subgroup(z, {{Int(n)}}, std::to_string(n) + "Z"));
}

PairPtr integer_trivial_pair() {
  auto z = make_integers();
  return make_pair_context(z, trivial_subgroup(z));
}

PairPtr free_trivial_pair(std::size_t rank) {
  auto f = make_free_group(rank);
  return make_pair_context(f, trivial_subgroup(f));
}

/// Infinite dihedral group with its index-two subgroup of even words.
PairPtr dihedral_even_pair() {
  auto d = make_free_product({make_cyclic(Int(2)), make_cyclic(Int(2))}, "C2*C2");
  Subgroup::Config cfg;
  cfg.parent = d;
  cfg.name = "even";
  cfg.member = [d](const Element& x) {
    Element c = d->canonicalize(x);
    return std::get<Word>(c.payload()).letters.size() % 2 == 0;
  };
  cfg.coset_key = [d](const Element& x) {
    Element c = d->canonicalize(x);
    long long parity = static_cast<long long>(std::get<Word>(c.payload()).letters.size() % 2);
    return Element(Element::Payload(Element::IntVec{Int(parity)}));
  };
  cfg.generators = {d->multiply(d->generators()[0], d->generators()[1])};
  return make_pair_context(d, make_subgroup(std::move(cfg)));
}

/// Same values as word length but typed custom, to force the generic path.
LengthFunction custom_integer_length(const PairPtr& pair) {
  LengthFunction len = word_length(pair->group_ptr());
  len.kind = LengthKind::custom;
  len.name = "custom-abs";
  return len;
}

}  // namespace

TEST_CASE("tree path reproduces the exact ball ratios on the integers") {
  auto pair = integer_trivial_pair();
  auto len = word_length(pair->group_ptr());

  auto at0 = haagerup_ratio(pair, len, 0.0, 0, 50);
  CHECK(at0.exact);
  CHECK(at0.conclusive);
  CHECK(at0.candidates == 1);
  CHECK(at0.value == doctest::Approx(1.0));

  auto at4 = haagerup_ratio(pair, len, 4.0, 0, 50);
  CHECK(at4.exact);
  CHECK(at4.candidates == 5);
  CHECK(at4.value == doctest::Approx(3.0));  // sqrt(2*4 + 1)

  // Random nonnegative candidates cannot beat the full ball on the integers.
  auto with_trials = haagerup_ratio(pair, len, 4.0, 30, 50);
  CHECK(with_trials.candidates == 35);
  CHECK(with_trials.value == doctest::Approx(3.0));
}

TEST_CASE("tree path matches the sphere recursion on a rank-two free group") {
  auto pair = free_trivial_pair(2);
  auto len = word_length(pair->group_ptr());

  // chi_j(2 sqrt 3) = 3^{j/2} (4 + 2j) / 3 and |S_j| = 4 * 3^{j-1}.
  double top = 1.0, ball = 1.0;
  for (int j = 1; j <= 8; ++j) {
    top += std::pow(3.0, j / 2.0) * (4.0 + 2.0 * j) / 3.0;
    ball += 4.0 * std::pow(3.0, j - 1.0);
  }
  auto at8 = haagerup_ratio(pair, len, 8.0, 0, 50);
  CHECK(at8.exact);
  CHECK(at8.value == doctest::Approx(top / std::sqrt(ball)).epsilon(1e-6));

  auto at1 = haagerup_ratio(pair, len, 1.0, 0, 50);
  CHECK(at1.value == doctest::Approx((1.0 + 2.0 * std::sqrt(3.0)) / std::sqrt(5.0)).epsilon(1e-6));

  // Extra candidates can only raise the maximum.
  auto with_trials = haagerup_ratio(pair, len, 8.0, 10, 50);
  CHECK(with_trials.value >= at8.value);
}

TEST_CASE("finite quotients cap the ratio at the square root of the index") {
  auto pair = integer_pair(5);
  auto len = quotient_word_length(pair);

  auto at1 = haagerup_ratio(pair, len, 1.0, 4, 600);
  CHECK_FALSE(at1.exact);
  CHECK(at1.conclusive);
  CHECK(at1.value == doctest::Approx(std::sqrt(3.0)).epsilon(1e-6));

  auto at2 = haagerup_ratio(pair, len, 2.0, 4, 600);
  CHECK(at2.value == doctest::Approx(std::sqrt(5.0)).epsilon(1e-6));

  // Radius beyond the diameter changes nothing.
  auto at9 = haagerup_ratio(pair, len, 9.0, 4, 600);
  CHECK(at9.value == doctest::Approx(std::sqrt(5.0)).epsilon(1e-6));
}

TEST_CASE("index-two pair of the infinite dihedral group stays flat") {
  auto pair = dihedral_even_pair();
  auto len = quotient_word_length(pair);

  auto at1 = haagerup_ratio(pair, len, 1.0, 4, 600);
  CHECK(at1.value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));

  auto report = rd_fit(pair, len, {1, 2, 3, 4}, 3);
  CHECK(report.verdict == ProbeVerdict::polynomial_consistent);
  CHECK(std::abs(report.fit.degree) <= 0.15);
  for (bool c : report.radius_conclusive) CHECK(c);
}

TEST_CASE("growth fit on the integers over the trivial subgroup") {
  auto pair = integer_trivial_pair();
  auto len = word_length(pair->group_ptr());
  auto report = rd_fit(pair, len, {1, 2, 4, 8, 16, 32}, 5);

  CHECK(report.verdict == ProbeVerdict::polynomial_consistent);
  CHECK(report.fit.degree == doctest::Approx(0.55).epsilon(0.2));
  CHECK(report.ratios.back() == doctest::Approx(std::sqrt(65.0)));
  CHECK(report.pair_id == pair->group().name() + " / trivial");
  CHECK(report.length_id == len.name);
}

TEST_CASE("growth fit on finite quotients is flat") {
  for (long long n : {2, 3, 5}) {
    auto pair = integer_pair(n);
    auto len = quotient_word_length(pair);
    auto report = rd_fit(pair, len, {1, 2, 4, 8, 16, 32}, 5);
    CHECK(report.verdict == ProbeVerdict::polynomial_consistent);
    CHECK(std::abs(report.fit.degree) <= 0.1);
  }
}

TEST_CASE("growth fit on a rank-two free group stays near linear") {
  auto pair = free_trivial_pair(2);
  auto len = word_length(pair->group_ptr());
  auto report = rd_fit(pair, len, {1, 2, 3, 4, 5, 6, 7, 8}, 4);

  CHECK(report.verdict == ProbeVerdict::polynomial_consistent);
  CHECK(report.fit.degree > 0.8);
  CHECK(report.fit.degree <= 1.5);
}

TEST_CASE("rd_fit validates its schedule") {
  auto pair = integer_pair(5);
  auto len = quotient_word_length(pair);
  CHECK_THROWS_AS(rd_fit(pair, len, {1, 2, 4}, 2), std::invalid_argument);
  CHECK_THROWS_AS(rd_fit(pair, len, {1, 2, 2, 4}, 2), std::invalid_argument);
  CHECK_THROWS_AS(rd_fit(pair, len, {-1, 2, 3, 4}, 2), std::invalid_argument);
  CHECK_THROWS_AS(haagerup_ratio(pair, len, -1.0, 0, 50), std::invalid_argument);
  CHECK_THROWS_AS(haagerup_ratio(pair, len, 1.0, 0, 0), std::invalid_argument);
}

TEST_CASE("radii whose ball exceeds the budget make the verdict inconclusive") {
  auto pair = integer_trivial_pair();
  auto len = custom_integer_length(pair);

  CHECK_THROWS_AS(haagerup_ratio(pair, len, 8.0, 0, 50, 1, 9), std::domain_error);

  ProbeOptions opts;
  opts.ball_budget = 9;
  opts.seed = 7;
  auto report = rd_fit(pair, len, {1, 2, 4, 8}, 2, opts);
  CHECK(report.verdict == ProbeVerdict::inconclusive);
  CHECK(report.radius_conclusive[0]);
  CHECK(report.radius_conclusive[1]);
  CHECK_FALSE(report.radius_conclusive[3]);
  CHECK(std::isnan(report.ratios[3]));
  CHECK(report.ratios[0] == doctest::Approx(std::sqrt(3.0)).epsilon(1e-3));
}

TEST_CASE("weighted norm ratio collapses to the plain l2 ratio at s = 0") {
  auto pair = integer_pair(5);
  auto len = quotient_word_length(pair);

  auto one = delta_double_coset<double>(pair, iv({Int(0)}));
  CHECK(haagerup_norm_ratio(one, 2.0, len, 50) == doctest::Approx(1.0).epsilon(1e-6));

  HeckeFunction<double> f(pair);
  f.add(iv({Int(0)}), 1.0);
  f.add(iv({Int(1)}), 1.0);
  auto res = operator_norm_estimate(f, 50);
  CHECK(haagerup_norm_ratio(f, 0.0, len, 50) ==
        doctest::Approx(res.estimate / std::sqrt(f.l2_squared())));
  CHECK(haagerup_norm_ratio(f, 0.0, len, 50) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-3));
  // A positive weight exponent shrinks the ratio: the denominator grows.
  CHECK(haagerup_norm_ratio(f, 2.0, len, 50) < haagerup_norm_ratio(f, 0.0, len, 50));

  auto dpair = dihedral_even_pair();
  auto dlen = quotient_word_length(dpair);
  auto done = delta_double_coset<double>(dpair, dpair->group().identity());
  CHECK(haagerup_norm_ratio(done, 3.0, dlen, 50) == doctest::Approx(1.0).epsilon(1e-6));

  CHECK_THROWS_AS(haagerup_norm_ratio(HeckeFunction<double>(pair), 0.0, len, 50),
                  std::invalid_argument);
}

TEST_CASE("log fit recovers plateau and polynomial growth") {
  auto flat = fit_log_polynomial({1, 2, 4, 8}, {2.0, 2.0, 2.0, 2.0});
  CHECK(flat.degree == doctest::Approx(0.0));
  CHECK(flat.constant == doctest::Approx(2.0));
  CHECK(flat.residual == doctest::Approx(0.0));

  std::vector<double> radii{1, 2, 4, 8, 16};
  std::vector<double> ratios;
  for (double r : radii) ratios.push_back(3.0 * std::pow(1.0 + r, 1.5));
  auto cubic = fit_log_polynomial(radii, ratios);
  CHECK(cubic.degree == doctest::Approx(1.5));
  CHECK(cubic.constant == doctest::Approx(3.0));
  CHECK(cubic.residual == doctest::Approx(0.0));

  CHECK_THROWS_AS(fit_log_polynomial({1, 2}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(fit_log_polynomial({1}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(fit_log_polynomial({1, 2}, {1.0, -1.0}), std::invalid_argument);
  CHECK_THROWS_AS(fit_log_polynomial({2, 2}, {1.0, 1.0}), std::invalid_argument);

  FittedPolynomial poly{2.0, 1.0};
  CHECK(poly(3.0) == doctest::Approx(8.0));
}

TEST_CASE("composed transfer bound holds and reports violations") {
  auto z = make_integers();
  auto coarse = make_pair_context(z, lattice_subgroup(z, {{Int(2)}}, "2Z"));
  auto fine = make_pair_context(z, lattice_subgroup(z, {{Int(4)}}, "4Z"));
  auto ctx = make_transfer(coarse, fine);
  REQUIRE(ctx.index() == 2);
  auto len = quotient_word_length(coarse);

  // The fine pair's ratios plateau at 2, so this dominates its growth.
  FittedPolynomial fine_fit{2.0, 0.0};
  auto ok = composed_witness_check(ctx, len, fine_fit, {1, 2, 4, 8}, 3);
  CHECK(ok.checked == 4);
  CHECK(ok.ok);
  CHECK(ok.detail.empty());

  // Index one: the bound collapses to the fitted curve itself.
  auto same = make_transfer(coarse, coarse);
  REQUIRE(same.index() == 1);
  FittedPolynomial exact{std::sqrt(2.0), 0.0};
  auto tight = composed_witness_check(same, len, exact, {1, 2, 4}, 2);
  CHECK(tight.ok);

  FittedPolynomial low{0.2, 0.0};
  auto bad = composed_witness_check(same, len, low, {1, 2, 4}, 2);
  CHECK_FALSE(bad.ok);
  CHECK(bad.detail.find("exceeds bound") != std::string::npos);

  CHECK_THROWS_AS(composed_witness_check(ctx, len, fine_fit, {}, 2), std::invalid_argument);
}

TEST_CASE("composed product bound compares against both factors") {
  auto pair = integer_pair(5);
  auto len = quotient_word_length(pair);

  FittedPolynomial p0{std::sqrt(5.0), 0.0};
  FittedPolynomial p1{1.0, 0.0};
  auto ok = composed_witness_check(pair, len, p0, p1, 1.0, 1.0, {1, 2, 4}, 3);
  CHECK(ok.checked == 3);
  CHECK(ok.ok);

  FittedPolynomial low{0.9, 0.0};
  auto bad = composed_witness_check(pair, len, low, p1, 1.0, 1.0, {1, 2, 4}, 3);
  CHECK_FALSE(bad.ok);
  CHECK(bad.detail.find("radius 1") != std::string::npos);

  CHECK_THROWS_AS(composed_witness_check(pair, len, p0, p1, 0.0, 1.0, {1}, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(composed_witness_check(pair, len, p0, p1, 1.0, -1.0, {1}, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(composed_witness_check(pair, len, p0, p1, 1.0, 1.0, {}, 1),
                  std::invalid_argument);
}

TEST_CASE("identical seeds reproduce the whole report") {
  auto pair = integer_pair(5);
  auto len = quotient_word_length(pair);
  ProbeOptions opts;
  opts.seed = 42;
  auto a = rd_fit(pair, len, {1, 2, 4, 8}, 5, opts);
  auto b = rd_fit(pair, len, {1, 2, 4, 8}, 5, opts);
  REQUIRE(a.ratios.size() == b.ratios.size());
  for (std::size_t i = 0; i < a.ratios.size(); ++i) CHECK(a.ratios[i] == b.ratios[i]);
  CHECK(a.fit.degree == b.fit.degree);
  CHECK(a.verdict == b.verdict);
  CHECK(a.seed == 42);
}

TEST_CASE("default seed honours the environment override") {
  const char* old = std::getenv("HECKE_SEED");
  std::string saved = old ? old : "";

  setenv("HECKE_SEED", "123", 1);
  CHECK(probe_seed_default() == 123);
  setenv("HECKE_SEED", "0x10", 1);
  CHECK(probe_seed_default() == 16);
  setenv("HECKE_SEED", "not-a-number", 1);
  CHECK(probe_seed_default() == 0x5eed);
  unsetenv("HECKE_SEED");
  CHECK(probe_seed_default() == 0x5eed);

  if (old) setenv("HECKE_SEED", saved.c_str(), 1);
}
