#include <doctest.h>

#include <set>

#include "hecke/pair.hpp"
#include "test_support.hpp"

using namespace hecke;

namespace {

Element iv(std::vector<Int> v) { return Element(Element::Payload(std::move(v))); }

Element aff(Rational shift, Rational scale) {
  return Element(Element::Payload(AffineCoords{std::move(shift), std::move(scale)}));
}

Element perm(std::vector<std::uint32_t> v) { return Element(Element::Payload(std::move(v))); }

}  // namespace

TEST_CASE("index-two sublattice splits the integers into two cosets") {
  auto z = make_integers();
  auto pair = make_pair_context(z, lattice_subgroup(z, {{Int(2)}}, "2Z"));
  bool closed = false;
  auto cosets = pair->right_cosets_in_ball(4, &closed);
  CHECK(closed);
  CHECK(cosets.size() == 2);
  const auto& rec = pair->double_coset(iv({Int(5)}));
  CHECK(rec.right_reps.size() == 1);
  CHECK(rec.left_count.value == 1);
  CHECK(rec.left_count.exact);
  CHECK(pair->coset_rep(iv({Int(9)})) == pair->coset_rep(iv({Int(1)})));
}

TEST_CASE("trivial subgroup cosets are the elements themselves") {
  auto z = make_integers();
  auto pair = make_pair_context(z, trivial_subgroup(z));
  bool closed = true;
  auto cosets = pair->right_cosets_in_ball(3, &closed);
  CHECK(!closed);
  CHECK(cosets.size() == 7);  // -3 .. 3
  CHECK(pair->right_coset_count(iv({Int(4)})).value == 1);
  CHECK(pair->left_coset_count(iv({Int(4)})).value == 1);
}

TEST_CASE("affine pair over integer translations has asymmetric coset counts") {
  auto g = make_affine({Int(2), Int(3), Int(5)});
  auto pair = make_pair_context(g, integer_translation_subgroup(g));
  for (Int p : {Int(2), Int(3), Int(5)}) {
    Element scale = aff(0, Rational(p));
    Count left = pair->left_coset_count(scale);
    Count right = pair->right_coset_count(scale);
    CHECK(left.exact);
    CHECK(right.exact);
    CHECK(left.value == p);
    CHECK(right.value == 1);
    // Opposite orientation swaps the counts.
    Element inv = g->inverse(scale);
    CHECK(pair->left_coset_count(inv).value == 1);
    CHECK(pair->right_coset_count(inv).value == p);
  }
  // Conjugation by the doubling map carries n to 2n.
  Element two = aff(0, 2);
  Element m = aff(7, 1);
  CHECK(g->multiply(g->multiply(two, m), g->inverse(two)) == aff(14, 1));
}

TEST_CASE("symmetric pair over a transposition has two double cosets") {
  auto s3 = make_symmetric(3);
  Element t01 = perm({1, 0, 2});
  auto pair = make_pair_context(s3, generated_subgroup(s3, {t01}, "T"));
  bool closed = false;
  auto cosets = pair->right_cosets_in_ball(6, &closed);
  CHECK(closed);
  CHECK(cosets.size() == 3);

  Element t02 = perm({2, 1, 0});
  const auto& rec = pair->double_coset(t02);
  CHECK(rec.right_reps.size() == 2);
  CHECK(rec.left_count.value == 2);

  // All six elements fall into exactly two double cosets.
  std::set<Element, ElementLess> reps;
  auto rng = hecke::testsupport::make_rng(3);
  for (int i = 0; i < 30; ++i)
    reps.insert(pair->double_coset_rep(hecke::testsupport::random_element(*s3, rng)));
  CHECK(reps.size() == 2);
}

TEST_CASE("left and right counts swap under inversion across samples") {
  auto g = make_affine();
  auto pair = make_pair_context(g, integer_translation_subgroup(g));
  auto rng = hecke::testsupport::make_rng(17);
  for (int i = 0; i < 20; ++i) {
    Element x = hecke::testsupport::random_element(*g, rng, 4, 2);
    Count l = pair->left_coset_count(x);
    Count r_inv = pair->right_coset_count(g->inverse(x));
    REQUIRE(l.exact);
    REQUIRE(r_inv.exact);
    CHECK(l.value == r_inv.value);
  }
}

TEST_CASE("non almost-normal pairs surface budget failures") {
  auto f2 = make_free_group(2);
  auto h = cyclic_subgroup(f2, f2->generators()[0], "A");
  PairOptions opts;
  opts.coset_budget = 64;
  auto pair = make_pair_context(f2, h, opts);
  auto report = pair->almost_normal_probe(1);
  CHECK(!report.all_finite);
  CHECK(!report.failures.empty());
}

TEST_CASE("index tables list subgroup-in-subgroup cosets") {
  auto z = make_integers();
  auto two = lattice_subgroup(z, {{Int(2)}}, "2Z");
  auto four = lattice_subgroup(z, {{Int(4)}}, "4Z");
  auto table = subgroup_index_table(*z, *two, *four);
  CHECK(table.closed);
  CHECK(table.reps.size() == 2);

  auto six = lattice_subgroup(z, {{Int(6)}}, "6Z");
  auto t2 = subgroup_index_table(*z, *two, *six);
  CHECK(t2.closed);
  CHECK(t2.reps.size() == 3);

  CHECK_THROWS_AS(subgroup_index_table(*z, *four, *two), std::invalid_argument);
}
