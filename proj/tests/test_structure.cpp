#include <doctest.h>

#include "hecke/structure.hpp"
#include "hecke/transfer.hpp"
#include "test_support.hpp"

using namespace hecke;

namespace {

Element iv(std::vector<Int> v) { return Element(Element::Payload(std::move(v))); }

Element perm(std::vector<std::uint32_t> v) {
  return Element(Element::Payload(std::move(v)));
}

}  // namespace

TEST_CASE("conjugation closure stabilizes on small orbits") {
  auto s3 = make_symmetric(3);
  auto closed = conjugation_closed_set(*s3, {perm({1, 0, 2})});
  REQUIRE(closed.has_value());
  CHECK(closed->size() == 3);  // all transpositions are conjugate

  auto f2 = make_free_group(2);
  CHECK(!conjugation_closed_set(*f2, {f2->generators()[0]}, 100).has_value());
}

TEST_CASE("normal and abelian subgroups have closure index one") {
  auto z2 = make_abelian({Int(0), Int(0)});
  auto v = nearly_normal_check(z2, lattice_subgroup(z2, {{Int(2), Int(0)}}, "L"));
  REQUIRE(v.decided);
  CHECK(v.value == 1);

  auto s4 = make_symmetric(4);
  auto klein = generated_subgroup(
      s4, {perm({1, 0, 3, 2}), perm({2, 3, 0, 1})}, "V");
  auto w = nearly_normal_check(s4, klein);
  REQUIRE(w.decided);
  CHECK(w.value == 1);
}

TEST_CASE("a transposition in the symmetric group is not normal") {
  auto s3 = make_symmetric(3);
  auto h = generated_subgroup(s3, {perm({1, 0, 2})}, "T");
  auto v = nearly_normal_check(s3, h);
  REQUIRE(v.decided);
  // The normal closure of a transposition is all of S3, so |S3 : H| = 3.
  CHECK(v.value == 3);
}

TEST_CASE("derived subgroups are certified finite or left undecided") {
  auto z2 = make_abelian({Int(0), Int(0)});
  auto a = fd_group_check(z2);
  REQUIRE(a.decided);
  CHECK(a.value == 1);

  auto s3 = make_symmetric(3);
  auto b = fd_group_check(s3);
  REQUIRE(b.decided);
  CHECK(b.value == 3);

  auto s4 = make_symmetric(4);
  auto c = fd_group_check(s4);
  REQUIRE(c.decided);
  CHECK(c.value == 12);

  auto w = make_free_product({make_cyclic(Int(2)), make_cyclic(Int(2))});
  CHECK(!fd_group_check(w, 500).decided);
}

TEST_CASE("the preimage of the diagonal in the two-reflection product") {
  auto c2 = make_cyclic(Int(2));
  auto setup = preimage_pair_builder(c2, c2, [](GroupPtr dp) {
    Element diag = dp->multiply(dp->generators().at(0), dp->generators().at(1));
    return generated_subgroup(dp, {diag}, "K");
  });
  const Group& w = *setup.free_product;
  Element a = w.generators().at(0);
  Element b = w.generators().at(1);
  Element ab = w.multiply(a, b);
  Element abab = w.multiply(ab, ab);

  CHECK(setup.commutator_kernel->contains(abab));
  CHECK(!setup.commutator_kernel->contains(ab));
  CHECK(setup.preimage->contains(ab));
  CHECK(setup.preimage->contains(abab));
  CHECK(!setup.preimage->contains(a));
  setup.projection->self_check(
      {w.identity(), a, b, ab, abab},
      {setup.direct_product->identity(), setup.direct_product->generators()[0]});

  // |preimage : kernel| equals |K|.
  auto t = make_transfer(setup.pair,
                         make_pair_context(setup.free_product, setup.commutator_kernel));
  CHECK(t.index() == 2);

  // The preimage subgroup itself sits at index |A x B : K| = 2 in the group.
  auto table = subgroup_index_table(w, *whole_group_subgroup(setup.free_product),
                                    *setup.preimage);
  CHECK(table.closed);
  CHECK(table.reps.size() == 2);
}
