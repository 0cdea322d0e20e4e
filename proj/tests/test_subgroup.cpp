#include <doctest.h>

#include "hecke/subgroup.hpp"
#include "test_support.hpp"

using namespace hecke;

namespace {

Element iv(std::vector<Int> v) { return Element(Element::Payload(std::move(v))); }

Element aff(Rational shift, Rational scale) {
  return Element(Element::Payload(AffineCoords{std::move(shift), std::move(scale)}));
}

}  // namespace

TEST_CASE("lattice subgroups of abelian parents") {
  auto z2 = make_abelian({Int(0), Int(0)}, "Z^2");
  auto even = lattice_subgroup(z2, {{Int(2), Int(0)}, {Int(1), Int(1)}}, "even_sum");
  CHECK(even->contains(iv({Int(3), Int(5)})));
  CHECK(!even->contains(iv({Int(3), Int(4)})));
  CHECK(even->coset_key(iv({Int(1), Int(0)})) == even->coset_key(iv({Int(0), Int(1)})));
  CHECK(even->coset_key(iv({Int(1), Int(0)})) != even->coset_key(iv({Int(0), Int(2)})));

  auto z = make_integers();
  auto two = lattice_subgroup(z, {{Int(2)}}, "2Z");
  CHECK(two->contains(iv({Int(-8)})));
  CHECK(!two->contains(iv({Int(5)})));
  CHECK(two->same_right_coset(iv({Int(3)}), iv({Int(7)})));
  CHECK(!two->same_right_coset(iv({Int(3)}), iv({Int(6)})));
}

TEST_CASE("integer translations inside the affine group") {
  auto g = make_affine();
  auto h = integer_translation_subgroup(g);
  CHECK(h->contains(aff(5, 1)));
  CHECK(h->contains(aff(-3, 1)));
  CHECK(!h->contains(aff(Rational(1, 2), 1)));
  CHECK(!h->contains(aff(0, 2)));
  CHECK(h->same_right_coset(aff(0, 2), aff(1, 2)));
  CHECK(!h->same_right_coset(aff(0, 2), aff(Rational(1, 2), 2)));
  CHECK(!h->same_right_coset(aff(0, 2), aff(0, 3)));
}

TEST_CASE("finite generated subgroups enumerate their closure") {
  auto s3 = make_symmetric(3);
  Element t01(Element::Payload(Element::PermVec{1, 0, 2}));
  Element t02(Element::Payload(Element::PermVec{2, 1, 0}));
  auto h = generated_subgroup(s3, {t01});
  CHECK(h->contains(t01));
  CHECK(h->contains(s3->identity()));
  CHECK(!h->contains(t02));
  CHECK(h->known_finite());
  CHECK_THROWS_AS(generated_subgroup(make_integers(), {iv({Int(1)})}, "", 50),
                  std::domain_error);
}

TEST_CASE("cyclic subgroup membership in abelian groups") {
  auto z2 = make_abelian({Int(0), Int(0)}, "Z^2");
  auto h = cyclic_subgroup(z2, iv({Int(2), Int(4)}));
  CHECK(h->contains(iv({Int(-4), Int(-8)})));
  CHECK(h->contains(iv({Int(0), Int(0)})));
  CHECK(!h->contains(iv({Int(3), Int(6)})));
  CHECK(!h->contains(iv({Int(2), Int(5)})));

  auto c6 = make_cyclic(Int(6));
  auto k = cyclic_subgroup(c6, iv({Int(2)}));
  CHECK(k->contains(iv({Int(4)})));
  CHECK(!k->contains(iv({Int(3)})));

  auto mixed = make_abelian({Int(0), Int(6)}, "ZxZ6");
  auto m = cyclic_subgroup(mixed, iv({Int(2), Int(1)}));
  CHECK(m->contains(iv({Int(4), Int(2)})));
  CHECK(!m->contains(iv({Int(4), Int(5)})));
  CHECK(!m->contains(iv({Int(0), Int(3)})));
  CHECK(m->contains(iv({Int(-2), Int(5)})));  // k = -1: (-2, -1 mod 6)
}

TEST_CASE("cyclic subgroup membership in free products") {
  auto g = make_free_product({make_cyclic(Int(2)), make_cyclic(Int(2))});
  const auto& a = g->generators()[0];
  const auto& b = g->generators()[1];
  Element ab = g->multiply(a, b);
  auto r = cyclic_subgroup(g, g->multiply(ab, ab), "R");  // <abab>
  CHECK(r->contains(group_pow(*g, ab, 4)));
  CHECK(r->contains(group_pow(*g, ab, -6)));
  CHECK(!r->contains(group_pow(*g, ab, 3)));
  CHECK(!r->contains(a));
  CHECK(!r->contains(ab));

  auto full = cyclic_subgroup(g, ab, "T");  // <ab>, index 2
  CHECK(full->contains(group_pow(*g, ab, -3)));
  CHECK(full->contains(g->multiply(b, a)));
  CHECK(!full->contains(a));

  auto f2 = make_free_group(2);
  const auto& x = f2->generators()[0];
  const auto& y = f2->generators()[1];
  Element conj = f2->multiply(f2->multiply(x, y), f2->inverse(x));  // x y x^-1
  auto c = cyclic_subgroup(f2, conj);
  CHECK(c->contains(f2->multiply(f2->multiply(x, group_pow(*f2, y, 7)), f2->inverse(x))));
  CHECK(!c->contains(y));
  CHECK(!c->contains(x));
}

TEST_CASE("cyclic subgroup membership in the affine group") {
  auto g = make_affine();
  auto h = cyclic_subgroup(g, aff(0, 2));
  CHECK(h->contains(aff(0, 8)));
  CHECK(h->contains(aff(0, Rational(1, 4))));
  CHECK(!h->contains(aff(0, 3)));
  CHECK(!h->contains(aff(1, 2)));
  auto t = cyclic_subgroup(g, aff(3, 1));
  CHECK(t->contains(aff(-9, 1)));
  CHECK(!t->contains(aff(2, 1)));
  CHECK(!t->contains(aff(3, 2)));
}

TEST_CASE("conjugate subgroups relocate membership") {
  auto f2 = make_free_group(2);
  const auto& a = f2->generators()[0];
  const auto& b = f2->generators()[1];
  auto h = cyclic_subgroup(f2, a);
  auto hb = conjugate_subgroup(h, b);
  CHECK(hb->contains(f2->multiply(f2->multiply(b, group_pow(*f2, a, 3)), f2->inverse(b))));
  CHECK(!hb->contains(a));
}

TEST_CASE("intersections combine membership and coset keys") {
  auto z = make_integers();
  auto two = lattice_subgroup(z, {{Int(2)}}, "2Z");
  auto three = lattice_subgroup(z, {{Int(3)}}, "3Z");
  auto six = intersect_subgroups(two, three);
  CHECK(six->contains(iv({Int(6)})));
  CHECK(six->contains(iv({Int(-12)})));
  CHECK(!six->contains(iv({Int(2)})));
  CHECK(!six->contains(iv({Int(3)})));
  CHECK(six->has_coset_key());
  CHECK(six->same_right_coset(iv({Int(1)}), iv({Int(7)})));
  CHECK(!six->same_right_coset(iv({Int(1)}), iv({Int(3)})));
}

TEST_CASE("product subgroups act componentwise") {
  auto z = make_integers();
  auto g = make_direct_product({z, z});
  auto h = product_subgroup(g, {lattice_subgroup(z, {{Int(2)}}), lattice_subgroup(z, {{Int(3)}})});
  Element::Tuple t;
  t.push_back(iv({Int(4)}));
  t.push_back(iv({Int(9)}));
  CHECK(h->contains(Element(Element::Payload(t))));
  t[1] = iv({Int(8)});
  CHECK(!h->contains(Element(Element::Payload(t))));
  CHECK(h->has_coset_key());
}
