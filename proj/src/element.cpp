#include "hecke/element.hpp"

namespace hecke {

namespace {

int cmp_int(const Int& a, const Int& b) { return a < b ? -1 : (b < a ? 1 : 0); }

int cmp_rational(const Rational& a, const Rational& b) { return a < b ? -1 : (b < a ? 1 : 0); }

int cmp_intvec(const Element::IntVec& a, const Element::IntVec& b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  Int wa(0), wb(0);
  for (const auto& x : a) wa += abs(x);
  for (const auto& x : b) wb += abs(x);
  if (int c = cmp_int(wa, wb)) return c;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (int c = cmp_int(a[i], b[i])) return c;
  return 0;
}

int cmp_permvec(const Element::PermVec& a, const Element::PermVec& b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
  return 0;
}

}  // namespace

int element_cmp(const Element& a, const Element& b) {
  const auto& pa = a.payload();
  const auto& pb = b.payload();
  if (pa.index() != pb.index()) return pa.index() < pb.index() ? -1 : 1;
  switch (pa.index()) {
    case 0:
      return cmp_intvec(std::get<Element::IntVec>(pa), std::get<Element::IntVec>(pb));
    case 1:
      return cmp_permvec(std::get<Element::PermVec>(pa), std::get<Element::PermVec>(pb));
    case 2: {
      const auto& x = std::get<AffineCoords>(pa);
      const auto& y = std::get<AffineCoords>(pb);
      if (int c = cmp_rational(x.scale, y.scale)) return c;
      return cmp_rational(x.shift, y.shift);
    }
    case 3: {
      const auto& x = std::get<Element::Tuple>(pa);
      const auto& y = std::get<Element::Tuple>(pb);
      if (x.size() != y.size()) return x.size() < y.size() ? -1 : 1;
      for (std::size_t i = 0; i < x.size(); ++i)
        if (int c = element_cmp(x[i], y[i])) return c;
      return 0;
    }
    default: {
      const auto& x = std::get<Word>(pa);
      const auto& y = std::get<Word>(pb);
      if (x.letters.size() != y.letters.size())
        return x.letters.size() < y.letters.size() ? -1 : 1;
      for (std::size_t i = 0; i < x.letters.size(); ++i) {
        if (x.factors[i] != y.factors[i]) return x.factors[i] < y.factors[i] ? -1 : 1;
        if (int c = element_cmp(x.letters[i], y.letters[i])) return c;
      }
      return 0;
    }
  }
}

std::size_t element_hash(const Element& e) {
  std::size_t seed = e.payload().index();
  switch (e.payload().index()) {
    case 0:
      for (const auto& x : std::get<Element::IntVec>(e.payload())) hash_mix(seed, hash_int(x));
      break;
    case 1:
      for (auto x : std::get<Element::PermVec>(e.payload()))
        hash_mix(seed, std::hash<std::uint32_t>{}(x));
      break;
    case 2: {
      const auto& a = std::get<AffineCoords>(e.payload());
      hash_mix(seed, hash_rational(a.shift));
      hash_mix(seed, hash_rational(a.scale));
      break;
    }
    case 3:
      for (const auto& x : std::get<Element::Tuple>(e.payload())) hash_mix(seed, element_hash(x));
      break;
    default: {
      const auto& w = std::get<Word>(e.payload());
      for (std::size_t i = 0; i < w.letters.size(); ++i) {
        hash_mix(seed, w.factors[i]);
        hash_mix(seed, element_hash(w.letters[i]));
      }
      break;
    }
  }
  return seed;
}

}  // namespace hecke
