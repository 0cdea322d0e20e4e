#include "hecke/extension.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace hecke {

namespace {

Element section_of(const ExtensionData& ext, const Element& x) { return ext.sigma(x); }

}  // namespace

ExtensionData make_extension(HomPtr projection, std::function<Element(const Element&)> sigma) {
  if (!projection) throw std::invalid_argument("extension: projection required");
  if (!sigma) throw std::invalid_argument("extension: section required");
  GroupPtr total = projection->domain_ptr();
  GroupPtr quotient = projection->codomain_ptr();
  auto wrapped = [total, quotient, sigma](const Element& x) {
    return total->canonicalize(sigma(quotient->canonicalize(x)));
  };
  Element s1 = wrapped(quotient->identity());
  if (!(s1 == total->identity()))
    throw std::invalid_argument("extension: section must send the identity to the identity, got " +
                                total->format(s1));
  std::vector<Element> probes;
  for (const auto& g : quotient->generators()) {
    probes.push_back(quotient->canonicalize(g));
    probes.push_back(quotient->inverse(g));
  }
  for (const auto& g : probes) {
    Element back = quotient->canonicalize(projection->apply(wrapped(g)));
    if (!(back == g))
      throw std::invalid_argument("extension: section is not a right inverse at " +
                                  quotient->format(g));
  }
  SubgroupPtr kernel = kernel_subgroup(projection);
  return {std::move(total), std::move(quotient), std::move(projection), std::move(kernel),
          std::move(wrapped)};
}

ExtensionData make_carrying_extension(const Int& m) {
  if (m < 2) throw std::invalid_argument("carrying extension: modulus must be at least 2");
  GroupPtr z = make_integers();
  GroupPtr q = make_cyclic(m);
  Homomorphism::Config cfg;
  cfg.domain = z;
  cfg.codomain = q;
  cfg.name = "mod-" + m.str();
  cfg.generator_images = {q->generators()[0]};
  cfg.section = [q](const Element& x) {
    Element xc = q->canonicalize(x);
    const auto& v = std::get<Element::IntVec>(xc.payload());
    return Element(Element::Payload(Element::IntVec{v.at(0)}));
  };
  cfg.kernel_generators = {Element(Element::Payload(Element::IntVec{m}))};
  HomPtr pi = make_homomorphism(std::move(cfg));
  auto sigma = [pi](const Element& x) { return pi->lift(x); };
  return make_extension(std::move(pi), std::move(sigma));
}

ExtensionData make_prime_scaling_extension(std::vector<Int> primes) {
  if (primes.empty()) throw std::invalid_argument("scaling extension: at least one factor");
  for (std::size_t i = 0; i < primes.size(); ++i) {
    if (primes[i] < 2) throw std::invalid_argument("scaling extension: factors must exceed 1");
    for (std::size_t j = i + 1; j < primes.size(); ++j)
      if (primes[i] == primes[j])
        throw std::invalid_argument("scaling extension: factors must be distinct");
  }
  GroupPtr total = make_affine(primes);
  GroupPtr quotient = make_abelian(std::vector<Int>(primes.size(), Int(0)), "exponents");
  auto factors = std::make_shared<std::vector<Int>>(std::move(primes));

  Homomorphism::Config cfg;
  cfg.domain = total;
  cfg.codomain = quotient;
  cfg.name = "scale-exponents";
  cfg.evaluate = [factors](const Element& x) {
    const auto& a = std::get<AffineCoords>(x.payload());
    Int num = numerator(a.scale);
    Int den = denominator(a.scale);
    Element::IntVec v;
    for (const auto& p : *factors) {
      Int e = 0;
      while (num % p == 0) {
        num /= p;
        ++e;
      }
      while (den % p == 0) {
        den /= p;
        --e;
      }
      v.push_back(e);
    }
    if (num != 1 || den != 1)
      throw std::domain_error("scale has a factor outside the listed primes");
    return Element(Element::Payload(std::move(v)));
  };
  cfg.section = [factors](const Element& x) {
    const auto& v = std::get<Element::IntVec>(x.payload());
    Rational scale(1);
    for (std::size_t i = 0; i < factors->size() && i < v.size(); ++i) {
      long long e = v[i].convert_to<long long>();
      for (long long j = 0; j < e; ++j) scale *= Rational((*factors)[i]);
      for (long long j = 0; j > e; --j) scale /= Rational((*factors)[i]);
    }
    return Element(Element::Payload(AffineCoords{Rational(0), scale}));
  };
  HomPtr pi = make_homomorphism(std::move(cfg));
  auto sigma = [pi](const Element& x) { return pi->lift(x); };
  return make_extension(std::move(pi), std::move(sigma));
}

CocycleTables build_cocycle(const ExtensionData& ext) {
  if (!ext.total || !ext.quotient || !ext.projection || !ext.kernel || !ext.sigma)
    throw std::invalid_argument("cocycle tables: incomplete extension data");
  ExtensionData e = ext;
  auto cocycle = [e](const Element& x1, const Element& x2) {
    const auto& t = *e.total;
    Element x12 = e.quotient->multiply(x1, x2);
    Element v = t.canonicalize(
        t.multiply(t.multiply(section_of(e, x1), section_of(e, x2)), t.inverse(section_of(e, x12))));
    if (!e.kernel->contains(v))
      throw std::logic_error("cocycle value escapes the kernel: " + t.format(v));
    return v;
  };
  auto action = [e](const Element& x, const Element& h) {
    const auto& t = *e.total;
    Element hc = t.canonicalize(h);
    if (!e.kernel->contains(hc))
      throw std::invalid_argument("action input is not a kernel element: " + t.format(hc));
    Element s = section_of(e, x);
    return t.canonicalize(t.multiply(t.multiply(s, hc), t.inverse(s)));
  };
  return {std::move(e), std::move(cocycle), std::move(action)};
}

CocycleCheck check_cocycle_relations(const CocycleTables& ct, const std::vector<Element>& gammas,
                                     const std::vector<Element>& kernel_samples) {
  CocycleCheck out;
  const auto& t = *ct.ext.total;
  const auto& q = *ct.ext.quotient;
  auto fail = [&out](std::string msg) {
    if (out.ok) {
      out.ok = false;
      out.detail = std::move(msg);
    }
  };
  for (const auto& x1 : gammas)
    for (const auto& x2 : gammas)
      for (const auto& x3 : gammas) {
        Element lhs = t.multiply(ct.cocycle(x1, x2), ct.cocycle(q.multiply(x1, x2), x3));
        Element rhs = t.multiply(ct.action(x1, ct.cocycle(x2, x3)), ct.cocycle(x1, q.multiply(x2, x3)));
        ++out.triples;
        if (!(lhs == rhs))
          fail("cocycle identity fails at (" + q.format(x1) + ", " + q.format(x2) + ", " +
               q.format(x3) + ")");
      }
  for (const auto& x1 : gammas)
    for (const auto& x2 : gammas) {
      Element f12 = ct.cocycle(x1, x2);
      Element x12 = q.multiply(x1, x2);
      for (const auto& h : kernel_samples) {
        Element lhs = ct.action(x1, ct.action(x2, h));
        Element rhs = t.multiply(t.multiply(f12, ct.action(x12, h)), t.inverse(f12));
        ++out.action_checks;
        if (!(lhs == t.canonicalize(rhs)))
          fail("conjugation identity fails at (" + q.format(x1) + ", " + q.format(x2) +
               ") on " + t.format(h));
      }
    }
  return out;
}

Element esigma_pack(const CocycleTables& ct, const Element& h, const Element& x) {
  return Element(Element::Payload(
      Element::Tuple{ct.ext.total->canonicalize(h), ct.ext.quotient->canonicalize(x)}));
}

std::pair<Element, Element> esigma_unpack(const Element& e) {
  const auto* tup = std::get_if<Element::Tuple>(&e.payload());
  if (!tup || tup->size() != 2)
    throw std::invalid_argument("expected a packed (kernel, quotient) pair");
  return {(*tup)[0], (*tup)[1]};
}

Element esigma_mul(const CocycleTables& ct, const Element& a, const Element& b) {
  auto [h1, x1] = esigma_unpack(a);
  auto [h2, x2] = esigma_unpack(b);
  const auto& t = *ct.ext.total;
  Element h = t.multiply(t.multiply(h1, ct.action(x1, h2)), ct.cocycle(x1, x2));
  return esigma_pack(ct, h, ct.ext.quotient->multiply(x1, x2));
}

Element esigma_inv(const CocycleTables& ct, const Element& a) {
  auto [h, x] = esigma_unpack(a);
  const auto& t = *ct.ext.total;
  Element xi = ct.ext.quotient->inverse(x);
  Element s = section_of(ct.ext, x);
  Element si = section_of(ct.ext, xi);
  Element hh = t.multiply(t.multiply(t.inverse(s), t.inverse(h)), t.inverse(si));
  return esigma_pack(ct, hh, xi);
}

Element esigma_to_total(const CocycleTables& ct, const Element& a) {
  auto [h, x] = esigma_unpack(a);
  const auto& t = *ct.ext.total;
  return t.canonicalize(t.multiply(h, section_of(ct.ext, x)));
}

Element esigma_from_total(const CocycleTables& ct, const Element& e) {
  const auto& t = *ct.ext.total;
  Element x = ct.ext.projection->apply(e);
  Element h = t.multiply(e, t.inverse(section_of(ct.ext, x)));
  return esigma_pack(ct, h, x);
}

namespace {

class EsigmaGroup final : public Group {
public:
  EsigmaGroup(CocycleTables ct, std::string name)
      : Group(GroupKind::extension, std::move(name)), ct_(std::move(ct)) {
    if (name_.empty()) name_ = "twisted(" + ct_.ext.total->name() + ")";
    if (ct_.ext.kernel->has_generators()) {
      for (const auto& h : ct_.ext.kernel->generators()) {
        gens_.push_back(esigma_pack(ct_, h, ct_.ext.quotient->identity()));
        gen_names_.push_back("n" + std::to_string(gen_names_.size()));
      }
    }
    std::size_t qi = 0;
    for (const auto& x : ct_.ext.quotient->generators()) {
      gens_.push_back(esigma_pack(ct_, ct_.ext.total->identity(), x));
      gen_names_.push_back("q" + std::to_string(qi++));
    }
  }

  Element identity() const override {
    return esigma_pack(ct_, ct_.ext.total->identity(), ct_.ext.quotient->identity());
  }
  Element multiply(const Element& a, const Element& b) const override {
    return esigma_mul(ct_, a, b);
  }
  Element inverse(const Element& a) const override { return esigma_inv(ct_, a); }
  Element canonicalize(const Element& a) const override {
    auto [h, x] = esigma_unpack(a);
    return esigma_pack(ct_, h, x);
  }

  void validate(const Element& a) const override {
    auto [h, x] = esigma_unpack(a);
    ct_.ext.total->validate(h);
    ct_.ext.quotient->validate(x);
    if (!ct_.ext.kernel->contains(ct_.ext.total->canonicalize(h)))
      throw std::invalid_argument(name_ + ": first component is outside the kernel: " +
                                  ct_.ext.total->format(h));
  }

  std::string format(const Element& a) const override {
    auto [h, x] = esigma_unpack(a);
    return "(" + ct_.ext.total->format(h) + ", " + ct_.ext.quotient->format(x) + ")";
  }

  std::vector<GroupPtr> children() const override {
    return {ct_.ext.total, ct_.ext.quotient};
  }

private:
  CocycleTables ct_;
};

}  // namespace

GroupPtr make_esigma_group(const CocycleTables& ct, std::string name) {
  return std::make_shared<EsigmaGroup>(ct, std::move(name));
}

IsoCheck esigma_iso_check(const CocycleTables& ct, const std::vector<Element>& kernel_samples,
                          const std::vector<Element>& quotient_samples) {
  IsoCheck out;
  const auto& t = *ct.ext.total;
  auto fail = [&out](std::string msg) {
    if (out.ok) {
      out.ok = false;
      out.detail = std::move(msg);
    }
  };
  Element packed_id = esigma_pack(ct, t.identity(), ct.ext.quotient->identity());
  ++out.checked;
  if (!(esigma_to_total(ct, packed_id) == t.identity())) fail("identity is not preserved");
  std::vector<Element> packed;
  for (const auto& h : kernel_samples)
    for (const auto& x : quotient_samples) packed.push_back(esigma_pack(ct, h, x));
  for (const auto& p : packed) {
    ++out.checked;
    if (!(esigma_from_total(ct, esigma_to_total(ct, p)) == p))
      fail("round trip fails at " + t.format(esigma_to_total(ct, p)));
    ++out.checked;
    if (!(esigma_to_total(ct, esigma_inv(ct, p)) == t.inverse(esigma_to_total(ct, p))))
      fail("inverses are not intertwined at " + t.format(esigma_to_total(ct, p)));
  }
  for (const auto& a : packed)
    for (const auto& b : packed) {
      ++out.checked;
      Element lhs = esigma_to_total(ct, esigma_mul(ct, a, b));
      Element rhs = t.multiply(esigma_to_total(ct, a), esigma_to_total(ct, b));
      if (!(lhs == rhs)) fail("products are not intertwined");
    }
  return out;
}

std::string to_string(ConsistencyVerdict v) {
  switch (v) {
    case ConsistencyVerdict::consistent: return "consistent";
    case ConsistencyVerdict::one_sided: return "one-sided";
    case ConsistencyVerdict::inconsistent: return "inconsistent";
  }
  return "unknown";
}

ConsistencyVerdict is_consistent(const CocycleTables& ct, const Subgroup& h,
                                 const std::vector<Element>& gammas) {
  if (!h.has_generators())
    throw std::invalid_argument("consistency check: subgroup generators required");
  const auto& t = *ct.ext.total;
  bool fwd = true, bwd = true;
  for (const auto& g : gammas) {
    Element s = section_of(ct.ext, g);
    Element si = t.inverse(s);
    for (const auto& x : h.generators()) {
      if (!h.contains(t.canonicalize(t.multiply(t.multiply(s, x), si)))) fwd = false;
      if (!h.contains(t.canonicalize(t.multiply(t.multiply(si, x), s)))) bwd = false;
      if (!fwd && !bwd) return ConsistencyVerdict::inconsistent;
    }
  }
  if (fwd && bwd) return ConsistencyVerdict::consistent;
  return ConsistencyVerdict::one_sided;
}

SubgroupPtr sigma_core_subgroup(const CocycleTables& ct, SubgroupPtr h,
                                const std::vector<Element>& gammas, std::string name) {
  if (!h) throw std::invalid_argument("sigma core: subgroup required");
  GroupPtr t = ct.ext.total;
  if (h->parent_ptr().get() != t.get())
    throw std::invalid_argument("sigma core: subgroup must live in the total group");
  auto sections = std::make_shared<std::vector<Element>>();
  for (const auto& g : gammas) sections->push_back(section_of(ct.ext, g));
  auto member = [t, h, sections](const Element& x) {
    Element xc = t->canonicalize(x);
    if (!h->contains(xc)) return false;
    for (const auto& s : *sections) {
      Element si = t->inverse(s);
      if (!h->contains(t->canonicalize(t->multiply(t->multiply(s, xc), si)))) return false;
      if (!h->contains(t->canonicalize(t->multiply(t->multiply(si, xc), s)))) return false;
    }
    return true;
  };
  std::vector<Element> gens;
  for (const auto& g : h->generators())
    if (member(g)) gens.push_back(t->canonicalize(g));
  Subgroup::Config cfg;
  cfg.parent = t;
  cfg.name = name.empty() ? "core(" + h->name() + ")" : std::move(name);
  cfg.member = std::move(member);
  cfg.generators = std::move(gens);
  cfg.known_finite = h->known_finite();
  return make_subgroup(std::move(cfg));
}

Element theta(const CocycleTables& ct, const Element& gamma, const Element& beta,
              const Element& g) {
  const auto& t = *ct.ext.total;
  const auto& q = *ct.ext.quotient;
  Element diff = q.multiply(gamma, q.inverse(beta));
  Element left = t.multiply(section_of(ct.ext, gamma), t.inverse(section_of(ct.ext, beta)));
  return t.canonicalize(t.multiply(t.multiply(left, g), t.inverse(section_of(ct.ext, diff))));
}

ThetaCheck theta_bijectivity_check(const CocycleTables& ct, const PairPtr& inner,
                                   const Element& gamma, const Element& beta, int radius,
                                   std::size_t budget) {
  if (!inner) throw std::invalid_argument("theta check: pair required");
  ThetaCheck out;
  bool closed = false;
  std::vector<Element> reps = inner->right_cosets_in_ball(radius, &closed, budget);
  out.ball_size = reps.size();
  out.conclusive = closed;
  std::set<Element, ElementLess> ball(reps.begin(), reps.end());
  std::set<Element, ElementLess> images;
  bool injective = true;
  bool inside = true;
  const Group& g = inner->group();
  for (const auto& r : reps) {
    Element im = inner->coset_rep(theta(ct, gamma, beta, r));
    if (!images.insert(im).second) {
      injective = false;
      if (out.detail.empty()) out.detail = "two cosets share the image " + g.format(im);
    }
    if (!ball.count(im)) {
      inside = false;
      if (out.detail.empty()) out.detail = "image coset leaves the ball at " + g.format(im);
    }
  }
  out.bijective_on_ball = injective && inside;
  if (!closed && out.detail.empty())
    out.detail = "coset ball did not close; enlarge the radius or budget";
  return out;
}

PairPtr extension_pair(const ExtensionData& ext, SubgroupPtr h, PairOptions opts) {
  if (!h) throw std::invalid_argument("extension pair: subgroup required");
  if (h->parent_ptr().get() != ext.total.get())
    throw std::invalid_argument("extension pair: subgroup must live in the total group");
  for (const auto& g : h->generators())
    if (!ext.kernel->contains(ext.total->canonicalize(g)))
      throw std::invalid_argument("extension pair: subgroup generator is outside the kernel: " +
                                  ext.total->format(g));
  return make_pair_context(ext.total, std::move(h), opts);
}

SampledCheck coset_split_check(const CocycleTables& ct, const SubgroupPtr& h,
                               const std::vector<Element>& kernel_samples,
                               const std::vector<Element>& gammas) {
  if (!h || h->parent_ptr().get() != ct.ext.total.get())
    throw std::invalid_argument("coset split check: subgroup of the total group required");
  const auto& t = *ct.ext.total;
  const auto& q = *ct.ext.quotient;
  struct Slice {
    Element g, gamma, x;
  };
  std::vector<Slice> slices;
  for (const auto& g : kernel_samples) {
    Element gc = t.canonicalize(g);
    if (!ct.ext.kernel->contains(gc))
      throw std::invalid_argument("coset split check: sample is outside the kernel: " +
                                  t.format(gc));
    for (const auto& gm : gammas) {
      Element gmc = q.canonicalize(gm);
      slices.push_back({gc, gmc, t.multiply(gc, section_of(ct.ext, gmc))});
    }
  }
  SampledCheck out;
  for (const auto& a : slices)
    for (const auto& b : slices) {
      bool same_total = h->contains(t.canonicalize(t.multiply(b.x, t.inverse(a.x))));
      bool same_pair =
          (a.gamma == b.gamma) && h->contains(t.canonicalize(t.multiply(b.g, t.inverse(a.g))));
      ++out.checked;
      if (same_total != same_pair && out.ok) {
        out.ok = false;
        out.detail = "coset split mismatch between (" + t.format(a.g) + ", " + q.format(a.gamma) +
                     ") and (" + t.format(b.g) + ", " + q.format(b.gamma) + ")";
      }
    }
  return out;
}

SampledCheck conjugation_bound_check(const CocycleTables& ct, const SubgroupPtr& h,
                                     const std::vector<Element>& kernel_samples,
                                     const std::vector<Element>& gammas, std::size_t budget) {
  if (!h || h->parent_ptr().get() != ct.ext.total.get())
    throw std::invalid_argument("conjugation bound check: subgroup of the total group required");
  const auto& t = *ct.ext.total;
  auto index_of = [&](const Element& x) -> std::size_t {
    SubgroupPtr k = intersect_subgroups(h, conjugate_subgroup(h, x));
    IndexTable tbl = subgroup_index_table(t, *h, *k, budget);
    if (!tbl.closed) return 0;  // 0 marks a budget exhaustion; indices are always >= 1
    return tbl.reps.size();
  };
  SampledCheck out;
  auto fail = [&out](std::string msg) {
    if (out.ok) {
      out.ok = false;
      out.detail = std::move(msg);
    }
  };
  for (const auto& g : kernel_samples) {
    Element gc = t.canonicalize(g);
    std::size_t base = index_of(gc);
    if (base == 0) {
      ++out.checked;
      fail("index walk exhausted the budget at " + t.format(gc));
      continue;
    }
    for (const auto& gm : gammas) {
      Element x = t.multiply(gc, section_of(ct.ext, gm));
      std::size_t bent = index_of(x);
      ++out.checked;
      if (bent == 0) {
        fail("index walk exhausted the budget at " + t.format(x));
        continue;
      }
      if (bent > base)
        fail("conjugation index bound fails at " + t.format(gc) + " with slice " +
             ct.ext.quotient->format(gm) + ": " + std::to_string(bent) + " > " +
             std::to_string(base));
    }
  }
  return out;
}

LengthFunction extension_length_prime(const ExtensionData& ext, LengthFunction quotient_len) {
  if (!ext.projection) throw std::invalid_argument("extension length: projection required");
  HomPtr pi = ext.projection;
  std::string name = "quotient-pull(" + quotient_len.name + ")";
  LengthFunction out =
      composed_length(std::move(name), std::move(quotient_len),
                      [pi](const Element& x) { return pi->apply(x); }, LengthKind::extension_prime);
  out.declared_vanishing.push_back(ext.kernel);
  return out;
}

LengthFunction max_gamma_length(const CocycleTables& ct, LengthFunction kernel_len,
                                std::size_t gamma_cap) {
  auto gammas =
      std::make_shared<std::vector<Element>>(enumerate_finite_group(*ct.ext.quotient, gamma_cap));
  GroupPtr t = ct.ext.total;
  HomPtr pi = ct.ext.projection;
  ExtensionData ext = ct.ext;
  auto base = std::make_shared<LengthFunction>(std::move(kernel_len));
  auto kernel_part = [t, pi, ext](const Element& x) {
    Element g = pi->apply(x);
    return t->multiply(x, t->inverse(section_of(ext, g)));
  };
  auto k = [t, ext, kernel_part, gammas, base](const Element& x) {
    double best = 0.0;
    for (const auto& b : *gammas)
      best = std::max(best, (*base)(kernel_part(t->multiply(section_of(ext, b), x))));
    return best;
  };
  LengthFunction out;
  out.name = "twisted-max(" + base->name + ")";
  out.kind = LengthKind::max_gamma;
  out.eval = [t, k](const Element& x) { return k(x) + k(t->inverse(x)); };
  return out;
}

}  // namespace hecke
