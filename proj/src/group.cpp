#include "hecke/group.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace hecke {

namespace {

const Element::IntVec& get_intvec(const Element& e, const char* who) {
  if (const auto* v = std::get_if<Element::IntVec>(&e.payload())) return *v;
  throw std::invalid_argument(std::string(who) + ": expected abelian coordinates");
}

const Element::PermVec& get_permvec(const Element& e, const char* who) {
  if (const auto* v = std::get_if<Element::PermVec>(&e.payload())) return *v;
  throw std::invalid_argument(std::string(who) + ": expected a permutation payload");
}

const AffineCoords& get_affine(const Element& e, const char* who) {
  if (const auto* v = std::get_if<AffineCoords>(&e.payload())) return *v;
  throw std::invalid_argument(std::string(who) + ": expected affine coordinates");
}

const Word& get_word(const Element& e, const char* who) {
  if (const auto* v = std::get_if<Word>(&e.payload())) return *v;
  throw std::invalid_argument(std::string(who) + ": expected a free-product word");
}

const Element::Tuple& get_tuple(const Element& e, const char* who) {
  if (const auto* v = std::get_if<Element::Tuple>(&e.payload())) return *v;
  throw std::invalid_argument(std::string(who) + ": expected tuple coordinates");
}

long long to_ll(const Int& v, const char* who) {
  static const Int lo{std::numeric_limits<long long>::min() / 2};
  static const Int hi{std::numeric_limits<long long>::max() / 2};
  if (v < lo || v > hi) throw std::domain_error(std::string(who) + ": exponent out of range");
  return v.convert_to<long long>();
}

std::vector<std::string> default_gen_names(std::size_t count) {
  std::vector<std::string> names;
  names.reserve(count);
  for (std::size_t i = 0; i < count; ++i) names.push_back("g" + std::to_string(i));
  return names;
}

class AbelianGroup final : public Group {
public:
  AbelianGroup(std::vector<Int> moduli, std::string name)
      : Group(GroupKind::abelian, std::move(name)), moduli_(std::move(moduli)) {
    for (const auto& m : moduli_)
      if (m < 0) throw std::invalid_argument("abelian: negative modulus");
    if (name_.empty()) {
      std::ostringstream os;
      os << "abelian(";
      for (std::size_t i = 0; i < moduli_.size(); ++i) os << (i ? "," : "") << moduli_[i];
      os << ")";
      name_ = os.str();
    }
    for (std::size_t i = 0; i < moduli_.size(); ++i) {
      Element::IntVec v(moduli_.size(), Int(0));
      v[i] = 1;
      gens_.push_back(Element(Element::Payload(reduce(std::move(v)))));
    }
    gen_names_ = default_gen_names(gens_.size());
  }

  Element identity() const override {
    return Element(Element::Payload(Element::IntVec(moduli_.size(), Int(0))));
  }

  Element multiply(const Element& a, const Element& b) const override {
    const auto& x = get_intvec(a, "abelian");
    const auto& y = get_intvec(b, "abelian");
    check_size(x);
    check_size(y);
    Element::IntVec out(moduli_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] + y[i];
    return Element(Element::Payload(reduce(std::move(out))));
  }

  Element inverse(const Element& a) const override {
    const auto& x = get_intvec(a, "abelian");
    check_size(x);
    Element::IntVec out(moduli_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = -x[i];
    return Element(Element::Payload(reduce(std::move(out))));
  }

  Element canonicalize(const Element& a) const override {
    Element::IntVec v = get_intvec(a, "abelian");
    check_size(v);
    return Element(Element::Payload(reduce(std::move(v))));
  }

  void validate(const Element& a) const override { check_size(get_intvec(a, "abelian")); }

  std::string format(const Element& a) const override {
    const auto& x = get_intvec(a, "abelian");
    std::ostringstream os;
    if (x.size() == 1) {
      os << x[0];
    } else {
      os << "(";
      for (std::size_t i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
      os << ")";
    }
    return os.str();
  }

  std::vector<GenWord> relators() const override {
    std::vector<GenWord> rel;
    for (std::size_t i = 0; i < moduli_.size(); ++i)
      if (moduli_[i] != 0) rel.push_back({{i, to_ll(moduli_[i], "abelian relator")}});
    for (std::size_t i = 0; i < moduli_.size(); ++i)
      for (std::size_t j = i + 1; j < moduli_.size(); ++j)
        rel.push_back({{i, 1}, {j, 1}, {i, -1}, {j, -1}});
    return rel;
  }

  std::optional<GenWord> decompose(const Element& a) const override {
    const auto& x = get_intvec(a, "abelian");
    check_size(x);
    GenWord w;
    for (std::size_t i = 0; i < x.size(); ++i) {
      Int c = moduli_[i] == 0 ? x[i] : floor_mod(x[i], moduli_[i]);
      if (c != 0) w.push_back({i, to_ll(c, "abelian decompose")});
    }
    return w;
  }

  std::optional<double> native_word_length(const Element& a) const override {
    const auto& x = get_intvec(a, "abelian");
    check_size(x);
    Int total(0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (moduli_[i] == 0) {
        total += abs(x[i]);
      } else {
        Int c = floor_mod(x[i], moduli_[i]);
        Int d = moduli_[i] - c;
        total += c < d ? c : d;
      }
    }
    return total.convert_to<double>();
  }

  const std::vector<Int>& moduli() const { return moduli_; }

private:
  void check_size(const Element::IntVec& v) const {
    if (v.size() != moduli_.size())
      throw std::invalid_argument("abelian: coordinate count mismatch");
  }

  Element::IntVec reduce(Element::IntVec v) const {
    for (std::size_t i = 0; i < v.size(); ++i)
      if (moduli_[i] != 0) v[i] = floor_mod(v[i], moduli_[i]);
    return v;
  }

  std::vector<Int> moduli_;
};

class SymmetricGroup final : public Group {
public:
  explicit SymmetricGroup(std::uint32_t n)
      : Group(GroupKind::symmetric, "symmetric(" + std::to_string(n) + ")"), n_(n) {
    if (n_ < 1) throw std::invalid_argument("symmetric: n must be at least 1");
    for (std::uint32_t i = 0; i + 1 < n_; ++i) {
      Element::PermVec v(n_);
      for (std::uint32_t j = 0; j < n_; ++j) v[j] = j;
      std::swap(v[i], v[i + 1]);
      gens_.push_back(Element(Element::Payload(std::move(v))));
    }
    gen_names_ = default_gen_names(gens_.size());
  }

  Element identity() const override {
    Element::PermVec v(n_);
    for (std::uint32_t j = 0; j < n_; ++j) v[j] = j;
    return Element(Element::Payload(std::move(v)));
  }

  Element multiply(const Element& a, const Element& b) const override {
    const auto& s = get_permvec(a, "symmetric");
    const auto& t = get_permvec(b, "symmetric");
    check(s);
    check(t);
    Element::PermVec out(n_);
    for (std::uint32_t i = 0; i < n_; ++i) out[i] = s[t[i]];  // (s*t)(x) = s(t(x))
    return Element(Element::Payload(std::move(out)));
  }

  Element inverse(const Element& a) const override {
    const auto& s = get_permvec(a, "symmetric");
    check(s);
    Element::PermVec out(n_);
    for (std::uint32_t i = 0; i < n_; ++i) out[s[i]] = i;
    return Element(Element::Payload(std::move(out)));
  }

  Element canonicalize(const Element& a) const override {
    validate(a);
    return a;
  }

  void validate(const Element& a) const override { check(get_permvec(a, "symmetric")); }

  std::string format(const Element& a) const override {
    const auto& s = get_permvec(a, "symmetric");
    std::vector<bool> seen(n_, false);
    std::ostringstream os;
    bool any = false;
    for (std::uint32_t i = 0; i < n_; ++i) {
      if (seen[i] || s[i] == i) continue;
      os << "(";
      std::uint32_t j = i;
      bool first = true;
      while (!seen[j]) {
        seen[j] = true;
        os << (first ? "" : " ") << j;
        first = false;
        j = s[j];
      }
      os << ")";
      any = true;
    }
    return any ? os.str() : "()";
  }

  std::vector<GenWord> relators() const override {
    std::vector<GenWord> rel;
    const std::size_t m = gens_.size();
    for (std::size_t i = 0; i < m; ++i) rel.push_back({{i, 2}});
    for (std::size_t i = 0; i + 1 < m; ++i)
      rel.push_back({{i, 1}, {i + 1, 1}, {i, 1}, {i + 1, 1}, {i, 1}, {i + 1, 1}});
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 2; j < m; ++j) rel.push_back({{i, 1}, {j, 1}, {i, 1}, {j, 1}});
    return rel;
  }

  std::optional<GenWord> decompose(const Element& a) const override {
    Element::PermVec s = get_permvec(a, "symmetric");
    check(s);
    // Bubble sort the image list; each adjacent swap is right-multiplication by s_i.
    std::vector<std::size_t> swaps;
    bool moved = true;
    while (moved) {
      moved = false;
      for (std::uint32_t i = 0; i + 1 < n_; ++i) {
        if (s[i] > s[i + 1]) {
          std::swap(s[i], s[i + 1]);
          swaps.push_back(i);
          moved = true;
        }
      }
    }
    GenWord w;
    for (auto it = swaps.rbegin(); it != swaps.rend(); ++it) w.push_back({*it, 1});
    return w;
  }

  std::optional<double> native_word_length(const Element& a) const override {
    const auto& s = get_permvec(a, "symmetric");
    check(s);
    std::size_t inv = 0;
    for (std::uint32_t i = 0; i < n_; ++i)
      for (std::uint32_t j = i + 1; j < n_; ++j)
        if (s[i] > s[j]) ++inv;
    return static_cast<double>(inv);
  }

private:
  void check(const Element::PermVec& s) const {
    if (s.size() != n_) throw std::invalid_argument("symmetric: wrong degree");
    std::vector<bool> seen(n_, false);
    for (auto x : s) {
      if (x >= n_ || seen[x]) throw std::invalid_argument("symmetric: not a permutation");
      seen[x] = true;
    }
  }

  std::uint32_t n_;
};

class AffineGroup final : public Group {
public:
  AffineGroup(std::vector<Int> scales, std::string name)
      : Group(GroupKind::affine, std::move(name)), scales_(std::move(scales)) {
    if (name_.empty()) name_ = "affine_rationals";
    for (const auto& s : scales_)
      if (s <= 1) throw std::invalid_argument("affine: scale generators must exceed 1");
    gens_.push_back(Element(Element::Payload(AffineCoords{Rational(1), Rational(1)})));
    for (const auto& s : scales_)
      gens_.push_back(Element(Element::Payload(AffineCoords{Rational(0), Rational(s)})));
    gen_names_ = default_gen_names(gens_.size());
  }

  Element identity() const override {
    return Element(Element::Payload(AffineCoords{Rational(0), Rational(1)}));
  }

  Element multiply(const Element& a, const Element& b) const override {
    const auto& x = get_affine(a, "affine");
    const auto& y = get_affine(b, "affine");
    return Element(Element::Payload(AffineCoords{x.shift + x.scale * y.shift, x.scale * y.scale}));
  }

  Element inverse(const Element& a) const override {
    const auto& x = get_affine(a, "affine");
    return Element(Element::Payload(AffineCoords{-x.shift / x.scale, 1 / x.scale}));
  }

  Element canonicalize(const Element& a) const override {
    validate(a);
    return a;
  }

  void validate(const Element& a) const override {
    if (get_affine(a, "affine").scale <= 0)
      throw std::invalid_argument("affine: scale must be positive");
  }

  std::string format(const Element& a) const override {
    const auto& x = get_affine(a, "affine");
    std::ostringstream os;
    os << "(" << x.shift << "," << x.scale << ")";
    return os.str();
  }

  std::vector<GenWord> relators() const override {
    // (0,s)(1,1)(0,s)^-1 = (s,1): scaling conjugates the unit translation to s copies.
    std::vector<GenWord> rel;
    for (std::size_t i = 0; i < scales_.size(); ++i)
      rel.push_back({{i + 1, 1}, {0, 1}, {i + 1, -1}, {0, -to_ll(scales_[i], "affine relator")}});
    return rel;
  }

private:
  std::vector<Int> scales_;
};

class FreeProductGroup final : public Group {
public:
  FreeProductGroup(std::vector<GroupPtr> children, std::string name)
      : Group(GroupKind::free_product, std::move(name)), children_(std::move(children)) {
    if (children_.size() < 2) throw std::invalid_argument("free_product: needs two factors");
    if (name_.empty()) {
      std::ostringstream os;
      os << "free_product(";
      for (std::size_t i = 0; i < children_.size(); ++i)
        os << (i ? "," : "") << children_[i]->name();
      os << ")";
      name_ = os.str();
    }
    for (std::size_t f = 0; f < children_.size(); ++f) {
      offsets_.push_back(gens_.size());
      for (const auto& g : children_[f]->generators()) gens_.push_back(embed(f, g));
    }
    gen_names_ = default_gen_names(gens_.size());
  }

  Element identity() const override { return Element(Element::Payload(Word{})); }

  Element multiply(const Element& a, const Element& b) const override {
    const Word& x = get_word(a, "free_product");
    const Word& y = get_word(b, "free_product");
    Word out = x;
    for (std::size_t i = 0; i < y.letters.size(); ++i) push(out, y.factors[i], y.letters[i]);
    return Element(Element::Payload(std::move(out)));
  }

  Element inverse(const Element& a) const override {
    const Word& x = get_word(a, "free_product");
    Word out;
    for (std::size_t i = x.letters.size(); i-- > 0;) {
      out.factors.push_back(x.factors[i]);
      out.letters.push_back(children_[x.factors[i]]->inverse(x.letters[i]));
    }
    return Element(Element::Payload(std::move(out)));
  }

  Element canonicalize(const Element& a) const override {
    const Word& x = get_word(a, "free_product");
    Word out;
    for (std::size_t i = 0; i < x.letters.size(); ++i) {
      if (x.factors[i] >= children_.size())
        throw std::invalid_argument("free_product: factor index out of range");
      push(out, x.factors[i], children_[x.factors[i]]->canonicalize(x.letters[i]));
    }
    return Element(Element::Payload(std::move(out)));
  }

  void validate(const Element& a) const override {
    const Word& x = get_word(a, "free_product");
    for (std::size_t i = 0; i < x.letters.size(); ++i) {
      if (x.factors[i] >= children_.size())
        throw std::invalid_argument("free_product: factor index out of range");
      children_[x.factors[i]]->validate(x.letters[i]);
      if (i > 0 && x.factors[i] == x.factors[i - 1])
        throw std::invalid_argument("free_product: word is not reduced");
      if (x.letters[i] == children_[x.factors[i]]->identity())
        throw std::invalid_argument("free_product: identity letter in word");
    }
  }

  std::string format(const Element& a) const override {
    const Word& x = get_word(a, "free_product");
    if (x.letters.empty()) return "1";
    std::ostringstream os;
    for (std::size_t i = 0; i < x.letters.size(); ++i) {
      if (i) os << "*";
      format_letter(os, x.factors[i], x.letters[i]);
    }
    return os.str();
  }

  std::vector<GenWord> relators() const override {
    std::vector<GenWord> rel;
    for (std::size_t f = 0; f < children_.size(); ++f)
      for (const auto& r : children_[f]->relators()) {
        GenWord w;
        for (const auto& [i, e] : r) w.push_back({offsets_[f] + i, e});
        rel.push_back(std::move(w));
      }
    return rel;
  }

  std::optional<GenWord> decompose(const Element& a) const override {
    const Word& x = get_word(a, "free_product");
    GenWord w;
    for (std::size_t i = 0; i < x.letters.size(); ++i) {
      auto part = children_[x.factors[i]]->decompose(x.letters[i]);
      if (!part) return std::nullopt;
      for (const auto& [j, e] : *part) w.push_back({offsets_[x.factors[i]] + j, e});
    }
    return w;
  }

  std::optional<double> native_word_length(const Element& a) const override {
    const Word& x = get_word(a, "free_product");
    double total = 0;
    for (std::size_t i = 0; i < x.letters.size(); ++i) {
      auto part = children_[x.factors[i]]->native_word_length(x.letters[i]);
      if (!part) return std::nullopt;
      total += *part;
    }
    return total;
  }

  std::vector<GroupPtr> children() const override { return children_; }

  Element embed(std::size_t factor, const Element& x) const {
    Word w;
    if (!(x == children_[factor]->identity())) {
      w.factors.push_back(static_cast<std::uint32_t>(factor));
      w.letters.push_back(x);
    }
    return Element(Element::Payload(std::move(w)));
  }

private:
  // Appends a letter, merging with the trailing letter of the same factor and
  // dropping identity results; keeps the word reduced.
  void push(Word& w, std::uint32_t factor, Element letter) const {
    const Group& child = *children_[factor];
    if (letter == child.identity()) return;
    if (!w.factors.empty() && w.factors.back() == factor) {
      Element merged = child.multiply(w.letters.back(), letter);
      w.factors.pop_back();
      w.letters.pop_back();
      push(w, factor, std::move(merged));
      return;
    }
    w.factors.push_back(factor);
    w.letters.push_back(std::move(letter));
  }

  void format_letter(std::ostringstream& os, std::uint32_t f, const Element& x) const {
    const Group& child = *children_[f];
    if (child.kind() == GroupKind::abelian && child.generators().size() == 1) {
      const auto& v = std::get<Element::IntVec>(x.payload());
      os << gen_names_[offsets_[f]];
      if (v[0] != 1) os << "^" << v[0];
      return;
    }
    os << "f" << f << "[" << child.format(x) << "]";
  }

  std::vector<GroupPtr> children_;
  std::vector<std::size_t> offsets_;
};

class DirectProductGroup final : public Group {
public:
  DirectProductGroup(std::vector<GroupPtr> children, std::string name)
      : Group(GroupKind::direct_product, std::move(name)), children_(std::move(children)) {
    if (children_.empty()) throw std::invalid_argument("direct_product: needs a factor");
    if (name_.empty()) {
      std::ostringstream os;
      os << "direct(";
      for (std::size_t i = 0; i < children_.size(); ++i)
        os << (i ? "," : "") << children_[i]->name();
      os << ")";
      name_ = os.str();
    }
    for (std::size_t f = 0; f < children_.size(); ++f) {
      offsets_.push_back(gens_.size());
      for (const auto& g : children_[f]->generators()) gens_.push_back(embed(f, g));
    }
    gen_names_ = default_gen_names(gens_.size());
  }

  Element identity() const override {
    Element::Tuple t;
    for (const auto& c : children_) t.push_back(c->identity());
    return Element(Element::Payload(std::move(t)));
  }

  Element multiply(const Element& a, const Element& b) const override {
    const auto& x = check(a);
    const auto& y = check(b);
    Element::Tuple t;
    for (std::size_t i = 0; i < children_.size(); ++i)
      t.push_back(children_[i]->multiply(x[i], y[i]));
    return Element(Element::Payload(std::move(t)));
  }

  Element inverse(const Element& a) const override {
    const auto& x = check(a);
    Element::Tuple t;
    for (std::size_t i = 0; i < children_.size(); ++i) t.push_back(children_[i]->inverse(x[i]));
    return Element(Element::Payload(std::move(t)));
  }

  Element canonicalize(const Element& a) const override {
    const auto& x = check(a);
    Element::Tuple t;
    for (std::size_t i = 0; i < children_.size(); ++i)
      t.push_back(children_[i]->canonicalize(x[i]));
    return Element(Element::Payload(std::move(t)));
  }

  void validate(const Element& a) const override {
    const auto& x = check(a);
    for (std::size_t i = 0; i < children_.size(); ++i) children_[i]->validate(x[i]);
  }

  std::string format(const Element& a) const override {
    const auto& x = check(a);
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < children_.size(); ++i)
      os << (i ? "," : "") << children_[i]->format(x[i]);
    os << ")";
    return os.str();
  }

  std::vector<GenWord> relators() const override {
    std::vector<GenWord> rel;
    for (std::size_t f = 0; f < children_.size(); ++f)
      for (const auto& r : children_[f]->relators()) {
        GenWord w;
        for (const auto& [i, e] : r) w.push_back({offsets_[f] + i, e});
        rel.push_back(std::move(w));
      }
    // Generators of distinct factors commute.
    for (std::size_t f = 0; f < children_.size(); ++f)
      for (std::size_t g = f + 1; g < children_.size(); ++g)
        for (std::size_t i = 0; i < children_[f]->generators().size(); ++i)
          for (std::size_t j = 0; j < children_[g]->generators().size(); ++j)
            rel.push_back({{offsets_[f] + i, 1},
                           {offsets_[g] + j, 1},
                           {offsets_[f] + i, -1},
                           {offsets_[g] + j, -1}});
    return rel;
  }

  std::optional<GenWord> decompose(const Element& a) const override {
    const auto& x = check(a);
    GenWord w;
    for (std::size_t f = 0; f < children_.size(); ++f) {
      auto part = children_[f]->decompose(x[f]);
      if (!part) return std::nullopt;
      for (const auto& [i, e] : *part) w.push_back({offsets_[f] + i, e});
    }
    return w;
  }

  std::optional<double> native_word_length(const Element& a) const override {
    const auto& x = check(a);
    double total = 0;
    for (std::size_t f = 0; f < children_.size(); ++f) {
      auto part = children_[f]->native_word_length(x[f]);
      if (!part) return std::nullopt;
      total += *part;
    }
    return total;
  }

  std::vector<GroupPtr> children() const override { return children_; }

  Element embed(std::size_t factor, const Element& x) const {
    Element::Tuple t;
    for (std::size_t i = 0; i < children_.size(); ++i)
      t.push_back(i == factor ? x : children_[i]->identity());
    return Element(Element::Payload(std::move(t)));
  }

private:
  const Element::Tuple& check(const Element& a) const {
    const auto& x = get_tuple(a, "direct_product");
    if (x.size() != children_.size())
      throw std::invalid_argument("direct_product: arity mismatch");
    return x;
  }

  std::vector<GroupPtr> children_;
  std::vector<std::size_t> offsets_;
};

class SemidirectGroup final : public Group {
public:
  SemidirectGroup(GroupPtr n, GroupPtr q, std::vector<KernelAction> action, std::string name)
      : Group(GroupKind::semidirect, std::move(name)),
        n_(std::move(n)),
        q_(std::move(q)),
        action_(std::move(action)) {
    if (name_.empty()) name_ = "semidirect(" + n_->name() + "," + q_->name() + ")";
    if (action_.size() != q_->generators().size())
      throw std::invalid_argument("semidirect: one action per Q generator required");
    for (const auto& a : action_) inverse_action_.push_back(invert(a));
    for (const auto& g : n_->generators()) gens_.push_back(pack(g, q_->identity()));
    for (const auto& g : q_->generators()) gens_.push_back(pack(n_->identity(), g));
    gen_names_ = default_gen_names(gens_.size());
    check_action_consistency();
  }

  Element identity() const override { return pack(n_->identity(), q_->identity()); }

  Element multiply(const Element& a, const Element& b) const override {
    const auto& x = check(a);
    const auto& y = check(b);
    return pack(n_->multiply(x[0], act(x[1], y[0])), q_->multiply(x[1], y[1]));
  }

  Element inverse(const Element& a) const override {
    const auto& x = check(a);
    Element qi = q_->inverse(x[1]);
    return pack(act(qi, n_->inverse(x[0])), qi);
  }

  Element canonicalize(const Element& a) const override {
    const auto& x = check(a);
    return pack(n_->canonicalize(x[0]), q_->canonicalize(x[1]));
  }

  void validate(const Element& a) const override {
    const auto& x = check(a);
    n_->validate(x[0]);
    q_->validate(x[1]);
  }

  std::string format(const Element& a) const override {
    const auto& x = check(a);
    return "(" + n_->format(x[0]) + ";" + q_->format(x[1]) + ")";
  }

  std::vector<GenWord> relators() const override {
    std::vector<GenWord> rel;
    const std::size_t off = n_->generators().size();
    for (const auto& r : n_->relators()) rel.push_back(r);
    for (const auto& r : q_->relators()) {
      GenWord w;
      for (const auto& [i, e] : r) w.push_back({off + i, e});
      rel.push_back(std::move(w));
    }
    // q g q^-1 = action_q(g) for N generators g, when N can spell the image.
    for (std::size_t j = 0; j < q_->generators().size(); ++j)
      for (std::size_t i = 0; i < n_->generators().size(); ++i) {
        Element img = apply_one(action_[j], n_->generators()[i]);
        auto word = n_->decompose(img);
        if (!word) continue;
        GenWord w{{off + j, 1}, {i, 1}, {off + j, -1}};
        for (auto it = word->rbegin(); it != word->rend(); ++it)
          w.push_back({it->first, -it->second});
        rel.push_back(std::move(w));
      }
    return rel;
  }

  std::optional<GenWord> decompose(const Element& a) const override {
    const auto& x = check(a);
    auto nw = n_->decompose(x[0]);
    auto qw = q_->decompose(x[1]);
    if (!nw || !qw) return std::nullopt;
    GenWord w = *nw;
    const std::size_t off = n_->generators().size();
    for (const auto& [i, e] : *qw) w.push_back({off + i, e});
    return w;
  }

  std::vector<GroupPtr> children() const override { return {n_, q_}; }

  /// The automorphism of N attached to q, through Q's generator decomposition.
  Element act(const Element& q, const Element& n) const {
    auto word = q_->decompose(q);
    if (!word)
      throw std::domain_error("semidirect: Q element has no generator decomposition");
    Element out = n;
    // Leftmost generator acts last: q = g1 g2 ... => act(q) = act(g1) o act(g2) o ...
    for (auto it = word->rbegin(); it != word->rend(); ++it) {
      const auto& [i, e] = *it;
      const KernelAction& a = e > 0 ? action_[i] : inverse_action_[i];
      for (long long k = 0; k < (e > 0 ? e : -e); ++k) out = apply_one(a, out);
    }
    return out;
  }

private:
  const Element::Tuple& check(const Element& a) const {
    const auto& x = get_tuple(a, "semidirect");
    if (x.size() != 2) throw std::invalid_argument("semidirect: expected (n, q) pair");
    return x;
  }

  Element pack(Element n, Element q) const {
    Element::Tuple t;
    t.push_back(std::move(n));
    t.push_back(std::move(q));
    return Element(Element::Payload(std::move(t)));
  }

  Element apply_one(const KernelAction& a, const Element& n) const {
    if (const auto* m = std::get_if<IntMatrix>(&a)) {
      const auto& v = get_intvec(n, "semidirect action");
      return n_->canonicalize(Element(Element::Payload(m->apply(v))));
    }
    const auto& perm = std::get<std::vector<std::uint32_t>>(a);
    const Word& w = get_word(n, "semidirect action");
    Word out = w;
    for (auto& f : out.factors) {
      if (f >= perm.size())
        throw std::domain_error("semidirect: factor permutation out of range");
      f = perm[f];
    }
    return Element(Element::Payload(std::move(out)));
  }

  KernelAction invert(const KernelAction& a) const {
    if (const auto* m = std::get_if<IntMatrix>(&a)) return m->integer_inverse();
    const auto& perm = std::get<std::vector<std::uint32_t>>(a);
    std::vector<std::uint32_t> inv(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = static_cast<std::uint32_t>(i);
    return inv;
  }

  // The action must factor through Q: acting along any Q relator is the identity
  // automorphism, sampled on the N generators.
  void check_action_consistency() const {
    for (const auto& rel : q_->relators()) {
      for (const auto& g : n_->generators()) {
        Element walked = g;
        for (auto it = rel.rbegin(); it != rel.rend(); ++it) {
          const auto& [i, e] = *it;
          const KernelAction& a = e > 0 ? action_[i] : inverse_action_[i];
          for (long long k = 0; k < (e > 0 ? e : -e); ++k) walked = apply_one(a, walked);
        }
        if (!(walked == g))
          throw std::domain_error("semidirect: action does not respect a Q relator");
      }
    }
    for (std::size_t i = 0; i < action_.size(); ++i)
      for (const auto& g : n_->generators()) {
        if (!(apply_one(inverse_action_[i], apply_one(action_[i], g)) == g))
          throw std::domain_error("semidirect: action inverse mismatch");
      }
  }

  GroupPtr n_, q_;
  std::vector<KernelAction> action_;
  std::vector<KernelAction> inverse_action_;
};

}  // namespace

Element group_pow(const Group& g, const Element& x, long long e) {
  if (e < 0) return group_pow(g, g.inverse(x), -e);
  Element acc = g.identity();
  Element base = x;
  while (e > 0) {
    if (e & 1) acc = g.multiply(acc, base);
    e >>= 1;
    if (e) base = g.multiply(base, base);
  }
  return acc;
}

Element eval_gen_word(const Group& g, const GenWord& w) {
  Element acc = g.identity();
  for (const auto& [i, e] : w) {
    if (i >= g.generators().size())
      throw std::invalid_argument("eval_gen_word: generator index out of range");
    acc = g.multiply(acc, group_pow(g, g.generators()[i], e));
  }
  return acc;
}

GroupPtr make_abelian(std::vector<Int> moduli, std::string name) {
  return std::make_shared<AbelianGroup>(std::move(moduli), std::move(name));
}

GroupPtr make_integers() { return make_abelian({Int(0)}, "integers"); }

GroupPtr make_cyclic(const Int& n) {
  if (n <= 0) throw std::invalid_argument("cyclic: order must be positive");
  return make_abelian({n}, "cyclic(" + n.str() + ")");
}

GroupPtr make_symmetric(std::uint32_t n) { return std::make_shared<SymmetricGroup>(n); }

GroupPtr make_affine(std::vector<Int> scales, std::string name) {
  return std::make_shared<AffineGroup>(std::move(scales), std::move(name));
}

GroupPtr make_free_product(std::vector<GroupPtr> children, std::string name) {
  return std::make_shared<FreeProductGroup>(std::move(children), std::move(name));
}

GroupPtr make_free_group(std::size_t rank) {
  std::vector<GroupPtr> kids;
  for (std::size_t i = 0; i < rank; ++i) kids.push_back(make_integers());
  return make_free_product(std::move(kids), "free(" + std::to_string(rank) + ")");
}

GroupPtr make_direct_product(std::vector<GroupPtr> children, std::string name) {
  return std::make_shared<DirectProductGroup>(std::move(children), std::move(name));
}

GroupPtr make_semidirect(GroupPtr n, GroupPtr q, std::vector<KernelAction> action,
                         std::string name) {
  return std::make_shared<SemidirectGroup>(std::move(n), std::move(q), std::move(action),
                                           std::move(name));
}

const std::vector<Int>* abelian_moduli(const Group& g) {
  if (const auto* a = dynamic_cast<const AbelianGroup*>(&g)) return &a->moduli();
  return nullptr;
}

bool is_free_group_like(const Group& g) {
  if (g.kind() != GroupKind::free_product) return false;
  for (const auto& c : g.children()) {
    if (c->kind() != GroupKind::abelian || c->generators().size() != 1) return false;
    if (!c->relators().empty()) return false;  // torsion factor
  }
  return true;
}

namespace {

class SubgroupViewGroup final : public Group {
public:
  SubgroupViewGroup(GroupPtr parent, std::vector<Element> generators,
                    std::function<bool(const Element&)> member, std::string name)
      : Group(parent->kind(), std::move(name)),
        parent_(std::move(parent)),
        member_(std::move(member)) {
    if (name_.empty()) name_ = "subgroup-of(" + parent_->name() + ")";
    for (auto& g : generators) {
      Element c = parent_->canonicalize(g);
      if (member_ && !member_(c))
        throw std::invalid_argument(name_ + ": generator fails the membership predicate: " +
                                    parent_->format(c));
      gens_.push_back(std::move(c));
    }
    gen_names_ = default_gen_names(gens_.size());
  }

  Element identity() const override { return parent_->identity(); }
  Element multiply(const Element& a, const Element& b) const override {
    return parent_->multiply(a, b);
  }
  Element inverse(const Element& a) const override { return parent_->inverse(a); }
  Element canonicalize(const Element& a) const override { return parent_->canonicalize(a); }

  void validate(const Element& a) const override {
    parent_->validate(a);
    if (member_ && !member_(parent_->canonicalize(a)))
      throw std::invalid_argument(name_ + ": element is outside the subgroup: " +
                                  parent_->format(a));
  }

  std::string format(const Element& a) const override { return parent_->format(a); }
  std::vector<GroupPtr> children() const override { return {parent_}; }

private:
  GroupPtr parent_;
  std::function<bool(const Element&)> member_;
};

}  // namespace

GroupPtr make_subgroup_group(GroupPtr parent, std::vector<Element> generators,
                             std::function<bool(const Element&)> member, std::string name) {
  if (!parent) throw std::invalid_argument("subgroup view: parent group required");
  return std::make_shared<SubgroupViewGroup>(std::move(parent), std::move(generators),
                                             std::move(member), std::move(name));
}

std::vector<Element> enumerate_finite_group(const Group& g, std::size_t cap) {
  std::vector<Element> out;
  std::set<Element, ElementLess> seen;
  std::vector<Element> step;
  for (const auto& s : g.generators()) {
    step.push_back(s);
    step.push_back(g.inverse(s));
  }
  out.push_back(g.identity());
  seen.insert(out.back());
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (const auto& s : step) {
      Element next = g.multiply(out[i], s);
      if (!seen.insert(next).second) continue;
      out.push_back(std::move(next));
      if (out.size() > cap)
        throw std::domain_error(g.name() + ": closure exceeded the cap; group may be infinite");
    }
  }
  return out;
}

}  // namespace hecke
