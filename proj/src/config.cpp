#include "hecke/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace hecke {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

bool is_identifier(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

bool parse_ll(const std::string& s, long long* out) {
  if (s.empty()) return false;
  char* end = nullptr;
  errno = 0;
  long long v = std::strtoll(s.c_str(), &end, 10);
  if (errno != 0 || end != s.c_str() + s.size()) return false;
  *out = v;
  return true;
}

bool parse_u64(const std::string& s, std::uint64_t* out) {
  if (s.empty() || s[0] == '-') return false;
  char* end = nullptr;
  errno = 0;
  unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (errno != 0 || end != s.c_str() + s.size()) return false;
  *out = v;
  return true;
}

bool parse_dbl(const std::string& s, double* out) {
  if (s.empty()) return false;
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return false;
  *out = v;
  return true;
}

/// Splits `s` on commas that sit outside any parentheses.
std::vector<std::string> split_toplevel_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

bool parse_expr_text(const std::string& raw, int line, Expr* out, std::string* error) {
  std::string s = trim(raw);
  if (s.empty()) {
    *error = "empty expression";
    return false;
  }
  std::size_t open = s.find('(');
  if (open == std::string::npos) {
    if (s.find(')') != std::string::npos) {
      *error = "unbalanced parentheses in '" + s + "'";
      return false;
    }
    out->line = line;
    out->text = s;
    out->is_call = false;
    out->args.clear();
    return true;
  }
  if (s.back() != ')') {
    *error = "expected ')' at the end of '" + s + "'";
    return false;
  }
  std::string head = trim(s.substr(0, open));
  if (!is_identifier(head)) {
    *error = "bad expression head '" + head + "'";
    return false;
  }
  int depth = 0;
  for (std::size_t i = open; i + 1 < s.size(); ++i) {
    if (s[i] == '(') ++depth;
    if (s[i] == ')') --depth;
    if (depth == 0) {
      *error = "unbalanced parentheses in '" + s + "'";
      return false;
    }
  }
  out->line = line;
  out->text = head;
  out->is_call = true;
  out->args.clear();
  std::string inner = s.substr(open + 1, s.size() - open - 2);
  if (trim(inner).empty()) {
    *error = "call '" + head + "' has no arguments";
    return false;
  }
  for (const auto& piece : split_toplevel_commas(inner)) {
    Expr arg;
    if (!parse_expr_text(piece, line, &arg, error)) return false;
    out->args.push_back(std::move(arg));
  }
  return true;
}

/// Syntax of a generator word, without knowing the group: `1`, or
/// NAME(^INT)? factors joined by `*`.
bool word_syntax_ok(const std::string& w) {
  if (trim(w) != w || w.empty()) return false;
  for (const auto& tok : split_on(w, '*')) {
    if (tok == "1") continue;
    std::string name = tok;
    std::size_t caret = tok.find('^');
    if (caret != std::string::npos) {
      name = tok.substr(0, caret);
      long long e = 0;
      if (!parse_ll(tok.substr(caret + 1), &e)) return false;
    }
    if (!is_identifier(name)) return false;
  }
  return true;
}

bool span_syntax_ok(const std::string& s) {
  auto toks = split_ws(s);
  if (toks.empty()) return false;
  for (const auto& t : toks) {
    long long v = 0;
    if (!parse_ll(t, &v)) return false;
  }
  return true;
}

struct SymbolInfo {
  DeclKind kind = DeclKind::group;
  std::string home;   // group name the object lives on
  std::string home2;  // homomorphisms: codomain group name
};

const char* kind_word(DeclKind k) {
  switch (k) {
    case DeclKind::group: return "group";
    case DeclKind::subgroup: return "subgroup";
    case DeclKind::pair: return "pair";
    case DeclKind::length: return "length";
    case DeclKind::hom: return "hom";
    case DeclKind::extension: return "extension";
    case DeclKind::transfer: return "transfer";
  }
  return "?";
}

/// Everything the validation pass needs while scanning the file once.
struct Validator {
  std::map<std::string, SymbolInfo> symbols;
  std::vector<ConfigError>* errors = nullptr;

  void fail(int line, const std::string& msg) { errors->push_back({line, msg}); }

  const SymbolInfo* resolve(int line, const std::string& name, DeclKind want) {
    auto it = symbols.find(name);
    if (it == symbols.end()) {
      fail(line, "unknown " + std::string(kind_word(want)) + " '" + name + "'");
      return nullptr;
    }
    if (it->second.kind != want) {
      fail(line, "'" + name + "' is a " + kind_word(it->second.kind) + ", expected a " +
                     kind_word(want));
      return nullptr;
    }
    return &it->second;
  }

  bool expect_args(const Expr& e, std::size_t lo, std::size_t hi) {
    if (e.args.size() >= lo && e.args.size() <= hi) return true;
    fail(e.line, "'" + e.text + "' takes " + std::to_string(lo) +
                     (hi == lo ? "" : ".." + std::to_string(hi)) + " arguments, got " +
                     std::to_string(e.args.size()));
    return false;
  }

  bool atom_int(const Expr& e, long long lo, long long* out = nullptr) {
    long long v = 0;
    if (e.is_call || !parse_ll(e.text, &v) || v < lo) {
      fail(e.line, "expected an integer >= " + std::to_string(lo) + ", got '" + e.text + "'");
      return false;
    }
    if (out) *out = v;
    return true;
  }

  bool atom_word(const Expr& e) {
    if (e.is_call || !word_syntax_ok(e.text)) {
      fail(e.line, "expected a generator word, got '" + e.text + "'");
      return false;
    }
    return true;
  }

  const SymbolInfo* atom_ref(const Expr& e, DeclKind want) {
    if (e.is_call || !is_identifier(e.text)) {
      fail(e.line, "expected a " + std::string(kind_word(want)) + " name, got '" + e.text + "'");
      return nullptr;
    }
    return resolve(e.line, e.text, want);
  }

  /// Validates a group expression (named or anonymous); returns the home
  /// string, or nullopt after reporting errors.
  std::optional<std::string> group_expr(const Expr& e, const std::string& self) {
    if (!e.is_call) {
      if (e.text == "integers") return self.empty() ? "<integers>" : self;
      const SymbolInfo* s = atom_ref(e, DeclKind::group);
      if (!s) return std::nullopt;
      return s->home;
    }
    const std::string& h = e.text;
    std::string home = self.empty() ? "<" + h + ">" : self;
    if (h == "cyclic" || h == "symmetric" || h == "free") {
      if (!expect_args(e, 1, 1) || !atom_int(e.args[0], 1)) return std::nullopt;
      return home;
    }
    if (h == "abelian") {
      if (!expect_args(e, 1, 64)) return std::nullopt;
      for (const auto& a : e.args)
        if (!atom_int(a, 0)) return std::nullopt;
      return home;
    }
    if (h == "affine") {
      if (!expect_args(e, 1, 64)) return std::nullopt;
      for (const auto& a : e.args)
        if (!atom_int(a, 2)) return std::nullopt;
      return home;
    }
    if (h == "free_product" || h == "direct_product") {
      if (!expect_args(e, 2, 64)) return std::nullopt;
      for (const auto& a : e.args)
        if (!group_expr(a, "")) return std::nullopt;
      return home;
    }
    if (h == "total_of" || h == "quotient_of") {
      if (!expect_args(e, 1, 1)) return std::nullopt;
      const SymbolInfo* s = atom_ref(e.args[0], DeclKind::extension);
      if (!s) return std::nullopt;
      return s->home + (h == "total_of" ? "#total" : "#quotient");
    }
    fail(e.line, "unknown group expression '" + h + "'");
    return std::nullopt;
  }

  std::optional<std::string> subgroup_expr(const Expr& e) {
    if (!e.is_call) {
      fail(e.line, "expected a subgroup expression, got '" + e.text + "'");
      return std::nullopt;
    }
    const std::string& h = e.text;
    auto group_home = [&](const Expr& a) -> std::optional<std::string> {
      const SymbolInfo* s = atom_ref(a, DeclKind::group);
      if (!s) return std::nullopt;
      return s->home;
    };
    if (h == "trivial" || h == "whole" || h == "integer_translations") {
      if (!expect_args(e, 1, 1)) return std::nullopt;
      return group_home(e.args[0]);
    }
    if (h == "lattice") {
      if (!expect_args(e, 2, 64)) return std::nullopt;
      auto home = group_home(e.args[0]);
      if (!home) return std::nullopt;
      for (std::size_t i = 1; i < e.args.size(); ++i)
        if (e.args[i].is_call || !span_syntax_ok(e.args[i].text)) {
          fail(e.line, "expected a span of integers, got '" + e.args[i].text + "'");
          return std::nullopt;
        }
      return home;
    }
    if (h == "generated" || h == "cyclic_generated") {
      std::size_t hi = h == "generated" ? 64 : 2;
      if (!expect_args(e, 2, hi)) return std::nullopt;
      auto home = group_home(e.args[0]);
      if (!home) return std::nullopt;
      for (std::size_t i = 1; i < e.args.size(); ++i)
        if (!atom_word(e.args[i])) return std::nullopt;
      return home;
    }
    if (h == "kernel") {
      if (!expect_args(e, 1, 1)) return std::nullopt;
      const SymbolInfo* s = atom_ref(e.args[0], DeclKind::hom);
      if (!s) return std::nullopt;
      return s->home;
    }
    if (h == "preimage" || h == "image") {
      if (!expect_args(e, 2, 2)) return std::nullopt;
      const SymbolInfo* phi = atom_ref(e.args[0], DeclKind::hom);
      const SymbolInfo* sub = atom_ref(e.args[1], DeclKind::subgroup);
      if (!phi || !sub) return std::nullopt;
      const std::string& expect = h == "preimage" ? phi->home2 : phi->home;
      if (sub->home != expect) {
        fail(e.line, "subgroup '" + e.args[1].text + "' lives on group '" + sub->home +
                         "', expected '" + expect + "'");
        return std::nullopt;
      }
      return h == "preimage" ? phi->home : phi->home2;
    }
    if (h == "conjugate") {
      if (!expect_args(e, 2, 2)) return std::nullopt;
      const SymbolInfo* sub = atom_ref(e.args[0], DeclKind::subgroup);
      if (!sub || !atom_word(e.args[1])) return std::nullopt;
      return sub->home;
    }
    if (h == "intersection") {
      if (!expect_args(e, 2, 2)) return std::nullopt;
      const SymbolInfo* a = atom_ref(e.args[0], DeclKind::subgroup);
      const SymbolInfo* b = atom_ref(e.args[1], DeclKind::subgroup);
      if (!a || !b) return std::nullopt;
      if (a->home != b->home) {
        fail(e.line, "cannot intersect subgroups of '" + a->home + "' and '" + b->home + "'");
        return std::nullopt;
      }
      return a->home;
    }
    if (h == "kernel_of") {
      if (!expect_args(e, 1, 1)) return std::nullopt;
      const SymbolInfo* s = atom_ref(e.args[0], DeclKind::extension);
      if (!s) return std::nullopt;
      return s->home + "#total";
    }
    fail(e.line, "unknown subgroup expression '" + h + "'");
    return std::nullopt;
  }

  std::optional<std::string> length_expr(const Expr& e) {
    if (!e.is_call) {
      fail(e.line, "expected a length expression, got '" + e.text + "'");
      return std::nullopt;
    }
    const std::string& h = e.text;
    if (h == "zero" || h == "word") {
      if (!expect_args(e, 1, 1)) return std::nullopt;
      const SymbolInfo* s = atom_ref(e.args[0], DeclKind::group);
      if (!s) return std::nullopt;
      return s->home;
    }
    if (h == "quotient") {
      if (!expect_args(e, 1, 1)) return std::nullopt;
      const SymbolInfo* s = atom_ref(e.args[0], DeclKind::pair);
      if (!s) return std::nullopt;
      return s->home;
    }
    if (h == "pullback") {
      if (!expect_args(e, 2, 2)) return std::nullopt;
      const SymbolInfo* phi = atom_ref(e.args[0], DeclKind::hom);
      const SymbolInfo* len = atom_ref(e.args[1], DeclKind::length);
      if (!phi || !len) return std::nullopt;
      if (len->home != phi->home2) {
        fail(e.line, "length '" + e.args[1].text + "' lives on group '" + len->home +
                         "', expected the codomain '" + phi->home2 + "'");
        return std::nullopt;
      }
      return phi->home;
    }
    if (h == "extension_prime" || h == "max_gamma") {
      if (!expect_args(e, 2, 2)) return std::nullopt;
      const SymbolInfo* ext = atom_ref(e.args[0], DeclKind::extension);
      const SymbolInfo* len = atom_ref(e.args[1], DeclKind::length);
      if (!ext || !len) return std::nullopt;
      std::string expect = ext->home + (h == "extension_prime" ? "#quotient" : "#total");
      if (len->home != expect) {
        fail(e.line, "length '" + e.args[1].text + "' lives on group '" + len->home +
                         "', expected '" + expect + "'");
        return std::nullopt;
      }
      return ext->home + "#total";
    }
    fail(e.line, "unknown length expression '" + h + "'");
    return std::nullopt;
  }

  std::optional<std::pair<std::string, std::string>> hom_expr(const Expr& e) {
    if (!e.is_call) {
      fail(e.line, "expected a homomorphism expression, got '" + e.text + "'");
      return std::nullopt;
    }
    const std::string& h = e.text;
    if (h == "generator_images") {
      if (!expect_args(e, 3, 64)) return std::nullopt;
      const SymbolInfo* dom = atom_ref(e.args[0], DeclKind::group);
      const SymbolInfo* cod = atom_ref(e.args[1], DeclKind::group);
      if (!dom || !cod) return std::nullopt;
      for (std::size_t i = 2; i < e.args.size(); ++i)
        if (!atom_word(e.args[i])) return std::nullopt;
      return std::make_pair(dom->home, cod->home);
    }
    if (h == "mod") {
      if (!expect_args(e, 2, 2)) return std::nullopt;
      const SymbolInfo* dom = atom_ref(e.args[0], DeclKind::group);
      const SymbolInfo* cod = atom_ref(e.args[1], DeclKind::group);
      if (!dom || !cod) return std::nullopt;
      return std::make_pair(dom->home, cod->home);
    }
    fail(e.line, "unknown homomorphism expression '" + h + "'");
    return std::nullopt;
  }

  bool extension_expr(const Expr& e) {
    if (!e.is_call) {
      fail(e.line, "expected an extension expression, got '" + e.text + "'");
      return false;
    }
    if (e.text == "carrying") return expect_args(e, 1, 1) && atom_int(e.args[0], 2);
    if (e.text == "prime_scaling") {
      if (!expect_args(e, 1, 64)) return false;
      for (const auto& a : e.args)
        if (!atom_int(a, 2)) return false;
      return true;
    }
    fail(e.line, "unknown extension expression '" + e.text + "'");
    return false;
  }
};

/// Per-task argument checking: key presence, value syntax, reference
/// kinds, and group agreement between references.
void validate_task(Validator& v, const TaskDecl& t) {
  auto fail = [&](const std::string& m) { v.fail(t.line, "task '" + t.kind + "': " + m); };

  static const std::map<std::string, std::vector<std::string>> allowed = {
      {"pair-info", {"pair"}},
      {"cosets", {"pair", "element"}},
      {"lr", {"pair", "element"}},
      {"convolve", {"pair", "f", "k", "mode"}},
      {"opnorm", {"pair", "f", "truncation"}},
      {"length-check", {"length", "samples", "seed"}},
      {"commensurate", {"group", "a", "b", "subgroup", "element", "budget"}},
      {"transfer-check", {"transfer", "trials", "seed"}},
      {"nearly-normal", {"pair", "radius", "max_failures", "group", "subgroup", "budget"}},
      {"extension-check", {"extension", "subgroup", "gammas", "kernel_samples", "cap", "seed"}},
      {"rd-probe",
       {"pair", "length", "radii", "trials", "seed", "truncation", "ball_budget"}},
  };
  auto it = allowed.find(t.kind);
  if (it == allowed.end()) {
    fail("unknown task kind");
    return;
  }
  std::map<std::string, std::string> seen;
  bool arg_trouble = false;
  for (const auto& [k, val] : t.args) {
    if (std::find(it->second.begin(), it->second.end(), k) == it->second.end()) {
      fail("unknown key '" + k + "'");
      arg_trouble = true;
      continue;
    }
    if (!seen.emplace(k, val).second) {
      fail("duplicate key '" + k + "'");
      arg_trouble = true;
    }
  }

  auto get = [&](const std::string& k) -> const std::string* {
    auto f = seen.find(k);
    return f == seen.end() ? nullptr : &f->second;
  };
  auto need_ref = [&](const std::string& k, DeclKind kind) -> const SymbolInfo* {
    const std::string* val = get(k);
    if (!val) {
      fail("missing required key '" + k + "'");
      return nullptr;
    }
    return v.resolve(t.line, *val, kind);
  };
  auto opt_ref = [&](const std::string& k, DeclKind kind) -> const SymbolInfo* {
    const std::string* val = get(k);
    return val ? v.resolve(t.line, *val, kind) : nullptr;
  };
  auto check_word = [&](const std::string& k, bool required) {
    const std::string* val = get(k);
    if (!val) {
      if (required) fail("missing required key '" + k + "'");
      return;
    }
    if (!word_syntax_ok(*val)) fail("key '" + k + "': bad generator word '" + *val + "'");
  };
  auto check_wordlist = [&](const std::string& k) {
    const std::string* val = get(k);
    if (!val) return;
    for (const auto& w : split_on(*val, ';'))
      if (!word_syntax_ok(w)) fail("key '" + k + "': bad generator word '" + w + "'");
  };
  auto check_uint = [&](const std::string& k, std::uint64_t lo) {
    const std::string* val = get(k);
    if (!val) return;
    std::uint64_t x = 0;
    if (!parse_u64(*val, &x) || x < lo)
      fail("key '" + k + "': expected an integer >= " + std::to_string(lo));
  };
  auto check_terms = [&](const std::string& k) {
    const std::string* val = get(k);
    if (!val) {
      fail("missing required key '" + k + "'");
      return;
    }
    for (const auto& term : split_on(*val, ',')) {
      std::size_t colon = term.rfind(':');
      if (colon == std::string::npos) {
        fail("key '" + k + "': term '" + term + "' is not word:coefficient");
        continue;
      }
      if (!word_syntax_ok(term.substr(0, colon)))
        fail("key '" + k + "': bad generator word '" + term.substr(0, colon) + "'");
      std::string c = term.substr(colon + 1);
      std::size_t slash = c.find('/');
      long long num = 0, den = 1;
      bool ok = slash == std::string::npos
                    ? parse_ll(c, &num)
                    : parse_ll(c.substr(0, slash), &num) &&
                          parse_ll(c.substr(slash + 1), &den) && den != 0;
      if (!ok) fail("key '" + k + "': bad coefficient '" + c + "'");
    }
  };

  if (arg_trouble) return;

  if (t.kind == "pair-info") {
    need_ref("pair", DeclKind::pair);
  } else if (t.kind == "cosets" || t.kind == "lr") {
    need_ref("pair", DeclKind::pair);
    check_word("element", true);
  } else if (t.kind == "convolve") {
    need_ref("pair", DeclKind::pair);
    check_terms("f");
    check_terms("k");
    if (const std::string* m = get("mode"); m && *m != "rational" && *m != "double")
      fail("key 'mode': expected rational or double");
  } else if (t.kind == "opnorm") {
    need_ref("pair", DeclKind::pair);
    check_terms("f");
    check_uint("truncation", 1);
  } else if (t.kind == "length-check") {
    need_ref("length", DeclKind::length);
    check_uint("samples", 1);
    check_uint("seed", 0);
  } else if (t.kind == "commensurate") {
    const SymbolInfo* g = need_ref("group", DeclKind::group);
    bool pairwise = get("a") != nullptr || get("b") != nullptr;
    bool pointwise = get("subgroup") != nullptr || get("element") != nullptr;
    if (pairwise == pointwise) {
      fail("give either a= and b=, or subgroup= and element=");
      return;
    }
    std::vector<const SymbolInfo*> subs;
    if (pairwise) {
      subs = {need_ref("a", DeclKind::subgroup), need_ref("b", DeclKind::subgroup)};
    } else {
      subs = {need_ref("subgroup", DeclKind::subgroup)};
      check_word("element", true);
    }
    for (const SymbolInfo* s : subs)
      if (s && g && s->home != g->home)
        fail("subgroup lives on group '" + s->home + "', not '" + g->home + "'");
    check_uint("budget", 1);
  } else if (t.kind == "transfer-check") {
    need_ref("transfer", DeclKind::transfer);
    check_uint("trials", 1);
    check_uint("seed", 0);
  } else if (t.kind == "nearly-normal") {
    bool ball_mode = get("pair") != nullptr;
    bool closure_mode = get("group") != nullptr;
    if (ball_mode == closure_mode) {
      fail("give either pair= and radius=, or group= and subgroup=");
      return;
    }
    if (ball_mode) {
      need_ref("pair", DeclKind::pair);
      if (!get("radius")) fail("missing required key 'radius'");
      check_uint("radius", 1);
      check_uint("max_failures", 1);
      if (get("subgroup") || get("budget")) fail("subgroup=/budget= belong to the closure mode");
    } else {
      const SymbolInfo* g = need_ref("group", DeclKind::group);
      const SymbolInfo* s = need_ref("subgroup", DeclKind::subgroup);
      if (g && s && s->home != g->home)
        fail("subgroup lives on group '" + s->home + "', not '" + g->home + "'");
      check_uint("budget", 1);
      if (get("radius") || get("max_failures"))
        fail("radius=/max_failures= belong to the pair mode");
    }
  } else if (t.kind == "extension-check") {
    const SymbolInfo* e = need_ref("extension", DeclKind::extension);
    if (const SymbolInfo* s = opt_ref("subgroup", DeclKind::subgroup); s && e) {
      if (s->home != e->home + "#total")
        fail("subgroup lives on group '" + s->home + "', expected '" + e->home + "#total'");
    }
    check_wordlist("gammas");
    check_wordlist("kernel_samples");
    check_uint("cap", 1);
    check_uint("seed", 0);
  } else if (t.kind == "rd-probe") {
    const SymbolInfo* p = need_ref("pair", DeclKind::pair);
    const SymbolInfo* l = need_ref("length", DeclKind::length);
    if (p && l && p->home != l->home)
      fail("length lives on group '" + l->home + "', but the pair is over '" + p->home + "'");
    const std::string* radii = get("radii");
    if (!radii) {
      fail("missing required key 'radii'");
    } else {
      auto parts = split_on(*radii, ',');
      if (parts.size() < 4) fail("key 'radii': at least four radii are required");
      for (const auto& part : parts) {
        double x = 0;
        if (!parse_dbl(part, &x) || x < 0) fail("key 'radii': bad radius '" + part + "'");
      }
    }
    check_uint("trials", 0);
    check_uint("seed", 0);
    check_uint("truncation", 1);
    check_uint("ball_budget", 1);
  }
}

}  // namespace

ParseResult parse_config(const std::string& text) {
  ParseResult result;
  ExperimentConfig cfg;
  cfg.seed = probe_seed_default();
  Validator v;
  v.errors = &result.errors;

  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    if (std::size_t hash = s.find('#'); hash != std::string::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;

    std::istringstream ls(s);
    std::string directive;
    ls >> directive;
    std::string rest = trim(s.substr(directive.size()));

    if (directive == "seed" || directive == "budget" || directive == "truncation") {
      std::uint64_t value = 0;
      if (!parse_u64(rest, &value) || (directive != "seed" && value == 0)) {
        v.fail(line, directive + ": expected a positive integer, got '" + rest + "'");
        continue;
      }
      if (directive == "seed") cfg.seed = value;
      if (directive == "budget") cfg.budget = static_cast<std::size_t>(value);
      if (directive == "truncation") cfg.truncation = static_cast<int>(value);
      continue;
    }

    if (directive == "task") {
      TaskDecl t;
      t.line = line;
      auto toks = split_ws(rest);
      if (toks.empty()) {
        v.fail(line, "task: missing kind");
        continue;
      }
      t.kind = toks[0];
      bool ok = true;
      for (std::size_t i = 1; i < toks.size(); ++i) {
        std::size_t eq = toks[i].find('=');
        if (eq == std::string::npos || eq == 0) {
          v.fail(line, "task: expected key=value, got '" + toks[i] + "'");
          ok = false;
          continue;
        }
        t.args.emplace_back(toks[i].substr(0, eq), toks[i].substr(eq + 1));
      }
      if (ok) validate_task(v, t);
      cfg.tasks.push_back(std::move(t));
      continue;
    }

    DeclKind kind;
    if (directive == "group") kind = DeclKind::group;
    else if (directive == "subgroup") kind = DeclKind::subgroup;
    else if (directive == "pair") kind = DeclKind::pair;
    else if (directive == "length") kind = DeclKind::length;
    else if (directive == "hom") kind = DeclKind::hom;
    else if (directive == "extension") kind = DeclKind::extension;
    else if (directive == "transfer") kind = DeclKind::transfer;
    else {
      v.fail(line, "unknown directive '" + directive + "'");
      continue;
    }

    std::string name;
    {
      std::istringstream rs(rest);
      rs >> name;
    }
    if (!is_identifier(name)) {
      v.fail(line, directive + ": expected a name, got '" + name + "'");
      continue;
    }
    if (v.symbols.count(name)) {
      v.fail(line, "'" + name + "' is already declared");
      continue;
    }
    std::string body = trim(rest.substr(name.size()));

    Declaration d;
    d.line = line;
    d.kind = kind;
    d.name = name;

    if (kind == DeclKind::pair || kind == DeclKind::transfer) {
      auto toks = split_ws(body);
      if (toks.size() != 2) {
        v.fail(line, directive + " '" + name + "': expected two names");
        continue;
      }
      d.body.line = line;
      d.body.is_call = true;
      d.body.text = directive;
      for (const auto& tk : toks) {
        Expr a;
        a.line = line;
        a.text = tk;
        d.body.args.push_back(std::move(a));
      }
      if (kind == DeclKind::pair) {
        const SymbolInfo* g = v.atom_ref(d.body.args[0], DeclKind::group);
        const SymbolInfo* h = v.atom_ref(d.body.args[1], DeclKind::subgroup);
        if (!g || !h) continue;
        if (h->home != g->home) {
          v.fail(line, "subgroup '" + toks[1] + "' lives on group '" + h->home + "', not '" +
                           g->home + "'");
          continue;
        }
        v.symbols[name] = {kind, g->home, toks[1]};
      } else {
        const SymbolInfo* c = v.atom_ref(d.body.args[0], DeclKind::pair);
        const SymbolInfo* f = v.atom_ref(d.body.args[1], DeclKind::pair);
        if (!c || !f) continue;
        if (c->home != f->home) {
          v.fail(line, "transfer pairs live on different groups '" + c->home + "' and '" +
                           f->home + "'");
          continue;
        }
        v.symbols[name] = {kind, c->home, ""};
      }
      cfg.declarations.push_back(std::move(d));
      continue;
    }

    std::string perr;
    if (!parse_expr_text(body, line, &d.body, &perr)) {
      v.fail(line, directive + " '" + name + "': " + perr);
      continue;
    }

    std::optional<std::string> home;
    switch (kind) {
      case DeclKind::group:
        home = v.group_expr(d.body, name);
        if (home) v.symbols[name] = {kind, *home, ""};
        break;
      case DeclKind::subgroup:
        home = v.subgroup_expr(d.body);
        if (home) v.symbols[name] = {kind, *home, ""};
        break;
      case DeclKind::length:
        home = v.length_expr(d.body);
        if (home) v.symbols[name] = {kind, *home, ""};
        break;
      case DeclKind::hom:
        if (auto homes = v.hom_expr(d.body)) {
          v.symbols[name] = {kind, homes->first, homes->second};
          home = homes->first;
        }
        break;
      case DeclKind::extension:
        if (v.extension_expr(d.body)) {
          v.symbols[name] = {kind, name, ""};
          home = name;
        }
        break;
      default:
        break;
    }
    if (!home) continue;
    cfg.declarations.push_back(std::move(d));
  }

  if (result.errors.empty()) result.config = std::move(cfg);
  return result;
}

namespace {

Int to_int(const std::string& s) { return Int(s); }

std::vector<Int> int_args(const Expr& e, std::size_t from = 0) {
  std::vector<Int> out;
  for (std::size_t i = from; i < e.args.size(); ++i) out.push_back(to_int(e.args[i].text));
  return out;
}

struct Builder {
  Environment env;

  GroupPtr group_ref(const Expr& e) {
    if (!e.is_call && e.text != "integers") return env.groups.at(e.text);
    return materialize_group(e, "");
  }

  GroupPtr materialize_group(const Expr& e, const std::string& name) {
    if (!e.is_call) {
      if (e.text == "integers") return make_integers();
      return env.groups.at(e.text);
    }
    const std::string& h = e.text;
    if (h == "cyclic") return make_cyclic(to_int(e.args[0].text));
    if (h == "symmetric")
      return make_symmetric(static_cast<std::uint32_t>(std::stoul(e.args[0].text)));
    if (h == "free") return make_free_group(std::stoul(e.args[0].text));
    if (h == "abelian") return make_abelian(int_args(e), name);
    if (h == "affine") return make_affine(int_args(e), name);
    if (h == "free_product" || h == "direct_product") {
      std::vector<GroupPtr> children;
      for (const auto& a : e.args) children.push_back(group_ref(a));
      return h == "free_product" ? make_free_product(std::move(children), name)
                                 : make_direct_product(std::move(children), name);
    }
    if (h == "total_of") return env.extensions.at(e.args[0].text).total;
    if (h == "quotient_of") return env.extensions.at(e.args[0].text).quotient;
    throw std::logic_error("unhandled group expression '" + h + "'");
  }

  SubgroupPtr materialize_subgroup(const Expr& e, const std::string& name) {
    const std::string& h = e.text;
    if (h == "trivial") return trivial_subgroup(env.groups.at(e.args[0].text));
    if (h == "whole") return whole_group_subgroup(env.groups.at(e.args[0].text));
    if (h == "integer_translations")
      return integer_translation_subgroup(env.groups.at(e.args[0].text));
    if (h == "lattice") {
      GroupPtr g = env.groups.at(e.args[0].text);
      std::vector<std::vector<Int>> spans;
      for (std::size_t i = 1; i < e.args.size(); ++i) {
        std::vector<Int> row;
        for (const auto& tok : split_ws(e.args[i].text)) row.push_back(to_int(tok));
        spans.push_back(std::move(row));
      }
      return lattice_subgroup(g, spans, name);
    }
    if (h == "generated" || h == "cyclic_generated") {
      GroupPtr g = env.groups.at(e.args[0].text);
      std::vector<Element> gens;
      for (std::size_t i = 1; i < e.args.size(); ++i)
        gens.push_back(parse_element_word(*g, e.args[i].text));
      if (h == "cyclic_generated") return cyclic_subgroup(g, gens[0], name);
      return generated_subgroup(g, std::move(gens), name);
    }
    if (h == "kernel") return kernel_subgroup(env.homs.at(e.args[0].text), name);
    if (h == "preimage")
      return preimage_subgroup(env.homs.at(e.args[0].text), env.subgroups.at(e.args[1].text),
                               name);
    if (h == "image")
      return image_subgroup(env.homs.at(e.args[0].text), env.subgroups.at(e.args[1].text), name);
    if (h == "conjugate") {
      SubgroupPtr sub = env.subgroups.at(e.args[0].text);
      return conjugate_subgroup(sub, parse_element_word(sub->parent(), e.args[1].text));
    }
    if (h == "intersection")
      return intersect_subgroups(env.subgroups.at(e.args[0].text),
                                 env.subgroups.at(e.args[1].text), name);
    if (h == "kernel_of") return env.extensions.at(e.args[0].text).kernel;
    throw std::logic_error("unhandled subgroup expression '" + h + "'");
  }

  NamedLength materialize_length(const Expr& e, const std::string& name) {
    const std::string& h = e.text;
    NamedLength out;
    if (h == "zero") {
      out.group = env.groups.at(e.args[0].text);
      out.len = zero_length();
    } else if (h == "word") {
      out.group = env.groups.at(e.args[0].text);
      out.len = word_length(out.group);
    } else if (h == "quotient") {
      PairPtr p = env.pairs.at(e.args[0].text);
      out.group = p->group_ptr();
      out.len = quotient_word_length(p);
    } else if (h == "pullback") {
      HomPtr phi = env.homs.at(e.args[0].text);
      const NamedLength& base = env.lengths.at(e.args[1].text);
      out.group = phi->domain_ptr();
      out.len = composed_length(name, base.len,
                                [phi](const Element& x) { return phi->apply(x); });
    } else if (h == "extension_prime") {
      const ExtensionData& ext = env.extensions.at(e.args[0].text);
      out.group = ext.total;
      out.len = extension_length_prime(ext, env.lengths.at(e.args[1].text).len);
    } else if (h == "max_gamma") {
      const ExtensionData& ext = env.extensions.at(e.args[0].text);
      out.group = ext.total;
      out.len = max_gamma_length(build_cocycle(ext), env.lengths.at(e.args[1].text).len);
    } else {
      throw std::logic_error("unhandled length expression '" + h + "'");
    }
    out.len.name = name;
    return out;
  }

  HomPtr materialize_hom(const Expr& e, const std::string& name) {
    if (e.text == "generator_images") {
      Homomorphism::Config cfg;
      cfg.domain = env.groups.at(e.args[0].text);
      cfg.codomain = env.groups.at(e.args[1].text);
      cfg.name = name;
      if (e.args.size() - 2 != cfg.domain->generators().size())
        throw std::invalid_argument(name + ": expected one image per domain generator (" +
                                    std::to_string(cfg.domain->generators().size()) + ")");
      for (std::size_t i = 2; i < e.args.size(); ++i)
        cfg.generator_images.push_back(parse_element_word(*cfg.codomain, e.args[i].text));
      return make_homomorphism(std::move(cfg));
    }
    if (e.text == "mod") {
      GroupPtr a = env.groups.at(e.args[0].text);
      GroupPtr b = env.groups.at(e.args[1].text);
      const auto* am = abelian_moduli(*a);
      const auto* bm = abelian_moduli(*b);
      if (!am || !bm) throw std::invalid_argument(name + ": mod requires abelian groups");
      if (am->size() != bm->size())
        throw std::invalid_argument(name + ": coordinate counts differ");
      Homomorphism::Config cfg;
      cfg.domain = a;
      cfg.codomain = b;
      cfg.name = name;
      for (std::size_t i = 0; i < am->size(); ++i) {
        const Int& ai = (*am)[i];
        const Int& bi = (*bm)[i];
        if (bi == 0) {
          if (ai != 0)
            throw std::invalid_argument(name + ": cannot map a finite coordinate onto 0");
          continue;
        }
        if (ai != 0 && ai % bi != 0)
          throw std::invalid_argument(name + ": target modulus must divide the source modulus");
        if (ai == bi) continue;
        std::vector<Int> v(am->size(), Int(0));
        v[i] = bi;
        cfg.kernel_generators.push_back(Element(Element::Payload(std::move(v))));
      }
      cfg.evaluate = [b](const Element& x) { return b->canonicalize(Element(x.payload())); };
      cfg.section = [a](const Element& y) { return a->canonicalize(Element(y.payload())); };
      return make_homomorphism(std::move(cfg));
    }
    throw std::logic_error("unhandled homomorphism expression '" + e.text + "'");
  }

  ExtensionData materialize_extension(const Expr& e) {
    if (e.text == "carrying") return make_carrying_extension(to_int(e.args[0].text));
    if (e.text == "prime_scaling") return make_prime_scaling_extension(int_args(e));
    throw std::logic_error("unhandled extension expression '" + e.text + "'");
  }
};

}  // namespace

Environment build_environment(const ExperimentConfig& cfg) {
  Builder b;
  b.env.seed = cfg.seed;
  b.env.budget = cfg.budget;
  b.env.truncation = cfg.truncation;
  for (const auto& d : cfg.declarations) {
    try {
      switch (d.kind) {
        case DeclKind::group:
          b.env.groups.emplace(d.name, b.materialize_group(d.body, d.name));
          break;
        case DeclKind::subgroup:
          b.env.subgroups.emplace(d.name, b.materialize_subgroup(d.body, d.name));
          break;
        case DeclKind::pair:
          b.env.pairs.emplace(d.name,
                              make_pair_context(b.env.groups.at(d.body.args[0].text),
                                                b.env.subgroups.at(d.body.args[1].text),
                                                PairOptions{cfg.budget}));
          break;
        case DeclKind::length:
          b.env.lengths.emplace(d.name, b.materialize_length(d.body, d.name));
          break;
        case DeclKind::hom:
          b.env.homs.emplace(d.name, b.materialize_hom(d.body, d.name));
          break;
        case DeclKind::extension:
          b.env.extensions.emplace(d.name, b.materialize_extension(d.body));
          break;
        case DeclKind::transfer:
          b.env.transfers.emplace(d.name,
                                  make_transfer(b.env.pairs.at(d.body.args[0].text),
                                                b.env.pairs.at(d.body.args[1].text), cfg.budget));
          break;
      }
    } catch (const std::exception& ex) {
      throw std::invalid_argument("line " + std::to_string(d.line) + ": declaration '" + d.name +
                                  "': " + ex.what());
    }
  }
  return b.env;
}

Element parse_element_word(const Group& g, const std::string& text) {
  Element out = g.identity();
  for (const auto& tok : split_on(text, '*')) {
    if (tok == "1") continue;
    std::string name = tok;
    long long exp = 1;
    if (std::size_t caret = tok.find('^'); caret != std::string::npos) {
      name = tok.substr(0, caret);
      if (!parse_ll(tok.substr(caret + 1), &exp))
        throw std::invalid_argument("bad exponent in '" + tok + "'");
    }
    const auto& names = g.generator_names();
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end())
      throw std::invalid_argument("unknown generator '" + name + "' in group '" + g.name() +
                                  "'");
    std::size_t idx = static_cast<std::size_t>(it - names.begin());
    out = g.multiply(out, group_pow(g, g.generators()[idx], exp));
  }
  return out;
}

std::vector<std::pair<Element, Rational>> parse_function_terms(const Group& g,
                                                               const std::string& text) {
  std::vector<std::pair<Element, Rational>> out;
  for (const auto& term : split_on(text, ',')) {
    std::size_t colon = term.rfind(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("term '" + term + "' is not word:coefficient");
    Element e = parse_element_word(g, term.substr(0, colon));
    std::string c = term.substr(colon + 1);
    Rational coeff;
    if (std::size_t slash = c.find('/'); slash != std::string::npos) {
      Int num(c.substr(0, slash));
      Int den(c.substr(slash + 1));
      if (den == 0) throw std::invalid_argument("zero denominator in '" + c + "'");
      coeff = Rational(num) / Rational(den);
    } else {
      coeff = Rational(Int(c));
    }
    out.emplace_back(std::move(e), std::move(coeff));
  }
  return out;
}

}  // namespace hecke
