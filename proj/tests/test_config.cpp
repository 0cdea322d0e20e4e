#include <doctest.h>

#include "hecke/config.hpp"

#include <algorithm>
#include <cstdlib>

using namespace hecke;

namespace {

/// Joins the error messages so a test failure shows everything at once.
std::string all_errors(const ParseResult& r) {
  std::string out;
  for (const auto& e : r.errors) out += std::to_string(e.line) + ": " + e.message + "\n";
  return out;
}

bool has_error(const ParseResult& r, int line, const std::string& fragment) {
  return std::any_of(r.errors.begin(), r.errors.end(), [&](const ConfigError& e) {
    return e.line == line && e.message.find(fragment) != std::string::npos;
  });
}

}  // namespace

TEST_CASE("minimal config parses into settings, declarations, and tasks") {
  ParseResult r = parse_config(
      "# integers over the even lattice\n"
      "seed 7\n"
      "budget 5000\n"
      "truncation 40\n"
      "\n"
      "group Z integers\n"
      "subgroup H lattice(Z, 2)\n"
      "pair p Z H\n"
      "task cosets pair=p element=g0\n");
  INFO(all_errors(r));
  REQUIRE(r.errors.empty());
  REQUIRE(r.config.has_value());
  const ExperimentConfig& cfg = *r.config;
  CHECK(cfg.seed == 7);
  CHECK(cfg.budget == 5000);
  CHECK(cfg.truncation == 40);
  REQUIRE(cfg.declarations.size() == 3);
  CHECK(cfg.declarations[0].kind == DeclKind::group);
  CHECK(cfg.declarations[0].name == "Z");
  CHECK(cfg.declarations[2].kind == DeclKind::pair);
  REQUIRE(cfg.tasks.size() == 1);
  CHECK(cfg.tasks[0].kind == "cosets");
  REQUIRE(cfg.tasks[0].find("element") != nullptr);
  CHECK(*cfg.tasks[0].find("element") == "g0");
  CHECK(cfg.tasks[0].find("missing") == nullptr);
}

TEST_CASE("a dangling reference is reported once, naming the identifier and line") {
  ParseResult r = parse_config(
      "group Z integers\n"
      "pair p Z H\n");
  CHECK(!r.config.has_value());
  REQUIRE(r.errors.size() == 1);
  CHECK(r.errors[0].line == 2);
  CHECK(r.errors[0].message.find("H") != std::string::npos);
  CHECK(r.errors[0].message.find("unknown subgroup") != std::string::npos);
}

TEST_CASE("every error is collected with its line number") {
  ParseResult r = parse_config(
      "group Z integers\n"
      "subgroup H lattice(Z, 2)\n"
      "subgroup H lattice(Z, 4)\n"   // duplicate name
      "pair p Z K\n"                 // unknown subgroup
      "length l word(H)\n"           // H is a subgroup, not a group
      "task cosets pair=q\n"         // unknown pair, missing element
      "task frobnicate x=1\n"        // unknown kind
      "wibble Z 3\n");               // unknown directive
  CHECK(!r.config.has_value());
  CHECK(has_error(r, 3, "already declared"));
  CHECK(has_error(r, 4, "unknown subgroup 'K'"));
  CHECK(has_error(r, 5, "is a subgroup, expected a group"));
  CHECK(has_error(r, 6, "unknown pair 'q'"));
  CHECK(has_error(r, 6, "missing required key 'element'"));
  CHECK(has_error(r, 7, "unknown task kind"));
  CHECK(has_error(r, 8, "unknown directive"));
  CHECK(r.errors.size() == 7);
}

TEST_CASE("forward references are rejected") {
  ParseResult r = parse_config(
      "pair p Z H\n"
      "group Z integers\n"
      "subgroup H lattice(Z, 2)\n");
  CHECK(!r.config.has_value());
  CHECK(has_error(r, 1, "unknown group 'Z'"));
}

TEST_CASE("group membership of references is tracked across constructions") {
  // The subgroup lives on A but the pair names group B.
  ParseResult r = parse_config(
      "group A integers\n"
      "group B integers\n"
      "subgroup H lattice(A, 2)\n"
      "pair p B H\n");
  CHECK(!r.config.has_value());
  CHECK(has_error(r, 4, "lives on group 'A'"));

  // Pulling back a length along a map whose codomain is a different group.
  r = parse_config(
      "group A abelian(6)\n"
      "group B abelian(3)\n"
      "group C abelian(2)\n"
      "hom f mod(A, B)\n"
      "length lc word(C)\n"
      "length bad pullback(f, lc)\n");
  CHECK(!r.config.has_value());
  CHECK(has_error(r, 6, "expected the codomain 'B'"));

  // Intersections require a common parent.
  r = parse_config(
      "group A integers\n"
      "group B integers\n"
      "subgroup H lattice(A, 2)\n"
      "subgroup K lattice(B, 3)\n"
      "subgroup M intersection(H, K)\n");
  CHECK(!r.config.has_value());
  CHECK(has_error(r, 5, "cannot intersect"));
}

TEST_CASE("task argument validation catches bad words, numbers, and modes") {
  ParseResult r = parse_config(
      "group Z integers\n"
      "subgroup H lattice(Z, 2)\n"
      "pair p Z H\n"
      "length l word(Z)\n"
      "task cosets pair=p element=g0**g1\n"
      "task convolve pair=p f=g0:1 k=g0:x\n"
      "task convolve pair=p f=g0:1 k=g0:1 mode=fast\n"
      "task opnorm pair=p f=g0 truncation=0\n"
      "task rd-probe pair=p length=l radii=1,2\n"
      "task rd-probe pair=p length=l radii=1,2,-3,4\n"
      "task cosets pair=p element=g0 element=g1\n"
      "task cosets pair=p element=g0 flavor=red\n");
  CHECK(!r.config.has_value());
  CHECK(has_error(r, 5, "bad generator word"));
  CHECK(has_error(r, 6, "bad coefficient 'x'"));
  CHECK(has_error(r, 7, "expected rational or double"));
  CHECK(has_error(r, 8, "is not word:coefficient"));
  CHECK(has_error(r, 8, "expected an integer >= 1"));
  CHECK(has_error(r, 9, "at least four radii"));
  CHECK(has_error(r, 10, "bad radius '-3'"));
  CHECK(has_error(r, 11, "duplicate key 'element'"));
  CHECK(has_error(r, 12, "unknown key 'flavor'"));
}

TEST_CASE("commensurate and nearly-normal enforce their two argument modes") {
  ParseResult r = parse_config(
      "group Z integers\n"
      "subgroup H lattice(Z, 2)\n"
      "subgroup K lattice(Z, 3)\n"
      "pair p Z H\n"
      "task commensurate group=Z a=H\n"
      "task commensurate group=Z a=H b=K subgroup=H element=g0\n"
      "task commensurate group=Z subgroup=H element=g0\n"
      "task nearly-normal pair=p group=Z subgroup=H radius=3\n"
      "task nearly-normal pair=p radius=3 budget=100\n"
      "task nearly-normal group=Z subgroup=H\n");
  CHECK(has_error(r, 5, "missing required key 'b'"));
  CHECK(has_error(r, 6, "either a= and b=, or subgroup= and element="));
  CHECK(has_error(r, 8, "either pair= and radius=, or group= and subgroup="));
  CHECK(has_error(r, 9, "belong to the closure mode"));
  // Lines 7 and 10 are well-formed; only the four bad lines error.
  CHECK(r.errors.size() == 4);
}

TEST_CASE("expression syntax errors carry the offending text") {
  ParseResult r = parse_config(
      "group A cyclic(\n"
      "group B cyclic 4)\n"
      "group C unknown_family(2)\n"
      "subgroup S trivial\n"
      "group D cyclic(0)\n");
  CHECK(has_error(r, 1, "expected ')' at the end"));
  CHECK(has_error(r, 2, "unbalanced parentheses"));
  CHECK(has_error(r, 3, "unknown group expression"));
  CHECK(has_error(r, 4, "expected a subgroup expression"));
  CHECK(has_error(r, 5, "expected an integer >= 1"));
}

TEST_CASE("settings reject malformed values") {
  ParseResult r = parse_config(
      "seed banana\n"
      "budget 0\n"
      "truncation -3\n");
  CHECK(has_error(r, 1, "seed"));
  CHECK(has_error(r, 2, "budget"));
  CHECK(has_error(r, 3, "truncation"));
}

TEST_CASE("empty task list is a valid config") {
  ParseResult r = parse_config("group Z integers\n");
  REQUIRE(r.config.has_value());
  CHECK(r.config->tasks.empty());
  CHECK(r.config->seed == probe_seed_default());
}

TEST_CASE("build_environment materializes the declared objects") {
  ParseResult r = parse_config(
      "budget 20000\n"
      "group Z integers\n"
      "subgroup H lattice(Z, 2)\n"
      "subgroup K lattice(Z, 4)\n"
      "pair coarse Z H\n"
      "pair fine Z K\n"
      "transfer t coarse fine\n"
      "length quot quotient(coarse)\n"
      "group C6 abelian(6)\n"
      "group C3 abelian(3)\n"
      "hom red mod(C6, C3)\n"
      "subgroup ker kernel(red)\n"
      "extension carry carrying(3)\n"
      "group tot total_of(carry)\n"
      "group cq quotient_of(carry)\n"
      "subgroup tker kernel_of(carry)\n"
      "length tlen word(cq)\n"
      "length prime extension_prime(carry, tlen)\n");
  INFO(all_errors(r));
  REQUIRE(r.config.has_value());
  Environment env = build_environment(*r.config);
  CHECK(env.budget == 20000);
  CHECK(env.groups.count("Z") == 1);
  CHECK(env.pairs.count("coarse") == 1);
  CHECK(env.transfers.at("t").index() == 2);

  // Quotient weight on (Z, 2Z): distance in Z/2 doubled back through the pair.
  const NamedLength& quot = env.lengths.at("quot");
  CHECK(quot.len.name == "quot");
  CHECK(quot.len.eval(parse_element_word(*env.groups.at("Z"), "g0^3")) > 0.0);
  CHECK(quot.len.eval(parse_element_word(*env.groups.at("Z"), "g0^2")) == 0.0);

  // mod hom: 4 mod 6 -> 1 mod 3, kernel is 3Z/6Z.
  const HomPtr& red = env.homs.at("red");
  Element four = parse_element_word(red->domain(), "g0^4");
  Element img = red->apply(four);
  CHECK(img == parse_element_word(red->codomain(), "g0"));
  CHECK(env.subgroups.at("ker")->contains(parse_element_word(red->domain(), "g0^3")));
  CHECK(!env.subgroups.at("ker")->contains(four));

  // Extension pieces resolve to the same underlying groups.
  CHECK(env.groups.at("tot") == env.extensions.at("carry").total);
  CHECK(env.subgroups.at("tker") == env.extensions.at("carry").kernel);
  CHECK(env.lengths.at("prime").group == env.extensions.at("carry").total);
}

TEST_CASE("showcase layout: scaling pair over the rational affine group") {
  ParseResult r = parse_config(
      "group Q affine(2, 3)\n"
      "subgroup ZT integer_translations(Q)\n"
      "pair bc Q ZT\n"
      "task pair-info pair=bc\n"
      "task lr pair=bc element=g1\n");
  INFO(all_errors(r));
  REQUIRE(r.config.has_value());
  Environment env = build_environment(*r.config);
  const PairPtr& bc = env.pairs.at("bc");
  // g1 scales by 2: two right cosets of translations inside the double coset.
  Element scale2 = parse_element_word(*env.groups.at("Q"), "g1");
  CHECK(bc->left_coset_count(scale2).value == 2);
  CHECK(bc->right_coset_count(scale2).value == 1);
}

TEST_CASE("build_environment failures name the declaration") {
  ParseResult r = parse_config(
      "group Z integers\n"
      "subgroup H generated(Z, g5)\n");
  REQUIRE(r.config.has_value());  // g5 is valid word syntax; binding is a build-time fact
  try {
    build_environment(*r.config);
    FAIL("expected a build failure");
  } catch (const std::invalid_argument& ex) {
    std::string msg = ex.what();
    CHECK(msg.find("'H'") != std::string::npos);
    CHECK(msg.find("line 2") != std::string::npos);
    CHECK(msg.find("g5") != std::string::npos);
  }

  // mod with incompatible moduli fails at build time with the declaration named.
  r = parse_config(
      "group A abelian(6)\n"
      "group B abelian(4)\n"
      "hom f mod(A, B)\n");
  REQUIRE(r.config.has_value());
  CHECK_THROWS_WITH_AS(build_environment(*r.config),
                       doctest::Contains("target modulus must divide"), std::invalid_argument);
}

TEST_CASE("nested group expressions build anonymous children") {
  ParseResult r = parse_config(
      "group D free_product(cyclic(2), cyclic(2))\n"
      "subgroup T trivial(D)\n"
      "pair p D T\n"
      "length l word(D)\n"
      "task rd-probe pair=p length=l radii=1,2,3,4\n");
  INFO(all_errors(r));
  REQUIRE(r.config.has_value());
  Environment env = build_environment(*r.config);
  CHECK(env.groups.at("D")->generators().size() == 2);
  Element ab = parse_element_word(*env.groups.at("D"), "g0*g1");
  CHECK(env.lengths.at("l").len.eval(ab) == 2.0);
}

TEST_CASE("parse_element_word handles identity, powers, and errors") {
  GroupPtr z2 = make_abelian({Int(0), Int(0)}, "Z2");
  CHECK(parse_element_word(*z2, "1") == z2->identity());
  Element e = parse_element_word(*z2, "g0^2*g1^-3");
  const auto& v = std::get<Element::IntVec>(e.payload());
  CHECK(v[0] == 2);
  CHECK(v[1] == -3);
  CHECK_THROWS_AS(parse_element_word(*z2, "g7"), std::invalid_argument);
  CHECK_THROWS_AS(parse_element_word(*z2, "g0^two"), std::invalid_argument);

  GroupPtr s3 = make_symmetric(3);
  // Adjacent transpositions: g0 = (01), g1 = (12); g0*g1 is a 3-cycle.
  Element c = parse_element_word(*s3, "g0*g1");
  Element c3 = group_pow(*s3, c, 3);
  CHECK(c3 == s3->identity());
  CHECK(c != s3->identity());
}

TEST_CASE("parse_function_terms reads exact rational coefficients") {
  GroupPtr z = make_integers();
  auto terms = parse_function_terms(*z, "g0^2:3/2,g0:-1,1:7");
  REQUIRE(terms.size() == 3);
  CHECK(terms[0].second == Rational(3) / Rational(2));
  CHECK(terms[1].second == Rational(-1));
  CHECK(terms[2].first == z->identity());
  CHECK(terms[2].second == Rational(7));
  CHECK_THROWS_AS(parse_function_terms(*z, "g0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_function_terms(*z, "g0:1/0"), std::invalid_argument);
}
