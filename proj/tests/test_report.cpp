#include <doctest.h>

#include "hecke/report.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace hecke;
namespace fs = std::filesystem;

namespace {

ExperimentConfig parsed(const std::string& text) {
  ParseResult r = parse_config(text);
  std::string errors;
  for (const auto& e : r.errors) errors += std::to_string(e.line) + ": " + e.message + "\n";
  INFO(errors);
  REQUIRE(r.config.has_value());
  return *r.config;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  REQUIRE(f.good());
  std::ostringstream out;
  out << f.rdbuf();
  return out.str();
}

/// Unique scratch directory, removed on destruction.
struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("hecke_report_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

const char* kIntegerLatticeConfig =
    "seed 99\n"
    "group Z integers\n"
    "subgroup H lattice(Z, 2)\n"
    "subgroup K lattice(Z, 4)\n"
    "pair coarse Z H\n"
    "pair fine Z K\n"
    "transfer t coarse fine\n";

}  // namespace

TEST_CASE("task_seed is a deterministic splitting rule") {
  CHECK(task_seed(1, 0) == task_seed(1, 0));
  CHECK(task_seed(1, 0) != task_seed(1, 1));
  CHECK(task_seed(1, 0) != task_seed(2, 0));
  // Nonzero even for the degenerate base.
  CHECK(task_seed(0, 0) != 0);
}

TEST_CASE("cosets and lr tasks report scaling multiplicities") {
  ExperimentConfig cfg = parsed(
      "group Q affine(2, 3)\n"
      "subgroup ZT integer_translations(Q)\n"
      "pair bc Q ZT\n"
      "task cosets pair=bc element=g1\n"
      "task lr pair=bc element=g1\n");
  Environment env = build_environment(cfg);

  Json cosets = run_task(env, cfg.tasks[0], task_seed(cfg.seed, 0));
  CHECK(cosets["check"] == "double-coset-decomposition");
  CHECK(cosets["left_coset_count"]["value"] == 2);
  CHECK(cosets["left_coset_count"]["exact"] == true);
  CHECK(cosets["right_coset_count"]["value"] == 1);
  CHECK(cosets["right_closed"] == true);
  CHECK(cosets["right_reps"].size() == 1);
  CHECK(cosets["summary"]["status"] == "ok");

  Json lr = run_task(env, cfg.tasks[1], task_seed(cfg.seed, 1));
  CHECK(lr["L"]["value"] == 2);
  CHECK(lr["R"]["value"] == 1);
  CHECK(lr["R_of_inverse"]["value"] == 2);
  CHECK(lr["left_equals_right_of_inverse"] == true);
  CHECK(lr["summary"]["status"] == "ok");
}

TEST_CASE("convolve task reports exact rational terms, or doubles on request") {
  ExperimentConfig cfg = parsed(
      "group Z integers\n"
      "subgroup T trivial(Z)\n"
      "pair p Z T\n"
      "task convolve pair=p f=g0:3/2,1:-1 k=g0:2\n"
      "task convolve pair=p f=g0:3/2,1:-1 k=g0:2 mode=double\n");
  Environment env = build_environment(cfg);

  Json exact = run_task(env, cfg.tasks[0], 0);
  REQUIRE(exact["product_terms"].size() == 2);
  // Terms are ordered by double coset representative: [1] before [2].
  CHECK(exact["product_terms"][0]["coefficient"]["exact"] == "-2");
  CHECK(exact["product_terms"][1]["coefficient"]["exact"] == "3");
  CHECK(exact["l2_squared"]["f"]["exact"] == "13/4");
  CHECK(exact["summary"]["metric"] == "support");
  CHECK(exact["summary"]["value"] == 2);

  Json dbl = run_task(env, cfg.tasks[1], 0);
  CHECK(dbl["product_terms"][1]["coefficient"] == 3.0);
  CHECK(dbl["l2_squared"]["product"] == 13.0);
}

TEST_CASE("opnorm task: identity acts with norm one, shift-plus-inverse near two") {
  ExperimentConfig cfg = parsed(
      "group Z integers\n"
      "subgroup H lattice(Z, 5)\n"
      "subgroup T trivial(Z)\n"
      "pair q Z H\n"
      "pair p Z T\n"
      "task opnorm pair=q f=1:1\n"
      "task opnorm pair=p f=g0:1,g0^-1:1 truncation=16\n");
  Environment env = build_environment(cfg);

  Json ident = run_task(env, cfg.tasks[0], 0);
  CHECK(ident["estimate"] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(ident["space_closed"] == true);
  CHECK(ident["summary"]["status"] == "ok");

  Json shift = run_task(env, cfg.tasks[1], 0);
  CHECK(shift["estimate"] == doctest::Approx(2.0).epsilon(0.02));
  CHECK(shift["space_closed"] == false);
  CHECK(shift["provenance"]["truncation"] == 16);
}

TEST_CASE("length-check, commensurate, and nearly-normal tasks") {
  ExperimentConfig cfg = parsed(
      "group Z integers\n"
      "subgroup A lattice(Z, 2)\n"
      "subgroup B lattice(Z, 3)\n"
      "pair p Z A\n"
      "length l word(Z)\n"
      "group Q affine(2, 3)\n"
      "subgroup ZT integer_translations(Q)\n"
      "pair bc Q ZT\n"
      "task length-check length=l samples=25\n"
      "task commensurate group=Z a=A b=B\n"
      "task commensurate group=Q subgroup=ZT element=g1\n"
      "task nearly-normal pair=bc radius=2\n"
      "task nearly-normal group=Z subgroup=A\n");
  Environment env = build_environment(cfg);

  Json lc = run_task(env, cfg.tasks[0], task_seed(cfg.seed, 0));
  CHECK(lc["ok"] == true);
  CHECK(lc["summary"]["status"] == "ok");

  Json sc = run_task(env, cfg.tasks[1], 0);
  CHECK(sc["decided"] == true);
  CHECK(sc["index_in_first"] == 3);
  CHECK(sc["index_in_second"] == 2);

  Json ic = run_task(env, cfg.tasks[2], 0);
  CHECK(ic["decided"] == true);
  CHECK(ic["summary"]["status"] == "ok");

  Json ball = run_task(env, cfg.tasks[3], 0);
  CHECK(ball["mode"] == "double-coset-ball");
  CHECK(ball["all_finite"] == true);
  CHECK(ball["double_cosets_checked"].get<std::size_t>() > 1);

  Json closure = run_task(env, cfg.tasks[4], 0);
  CHECK(closure["mode"] == "conjugation-closure");
  CHECK(closure["decided"] == true);
  CHECK(closure["summary"]["status"] == "ok");
}

TEST_CASE("extension-check task validates the carrying extension") {
  ExperimentConfig cfg = parsed(
      "extension carry carrying(3)\n"
      "subgroup K kernel_of(carry)\n"
      "task extension-check extension=carry subgroup=K\n");
  Environment env = build_environment(cfg);
  Json j = run_task(env, cfg.tasks[0], 0);
  CHECK(j["quotient_samples"] == 3);
  CHECK(j["cocycle"]["triples"] == 27);
  CHECK(j["cocycle"]["ok"] == true);
  CHECK(j["twisted_product"]["ok"] == true);
  CHECK(j["consistency"] == "consistent");
  CHECK(j["summary"]["status"] == "ok");
}

TEST_CASE("transfer-check reports exactly zero residuals on nested lattices") {
  ExperimentConfig cfg =
      parsed(std::string(kIntegerLatticeConfig) + "task transfer-check transfer=t trials=40\n");
  Environment env = build_environment(cfg);
  Json j = run_task(env, cfg.tasks[0], task_seed(cfg.seed, 0));
  CHECK(j["index"] == 2);
  CHECK(j["max_identity_residual"]["exact"] == "0");
  CHECK(j["identity_violations"] == 0);
  CHECK(j["averaged_bound_violations"] == 0);
  CHECK(j["pointwise_violations"] == 0);
  CHECK(j["summary"]["status"] == "ok");
  CHECK(j["summary"]["value"] == "0");
}

TEST_CASE("rd-probe task carries provenance and an unexhaustible ball stays inconclusive") {
  ExperimentConfig cfg = parsed(
      "group Z integers\n"
      "subgroup H lattice(Z, 5)\n"
      "pair p Z H\n"
      "length l quotient(p)\n"
      "task rd-probe pair=p length=l radii=1,2,4,8 trials=3\n"
      "task rd-probe pair=p length=l radii=1,2,4,8 trials=3 ball_budget=2\n");
  Environment env = build_environment(cfg);

  Json good = run_task(env, cfg.tasks[0], task_seed(cfg.seed, 0));
  CHECK(good["verdict"] == "polynomial_consistent");
  CHECK(good["summary"]["status"] == "ok");
  CHECK(good["provenance"]["ball_budget"] == 200000);
  CHECK(good["ratios"].size() == 4);

  // A fresh environment: the ball walk must hit the budget itself, not
  // ride on cosets registered by the previous task.
  Environment cold = build_environment(cfg);
  Json starved = run_task(cold, cfg.tasks[1], task_seed(cfg.seed, 1));
  CHECK(starved["verdict"] == "inconclusive");
  CHECK(starved["summary"]["status"] == "inconclusive");
  CHECK(starved["radius_conclusive"][0] == false);
  CHECK(std::isnan(starved["ratios"][0].get<double>()));
  CHECK(starved["ratios"][0].dump() == "null");  // NaN serializes as null
}

TEST_CASE("run_config writes reports, summary, and metadata; empty task list exits zero") {
  TempDir dir("empty");
  ExperimentConfig cfg = parsed("group Z integers\n");
  RunOutcome out = run_config(cfg, dir.path.string());
  CHECK(out.exit_code == 0);
  CHECK(out.error.empty());
  CHECK(slurp(dir.path / "summary.csv") == "index,kind,check,status,metric,value\n");
  Json meta = Json::parse(slurp(dir.path / "metadata.json"));
  CHECK(meta["tasks_total"] == 0);
  CHECK(meta["tasks_completed"] == 0);
  CHECK(meta.contains("generated_at"));
}

TEST_CASE("run_config is byte-identical across reruns and parallel execution") {
  std::string text = std::string(kIntegerLatticeConfig) +
                     "length l word(Z)\n"
                     "length ql quotient(coarse)\n"
                     "task cosets pair=coarse element=g0\n"
                     "task transfer-check transfer=t trials=10\n"
                     "task length-check length=l samples=10\n"
                     "task rd-probe pair=coarse length=ql radii=1,2,4,8 trials=3\n";
  ExperimentConfig cfg = parsed(text);
  TempDir a("seq_a"), b("seq_b"), c("par");
  RunOutcome ra = run_config(cfg, a.path.string());
  RunOutcome rb = run_config(cfg, b.path.string());
  RunOutcome rc = run_config(cfg, c.path.string(), true);
  REQUIRE(ra.exit_code == 0);
  REQUIRE(rb.exit_code == 0);
  REQUIRE(rc.exit_code == 0);
  const char* files[] = {"000_cosets.json", "001_transfer-check.json", "002_length-check.json",
                         "003_rd-probe.json", "summary.csv"};
  for (const char* f : files) {
    CAPTURE(f);
    std::string sa = slurp(a.path / f);
    CHECK(sa == slurp(b.path / f));
    CHECK(sa == slurp(c.path / f));
    // Wall-clock data lives in metadata.json only.
    CHECK(sa.find("generated_at") == std::string::npos);
  }
  // Summary carries one row per task.
  std::string csv = slurp(a.path / "summary.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  CHECK(csv.find("1,transfer-check,transfer-norm-identities,ok,max_residual,0\n") !=
        std::string::npos);
}

TEST_CASE("run_config reports the failing task and keeps earlier reports") {
  TempDir dir("fail");
  ExperimentConfig cfg = parsed(
      "group Z integers\n"
      "subgroup H lattice(Z, 2)\n"
      "pair p Z H\n"
      "task cosets pair=p element=g0\n"
      "task cosets pair=p element=g7\n"  // parses, but Z has no generator g7
      "task lr pair=p element=g0\n");
  RunOutcome out = run_config(cfg, dir.path.string());
  CHECK(out.exit_code == 1);
  CHECK(out.error.find("task 1") != std::string::npos);
  CHECK(out.error.find("cosets") != std::string::npos);
  CHECK(out.error.find("line 5") != std::string::npos);
  CHECK(out.error.find("g7") != std::string::npos);
  CHECK(fs::exists(dir.path / "000_cosets.json"));
  CHECK(!fs::exists(dir.path / "001_cosets.json"));
  CHECK(!fs::exists(dir.path / "002_lr.json"));
  Json meta = Json::parse(slurp(dir.path / "metadata.json"));
  CHECK(meta["tasks_completed"] == 1);
  CHECK(meta["exit_code"] == 1);
}
