#include "hecke/report.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <random>
#include <sstream>

namespace hecke {

namespace {

Json int_json(const Int& v) {
  static const Int lo(std::numeric_limits<long long>::min());
  static const Int hi(std::numeric_limits<long long>::max());
  if (v >= lo && v <= hi) return v.convert_to<long long>();
  return v.str();
}

Json count_json(const Count& c) { return Json{{"value", int_json(c.value)}, {"exact", c.exact}}; }

Json rational_json(const Rational& q) {
  return Json{{"exact", q.str()}, {"approx", q.convert_to<double>()}};
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

std::uint64_t opt_u64(const TaskDecl& t, const char* key, std::uint64_t def) {
  const std::string* v = t.find(key);
  return v ? std::strtoull(v->c_str(), nullptr, 10) : def;
}

Json base_report(const TaskDecl& t, const char* check) {
  Json inputs = Json::object();
  for (const auto& [k, v] : t.args) inputs[k] = v;
  return Json{{"task", t.kind}, {"check", check}, {"inputs", inputs}};
}

void set_summary(Json& j, const std::string& status, const std::string& metric,
                 const Json& value) {
  j["summary"] = Json{{"status", status}, {"metric", metric}, {"value", value}};
}

Element random_word(const Group& g, std::mt19937_64& rng, int steps) {
  Element x = g.identity();
  const auto& gens = g.generators();
  if (gens.empty()) return x;
  for (int i = 0; i < steps; ++i) {
    const Element& s = gens[rng() % gens.size()];
    x = g.multiply(x, rng() % 2 == 0 ? s : g.inverse(s));
  }
  return x;
}

HeckeFunction<Rational> random_hecke(const PairPtr& p, std::mt19937_64& rng, int support,
                                     int max_steps, bool nonneg) {
  HeckeFunction<Rational> f(p);
  for (int i = 0; i < support; ++i) {
    Element g = random_word(p->group(), rng, 1 + static_cast<int>(rng() % max_steps));
    long long num = nonneg ? static_cast<long long>(rng() % 4)
                           : static_cast<long long>(rng() % 9) - 4;
    long long den = 1 + static_cast<long long>(rng() % 3);
    if (num != 0) f.add(g, Rational(num) / Rational(den));
  }
  return f;
}

CosetFunction<Rational> random_coset(const PairPtr& p, std::mt19937_64& rng, int support,
                                     int max_steps, bool nonneg) {
  CosetFunction<Rational> k(p);
  for (int i = 0; i < support; ++i) {
    Element g = random_word(p->group(), rng, 1 + static_cast<int>(rng() % max_steps));
    long long num = nonneg ? static_cast<long long>(rng() % 4)
                           : static_cast<long long>(rng() % 9) - 4;
    long long den = 1 + static_cast<long long>(rng() % 3);
    if (num != 0) k.add(g, Rational(num) / Rational(den));
  }
  return k;
}

// ---------------------------------------------------------------- handlers

Json task_pair_info(const Environment& env, const TaskDecl& t) {
  const PairPtr& p = env.pairs.at(*t.find("pair"));
  Json j = base_report(t, "pair-description");
  const Group& g = p->group();
  j["group"] = g.name();
  j["subgroup"] = p->sub().name();
  Json gens = Json::array();
  for (std::size_t i = 0; i < g.generators().size(); ++i)
    gens.push_back(Json{{"name", g.generator_names()[i]}, {"element", g.format(g.generators()[i])}});
  j["generators"] = gens;
  j["subgroup_has_generators"] = p->sub().has_generators();
  j["subgroup_known_finite"] = p->sub().known_finite();
  j["provenance"] = Json{{"coset_budget", env.budget}};
  set_summary(j, "ok", "generators", gens.size());
  return j;
}

Json task_cosets(const Environment& env, const TaskDecl& t) {
  const PairPtr& p = env.pairs.at(*t.find("pair"));
  Element g = parse_element_word(p->group(), *t.find("element"));
  const DoubleCosetRecord& rec = p->double_coset(g);
  Count right = p->right_coset_count(g);
  Count left = p->left_coset_count(g);
  Json j = base_report(t, "double-coset-decomposition");
  j["element"] = p->group().format(g);
  j["representative"] = p->group().format(rec.rep);
  j["right_closed"] = rec.right_closed;
  j["right_coset_count"] = count_json(right);
  j["left_coset_count"] = count_json(left);
  constexpr std::size_t kMaxListed = 64;
  Json reps = Json::array();
  for (std::size_t i = 0; i < rec.right_reps.size() && i < kMaxListed; ++i)
    reps.push_back(p->group().format(rec.right_reps[i]));
  j["right_reps"] = reps;
  if (rec.right_reps.size() > kMaxListed)
    j["right_reps_omitted"] = rec.right_reps.size() - kMaxListed;
  j["provenance"] = Json{{"coset_budget", env.budget}};
  set_summary(j, right.exact ? "ok" : "inconclusive", "right_cosets", count_json(right)["value"]);
  return j;
}

Json task_lr(const Environment& env, const TaskDecl& t) {
  const PairPtr& p = env.pairs.at(*t.find("pair"));
  Element g = parse_element_word(p->group(), *t.find("element"));
  Element ginv = p->group().inverse(g);
  Count left = p->left_coset_count(g);
  Count right = p->right_coset_count(g);
  Count right_inv = p->right_coset_count(ginv);
  Json j = base_report(t, "left-right-multiplicities");
  j["element"] = p->group().format(g);
  j["L"] = count_json(left);
  j["R"] = count_json(right);
  j["R_of_inverse"] = count_json(right_inv);
  bool comparable = left.exact && right_inv.exact;
  bool balanced = comparable && left.value == right_inv.value;
  j["left_equals_right_of_inverse"] = comparable ? Json(balanced) : Json();
  j["provenance"] = Json{{"coset_budget", env.budget}};
  set_summary(j, !comparable ? "inconclusive" : (balanced ? "ok" : "violation"), "L",
              count_json(left)["value"]);
  return j;
}

Json task_convolve(const Environment& env, const TaskDecl& t) {
  const PairPtr& p = env.pairs.at(*t.find("pair"));
  const std::string* mode = t.find("mode");
  bool as_double = mode && *mode == "double";
  HeckeFunction<Rational> f(p), k(p);
  for (const auto& [e, c] : parse_function_terms(p->group(), *t.find("f"))) f.add(e, c);
  for (const auto& [e, c] : parse_function_terms(p->group(), *t.find("k"))) k.add(e, c);
  HeckeFunction<Rational> fk = convolve(f, k);
  Json j = base_report(t, "convolution");
  Json terms = Json::array();
  for (const auto& [rep, c] : fk.terms()) {
    Json term{{"representative", p->group().format(rep)}};
    if (as_double)
      term["coefficient"] = c.convert_to<double>();
    else
      term["coefficient"] = rational_json(c);
    terms.push_back(std::move(term));
  }
  j["product_terms"] = terms;
  if (as_double) {
    j["l2_squared"] = Json{{"f", f.l2_squared().convert_to<double>()},
                           {"k", k.l2_squared().convert_to<double>()},
                           {"product", fk.l2_squared().convert_to<double>()}};
  } else {
    j["l2_squared"] = Json{{"f", rational_json(f.l2_squared())},
                           {"k", rational_json(k.l2_squared())},
                           {"product", rational_json(fk.l2_squared())}};
  }
  j["provenance"] = Json{{"coset_budget", env.budget}};
  set_summary(j, "ok", "support", fk.support_size());
  return j;
}

Json task_opnorm(const Environment& env, const TaskDecl& t) {
  const PairPtr& p = env.pairs.at(*t.find("pair"));
  int truncation = static_cast<int>(opt_u64(t, "truncation", env.truncation));
  HeckeFunction<double> f(p);
  for (const auto& [e, c] : parse_function_terms(p->group(), *t.find("f")))
    f.add(e, c.convert_to<double>());
  OpNormResult res = operator_norm_estimate(f, truncation, 400);
  Json j = base_report(t, "operator-norm-estimate");
  j["estimate"] = res.estimate;
  j["iterations"] = res.iterations;
  j["converged"] = res.converged;
  j["boundary_mass"] = res.boundary_mass;
  j["space_closed"] = res.space_closed;
  j["dimension"] = res.dimension;
  j["provenance"] = Json{{"truncation", truncation}, {"coset_budget", env.budget}};
  set_summary(j, res.converged ? "ok" : "inconclusive", "estimate", res.estimate);
  return j;
}

Json task_length_check(const Environment& env, const TaskDecl& t, std::uint64_t seed) {
  const NamedLength& nl = env.lengths.at(*t.find("length"));
  std::size_t samples = opt_u64(t, "samples", 40);
  std::mt19937_64 rng(opt_u64(t, "seed", seed));
  std::vector<Element> pts;
  pts.push_back(nl.group->identity());
  for (const Element& g : nl.group->generators()) pts.push_back(g);
  while (pts.size() < samples + 1 + nl.group->generators().size())
    pts.push_back(random_word(*nl.group, rng, 1 + static_cast<int>(rng() % 6)));
  Json j = base_report(t, "length-axioms");
  bool ok = true;
  std::string detail;
  try {
    check_length_axioms(*nl.group, nl.len, pts);
  } catch (const std::exception& ex) {
    ok = false;
    detail = ex.what();
  }
  j["length"] = nl.len.name;
  j["samples"] = pts.size();
  j["ok"] = ok;
  if (!ok) j["detail"] = detail;
  j["provenance"] = Json{{"seed", opt_u64(t, "seed", seed)}};
  set_summary(j, ok ? "ok" : "violation", "samples", pts.size());
  return j;
}

Json task_commensurate(const Environment& env, const TaskDecl& t) {
  const GroupPtr& g = env.groups.at(*t.find("group"));
  std::size_t budget = opt_u64(t, "budget", env.budget);
  Json j = base_report(t, "commensurability");
  CommensurabilityVerdict v;
  if (t.find("a")) {
    v = strongly_commensurable(g, env.subgroups.at(*t.find("a")),
                               env.subgroups.at(*t.find("b")), budget);
  } else {
    v = in_commensurator(g, env.subgroups.at(*t.find("subgroup")),
                         parse_element_word(*g, *t.find("element")), budget);
  }
  j["decided"] = v.decided;
  j["index_in_first"] = v.decided ? Json(v.index_in_first) : Json();
  j["index_in_second"] = v.decided ? Json(v.index_in_second) : Json();
  j["intersection_known"] = static_cast<bool>(v.intersection);
  j["provenance"] = Json{{"coset_budget", budget}};
  set_summary(j, v.decided ? "ok" : "inconclusive", "index_in_first",
              v.decided ? Json(v.index_in_first) : Json());
  return j;
}

Json task_transfer_check(const Environment& env, const TaskDecl& t, std::uint64_t seed) {
  const TransferContext& tc = env.transfers.at(*t.find("transfer"));
  std::size_t trials = opt_u64(t, "trials", 100);
  std::uint64_t used_seed = opt_u64(t, "seed", seed);
  std::mt19937_64 rng(used_seed);
  const std::size_t n = tc.index();
  const Rational nq(static_cast<long long>(n));
  Rational max_residual(0);
  std::size_t identity_violations = 0, bound_violations = 0, pointwise_violations = 0;
  const Rational fine_bound_f(Int(n * n) * cauchy_schwarz_constant(n * n));
  const Rational fine_bound_k(Int(n) * cauchy_schwarz_constant(n));
  for (std::size_t i = 0; i < trials; ++i) {
    auto f = random_hecke(tc.coarse, rng, 3, 5, false);
    auto k = random_coset(tc.coarse, rng, 3, 5, false);
    auto ft = tilde_lift_hecke(tc, f);
    auto kt = tilde_lift(tc, k);
    Rational residuals[3] = {
        ft.l2_squared() - nq * f.l2_squared(),
        kt.l2_squared() - nq * k.l2_squared(),
        convolve(ft, kt).l2_squared() - nq * nq * nq * convolve(f, k).l2_squared()};
    for (const Rational& r : residuals) {
      Rational a = r < 0 ? Rational(-r) : r;
      if (a > max_residual) max_residual = a;
      if (a != 0) ++identity_violations;
    }
    auto ff = random_hecke(tc.fine, rng, 3, 6, false);
    auto kk = random_coset(tc.fine, rng, 3, 6, false);
    if (bar_push(tc, ff).l2_squared() > fine_bound_f * ff.l2_squared()) ++bound_violations;
    if (bar_push_vector(tc, kk).l2_squared() > fine_bound_k * kk.l2_squared())
      ++bound_violations;
    auto fp = random_hecke(tc.fine, rng, 3, 6, true);
    auto lifted = tilde_lift_hecke(tc, bar_push(tc, fp));
    for (const auto& [rep, c] : fp.terms())
      if (!(c <= lifted.value(rep))) ++pointwise_violations;
  }
  Json j = base_report(t, "transfer-norm-identities");
  j["index"] = n;
  j["trials"] = trials;
  j["max_identity_residual"] = rational_json(max_residual);
  j["identity_violations"] = identity_violations;
  j["averaged_bound_violations"] = bound_violations;
  j["pointwise_violations"] = pointwise_violations;
  j["provenance"] = Json{{"seed", used_seed}, {"coset_budget", env.budget}};
  bool ok = identity_violations == 0 && bound_violations == 0 && pointwise_violations == 0;
  set_summary(j, ok ? "ok" : "violation", "max_residual", max_residual.str());
  return j;
}

Json task_nearly_normal(const Environment& env, const TaskDecl& t) {
  Json j = base_report(t, "near-normality");
  if (t.find("pair")) {
    const PairPtr& p = env.pairs.at(*t.find("pair"));
    int radius = static_cast<int>(opt_u64(t, "radius", 2));
    std::size_t max_failures = opt_u64(t, "max_failures", 3);
    Pair::NormalityReport rep = p->almost_normal_probe(radius, max_failures);
    j["mode"] = "double-coset-ball";
    j["all_finite"] = rep.all_finite;
    j["double_cosets_checked"] = rep.double_cosets_checked;
    Json fails = Json::array();
    for (const Element& e : rep.failures) fails.push_back(p->group().format(e));
    j["failures"] = fails;
    j["provenance"] = Json{{"radius", radius}, {"coset_budget", env.budget}};
    set_summary(j, rep.all_finite ? "ok" : "violation", "double_cosets_checked",
                rep.double_cosets_checked);
  } else {
    const GroupPtr& g = env.groups.at(*t.find("group"));
    std::size_t budget = opt_u64(t, "budget", env.budget);
    FinitenessVerdict v = nearly_normal_check(g, env.subgroups.at(*t.find("subgroup")), budget);
    j["mode"] = "conjugation-closure";
    j["decided"] = v.decided;
    j["closure_size"] = v.decided ? Json(v.value) : Json();
    j["provenance"] = Json{{"closure_budget", budget}};
    set_summary(j, v.decided ? "ok" : "inconclusive", "closure_size",
                v.decided ? Json(v.value) : Json());
  }
  return j;
}

Json task_extension_check(const Environment& env, const TaskDecl& t) {
  const ExtensionData& ext = env.extensions.at(*t.find("extension"));
  CocycleTables ct = build_cocycle(ext);
  std::size_t cap = opt_u64(t, "cap", 10000);
  std::vector<Element> gammas;
  if (const std::string* gs = t.find("gammas")) {
    for (const auto& w : split_on(*gs, ';')) gammas.push_back(parse_element_word(*ext.quotient, w));
  } else {
    gammas = enumerate_finite_group(*ext.quotient, cap);
  }
  std::vector<Element> kernel_samples;
  if (const std::string* ks = t.find("kernel_samples")) {
    for (const auto& w : split_on(*ks, ';')) {
      Element e = parse_element_word(*ext.total, w);
      if (!ext.kernel->contains(e))
        throw std::invalid_argument("kernel_samples: '" + w + "' is not in the kernel");
      kernel_samples.push_back(e);
    }
  } else if (ext.kernel->has_generators()) {
    kernel_samples = ext.kernel->generators();
  }
  if (kernel_samples.empty()) kernel_samples.push_back(ext.total->identity());

  CocycleCheck cc = check_cocycle_relations(ct, gammas, kernel_samples);
  IsoCheck iso = esigma_iso_check(ct, kernel_samples, gammas);
  Json j = base_report(t, "extension-consistency");
  j["quotient_samples"] = gammas.size();
  j["kernel_samples"] = kernel_samples.size();
  j["cocycle"] = Json{{"triples", cc.triples},
                      {"action_checks", cc.action_checks},
                      {"ok", cc.ok},
                      {"detail", cc.detail}};
  j["twisted_product"] = Json{{"checked", iso.checked}, {"ok", iso.ok}, {"detail", iso.detail}};
  bool ok = cc.ok && iso.ok;
  if (const std::string* sn = t.find("subgroup")) {
    ConsistencyVerdict v = is_consistent(ct, *env.subgroups.at(*sn), gammas);
    j["consistency"] = to_string(v);
  }
  j["provenance"] = Json{{"enumeration_cap", cap}};
  set_summary(j, ok ? "ok" : "violation", "triples", cc.triples);
  return j;
}

Json task_rd_probe(const Environment& env, const TaskDecl& t, std::uint64_t seed) {
  const PairPtr& p = env.pairs.at(*t.find("pair"));
  const NamedLength& nl = env.lengths.at(*t.find("length"));
  std::vector<double> radii;
  for (const auto& part : split_on(*t.find("radii"), ',')) radii.push_back(std::strtod(part.c_str(), nullptr));
  std::size_t trials = opt_u64(t, "trials", 12);
  ProbeOptions opts;
  opts.truncation = static_cast<int>(opt_u64(t, "truncation", env.truncation));
  opts.ball_budget = opt_u64(t, "ball_budget", env.budget);
  opts.max_iterations = 400;
  opts.seed = opt_u64(t, "seed", seed);
  ProbeReport rep = rd_fit(p, nl.len, radii, trials, opts);
  Json j = base_report(t, "rapid-decay-probe");
  j["pair_id"] = rep.pair_id;
  j["length_id"] = rep.length_id;
  j["radii"] = rep.radii;
  j["ratios"] = rep.ratios;
  Json conclusive = Json::array();
  for (bool b : rep.radius_conclusive) conclusive.push_back(b);
  j["radius_conclusive"] = conclusive;
  j["fit"] = Json{{"degree", rep.fit.degree},
                  {"constant", rep.fit.constant},
                  {"residual", rep.fit.residual}};
  j["verdict"] = to_string(rep.verdict);
  j["provenance"] = Json{{"seed", rep.seed},
                         {"trials", rep.trials},
                         {"truncation", rep.truncation},
                         {"ball_budget", rep.ball_budget}};
  const char* status = rep.verdict == ProbeVerdict::polynomial_consistent
                           ? "ok"
                           : (rep.verdict == ProbeVerdict::growth_suspicious ? "violation"
                                                                             : "inconclusive");
  set_summary(j, status, "degree", j["fit"]["degree"]);
  return j;
}

std::string iso_utc_now() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string csv_scalar(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

}  // namespace

std::uint64_t task_seed(std::uint64_t base, std::size_t index) {
  std::uint64_t z = base + (static_cast<std::uint64_t>(index) + 1) * 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

Json run_task(const Environment& env, const TaskDecl& task, std::uint64_t seed) {
  if (task.kind == "pair-info") return task_pair_info(env, task);
  if (task.kind == "cosets") return task_cosets(env, task);
  if (task.kind == "lr") return task_lr(env, task);
  if (task.kind == "convolve") return task_convolve(env, task);
  if (task.kind == "opnorm") return task_opnorm(env, task);
  if (task.kind == "length-check") return task_length_check(env, task, seed);
  if (task.kind == "commensurate") return task_commensurate(env, task);
  if (task.kind == "transfer-check") return task_transfer_check(env, task, seed);
  if (task.kind == "nearly-normal") return task_nearly_normal(env, task);
  if (task.kind == "extension-check") return task_extension_check(env, task);
  if (task.kind == "rd-probe") return task_rd_probe(env, task, seed);
  throw std::invalid_argument("unknown task kind '" + task.kind + "'");
}

RunOutcome run_config(const ExperimentConfig& cfg, const std::string& out_dir, bool parallel) {
  RunOutcome out;
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    out.exit_code = 1;
    out.error = "cannot create output directory '" + out_dir + "': " + ec.message();
    return out;
  }

  const std::size_t total = cfg.tasks.size();
  std::vector<Json> reports(total);
  std::vector<std::string> failures(total);

  // Each task materializes its own environment: cached coset registries
  // never leak representative choices across tasks, so sequential and
  // parallel runs produce the same bytes.
  auto execute = [&cfg, &reports, &failures](std::size_t i) {
    try {
      Environment env = build_environment(cfg);
      reports[i] = run_task(env, cfg.tasks[i], task_seed(cfg.seed, i));
    } catch (const std::exception& ex) {
      failures[i] = ex.what();
    }
  };
  if (parallel) {
    std::vector<std::future<void>> workers;
    workers.reserve(total);
    for (std::size_t i = 0; i < total; ++i)
      workers.push_back(std::async(std::launch::async, execute, i));
    for (auto& w : workers) w.wait();
  } else {
    for (std::size_t i = 0; i < total; ++i) {
      execute(i);
      if (!failures[i].empty()) break;
    }
  }

  std::size_t completed = total;
  for (std::size_t i = 0; i < total; ++i) {
    if (!failures[i].empty()) {
      completed = i;
      out.exit_code = 1;
      std::ostringstream msg;
      msg << "task " << i << " (" << cfg.tasks[i].kind << ", line " << cfg.tasks[i].line
          << "): " << failures[i];
      out.error = msg.str();
      break;
    }
    if (reports[i].is_null()) {  // not reached: sequential runs break on the failure itself
      completed = i;
      break;
    }
  }

  auto write_file = [&](const std::string& name, const std::string& body) -> bool {
    fs::path path = fs::path(out_dir) / name;
    std::ofstream f(path);
    f << body;
    f.close();
    if (!f) {
      out.exit_code = 1;
      out.error = "cannot write '" + path.string() + "'";
      return false;
    }
    out.report_files.push_back(path.string());
    return true;
  };

  std::ostringstream csv;
  csv << "index,kind,check,status,metric,value\n";
  for (std::size_t i = 0; i < completed; ++i) {
    char name[64];
    std::snprintf(name, sizeof name, "%03zu_%s.json", i, cfg.tasks[i].kind.c_str());
    if (!write_file(name, reports[i].dump(2) + "\n")) return out;
    const Json& s = reports[i]["summary"];
    csv << i << ',' << cfg.tasks[i].kind << ',' << reports[i]["check"].get<std::string>() << ','
        << s["status"].get<std::string>() << ',' << s["metric"].get<std::string>() << ','
        << csv_scalar(s["value"]) << '\n';
  }
  if (!write_file("summary.csv", csv.str())) return out;

  Json meta{{"generated_at", iso_utc_now()},
            {"seed", cfg.seed},
            {"parallel", parallel},
            {"tasks_total", total},
            {"tasks_completed", completed},
            {"exit_code", out.exit_code}};
  if (!out.error.empty()) meta["error"] = out.error;
  if (!write_file("metadata.json", meta.dump(2) + "\n")) return out;
  return out;
}

}  // namespace hecke
