#include "hecke/probe.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace hecke {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// True when the pair's subgroup holds nothing but the identity, as far as
/// the generator 2-ball can tell. Combined with the declared capabilities
/// (finite, no generator list) this gates the tree fast path.
bool probe_trivial_subgroup(const Pair& pair) {
  const Subgroup& h = pair.sub();
  if (h.has_generators() || !h.known_finite()) return false;
  const Group& g = pair.group();
  if (!h.contains(g.identity())) return false;
  std::vector<Element> steps;
  for (const auto& s : g.generators()) {
    steps.push_back(s);
    steps.push_back(g.inverse(s));
  }
  for (const auto& a : steps) {
    if (!(a == g.identity()) && h.contains(a)) return false;
    for (const auto& b : steps) {
      Element ab = g.multiply(a, b);
      if (!(ab == g.identity()) && h.contains(ab)) return false;
    }
  }
  return true;
}

/// Fast path applies on the Cayley tree of a free-like group over the
/// trivial subgroup with plain word length; q is the branching factor, so
/// spheres have sizes 1, q+1, (q+1)q, (q+1)q^2, ...
bool tree_eligible(const Pair& pair, const LengthFunction& len, double* q_out) {
  if (len.kind != LengthKind::word) return false;
  const Group& g = pair.group();
  double q = 0.0;
  if (is_free_group_like(g) && !g.children().empty()) {
    q = 2.0 * double(g.children().size()) - 1.0;
  } else if (const auto* m = abelian_moduli(g); m != nullptr && m->size() == 1 && (*m)[0] == 0) {
    q = 1.0;
  } else {
    return false;
  }
  if (!probe_trivial_subgroup(pair)) return false;
  *q_out = q;
  return true;
}

double sphere_size(double q, std::size_t j) {
  return j == 0 ? 1.0 : (q + 1.0) * std::pow(q, double(j) - 1.0);
}

/**
 * Sup of |sum_j coeff[j] chi_j(t)| over t in [-2 sqrt(q), 2 sqrt(q)], the
 * spectrum of the first sphere as a convolution operator. The sphere
 * characters obey chi_0 = 1, chi_1 = t, chi_2 = t^2 - (q+1) and then
 * chi_{j+1} = t chi_j - q chi_{j-1}, so a radial function acts as this
 * polynomial of the first sphere and its operator norm is the sup itself.
 */
double radial_symbol_max(const std::vector<double>& coeff, double q) {
  const int npoints = 8192;
  const double edge = 2.0 * std::sqrt(q);
  double best = 0.0;
  for (int i = 0; i <= npoints; ++i) {
    double t = edge * (2.0 * double(i) / double(npoints) - 1.0);
    double prev = 1.0;
    double cur = t;
    double value = coeff[0];
    for (std::size_t j = 1; j < coeff.size(); ++j) {
      value += coeff[j] * cur;
      double next = t * cur - (j == 1 ? q + 1.0 : q) * prev;
      prev = cur;
      cur = next;
    }
    best = std::max(best, std::abs(value));
  }
  return best;
}

double radial_ratio(const std::vector<double>& coeff, double q) {
  double norm2 = 0.0;
  for (std::size_t j = 0; j < coeff.size(); ++j)
    norm2 += coeff[j] * coeff[j] * sphere_size(q, j);
  return radial_symbol_max(coeff, q) / std::sqrt(norm2);
}

HaagerupRatio tree_haagerup(double q, double r, std::size_t trials, std::uint64_t seed) {
  int radius = int(std::floor(r + 1e-9));
  HaagerupRatio out;
  out.exact = true;
  out.conclusive = true;
  double prev_chi = -1.0;
  for (int rr = 0; rr <= radius; ++rr) {
    std::vector<double> coeff(std::size_t(rr) + 1, 1.0);
    double ratio = radial_ratio(coeff, q);
    if (prev_chi >= 0.0 && ratio + 1e-9 + 1e-6 * prev_chi < prev_chi)
      throw std::logic_error("haagerup_ratio: characteristic ratios decreased with the radius");
    prev_chi = ratio;
    out.value = std::max(out.value, ratio);
    ++out.candidates;
  }
  std::mt19937_64 rng(seed);
  for (std::size_t t = 0; t < trials; ++t) {
    std::vector<double> coeff(std::size_t(radius) + 1, 0.0);
    bool empty = true;
    for (auto& c : coeff)
      if (rng() % 2 == 0) {
        c = double(1 + rng() % 3);
        empty = false;
      }
    if (empty) coeff[rng() % coeff.size()] = 1.0;
    out.value = std::max(out.value, radial_ratio(coeff, q));
    ++out.candidates;
  }
  return out;
}

HaagerupRatio generic_haagerup(const PairPtr& pair, const LengthFunction& len, double r,
                               std::size_t trials, int truncation, std::uint64_t seed,
                               std::size_t ball_budget, int max_iterations) {
  LengthBall ball = length_ball(pair, r, len, ball_budget);
  if (!ball.complete)
    throw std::domain_error("haagerup_ratio: length ball not exhausted within the budget");

  struct BallEntry {
    Element rep;
    double weight;
  };
  std::vector<BallEntry> entries;
  entries.reserve(ball.double_coset_reps.size());
  for (const auto& rep : ball.double_coset_reps) entries.push_back({rep, len(rep)});
  std::stable_sort(entries.begin(), entries.end(),
                   [](const BallEntry& a, const BallEntry& b) { return a.weight < b.weight; });
  if (entries.empty())
    throw std::invalid_argument(
        "haagerup_ratio: empty weight ball; the weight does not vanish on the subgroup");

  HaagerupRatio out;
  out.conclusive = true;
  std::mt19937_64 rng(seed);

  auto measure = [&](const HeckeFunction<double>& f, bool* reliable) {
    for (const auto& [rep, c] : f.terms()) {
      (void)rep;
      if (!(c >= 0.0))
        throw std::logic_error("haagerup_ratio: candidate has a negative coefficient");
    }
    double l2 = std::sqrt(f.l2_squared());
    OpNormResult res = operator_norm_estimate(f, truncation, max_iterations);
    bool settled = res.space_closed || res.boundary_mass <= 0.01;
    if (!settled) {
      out.conclusive = false;
      out.boundary_mass = std::max(out.boundary_mass, res.boundary_mass);
    }
    *reliable = settled && res.converged;
    if (*reliable) {
      // Any vector gives a lower bound on the operator norm, so a random one
      // must not beat the converged power-iteration value by more than slack.
      CosetFunction<double> k(pair);
      for (const auto& e : entries)
        if (rng() % 2 == 0) k.add(e.rep, double(1 + rng() % 3));
      if (k.terms().empty()) k.add(entries[rng() % entries.size()].rep, 1.0);
      double kn = std::sqrt(k.l2_squared());
      double fk = std::sqrt(convolve(f, k).l2_squared());
      if (fk > res.estimate * kn * 1.05 + 1e-9)
        throw std::logic_error("haagerup_ratio: random vector exceeded the Perron estimate");
    }
    ++out.candidates;
    return res.estimate / l2;
  };

  // Characteristic functions of the nested sub-balls, one per distinct weight.
  HeckeFunction<double> chi(pair);
  double prev_chi = -1.0;
  bool prev_reliable = false;
  std::size_t i = 0;
  while (i < entries.size()) {
    double w = entries[i].weight;
    while (i < entries.size() && entries[i].weight == w) {
      chi.add(entries[i].rep, 1.0);
      ++i;
    }
    bool reliable = false;
    double ratio = measure(chi, &reliable);
    if (prev_chi >= 0.0 && reliable && prev_reliable &&
        ratio + 1e-9 + 1e-3 * prev_chi < prev_chi)
      throw std::logic_error("haagerup_ratio: characteristic ratios decreased with the radius");
    if (reliable) {
      prev_chi = ratio;
      prev_reliable = true;
    }
    out.value = std::max(out.value, ratio);
  }

  for (std::size_t t = 0; t < trials; ++t) {
    HeckeFunction<double> f(pair);
    std::size_t added = 0;
    for (const auto& e : entries)
      if (rng() % 2 == 0) {
        f.add(e.rep, double(1 + rng() % 3));
        ++added;
      }
    if (added == 0) f.add(entries[rng() % entries.size()].rep, 1.0);
    bool reliable = false;
    out.value = std::max(out.value, measure(f, &reliable));
  }
  return out;
}

std::vector<double> prefix(const std::vector<double>& v, std::size_t k) {
  return std::vector<double>(v.begin(), v.begin() + std::ptrdiff_t(k));
}

}  // namespace

std::uint64_t probe_seed_default() {
  if (const char* env = std::getenv("HECKE_SEED")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 0);
    if (end != nullptr && end != env && *end == '\0') return v;
  }
  return 0x5eedULL;
}

HaagerupRatio haagerup_ratio(const PairPtr& pair, const LengthFunction& len, double r,
                             std::size_t trials, int truncation, std::uint64_t seed,
                             std::size_t ball_budget, int max_iterations) {
  if (!pair) throw std::invalid_argument("haagerup_ratio: null pair");
  if (r < 0.0) throw std::invalid_argument("haagerup_ratio: negative radius");
  if (truncation <= 0) throw std::invalid_argument("haagerup_ratio: truncation must be positive");
  double q = 0.0;
  if (tree_eligible(*pair, len, &q)) return tree_haagerup(q, r, trials, seed);
  return generic_haagerup(pair, len, r, trials, truncation, seed, ball_budget, max_iterations);
}

double haagerup_norm_ratio(const HeckeFunction<double>& f, double s, const LengthFunction& len,
                           int truncation) {
  if (f.terms().empty()) throw std::invalid_argument("haagerup_norm_ratio: zero function");
  double denom = weighted_norm(f, len, s);
  OpNormResult res = operator_norm_estimate(f, truncation);
  return res.estimate / denom;
}

PolynomialFit fit_log_polynomial(const std::vector<double>& radii,
                                 const std::vector<double>& ratios) {
  if (radii.size() != ratios.size())
    throw std::invalid_argument("fit_log_polynomial: mismatched lengths");
  if (radii.size() < 2) throw std::invalid_argument("fit_log_polynomial: need at least two points");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (radii[i] < 0.0 || !(ratios[i] > 0.0))
      throw std::invalid_argument("fit_log_polynomial: radii must be >= 0 and ratios positive");
    xs.push_back(std::log1p(radii[i]));
    ys.push_back(std::log(ratios[i]));
  }
  double xbar = 0.0, ybar = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xbar += xs[i];
    ybar += ys[i];
  }
  xbar /= double(xs.size());
  ybar /= double(xs.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - xbar) * (ys[i] - ybar);
    sxx += (xs[i] - xbar) * (xs[i] - xbar);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_log_polynomial: radii must be distinct");
  PolynomialFit fit;
  fit.degree = sxy / sxx;
  fit.constant = std::exp(ybar - fit.degree * xbar);
  double rss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double e = ys[i] - (ybar + fit.degree * (xs[i] - xbar));
    rss += e * e;
  }
  fit.residual = std::sqrt(rss / double(xs.size()));
  return fit;
}

double FittedPolynomial::operator()(double r) const {
  return constant * std::pow(1.0 + r, degree);
}

std::string to_string(ProbeVerdict v) {
  switch (v) {
    case ProbeVerdict::polynomial_consistent:
      return "polynomial_consistent";
    case ProbeVerdict::growth_suspicious:
      return "growth_suspicious";
    case ProbeVerdict::inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

ProbeReport rd_fit(const PairPtr& pair, const LengthFunction& len, std::vector<double> radii,
                   std::size_t trials, ProbeOptions opts) {
  if (!pair) throw std::invalid_argument("rd_fit: null pair");
  if (radii.size() < 4) throw std::invalid_argument("rd_fit: at least four radii are required");
  std::sort(radii.begin(), radii.end());
  if (radii.front() < 0.0) throw std::invalid_argument("rd_fit: negative radius");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (radii[i] == radii[i - 1]) throw std::invalid_argument("rd_fit: radii must be distinct");

  ProbeReport report;
  report.pair_id = pair->group().name() + " / " + pair->sub().name();
  report.length_id = len.name;
  report.radii = radii;
  report.seed = opts.seed;
  report.trials = trials;
  report.truncation = opts.truncation;
  report.ball_budget = opts.ball_budget;

  bool all_conclusive = true;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    try {
      HaagerupRatio h = haagerup_ratio(pair, len, radii[i], trials, opts.truncation,
                                       mix_seed(opts.seed, i), opts.ball_budget,
                                       opts.max_iterations);
      report.ratios.push_back(h.value);
      report.radius_conclusive.push_back(h.conclusive);
      all_conclusive = all_conclusive && h.conclusive;
    } catch (const std::domain_error&) {
      report.ratios.push_back(std::numeric_limits<double>::quiet_NaN());
      report.radius_conclusive.push_back(false);
      all_conclusive = false;
    }
  }

  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < radii.size(); ++i)
    if (std::isfinite(report.ratios[i]) && report.ratios[i] > 0.0) {
      xs.push_back(radii[i]);
      ys.push_back(report.ratios[i]);
    }
  if (xs.size() >= 2) report.fit = fit_log_polynomial(xs, ys);

  if (!all_conclusive || xs.size() != radii.size()) {
    report.verdict = ProbeVerdict::inconclusive;
    return report;
  }

  // Slopes over growing prefixes of the schedule; a strictly increasing
  // sequence with a material total rise marks super-polynomial growth.
  std::vector<double> windows;
  for (std::size_t k = 3; k <= xs.size(); ++k)
    windows.push_back(fit_log_polynomial(prefix(xs, k), prefix(ys, k)).degree);
  bool increasing = windows.size() >= 2;
  for (std::size_t j = 0; j + 1 < windows.size(); ++j)
    increasing = increasing && windows[j + 1] > windows[j] + 1e-9;
  if (increasing && windows.back() - windows.front() > 0.3) {
    report.verdict = ProbeVerdict::growth_suspicious;
    return report;
  }

  PolynomialFit drop = fit_log_polynomial(prefix(xs, xs.size() - 1), prefix(ys, ys.size() - 1));
  if (report.fit.residual <= 0.2 && std::abs(report.fit.degree - drop.degree) <= 0.25)
    report.verdict = ProbeVerdict::polynomial_consistent;
  else
    report.verdict = ProbeVerdict::inconclusive;
  return report;
}

WitnessReport composed_witness_check(const TransferContext& ctx, const LengthFunction& coarse_len,
                                     const FittedPolynomial& fine_fit,
                                     const std::vector<double>& radii, std::size_t trials,
                                     ProbeOptions opts) {
  if (radii.empty()) throw std::invalid_argument("composed_witness_check: no radii");
  double n = double(ctx.index());
  double cs = cauchy_schwarz_constant(ctx.index()).convert_to<double>() *
              cauchy_schwarz_constant(ctx.index() * ctx.index()).convert_to<double>();
  double factor = n * n * n * std::sqrt(cs);
  WitnessReport out;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    HaagerupRatio h = haagerup_ratio(ctx.coarse, coarse_len, radii[i], trials, opts.truncation,
                                     mix_seed(opts.seed, i), opts.ball_budget,
                                     opts.max_iterations);
    double bound = factor * fine_fit(radii[i]);
    ++out.checked;
    if (h.value > bound * (1.0 + 1e-6) + 1e-9) {
      if (out.ok) {
        std::ostringstream os;
        os << "radius " << radii[i] << ": measured " << h.value << " exceeds bound " << bound;
        out.detail = os.str();
      }
      out.ok = false;
    }
  }
  return out;
}

WitnessReport composed_witness_check(const PairPtr& pair, const LengthFunction& len,
                                     const FittedPolynomial& p0, const FittedPolynomial& p1,
                                     double c, double e, const std::vector<double>& radii,
                                     std::size_t trials, ProbeOptions opts) {
  if (radii.empty()) throw std::invalid_argument("composed_witness_check: no radii");
  if (c <= 0.0 || e < 0.0)
    throw std::invalid_argument("composed_witness_check: scale must be positive, exponent >= 0");
  WitnessReport out;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    HaagerupRatio h = haagerup_ratio(pair, len, radii[i], trials, opts.truncation,
                                     mix_seed(opts.seed, i), opts.ball_budget,
                                     opts.max_iterations);
    double arg = c * std::pow(radii[i], e);
    double bound = p0(arg) * p1(arg);
    ++out.checked;
    if (h.value > bound * (1.0 + 1e-6) + 1e-9) {
      if (out.ok) {
        std::ostringstream os;
        os << "radius " << radii[i] << ": measured " << h.value << " exceeds bound " << bound;
        out.detail = os.str();
      }
      out.ok = false;
    }
  }
  return out;
}

}  // namespace hecke
