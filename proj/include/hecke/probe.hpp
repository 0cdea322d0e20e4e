#pragma once

#include "hecke/hecke_algebra.hpp"
#include "hecke/length.hpp"
#include "hecke/transfer.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hecke {

/// Seed used by the probes unless one is passed explicitly; reads the
/// HECKE_SEED environment variable when set.
std::uint64_t probe_seed_default();

/// Shared probe tuning: the truncation radius handed to the operator-norm
/// estimator, the coset budget for exhausting length balls, the power
/// iteration cap, and the random seed.
struct ProbeOptions {
  int truncation = 600;
  std::size_t ball_budget = 200000;
  int max_iterations = 400;
  std::uint64_t seed = probe_seed_default();
};

/**
 * Largest value of ||lambda(f)|| / ||f||_2 found over the candidate set of
 * nonnegative functions supported in the length ball of radius r: the
 * characteristic functions of every nested sub-ball plus `trials` random
 * sparse nonnegative combinations. `exact` marks the analytic tree path
 * (free-like groups over the trivial subgroup with word length), where the
 * norm is the maximum of the radial symbol over the spectrum instead of a
 * truncated power iteration.
 */
struct HaagerupRatio {
  double value = 0.0;
  bool conclusive = false;
  double boundary_mass = 0.0;  ///< worst boundary mass over inconclusive candidates
  std::size_t candidates = 0;
  bool exact = false;
};

/// Throws std::domain_error when the length ball cannot be exhausted within
/// the budget. A truncation leaving more than 1% of the Perron vector's mass
/// on the boundary layer clears `conclusive` instead of throwing.
HaagerupRatio haagerup_ratio(const PairPtr& pair, const LengthFunction& len, double r,
                             std::size_t trials, int truncation,
                             std::uint64_t seed = probe_seed_default(),
                             std::size_t ball_budget = 200000, int max_iterations = 400);

/// operator_norm_estimate(f) divided by the weighted norm ||f||_{s,len};
/// s = 0 collapses to the plain l2 ratio.
double haagerup_norm_ratio(const HeckeFunction<double>& f, double s, const LengthFunction& len,
                           int truncation);

/// Least-squares fit of log(ratio) against log(1 + r).
struct PolynomialFit {
  double degree = 0.0;
  double constant = 1.0;
  double residual = 0.0;  ///< root mean square residual in log space
};

PolynomialFit fit_log_polynomial(const std::vector<double>& radii,
                                 const std::vector<double>& ratios);

/// A fitted bound r -> constant * (1 + r)^degree, used to compose witness
/// bounds across transfers and extensions.
struct FittedPolynomial {
  double constant = 1.0;
  double degree = 0.0;
  double operator()(double r) const;
};

enum class ProbeVerdict { polynomial_consistent, growth_suspicious, inconclusive };

std::string to_string(ProbeVerdict v);

/// Full growth probe over a radius schedule. The per-radius ratios are maxima
/// over the executed candidate set; the fit and its residual are always
/// reported together, and the verdict only speaks to consistency of the
/// growth data, never to the property itself.
struct ProbeReport {
  std::string pair_id;
  std::string length_id;
  std::vector<double> radii;
  std::vector<double> ratios;
  std::vector<bool> radius_conclusive;
  PolynomialFit fit;
  ProbeVerdict verdict = ProbeVerdict::inconclusive;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  int truncation = 0;
  std::size_t ball_budget = 0;
};

/// Requires at least four radii (std::invalid_argument otherwise). A radius
/// whose ball cannot be exhausted or whose truncation is inadequate makes the
/// verdict inconclusive; the surviving radii are still fitted and reported.
ProbeReport rd_fit(const PairPtr& pair, const LengthFunction& len, std::vector<double> radii,
                   std::size_t trials, ProbeOptions opts = {});

/// Outcome of a sampled bound comparison; `detail` names the first violation.
struct WitnessReport {
  std::size_t checked = 0;
  bool ok = true;
  std::string detail;
};

/**
 * Checks measured ratios of the coarse pair of a transfer against the bound
 * composed from a fitted polynomial for the fine pair:
 *   ratio(r) <= n^3 sqrt(c(n) c(n^2)) * fine_fit(r)
 * with n the transfer index and c the Cauchy-Schwarz constant.
 */
WitnessReport composed_witness_check(const TransferContext& ctx, const LengthFunction& coarse_len,
                                     const FittedPolynomial& fine_fit,
                                     const std::vector<double>& radii, std::size_t trials,
                                     ProbeOptions opts = {});

/**
 * Checks measured ratios of a pair against a product bound
 *   ratio(r) <= p0(c * r^e) * p1(c * r^e),
 * the composed form for pairs assembled from two factors whose lengths
 * dominate the assembled length up to (c, e).
 */
WitnessReport composed_witness_check(const PairPtr& pair, const LengthFunction& len,
                                     const FittedPolynomial& p0, const FittedPolynomial& p1,
                                     double c, double e, const std::vector<double>& radii,
                                     std::size_t trials, ProbeOptions opts = {});

}  // namespace hecke
