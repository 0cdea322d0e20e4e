#pragma once

#include "hecke/homomorphism.hpp"
#include "hecke/length.hpp"
#include "hecke/pair.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace hecke {

/**
 * A group extension presented by its quotient map and a chosen set-theoretic
 * section: total --projection--> quotient with sigma a right inverse sending
 * the identity to the identity. The section need not be a homomorphism; its
 * failure to be one is exactly the attached cocycle.
 */
struct ExtensionData {
  GroupPtr total;
  GroupPtr quotient;
  HomPtr projection;
  SubgroupPtr kernel;  ///< kernel of the projection, as a subgroup of `total`
  std::function<Element(const Element&)> sigma;  ///< canonicalizing section
};

/**
 * Validates sigma(1) = 1 exactly and projection(sigma(q)) = q on the quotient
 * generators and their inverses, then wraps sigma so inputs and outputs are
 * canonical. Throws std::invalid_argument on a bad section.
 */
ExtensionData make_extension(HomPtr projection, std::function<Element(const Element&)> sigma);

/// Integers over the residues mod m, with the section picking the canonical
/// residue representative; the cocycle records the carry digit.
ExtensionData make_carrying_extension(const Int& m);

/**
 * Rational affine maps over the exponent vectors of the listed scale factors:
 * the projection reads off the multiplicity of each factor in the scale and
 * the section realizes an exponent vector as a pure scaling. The kernel is
 * the full translation part, which is not finitely generated, so the kernel
 * subgroup carries a membership test but no generators.
 */
ExtensionData make_prime_scaling_extension(std::vector<Int> primes);

/**
 * The cocycle and twisting action of an extension:
 *   cocycle(x, y) = sigma(x) sigma(y) sigma(xy)^-1
 *   action(x, h)  = sigma(x) h sigma(x)^-1
 * Cocycle values are checked to land in the kernel (std::logic_error
 * otherwise); action inputs are checked to come from the kernel
 * (std::invalid_argument otherwise).
 */
struct CocycleTables {
  ExtensionData ext;
  std::function<Element(const Element&, const Element&)> cocycle;
  std::function<Element(const Element&, const Element&)> action;
};

CocycleTables build_cocycle(const ExtensionData& ext);

/// Result of checking the two compatibility identities the tables must
/// satisfy: the twisted cocycle identity
///   f(x1,x2) f(x1 x2, x3) = rho(x1)(f(x2,x3)) f(x1, x2 x3)
/// over all listed quotient triples, and the conjugation identity
///   rho(x1) rho(x2) = Ad(f(x1,x2)) rho(x1 x2)
/// on the listed kernel samples. Reports the first failure without throwing.
struct CocycleCheck {
  std::size_t triples = 0;        ///< cocycle identity instances checked
  std::size_t action_checks = 0;  ///< conjugation identity instances checked
  bool ok = true;
  std::string detail;
};

CocycleCheck check_cocycle_relations(const CocycleTables& ct, const std::vector<Element>& gammas,
                                     const std::vector<Element>& kernel_samples);

/// Packs a kernel element and a quotient element into the twisted-product
/// presentation; components are canonicalized in their own groups.
Element esigma_pack(const CocycleTables& ct, const Element& h, const Element& x);

/// Splits a packed element into its (kernel, quotient) components.
std::pair<Element, Element> esigma_unpack(const Element& e);

/// (h1, x1)(h2, x2) = (h1 rho(x1)(h2) f(x1, x2), x1 x2).
Element esigma_mul(const CocycleTables& ct, const Element& a, const Element& b);

/// (h, x)^-1 = (sigma(x)^-1 h^-1 sigma(x^-1)^-1, x^-1).
Element esigma_inv(const CocycleTables& ct, const Element& a);

/// The isomorphism onto the total group, (h, x) -> h sigma(x).
Element esigma_to_total(const CocycleTables& ct, const Element& a);

/// Inverse of esigma_to_total: e -> (e sigma(pi(e))^-1, pi(e)).
Element esigma_from_total(const CocycleTables& ct, const Element& e);

/// Group object over packed pairs whose multiplication runs through the
/// cocycle tables. Generators are the packed kernel generators followed by
/// the packed quotient generators.
GroupPtr make_esigma_group(const CocycleTables& ct, std::string name = "");

/// Outcome of sampled structural comparisons; `detail` describes the first
/// failure.
struct IsoCheck {
  std::size_t checked = 0;
  bool ok = true;
  std::string detail;
};

/// Samples the map (h, x) -> h sigma(x) for identity preservation,
/// multiplicativity, and compatibility with inverses, over all pairs drawn
/// from the given kernel and quotient samples.
IsoCheck esigma_iso_check(const CocycleTables& ct, const std::vector<Element>& kernel_samples,
                          const std::vector<Element>& quotient_samples);

/**
 * Whether conjugation by the section preserves a subgroup of the kernel:
 *   consistent    sigma(g) H sigma(g)^-1 = H for every listed g
 *   one_sided     exactly one inclusion holds across the whole list
 *   inconsistent  both inclusions fail somewhere
 */
enum class ConsistencyVerdict { consistent, one_sided, inconsistent };

std::string to_string(ConsistencyVerdict v);

/// Conjugates every generator of `h` by sigma(g) in both directions for each
/// listed g. Requires generators on `h` (std::invalid_argument otherwise).
ConsistencyVerdict is_consistent(const CocycleTables& ct, const Subgroup& h,
                                 const std::vector<Element>& gammas);

/// Elements of `h` whose sigma(g)-conjugates stay in `h` in both directions
/// for every listed g; the largest subgroup of `h` on which the listed slices
/// act by conjugation. Generators are the generators of `h` that qualify.
SubgroupPtr sigma_core_subgroup(const CocycleTables& ct, SubgroupPtr h,
                                const std::vector<Element>& gammas, std::string name = "");

/// Relative twisting between two slices of the extension:
///   theta(g) = sigma(gamma) sigma(beta)^-1 g sigma(gamma beta^-1)^-1,
/// which lands in the kernel whenever g does.
Element theta(const CocycleTables& ct, const Element& gamma, const Element& beta,
              const Element& g);

/// Result of testing the coset map induced by theta on a ball of right
/// cosets. Conclusive only when the ball closes under generator steps within
/// the radius and budget, so it is the whole coset space.
struct ThetaCheck {
  bool conclusive = false;
  bool bijective_on_ball = false;
  std::size_t ball_size = 0;
  std::string detail;
};

/// Walks the right cosets of `inner` out to `radius`, applies theta to each
/// representative, and checks the induced map coset-to-coset for injectivity
/// and containment. The inner pair must live inside the kernel (for example
/// through make_subgroup_group).
ThetaCheck theta_bijectivity_check(const CocycleTables& ct, const PairPtr& inner,
                                   const Element& gamma, const Element& beta, int radius,
                                   std::size_t budget = 200000);

/// Hecke pair (total, h) for a subgroup of the kernel; validates that the
/// generators of `h` lie in the kernel.
PairPtr extension_pair(const ExtensionData& ext, SubgroupPtr h, PairOptions opts = {});

/// Outcome of a sampled identity; `detail` describes the first failure.
struct SampledCheck {
  std::size_t checked = 0;
  bool ok = true;
  std::string detail;
};

/**
 * Verifies on samples that the coset H g sigma(gamma) determines and is
 * determined by the pair (H g, gamma): for all sampled (g, gamma) and
 * (g', gamma'), the cosets agree in the total group exactly when gamma =
 * gamma' and H g = H g'. `h` must be a subgroup of the total group whose
 * membership test is defined on all of it.
 */
SampledCheck coset_split_check(const CocycleTables& ct, const SubgroupPtr& h,
                               const std::vector<Element>& kernel_samples,
                               const std::vector<Element>& gammas);

/**
 * For layouts where conjugation by the section preserves `h`, checks
 *   |H : H n (g sigma(gamma)) H (g sigma(gamma))^-1| <= |H : H n g H g^-1|
 * with exact index tables. An index walk that exhausts the budget makes the
 * check fail with a budget note rather than throw.
 */
SampledCheck conjugation_bound_check(const CocycleTables& ct, const SubgroupPtr& h,
                                     const std::vector<Element>& kernel_samples,
                                     const std::vector<Element>& gammas,
                                     std::size_t budget = 200000);

/// Length on the total group read through the projection: L'(e) =
/// quotient_len(pi(e)). Vanishes on the kernel by construction.
LengthFunction extension_length_prime(const ExtensionData& ext, LengthFunction quotient_len);

/**
 * Finite-quotient transport of a kernel length: with p(x) = x sigma(pi(x))^-1
 * the kernel part of x,
 *   k(e) = max over quotient beta of kernel_len(p(sigma(beta) e))
 * and the result is k(e) + k(e^-1). Requires the quotient to be finite within
 * `gamma_cap` (std::domain_error otherwise).
 */
LengthFunction max_gamma_length(const CocycleTables& ct, LengthFunction kernel_len,
                                std::size_t gamma_cap = 10000);

}  // namespace hecke
