#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace hecke {

/// Exact arbitrary-precision integers and rationals. All group arithmetic is exact;
/// doubles appear only in norm estimates and the decay probe.
using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

std::size_t hash_int(const Int& v);
std::size_t hash_rational(const Rational& v);

inline void hash_mix(std::size_t& seed, std::size_t v) {
  seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

double to_double(const Rational& v);

/// Floor division and floor remainder; d must be positive.
Int floor_div(const Int& n, const Int& d);
Int floor_mod(const Int& n, const Int& d);

/// Largest integer <= v.
Int rational_floor(const Rational& v);
/// v - floor(v), in [0, 1).
Rational frac_part(const Rational& v);

/// Dense row-major integer matrix. Small and exact; used for lattice membership
/// and for semidirect-product actions on abelian coordinates.
class IntMatrix {
public:
  IntMatrix(std::size_t rows, std::size_t cols);
  static IntMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Int& at(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
  const Int& at(std::size_t r, std::size_t c) const { return a_[r * cols_ + c]; }

  IntMatrix mul(const IntMatrix& rhs) const;
  std::vector<Int> apply(const std::vector<Int>& v) const;

  /// Exact inverse with integer entries; throws std::domain_error when the matrix
  /// is not invertible over the integers.
  IntMatrix integer_inverse() const;

  bool operator==(const IntMatrix& o) const = default;

private:
  std::size_t rows_, cols_;
  std::vector<Int> a_;
};

/// Membership and canonical residues for a finitely generated subgroup of
/// Z^k x prod Z/m_i, given by generator vectors. Rows are kept in Hermite-style
/// echelon form, so membership is a sequence of exact divisions and residues are
/// canonical coset representatives.
class IntLattice {
public:
  IntLattice(std::vector<std::vector<Int>> gens, std::vector<Int> moduli);

  bool contains(const std::vector<Int>& v) const;
  std::vector<Int> residue(const std::vector<Int>& v) const;
  std::size_t dimension() const { return cols_; }

private:
  std::vector<std::vector<Int>> rows_;  // echelon rows, positive pivots
  std::vector<std::size_t> pivots_;     // pivot column of each row, strictly increasing
  std::size_t cols_;
};

}  // namespace hecke
