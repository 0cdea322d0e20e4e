#include "hecke/numeric.hpp"

#include <functional>
#include <limits>

namespace hecke {

namespace {
const Int kI64Min{std::numeric_limits<std::int64_t>::min()};
const Int kI64Max{std::numeric_limits<std::int64_t>::max()};
}  // namespace

std::size_t hash_int(const Int& v) {
  if (v >= kI64Min && v <= kI64Max) {
    return std::hash<std::int64_t>{}(v.convert_to<std::int64_t>());
  }
  return std::hash<std::string>{}(v.str());
}

std::size_t hash_rational(const Rational& v) {
  std::size_t seed = hash_int(numerator(v));
  hash_mix(seed, hash_int(denominator(v)));
  return seed;
}

double to_double(const Rational& v) { return v.convert_to<double>(); }

Int floor_div(const Int& n, const Int& d) {
  if (d <= 0) throw std::domain_error("floor_div: divisor must be positive");
  Int q = n / d;
  if (n % d != 0 && n < 0) --q;
  return q;
}

Int floor_mod(const Int& n, const Int& d) { return n - floor_div(n, d) * d; }

Int rational_floor(const Rational& v) { return floor_div(numerator(v), denominator(v)); }

Rational frac_part(const Rational& v) { return v - Rational(rational_floor(v)); }

IntMatrix::IntMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), a_(rows * cols, Int(0)) {}

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::mul(const IntMatrix& rhs) const {
  if (cols_ != rhs.rows_) throw std::domain_error("IntMatrix::mul: shape mismatch");
  IntMatrix out(rows_, rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const Int& aik = at(i, k);
      if (aik == 0) continue;
      for (std::size_t j = 0; j < rhs.cols_; ++j) out.at(i, j) += aik * rhs.at(k, j);
    }
  return out;
}

std::vector<Int> IntMatrix::apply(const std::vector<Int>& v) const {
  if (v.size() != cols_) throw std::domain_error("IntMatrix::apply: shape mismatch");
  std::vector<Int> out(rows_, Int(0));
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out[i] += at(i, j) * v[j];
  return out;
}

IntMatrix IntMatrix::integer_inverse() const {
  if (rows_ != cols_) throw std::domain_error("integer_inverse: matrix not square");
  const std::size_t n = rows_;
  // Gauss-Jordan over exact rationals on [A | I].
  std::vector<std::vector<Rational>> m(n, std::vector<Rational>(2 * n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m[i][j] = Rational(at(i, j));
    m[i][n + i] = 1;
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && m[piv][col] == 0) ++piv;
    if (piv == n) throw std::domain_error("integer_inverse: singular matrix");
    std::swap(m[piv], m[col]);
    Rational p = m[col][col];
    for (auto& x : m[col]) x /= p;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || m[r][col] == 0) continue;
      Rational f = m[r][col];
      for (std::size_t j = 0; j < 2 * n; ++j) m[r][j] -= f * m[col][j];
    }
  }
  IntMatrix inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const Rational& x = m[i][n + j];
      if (denominator(x) != 1)
        throw std::domain_error("integer_inverse: inverse is not integral");
      inv.at(i, j) = numerator(x);
    }
  return inv;
}

IntLattice::IntLattice(std::vector<std::vector<Int>> gens, std::vector<Int> moduli)
    : cols_(moduli.size()) {
  std::vector<std::vector<Int>> work;
  for (auto& g : gens) {
    if (g.size() != cols_) throw std::domain_error("IntLattice: generator dimension mismatch");
    work.push_back(std::move(g));
  }
  // Torsion relations m_i * e_i belong to every subgroup of the ambient group.
  for (std::size_t i = 0; i < cols_; ++i) {
    if (moduli[i] != 0) {
      std::vector<Int> row(cols_, Int(0));
      row[i] = moduli[i];
      work.push_back(std::move(row));
    }
  }
  // Integer row echelon via gcd elimination, one column at a time.
  std::size_t top = 0;
  for (std::size_t col = 0; col < cols_ && top < work.size(); ++col) {
    for (;;) {
      std::size_t best = work.size();
      for (std::size_t r = top; r < work.size(); ++r) {
        if (work[r][col] == 0) continue;
        if (best == work.size() || abs(work[r][col]) < abs(work[best][col])) best = r;
      }
      if (best == work.size()) break;  // column clear below top
      std::swap(work[top], work[best]);
      bool reduced_all = true;
      for (std::size_t r = top + 1; r < work.size(); ++r) {
        if (work[r][col] == 0) continue;
        Int q = work[r][col] / work[top][col];
        for (std::size_t j = 0; j < cols_; ++j) work[r][j] -= q * work[top][j];
        if (work[r][col] != 0) reduced_all = false;
      }
      if (reduced_all) {
        if (work[top][col] < 0)
          for (auto& x : work[top]) x = -x;
        rows_.push_back(work[top]);
        pivots_.push_back(col);
        ++top;
        break;
      }
    }
  }
  // Reduce entries above each pivot so residues are canonical.
  for (std::size_t r = rows_.size(); r-- > 0;) {
    for (std::size_t above = 0; above < r; ++above) {
      Int q = floor_div(rows_[above][pivots_[r]], rows_[r][pivots_[r]]);
      if (q == 0) continue;
      for (std::size_t j = 0; j < cols_; ++j) rows_[above][j] -= q * rows_[r][j];
    }
  }
}

bool IntLattice::contains(const std::vector<Int>& v) const {
  if (v.size() != cols_) throw std::domain_error("IntLattice::contains: dimension mismatch");
  std::vector<Int> w = v;
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    const Int& p = rows_[r][pivots_[r]];
    if (w[pivots_[r]] % p != 0) return false;
    Int q = w[pivots_[r]] / p;
    if (q != 0)
      for (std::size_t j = 0; j < cols_; ++j) w[j] -= q * rows_[r][j];
  }
  for (const auto& x : w)
    if (x != 0) return false;
  return true;
}

std::vector<Int> IntLattice::residue(const std::vector<Int>& v) const {
  if (v.size() != cols_) throw std::domain_error("IntLattice::residue: dimension mismatch");
  std::vector<Int> w = v;
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    Int q = floor_div(w[pivots_[r]], rows_[r][pivots_[r]]);
    if (q != 0)
      for (std::size_t j = 0; j < cols_; ++j) w[j] -= q * rows_[r][j];
  }
  return w;
}

}  // namespace hecke
