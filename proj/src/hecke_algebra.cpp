#include "hecke/hecke_algebra.hpp"

#include <set>

namespace hecke {

namespace {

struct SparseColumns {
  // entries[col] lists (row, value); rows span a possibly larger ball.
  std::vector<std::vector<std::pair<std::size_t, double>>> entries;
  std::size_t rows = 0;
};

double norm2(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

OpNormResult operator_norm_estimate(const HeckeFunction<double>& f, int truncation_radius,
                                    int max_iterations, double tolerance) {
  const Pair& pair = f.pair();
  const Group& grp = pair.group();

  // Domain: coset ball of the truncation radius, layered for the boundary
  // mass diagnostic.
  std::vector<Element> step;
  for (const auto& s : grp.generators()) {
    step.push_back(s);
    step.push_back(grp.inverse(s));
  }
  std::map<Element, std::size_t, ElementLess> col_index;
  std::vector<Element> domain;
  std::vector<std::size_t> layer_start{0};
  {
    Element start = pair.coset_rep(grp.identity());
    col_index.emplace(start, 0);
    domain.push_back(start);
    std::vector<Element> frontier{start};
    for (int r = 0; r < truncation_radius && !frontier.empty(); ++r) {
      std::vector<Element> next;
      for (const auto& cur : frontier)
        for (const auto& s : step) {
          Element rep = pair.coset_rep(grp.multiply(cur, s));
          if (col_index.count(rep)) continue;
          if (domain.size() >= pair.options().coset_budget)
            throw std::domain_error("operator_norm_estimate: coset ball exceeded the budget");
          col_index.emplace(rep, domain.size());
          domain.push_back(rep);
          next.push_back(rep);
        }
      if (!next.empty()) layer_start.push_back(domain.size() - next.size());
      frontier = std::move(next);
    }
  }
  OpNormResult result;
  result.dimension = domain.size();
  result.space_closed = true;

  // Columns of the truncated operator. Row cosets H(v u) for distinct support
  // reps v are distinct, so each entry is written once.
  std::vector<Element> freps = support_right_reps(f);
  std::map<Element, std::size_t, ElementLess> row_index;
  SparseColumns m;
  m.entries.resize(domain.size());
  for (std::size_t col = 0; col < domain.size(); ++col) {
    for (const auto& [dc_rep, coeff] : f.terms()) {
      const auto& rec = pair.double_coset(dc_rep);
      for (const auto& v : rec.right_reps) {
        Element row_rep = pair.coset_rep(grp.multiply(v, domain[col]));
        auto [it, inserted] = row_index.try_emplace(row_rep, m.rows);
        if (inserted) ++m.rows;
        m.entries[col].push_back({it->second, coeff});
        if (!col_index.count(row_rep)) result.space_closed = false;
      }
    }
  }

  if (domain.empty()) return result;

  // Power iteration on M^T M; Rayleigh values are nondecreasing lower bounds.
  std::vector<double> v(domain.size(), 1.0 / std::sqrt(double(domain.size())));
  std::vector<double> w(m.rows, 0.0);
  double prev = 0.0;
  for (int iter = 1; iter <= max_iterations; ++iter) {
    std::fill(w.begin(), w.end(), 0.0);
    for (std::size_t col = 0; col < domain.size(); ++col)
      for (const auto& [row, val] : m.entries[col]) w[row] += val * v[col];
    double est = norm2(w);
    result.estimate = est;
    result.iterations = iter;
    if (est == 0.0) {
      result.converged = true;
      break;
    }
    std::vector<double> u(domain.size(), 0.0);
    for (std::size_t col = 0; col < domain.size(); ++col)
      for (const auto& [row, val] : m.entries[col]) u[col] += val * w[row];
    double un = norm2(u);
    if (un == 0.0) {
      result.converged = true;
      break;
    }
    for (std::size_t i = 0; i < u.size(); ++i) v[i] = u[i] / un;
    if (iter > 1 && std::abs(est - prev) <= tolerance * std::max(1.0, est)) {
      result.converged = true;
      break;
    }
    prev = est;
  }

  double boundary = 0.0;
  if (layer_start.size() > 1) {
    for (std::size_t i = layer_start.back(); i < v.size(); ++i) boundary += v[i] * v[i];
  }
  result.boundary_mass = boundary;
  return result;
}

}  // namespace hecke
