#pragma once

// Field-generic linear algebra on row vectors (subspaces kept in reduced
// echelon form), plus an exact feasibility test for { x >= 0 : A x = b }.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tvb/exact.hpp"

namespace tvb {

template <class F>
using Row = std::vector<typename F::value_type>;

template <class F>
using Rows = std::vector<Row<F>>;

/// Reduced row echelon form with zero rows dropped. Pivot columns are returned
/// through `pivots` when requested.
template <class F>
Rows<F> row_reduce(const F& field, Rows<F> m, std::vector<std::size_t>* pivots = nullptr) {
  if (pivots) pivots->clear();
  if (m.empty()) return m;
  const std::size_t cols = m.front().size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < m.size(); ++c) {
    std::size_t pivot = r;
    while (pivot < m.size() && field.is_zero(m[pivot][c])) ++pivot;
    if (pivot == m.size()) continue;
    std::swap(m[r], m[pivot]);
    const auto scale = field.inv(m[r][c]);
    for (auto& x : m[r]) x = field.mul(x, scale);
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == r || field.is_zero(m[i][c])) continue;
      const auto factor = m[i][c];
      for (std::size_t j = 0; j < cols; ++j) m[i][j] = field.sub(m[i][j], field.mul(factor, m[r][j]));
    }
    if (pivots) pivots->push_back(c);
    ++r;
  }
  m.resize(r);
  return m;
}

template <class F>
typename F::value_type dot(const F& field, const Row<F>& a, const Row<F>& b) {
  auto s = field.zero();
  for (std::size_t i = 0; i < a.size(); ++i) s = field.add(s, field.mul(a[i], b[i]));
  return s;
}

/// Basis of { x : m x = 0 } for an m with `cols` columns.
template <class F>
Rows<F> nullspace(const F& field, const Rows<F>& m, std::size_t cols) {
  std::vector<std::size_t> pivots;
  Rows<F> reduced = row_reduce(field, m, &pivots);
  Rows<F> basis;
  std::vector<bool> is_pivot(cols, false);
  for (auto p : pivots) is_pivot[p] = true;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    Row<F> v(cols, field.zero());
    v[free] = field.one();
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = field.neg(reduced[r][free]);
    basis.push_back(std::move(v));
  }
  return basis;
}

/// A linear subspace of F^ambient in canonical (reduced echelon) form, so two
/// subspaces are equal exactly when their bases are.
template <class F>
class Subspace {
 public:
  Subspace(F field, std::size_t ambient) : field_(std::move(field)), ambient_(ambient) {}

  static Subspace span(const F& field, std::size_t ambient, Rows<F> vectors) {
    for (const auto& v : vectors)
      if (v.size() != ambient) throw DimensionMismatch("spanning vector of wrong length");
    Subspace s(field, ambient);
    s.basis_ = row_reduce(field, std::move(vectors));
    return s;
  }
  static Subspace full(const F& field, std::size_t ambient) {
    Rows<F> id(ambient, Row<F>(ambient, field.zero()));
    for (std::size_t i = 0; i < ambient; ++i) id[i][i] = field.one();
    return span(field, ambient, std::move(id));
  }
  static Subspace zero(const F& field, std::size_t ambient) { return Subspace(field, ambient); }

  const F& field() const noexcept { return field_; }
  std::size_t ambient() const noexcept { return ambient_; }
  std::size_t dim() const noexcept { return basis_.size(); }
  const Rows<F>& basis() const noexcept { return basis_; }

  bool contains(const Row<F>& v) const {
    Rows<F> m = basis_;
    m.push_back(v);
    return row_reduce(field_, std::move(m)).size() == basis_.size();
  }
  bool contains(const Subspace& other) const {
    return std::all_of(other.basis_.begin(), other.basis_.end(), [&](const Row<F>& v) { return contains(v); });
  }

  Subspace sum(const Subspace& other) const {
    Rows<F> m = basis_;
    m.insert(m.end(), other.basis_.begin(), other.basis_.end());
    return span(field_, ambient_, std::move(m));
  }

  /// Zassenhaus: reduce [[A, A], [B, 0]]; rows with vanishing left half span A ∩ B.
  Subspace intersect(const Subspace& other) const {
    if (dim() == 0 || other.dim() == 0) return zero(field_, ambient_);
    Rows<F> m;
    for (const auto& a : basis_) {
      Row<F> row(a);
      row.insert(row.end(), a.begin(), a.end());
      m.push_back(std::move(row));
    }
    for (const auto& b : other.basis_) {
      Row<F> row(b);
      row.resize(2 * ambient_, field_.zero());
      m.push_back(std::move(row));
    }
    Rows<F> reduced = row_reduce(field_, std::move(m));
    Rows<F> out;
    for (const auto& row : reduced) {
      bool left_zero = std::all_of(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(ambient_),
                                   [&](const auto& x) { return field_.is_zero(x); });
      if (left_zero) out.emplace_back(row.begin() + static_cast<std::ptrdiff_t>(ambient_), row.end());
    }
    return span(field_, ambient_, std::move(out));
  }

  /// Annihilator { x : <x, v> = 0 for all v in this }.
  Subspace orthogonal() const {
    if (basis_.empty()) return full(field_, ambient_);
    return span(field_, ambient_, nullspace(field_, basis_, ambient_));
  }

  friend bool operator==(const Subspace& a, const Subspace& b) {
    return a.ambient_ == b.ambient_ && a.basis_ == b.basis_;
  }

 private:
  F field_;
  std::size_t ambient_;
  Rows<F> basis_;
};

/// Exact phase-one simplex (Bland's rule) for { x >= 0 : A x = b }. Returns a
/// feasible point or nullopt.
inline std::optional<std::vector<Rat>> nonnegative_solution(const std::vector<std::vector<Rat>>& a,
                                                            const std::vector<Rat>& b) {
  const std::size_t m = a.size();
  if (b.size() != m) throw DimensionMismatch("LP right-hand side length differs from row count");
  const std::size_t n = m == 0 ? 0 : a.front().size();
  if (m == 0) return std::vector<Rat>{};

  // Tableau columns: n structural, m artificial, then the right-hand side.
  const std::size_t width = n + m + 1;
  std::vector<std::vector<Rat>> t(m, std::vector<Rat>(width));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    const bool flip = b[i] < 0;
    for (std::size_t j = 0; j < n; ++j) t[i][j] = flip ? Rat(-a[i][j]) : a[i][j];
    t[i][n + i] = 1;
    t[i][width - 1] = flip ? Rat(-b[i]) : b[i];
    basis[i] = n + i;
  }
  // Reduced costs of the phase-one objective (sum of artificials).
  std::vector<Rat> cost(width);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < width; ++j)
      if (j < n || j == width - 1) cost[j] -= t[i][j];

  for (;;) {
    std::size_t enter = width;
    for (std::size_t j = 0; j + 1 < width; ++j)
      if (cost[j] < 0) {
        enter = j;
        break;
      }
    if (enter == width) break;
    std::size_t leave = m;
    Rat best;
    for (std::size_t i = 0; i < m; ++i) {
      if (t[i][enter] <= 0) continue;
      Rat ratio = t[i][width - 1] / t[i][enter];
      if (leave == m || ratio < best || (ratio == best && basis[i] < basis[leave])) {
        best = ratio;
        leave = i;
      }
    }
    if (leave == m) break;  // unbounded direction cannot occur in phase one
    const Rat pivot = t[leave][enter];
    for (auto& x : t[leave]) x /= pivot;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leave || t[i][enter] == 0) continue;
      const Rat f = t[i][enter];
      for (std::size_t j = 0; j < width; ++j) t[i][j] -= f * t[leave][j];
    }
    if (cost[enter] != 0) {
      const Rat f = cost[enter];
      for (std::size_t j = 0; j < width; ++j) cost[j] -= f * t[leave][j];
    }
    basis[leave] = enter;
  }
  if (cost[width - 1] != 0) return std::nullopt;  // -(sum of artificials) at optimum
  std::vector<Rat> x(n);
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < n) x[basis[i]] = t[i][width - 1];
  return x;
}

}  // namespace tvb
