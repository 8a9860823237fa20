#pragma once

// Exact arithmetic substrate: big integers and rationals, small prime fields,
// integer matrices with Smith normal form and integral linear solving.

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tvb/error.hpp"

namespace tvb {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int abs_int(const Int& a) { return a < 0 ? Int(-a) : a; }

inline Int gcd_int(Int a, Int b) {
  a = abs_int(a);
  b = abs_int(b);
  while (b != 0) {
    Int r = a % b;
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

/// Floor division (boost truncates toward zero).
inline Int floor_div(const Int& a, const Int& b) {
  Int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

/// num/den with the sign moved to the numerator; cpp_rational rejects a
/// negative denominator.
inline Rat make_rat(Int num, Int den) {
  if (den < 0) {
    num = -num;
    den = -den;
  }
  return Rat(num, den);
}

inline std::string to_string(const Rat& r) {
  if (boost::multiprecision::denominator(r) == 1) return boost::multiprecision::numerator(r).str();
  return boost::multiprecision::numerator(r).str() + "/" + boost::multiprecision::denominator(r).str();
}

/// Parses "a" or "a/b" into a normalized rational.
inline Rat parse_rational(const std::string& text) {
  auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return Rat(Int(text));
    Int num(text.substr(0, slash));
    Int den(text.substr(slash + 1));
    if (den == 0) throw ParseError("zero denominator in '" + text + "'");
    return make_rat(num, den);
  } catch (const std::runtime_error&) {
    throw ParseError("not a rational number: '" + text + "'");
  }
}

// ---------------------------------------------------------------------------
// Fields. Both expose the same small interface so linear algebra and
// configuration checks can be written once as templates.

class PrimeField {
 public:
  using value_type = std::uint32_t;
  static constexpr std::uint32_t kMaxModulus = 1u << 16;

  explicit PrimeField(std::uint32_t p) : p_(p) {
    if (p < 2 || p >= kMaxModulus) throw InvalidArgument("prime modulus must satisfy 2 <= p < 65536");
    for (std::uint32_t q = 2; q * q <= p; ++q)
      if (p % q == 0) throw InvalidArgument(std::to_string(p) + " is not prime");
  }

  std::uint32_t modulus() const noexcept { return p_; }
  std::string name() const { return "Fp:" + std::to_string(p_); }

  value_type zero() const noexcept { return 0; }
  value_type one() const noexcept { return 1; }
  value_type from_int(const Int& a) const {
    Int r = a % p_;
    if (r < 0) r += p_;
    return static_cast<value_type>(r);
  }
  value_type from_rat(const Rat& a) const {
    value_type den = from_int(boost::multiprecision::denominator(a));
    if (den == 0) throw InvalidArgument("denominator vanishes mod " + std::to_string(p_));
    return mul(from_int(boost::multiprecision::numerator(a)), inv(den));
  }
  value_type add(value_type a, value_type b) const noexcept { return (a + b) % p_; }
  value_type sub(value_type a, value_type b) const noexcept { return (a + p_ - b) % p_; }
  value_type neg(value_type a) const noexcept { return a == 0 ? 0 : p_ - a; }
  value_type mul(value_type a, value_type b) const noexcept {
    return static_cast<value_type>((std::uint64_t{a} * b) % p_);
  }
  value_type inv(value_type a) const {
    if (a == 0) throw InvalidArgument("division by zero in " + name());
    // Fermat: a^(p-2)
    value_type result = 1, base = a;
    for (std::uint32_t e = p_ - 2; e != 0; e >>= 1) {
      if (e & 1u) result = mul(result, base);
      base = mul(base, base);
    }
    return result;
  }
  value_type div(value_type a, value_type b) const { return mul(a, inv(b)); }
  bool is_zero(value_type a) const noexcept { return a == 0; }
  std::string format(value_type a) const { return std::to_string(a); }

  friend bool operator==(const PrimeField& a, const PrimeField& b) { return a.p_ == b.p_; }

 private:
  std::uint32_t p_;
};

class RationalField {
 public:
  using value_type = Rat;

  std::string name() const { return "Q"; }
  value_type zero() const { return 0; }
  value_type one() const { return 1; }
  value_type from_int(const Int& a) const { return Rat(a); }
  value_type from_rat(const Rat& a) const { return a; }
  value_type add(const Rat& a, const Rat& b) const { return a + b; }
  value_type sub(const Rat& a, const Rat& b) const { return a - b; }
  value_type neg(const Rat& a) const { return -a; }
  value_type mul(const Rat& a, const Rat& b) const { return a * b; }
  value_type inv(const Rat& a) const {
    if (a == 0) throw InvalidArgument("division by zero in Q");
    return 1 / a;
  }
  value_type div(const Rat& a, const Rat& b) const { return mul(a, inv(b)); }
  bool is_zero(const Rat& a) const { return a == 0; }
  std::string format(const Rat& a) const { return to_string(a); }

  friend bool operator==(const RationalField&, const RationalField&) { return true; }
};

// ---------------------------------------------------------------------------

class IntMatrix {
 public:
  IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {
    if (rows == 0 || cols == 0) throw InvalidArgument("IntMatrix dimensions must be positive");
  }
  IntMatrix(std::initializer_list<std::initializer_list<Int>> rows)
      : IntMatrix(rows.size(), rows.size() == 0 ? 0 : rows.begin()->size()) {
    std::size_t i = 0;
    for (const auto& row : rows) {
      if (row.size() != cols_) throw InvalidArgument("ragged IntMatrix initializer");
      std::size_t j = 0;
      for (const auto& v : row) (*this)(i, j++) = v;
      ++i;
    }
  }
  static IntMatrix from_rows(const std::vector<std::vector<Int>>& rows) {
    if (rows.empty()) throw InvalidArgument("IntMatrix dimensions must be positive");
    IntMatrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != m.cols_) throw InvalidArgument("ragged IntMatrix rows");
      for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }
  static IntMatrix identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  Int& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Int& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  IntMatrix transpose() const {
    IntMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  std::vector<Int> apply(const std::vector<Int>& x) const {
    if (x.size() != cols_) throw DimensionMismatch("matrix-vector size mismatch");
    std::vector<Int> y(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) y[i] += (*this)(i, j) * x[j];
    return y;
  }

  friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
    if (a.cols_ != b.rows_) throw DimensionMismatch("matrix product size mismatch");
    IntMatrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        if (a(i, k) == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += a(i, k) * b(k, j);
      }
    return c;
  }
  friend bool operator==(const IntMatrix& a, const IntMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
  }
  void swap_cols(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
  }
  /// row[dst] += factor * row[src]
  void add_row(std::size_t dst, std::size_t src, const Int& factor) {
    for (std::size_t j = 0; j < cols_; ++j) (*this)(dst, j) += factor * (*this)(src, j);
  }
  void add_col(std::size_t dst, std::size_t src, const Int& factor) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, dst) += factor * (*this)(i, src);
  }
  void negate_row(std::size_t r) {
    for (std::size_t j = 0; j < cols_; ++j) (*this)(r, j) = -(*this)(r, j);
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Int> data_;
};

/// Fraction-free (Bareiss) determinant of a square matrix.
inline Int determinant(IntMatrix m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("determinant of a non-square matrix");
  const std::size_t n = m.rows();
  Int sign = 1, prev = 1;
  for (std::size_t k = 0; k < n; ++k) {
    if (m(k, k) == 0) {
      std::size_t swap = k + 1;
      while (swap < n && m(swap, k) == 0) ++swap;
      if (swap == n) return 0;
      m.swap_rows(k, swap);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
    }
    prev = m(k, k);
  }
  return sign * m(n - 1, n - 1);
}

/// left * A * right == diagonal, with left and right unimodular and the
/// nonzero diagonal entries forming a divisibility chain.
struct SmithDecomposition {
  IntMatrix left;
  IntMatrix diagonal;
  IntMatrix right;
  std::vector<Int> factors;  // nonzero invariant factors d_1 | d_2 | ... | d_rank
};

namespace detail {

// Locates the nonzero entry of smallest absolute value in the trailing block.
inline bool smallest_pivot(const IntMatrix& a, std::size_t t, std::size_t& pi, std::size_t& pj) {
  bool found = false;
  Int best;
  for (std::size_t i = t; i < a.rows(); ++i)
    for (std::size_t j = t; j < a.cols(); ++j) {
      if (a(i, j) == 0) continue;
      Int v = abs_int(a(i, j));
      if (!found || v < best) {
        best = v;
        pi = i;
        pj = j;
        found = true;
      }
    }
  return found;
}

}  // namespace detail

inline SmithDecomposition smith_decomposition(const IntMatrix& input) {
  IntMatrix a = input;
  IntMatrix u = IntMatrix::identity(a.rows());
  IntMatrix v = IntMatrix::identity(a.cols());
  const std::size_t limit = std::min(a.rows(), a.cols());
  std::vector<Int> factors;

  for (std::size_t t = 0; t < limit; ++t) {
    std::size_t pi = 0, pj = 0;
    if (!detail::smallest_pivot(a, t, pi, pj)) break;
    for (;;) {
      a.swap_rows(t, pi);
      u.swap_rows(t, pi);
      a.swap_cols(t, pj);
      v.swap_cols(t, pj);

      bool dirty = false;
      for (std::size_t i = t + 1; i < a.rows(); ++i) {
        if (a(i, t) == 0) continue;
        Int q = floor_div(a(i, t), a(t, t));
        a.add_row(i, t, -q);
        u.add_row(i, t, -q);
        dirty = dirty || a(i, t) != 0;
      }
      for (std::size_t j = t + 1; j < a.cols(); ++j) {
        if (a(t, j) == 0) continue;
        Int q = floor_div(a(t, j), a(t, t));
        a.add_col(j, t, -q);
        v.add_col(j, t, -q);
        dirty = dirty || a(t, j) != 0;
      }
      if (!dirty) {
        // Row and column cleared; enforce divisibility of the remaining block.
        std::size_t bad_row = a.rows();
        for (std::size_t i = t + 1; i < a.rows() && bad_row == a.rows(); ++i)
          for (std::size_t j = t + 1; j < a.cols(); ++j)
            if (a(i, j) % a(t, t) != 0) {
              bad_row = i;
              break;
            }
        if (bad_row == a.rows()) break;
        a.add_row(t, bad_row, 1);
        u.add_row(t, bad_row, 1);
      }
      // Only the pivot row/column can still hold nonzeros smaller than a(t,t).
      Int best = abs_int(a(t, t));
      pi = t;
      pj = t;
      for (std::size_t i = t; i < a.rows(); ++i)
        if (a(i, t) != 0 && abs_int(a(i, t)) < best) best = abs_int(a(i, t)), pi = i, pj = t;
      for (std::size_t j = t; j < a.cols(); ++j)
        if (a(t, j) != 0 && abs_int(a(t, j)) < best) best = abs_int(a(t, j)), pi = t, pj = j;
    }
    if (a(t, t) < 0) {
      a.negate_row(t);
      u.negate_row(t);
    }
    factors.push_back(a(t, t));
  }
  return SmithDecomposition{std::move(u), std::move(a), std::move(v), std::move(factors)};
}

/// Nonzero invariant factors of A, forming a divisibility chain. The number of
/// factors is the rank; for A viewed as a map Z^cols -> Z^rows the cokernel is
/// Z^(rows - rank) plus the torsion Z/d_i.
inline std::vector<Int> smith_normal_form(const IntMatrix& a) { return smith_decomposition(a).factors; }

struct IntegerSolveResult {
  enum class Status { Integral, RationalOnly, NoRationalSolution };
  Status status;
  std::optional<std::vector<Int>> solution;           // set when Integral
  std::optional<std::vector<Rat>> rational_solution;  // set unless NoRationalSolution

  bool integral() const noexcept { return status == Status::Integral; }
};

/// Solves A x = b over the integers. Free directions are set to zero, so the
/// returned x is the unique solution whenever A has full column rank.
inline IntegerSolveResult solve_integer_linear(const IntMatrix& a, const std::vector<Int>& b) {
  if (b.size() != a.rows()) throw DimensionMismatch("right-hand side length differs from row count");
  SmithDecomposition snf = smith_decomposition(a);
  const std::vector<Int> c = snf.left.apply(b);
  const std::size_t rank = snf.factors.size();

  for (std::size_t i = rank; i < c.size(); ++i)
    if (c[i] != 0) return {IntegerSolveResult::Status::NoRationalSolution, std::nullopt, std::nullopt};

  std::vector<Rat> y(a.cols());
  bool integral = true;
  for (std::size_t i = 0; i < rank; ++i) {
    y[i] = make_rat(c[i], snf.factors[i]);
    integral = integral && (c[i] % snf.factors[i] == 0);
  }
  std::vector<Rat> x(a.cols());
  for (std::size_t i = 0; i < a.cols(); ++i)
    for (std::size_t j = 0; j < rank; ++j) x[i] += Rat(snf.right(i, j)) * y[j];

  IntegerSolveResult result{integral ? IntegerSolveResult::Status::Integral
                                     : IntegerSolveResult::Status::RationalOnly,
                            std::nullopt, x};
  if (integral) {
    std::vector<Int> xi(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) xi[i] = boost::multiprecision::numerator(x[i]);
    result.solution = std::move(xi);
  }
  return result;
}

}  // namespace tvb
