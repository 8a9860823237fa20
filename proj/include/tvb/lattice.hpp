#pragma once

// Elements of the cocharacter lattice N and the character lattice M. Both are
// Z^n, but they are different types so the pairing M x N -> Z is the only way
// to combine them.

#include <algorithm>
#include <initializer_list>
#include <ostream>
#include <string>
#include <vector>

#include "tvb/exact.hpp"

namespace tvb {

template <class Tag>
class IntVector {
 public:
  IntVector() = default;
  explicit IntVector(std::size_t n) : coords_(n) {}
  explicit IntVector(std::vector<Int> coords) : coords_(std::move(coords)) {}
  IntVector(std::initializer_list<Int> coords) : coords_(coords) {}

  static IntVector unit(std::size_t n, std::size_t i) {
    IntVector v(n);
    v.coords_.at(i) = 1;
    return v;
  }

  std::size_t size() const noexcept { return coords_.size(); }
  const Int& operator[](std::size_t i) const { return coords_[i]; }
  Int& operator[](std::size_t i) { return coords_[i]; }
  const std::vector<Int>& coords() const noexcept { return coords_; }

  bool is_zero() const {
    return std::all_of(coords_.begin(), coords_.end(), [](const Int& c) { return c == 0; });
  }
  Int content() const {
    Int g = 0;
    for (const auto& c : coords_) g = gcd_int(g, c);
    return g;
  }
  bool is_primitive() const { return content() == 1; }
  IntVector primitive() const {
    Int g = content();
    if (g == 0) throw InvalidArgument("zero vector has no primitive generator");
    IntVector out(*this);
    for (auto& c : out.coords_) c /= g;
    return out;
  }

  IntVector& operator+=(const IntVector& o) {
    check_size(o);
    for (std::size_t i = 0; i < size(); ++i) coords_[i] += o.coords_[i];
    return *this;
  }
  IntVector& operator-=(const IntVector& o) {
    check_size(o);
    for (std::size_t i = 0; i < size(); ++i) coords_[i] -= o.coords_[i];
    return *this;
  }
  friend IntVector operator+(IntVector a, const IntVector& b) { return a += b; }
  friend IntVector operator-(IntVector a, const IntVector& b) { return a -= b; }
  friend IntVector operator-(IntVector a) {
    for (auto& c : a.coords_) c = -c;
    return a;
  }
  friend IntVector operator*(const Int& s, IntVector a) {
    for (auto& c : a.coords_) c *= s;
    return a;
  }

  friend bool operator==(const IntVector& a, const IntVector& b) { return a.coords_ == b.coords_; }
  friend bool operator!=(const IntVector& a, const IntVector& b) { return !(a == b); }
  /// Lexicographic on coordinates; the canonical order used everywhere.
  friend bool operator<(const IntVector& a, const IntVector& b) {
    return std::lexicographical_compare(a.coords_.begin(), a.coords_.end(), b.coords_.begin(),
                                        b.coords_.end());
  }

  std::string str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < size(); ++i) s += (i ? "," : "") + coords_[i].str();
    return s + ")";
  }
  friend std::ostream& operator<<(std::ostream& os, const IntVector& v) { return os << v.str(); }

 private:
  void check_size(const IntVector& o) const {
    if (o.size() != size()) throw DimensionMismatch("lattice vectors of different rank");
  }
  std::vector<Int> coords_;
};

struct NTag {};
struct MTag {};

using LatticeVector = IntVector<NTag>;
using Character = IntVector<MTag>;

inline Int pairing(const Character& u, const LatticeVector& v) {
  if (u.size() != v.size()) throw DimensionMismatch("pairing of a character and a vector of different rank");
  Int s = 0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

/// Rows are the given vectors.
template <class Tag>
IntMatrix matrix_of_rows(const std::vector<IntVector<Tag>>& rows) {
  std::vector<std::vector<Int>> raw;
  raw.reserve(rows.size());
  for (const auto& r : rows) raw.push_back(r.coords());
  return IntMatrix::from_rows(raw);
}

/// Characters whose pairings with the basis vectors are prescribed: solves
/// <u, basis[i]> = values[i]. Returns nullopt when no integral solution exists.
inline std::optional<Character> character_with_values(const std::vector<LatticeVector>& basis,
                                                      const std::vector<Int>& values) {
  auto solved = solve_integer_linear(matrix_of_rows(basis), values);
  if (!solved.integral()) return std::nullopt;
  return Character(*solved.solution);
}

}  // namespace tvb
