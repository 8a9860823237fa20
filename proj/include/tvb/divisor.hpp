#pragma once

// Torus-invariant divisors on a simplicial fan: the Cartier test with its
// support function, and the class group as the cokernel of M -> Z^{rays}.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tvb/fan.hpp"

namespace tvb {

/// sum_ρ a_ρ D_ρ, coefficients indexed like the fan's rays.
struct TDivisor {
  std::vector<Int> coeffs;
};

/// The divisor of a character: ρ -> <m, ρ>.
inline TDivisor principal_divisor(const Fan& fan, const Character& m) {
  TDivisor d;
  for (const auto& r : fan.rays()) d.coeffs.push_back(pairing(m, r));
  return d;
}

/// One character m_σ per maximal cone with <m_σ, ρ> = a_ρ for ρ in σ.
struct SupportFunction {
  std::vector<Character> local;  // aligned with the fan's maximal cones
};

struct NotCartier {
  RaySet cone;
  std::vector<Rat> obstruction;  // a rational m_σ; empty if none exists
};

using CartierResult = std::variant<SupportFunction, NotCartier>;

inline CartierResult is_cartier(const Fan& fan, const TDivisor& divisor) {
  if (divisor.coeffs.size() != fan.rays().size())
    throw DimensionMismatch("divisor has " + std::to_string(divisor.coeffs.size()) + " coefficients for " +
                            std::to_string(fan.rays().size()) + " rays");
  SupportFunction s;
  for (const auto& cone : fan.max_cones()) {
    std::vector<Int> rhs;
    for (auto r : cone) rhs.push_back(divisor.coeffs[r]);
    auto solved = solve_integer_linear(matrix_of_rows(fan.generators(cone)), rhs);
    if (!solved.integral()) return NotCartier{cone, solved.rational_solution.value_or(std::vector<Rat>{})};
    s.local.emplace_back(*solved.solution);
  }
  return s;
}

/// phi(x) = <m_σ, x> for any maximal cone σ containing x.
inline Rat evaluate_support(const SupportFunction& s, const Fan& fan, const std::vector<Rat>& x) {
  if (x.size() != fan.dim()) throw DimensionMismatch("point has the wrong dimension");
  if (s.local.size() != fan.max_cones().size()) throw DimensionMismatch("support function does not match the fan");
  const std::size_t n = fan.dim();
  for (std::size_t k = 0; k < fan.max_cones().size(); ++k) {
    const auto gens = fan.generators(fan.max_cones()[k]);
    // Solve x = sum c_g g with c >= 0 (generators are independent).
    RationalField q;
    Rows<RationalField> aug;
    for (std::size_t i = 0; i < n; ++i) {
      Row<RationalField> row;
      for (const auto& g : gens) row.emplace_back(g[i]);
      row.push_back(x[i]);
      aug.push_back(std::move(row));
    }
    std::vector<std::size_t> pivots;
    auto red = row_reduce(q, aug, &pivots);
    if (!pivots.empty() && pivots.back() == gens.size()) continue;  // x not in the span
    bool inside = true;
    for (std::size_t r = 0; r < pivots.size() && inside; ++r) inside = red[r][gens.size()] >= 0;
    if (!inside) continue;
    Rat value = 0;
    for (std::size_t i = 0; i < n; ++i) value += Rat(s.local[k][i]) * x[i];
    return value;
  }
  throw OutsideSupport("point lies in no cone of the fan");
}

struct ClassGroup {
  Int free_rank;
  std::vector<Int> torsion;  // invariant factors > 1
};

/// Cokernel of the (#rays x n) evaluation matrix. Refuses fans whose rays do
/// not span, where M -> Z^{rays} fails to be injective.
inline ClassGroup class_group(const Fan& fan) {
  if (fan.rays().empty()) throw RaysDoNotSpan("fan has no rays");
  auto factors = smith_normal_form(matrix_of_rows(fan.rays()));
  if (factors.size() != fan.dim())
    throw RaysDoNotSpan("rays span a subspace of dimension " + std::to_string(factors.size()));
  ClassGroup g{Int(fan.rays().size() - fan.dim()), {}};
  for (const auto& d : factors)
    if (d > 1) g.torsion.push_back(d);
  return g;
}

}  // namespace tvb
