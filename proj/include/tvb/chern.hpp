#pragma once

// Equivariant Chern data: a multiset of characters u(σ) on every maximal cone,
// subject to agreement on shared faces. The Chern classes are the elementary
// symmetric polynomials of these characters, cone by cone.

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tvb/fan.hpp"
#include "tvb/incidence.hpp"
#include "tvb/murphy_fan.hpp"

namespace tvb {

/// Explicit datum: chars[k] is u(σ_k) for the k-th maximal cone of the fan.
struct ChernDatum {
  std::size_t rank = 0;
  std::vector<std::vector<Character>> chars;
};

inline ChernDatum trivial_chern(const Fan& fan, std::size_t rank) {
  ChernDatum c{rank, {}};
  c.chars.assign(fan.max_cones().size(), std::vector<Character>(rank, Character(fan.dim())));
  return c;
}

/// Value vectors (<u, r_1>, ..., <u, r_k>) of a character multiset on a list
/// of generators, sorted. Two cones agree on a face iff these coincide.
inline std::vector<std::vector<Int>> value_vectors(const std::vector<Character>& chars,
                                                   const std::vector<LatticeVector>& gens) {
  std::vector<std::vector<Int>> out;
  for (const auto& u : chars) {
    std::vector<Int> v;
    for (const auto& g : gens) v.push_back(pairing(u, g));
    out.push_back(std::move(v));
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct ChernViolation {
  RaySet first;
  RaySet second;
  RaySet face;
  std::vector<std::vector<Int>> first_values;
  std::vector<std::vector<Int>> second_values;

  std::string describe() const {
    return "cones " + to_string(first) + " and " + to_string(second) + " disagree on face " + to_string(face);
  }
};

/// Checks that every pair of maximal cones sharing a nonzero face induces the
/// same multiset of characters on it.
inline std::optional<ChernViolation> validate_chern(const Fan& fan, const ChernDatum& c) {
  const auto& cones = fan.max_cones();
  if (c.chars.size() != cones.size()) throw DimensionMismatch("Chern datum does not cover every maximal cone");
  for (const auto& u : c.chars) {
    if (u.size() != c.rank) throw DimensionMismatch("character multiset of the wrong size");
    for (const auto& ch : u)
      if (ch.size() != fan.dim()) throw DimensionMismatch("character of the wrong rank");
  }
  for (std::size_t i = 0; i < cones.size(); ++i)
    for (std::size_t j = i + 1; j < cones.size(); ++j) {
      RaySet face = intersection(cones[i], cones[j]);
      if (face.empty()) continue;
      auto gens = fan.generators(face);
      auto vi = value_vectors(c.chars[i], gens);
      auto vj = value_vectors(c.chars[j], gens);
      if (vi != vj) return ChernViolation{cones[i], cones[j], face, std::move(vi), std::move(vj)};
    }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// The rule-based datum attached to incidence data on the blown-up fan.

/// Value pairs (<u, rho_a>, <u, rho_b>) prescribed for the two original rays of
/// a maximal cone, by the kinds of objects y_a, y_b and their incidence.
inline std::vector<std::pair<int, int>> murphy_value_pairs(const IncidenceData& incidence, int a, int b) {
  const int d = incidence.points();
  const bool a_point = a <= d, b_point = b <= d;
  if (a_point && b_point) return {{0, 0}, {1, 0}, {0, 1}};
  if (!a_point && !b_point) return {{1, 0}, {0, 1}, {1, 1}};
  auto point_line = [&](int point, int line) -> std::vector<std::pair<int, int>> {
    if (incidence.incident(point, line - d)) return {{0, 0}, {0, 1}, {1, 1}};
    return {{1, 0}, {0, 1}, {0, 1}};
  };
  if (a_point) return point_line(a, b);
  auto mirrored = point_line(b, a);
  for (auto& [x, y] : mirrored) std::swap(x, y);
  return mirrored;
}

class MurphyChern {
 public:
  MurphyChern(IncidenceData incidence, int n) : incidence_(std::move(incidence)), n_(n) {}

  const IncidenceData& incidence() const noexcept { return incidence_; }
  int n() const noexcept { return n_; }

  /// u(σ) for the cone of a flag: the characters with the tabulated values on
  /// (rho_a, rho_b) and value 0 on every composite ray.
  std::vector<Character> characters(const Flag& flag) const {
    check_flag(n_, flag);
    std::vector<LatticeVector> basis;
    for (auto l : flag.labels()) basis.push_back(label_vector(n_, l));
    std::vector<Character> out;
    for (auto [va, vb] : murphy_value_pairs(incidence_, flag.a, flag.b)) {
      std::vector<Int> values(basis.size(), Int(0));
      values[0] = va;
      values[1] = vb;
      auto u = character_with_values(basis, values);
      if (!u) throw InternalAudit("flag cone is not unimodular");
      out.push_back(std::move(*u));
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<Character> characters(const std::vector<RayLabel>& max_cone) const {
    return characters(flag_from_labels(n_, max_cone));
  }

 private:
  IncidenceData incidence_;
  int n_;
};

inline MurphyChern murphy_chern(const IncidenceData& incidence, const MurphyFanHandle& h) {
  if (h.n() != incidence.points() + incidence.lines() - 1)
    throw DimensionMismatch("fan dimension " + std::to_string(h.n()) + " differs from d + d' - 1 = " +
                            std::to_string(incidence.points() + incidence.lines() - 1));
  return MurphyChern(incidence, h.n());
}

/// Evaluates the rule on every maximal cone of a materialized fan.
inline ChernDatum to_explicit(const MurphyChern& rule, const MurphyFanHandle& h) {
  const Fan& fan = h.fan();
  ChernDatum c{3, {}};
  for (const auto& cone : fan.max_cones()) {
    std::vector<RayLabel> labels;
    for (auto r : cone) labels.push_back(h.label_of(r));
    c.chars.push_back(rule.characters(labels));
  }
  return c;
}

struct SampledChernReport {
  std::size_t pairs_checked = 0;
  std::optional<ChernViolation> violation;
  std::vector<RayLabel> violation_face;
};

/// Draws random maximal cones and random facets, crosses to the neighboring
/// cone and compares the induced characters on the shared facet.
inline SampledChernReport validate_chern_sampled(const MurphyChern& rule, std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SampledChernReport report;
  const int n = rule.n();
  for (std::size_t s = 0; s < samples; ++s) {
    Flag f = random_flag(n, rng);
    const std::size_t pos = std::uniform_int_distribution<std::size_t>(0, static_cast<std::size_t>(n) - 1)(rng);
    Flag g = adjacent_flag(n, f, pos);
    auto face = f.labels();
    face.erase(face.begin() + static_cast<std::ptrdiff_t>(pos));
    std::vector<LatticeVector> gens;
    for (auto l : face) gens.push_back(label_vector(n, l));
    auto vf = value_vectors(rule.characters(f), gens);
    auto vg = value_vectors(rule.characters(g), gens);
    ++report.pairs_checked;
    if (vf != vg) {
      report.violation = ChernViolation{{}, {}, {}, std::move(vf), std::move(vg)};
      report.violation_face = face;
      break;
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Piecewise polynomials.

/// Integer polynomial in `vars` variables, terms keyed by exponent vectors.
class Polynomial {
 public:
  explicit Polynomial(std::size_t vars) : vars_(vars) {}

  static Polynomial constant(std::size_t vars, const Int& c) {
    Polynomial p(vars);
    if (c != 0) p.terms_[std::vector<unsigned>(vars, 0)] = c;
    return p;
  }
  /// The linear form x -> <u, x>.
  static Polynomial linear(const Character& u) {
    Polynomial p(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (u[i] == 0) continue;
      std::vector<unsigned> e(u.size(), 0);
      e[i] = 1;
      p.terms_[e] = u[i];
    }
    return p;
  }

  std::size_t vars() const noexcept { return vars_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  const std::map<std::vector<unsigned>, Int>& terms() const noexcept { return terms_; }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    Polynomial r = a;
    for (const auto& [e, c] : b.terms_) r.add_term(e, c);
    return r;
  }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial r(a.vars_);
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) {
        std::vector<unsigned> e(a.vars_);
        for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
        r.add_term(e, ca * cb);
      }
    return r;
  }
  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.vars_ == b.vars_ && a.terms_ == b.terms_;
  }

  /// Composes with x = sum_k t_k g_k, giving a polynomial in t.
  Polynomial substitute(const std::vector<LatticeVector>& gens) const {
    // x_i as a linear form in t.
    std::vector<Polynomial> xs;
    for (std::size_t i = 0; i < vars_; ++i) {
      Character coeffs(gens.size());
      for (std::size_t k = 0; k < gens.size(); ++k) coeffs[k] = gens[k][i];
      xs.push_back(linear(coeffs));
    }
    Polynomial out(gens.size());
    for (const auto& [e, c] : terms_) {
      Polynomial term = constant(gens.size(), c);
      for (std::size_t i = 0; i < vars_; ++i)
        for (unsigned k = 0; k < e[i]; ++k) term = term * xs[i];
      out = out + term;
    }
    return out;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (const auto& [e, c] : terms_) {
      if (!s.empty()) s += c < 0 ? " - " : " + ";
      else if (c < 0) s += "-";
      Int mag = abs_int(c);
      bool has_var = std::any_of(e.begin(), e.end(), [](unsigned k) { return k > 0; });
      if (mag != 1 || !has_var) s += mag.str();
      for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] == 0) continue;
        s += "x" + std::to_string(i + 1);
        if (e[i] > 1) s += "^" + std::to_string(e[i]);
      }
    }
    return s;
  }

 private:
  void add_term(const std::vector<unsigned>& e, const Int& c) {
    Int& slot = terms_[e];
    slot += c;
    if (slot == 0) terms_.erase(e);
  }
  std::size_t vars_;
  std::map<std::vector<unsigned>, Int> terms_;
};

/// e_i of a multiset of linear forms.
inline Polynomial elementary_symmetric(const std::vector<Character>& chars, std::size_t i, std::size_t vars) {
  // Coefficients of prod_k (1 + t u_k), truncated at degree i.
  std::vector<Polynomial> e(i + 1, Polynomial(vars));
  e[0] = Polynomial::constant(vars, 1);
  for (const auto& u : chars) {
    Polynomial lin = Polynomial::linear(u);
    for (std::size_t k = i; k >= 1; --k) e[k] = e[k] + e[k - 1] * lin;
  }
  return e[i];
}

struct PiecewisePolynomial {
  std::vector<Polynomial> pieces;  // aligned with the fan's maximal cones
};

/// The i-th equivariant Chern class as a piecewise polynomial. Throws when the
/// datum is not face-compatible or two pieces disagree on a shared face.
inline PiecewisePolynomial chern_polynomial(const Fan& fan, const ChernDatum& c, std::size_t i) {
  if (i < 1 || i > c.rank) throw InvalidArgument("Chern class index must lie in 1..rank");
  if (auto v = validate_chern(fan, c)) throw ChernViolationError(v->describe());
  PiecewisePolynomial out;
  for (const auto& u : c.chars) out.pieces.push_back(elementary_symmetric(u, i, fan.dim()));
  const auto& cones = fan.max_cones();
  for (std::size_t a = 0; a < cones.size(); ++a)
    for (std::size_t b = a + 1; b < cones.size(); ++b) {
      RaySet face = intersection(cones[a], cones[b]);
      if (face.empty()) continue;
      auto gens = fan.generators(face);
      if (!(out.pieces[a].substitute(gens) == out.pieces[b].substitute(gens)))
        throw ChernViolationError("Chern polynomials disagree on face " + to_string(face));
    }
  return out;
}

}  // namespace tvb
