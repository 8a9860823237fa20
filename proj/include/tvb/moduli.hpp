#pragma once

// The rank conditions cutting out the moduli space M_c inside the product of
// flag varieties, compiled into point/line atoms, and the comparison of their
// solution set with the incidence scheme C_I over a prime field.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "tvb/chern.hpp"
#include "tvb/incidence.hpp"
#include "tvb/klyachko.hpp"
#include "tvb/murphy_fan.hpp"

namespace tvb {

enum class AtomKind { Incident, NonIncident, DistinctPoints, DistinctLines };

inline std::string to_string(AtomKind k) {
  switch (k) {
    case AtomKind::Incident: return "INCIDENT";
    case AtomKind::NonIncident: return "NON_INCIDENT";
    case AtomKind::DistinctPoints: return "DISTINCT_POINTS";
    case AtomKind::DistinctLines: return "DISTINCT_LINES";
  }
  return "?";
}

inline AtomKind parse_atom_kind(const std::string& s) {
  for (auto k : {AtomKind::Incident, AtomKind::NonIncident, AtomKind::DistinctPoints, AtomKind::DistinctLines})
    if (to_string(k) == s) return k;
  throw ParseError("unknown atom kind '" + s + "'");
}

/// INCIDENT(i,j) / NON_INCIDENT(i,j): point i vs line j. DISTINCT_POINTS(i,j)
/// and DISTINCT_LINES(i,j): two points (lines), i < j. Indices 1-based.
struct Atom {
  AtomKind kind;
  int i;
  int j;

  friend bool operator==(const Atom& a, const Atom& b) { return a.kind == b.kind && a.i == b.i && a.j == b.j; }
  friend bool operator<(const Atom& a, const Atom& b) {
    return std::tie(a.kind, a.i, a.j) < std::tie(b.kind, b.i, b.j);
  }
  std::string str() const { return to_string(kind) + "(" + std::to_string(i) + "," + std::to_string(j) + ")"; }
};

class ConditionSet {
 public:
  ConditionSet(int points, int lines, std::vector<Atom> atoms) : points_(points), lines_(lines) {
    if (points < 0 || lines < 0) throw InvalidArgument("negative object count");
    for (auto a : atoms) {
      const bool distinct = a.kind == AtomKind::DistinctPoints || a.kind == AtomKind::DistinctLines;
      if (distinct && a.i > a.j) std::swap(a.i, a.j);
      const int max_i = a.kind == AtomKind::DistinctLines ? lines : points;
      const int max_j = a.kind == AtomKind::DistinctPoints ? points : lines;
      if (a.i < 1 || a.i > max_i || a.j < 1 || a.j > max_j) throw InvalidArgument("atom " + a.str() + " out of range");
      if (distinct && a.i == a.j) throw ContradictoryConditions("atom " + a.str() + " can never hold");
      atoms_.push_back(a);
    }
    std::sort(atoms_.begin(), atoms_.end());
    atoms_.erase(std::unique(atoms_.begin(), atoms_.end()), atoms_.end());
    for (const auto& a : atoms_)
      if (a.kind == AtomKind::Incident &&
          std::binary_search(atoms_.begin(), atoms_.end(), Atom{AtomKind::NonIncident, a.i, a.j}))
        throw ContradictoryConditions("both INCIDENT and NON_INCIDENT imposed on (" + std::to_string(a.i) + "," +
                                      std::to_string(a.j) + ")");
  }

  int points() const noexcept { return points_; }
  int lines() const noexcept { return lines_; }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }

  std::size_t count(AtomKind k) const {
    return static_cast<std::size_t>(
        std::count_if(atoms_.begin(), atoms_.end(), [k](const Atom& a) { return a.kind == k; }));
  }

  /// The incidence data encoded by the INCIDENT atoms.
  IncidenceData incidence() const {
    std::vector<std::pair<int, int>> pairs;
    for (const auto& a : atoms_)
      if (a.kind == AtomKind::Incident) pairs.emplace_back(a.i, a.j);
    return IncidenceData(points_, lines_, std::move(pairs));
  }

  friend bool operator==(const ConditionSet& a, const ConditionSet& b) {
    return a.points_ == b.points_ && a.lines_ == b.lines_ && a.atoms_ == b.atoms_;
  }

 private:
  int points_;
  int lines_;
  std::vector<Atom> atoms_;
};

/// Two homogeneous triples are distinct projective points iff some 2x2 minor
/// of the pair is nonzero.
template <class F>
bool some_minor_nonzero(const F& f, const Triple<F>& a, const Triple<F>& b) {
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t s = r + 1; s < 3; ++s)
      if (!f.is_zero(f.sub(f.mul(a[r], b[s]), f.mul(a[s], b[r])))) return true;
  return false;
}

template <class F>
bool atom_holds(const Atom& a, const Configuration<F>& c) {
  const F& f = c.field();
  const auto pt = [&](int i) -> const Triple<F>& { return c.points().at(static_cast<std::size_t>(i - 1)); };
  const auto ln = [&](int j) -> const Triple<F>& { return c.lines().at(static_cast<std::size_t>(j - 1)); };
  switch (a.kind) {
    case AtomKind::Incident: return f.is_zero(dot3(f, pt(a.i), ln(a.j)));
    case AtomKind::NonIncident: return !f.is_zero(dot3(f, pt(a.i), ln(a.j)));
    case AtomKind::DistinctPoints: return some_minor_nonzero(f, pt(a.i), pt(a.j));
    case AtomKind::DistinctLines: return some_minor_nonzero(f, ln(a.i), ln(a.j));
  }
  return false;
}

template <class F>
bool satisfies(const ConditionSet& cs, const Configuration<F>& c) {
  return std::all_of(cs.atoms().begin(), cs.atoms().end(), [&](const Atom& a) { return atom_holds(a, c); });
}

// ---------------------------------------------------------------------------

struct MurphyInstance {
  IncidenceData incidence;
  std::optional<MurphyFanHandle> fan;  // absent only in the degenerate d + d' = 2 case
  std::optional<MurphyChern> chern;

  bool degenerate() const noexcept { return !fan.has_value(); }
  int n() const noexcept { return incidence.points() + incidence.lines() - 1; }
};

/// Builds Σ_n with n = d + d' - 1 and the rule-based Chern datum. The case
/// d + d' = 2 (fan of P^1, no two-dimensional cones) is only accepted with
/// `allow_degenerate`; its conditions are read off the pair table directly.
inline MurphyInstance make_murphy_instance(const IncidenceData& incidence, FanMode mode = FanMode::Lazy,
                                           bool allow_degenerate = false) {
  const int objects = incidence.objects();
  if (objects < 2) throw InvalidIncidence("need at least two points and lines in total");
  MurphyInstance m{incidence, std::nullopt, std::nullopt};
  if (objects == 2) {
    if (!allow_degenerate)
      throw InvalidIncidence("d + d' = 2 gives the fan of P^1; pass the degenerate flag to accept it");
    return m;
  }
  m.fan = build_murphy_fan(objects - 1, mode);
  m.chern = murphy_chern(incidence, *m.fan);
  return m;
}

namespace detail {

inline Atom atom_for_pair(const IncidenceData& inc, int a, int b, std::size_t required_dim) {
  const int d = inc.points();
  const bool a_point = a <= d, b_point = b <= d;
  auto fail = [&]() -> Atom {
    throw InternalAudit("pair (" + std::to_string(a) + "," + std::to_string(b) + ") demands intersection dimension " +
                        std::to_string(required_dim) + ", which no atom expresses");
  };
  if (a_point && b_point) return required_dim == 0 ? Atom{AtomKind::DistinctPoints, a, b} : fail();
  if (!a_point && !b_point) return required_dim == 1 ? Atom{AtomKind::DistinctLines, a - d, b - d} : fail();
  const int point = a_point ? a : b;
  const int line = (a_point ? b : a) - d;
  if (required_dim == 1) return Atom{AtomKind::Incident, point, line};
  if (required_dim == 0) return Atom{AtomKind::NonIncident, point, line};
  return fail();
}

inline std::size_t joint_count(const std::vector<std::pair<int, int>>& value_pairs) {
  return static_cast<std::size_t>(std::count_if(value_pairs.begin(), value_pairs.end(),
                                                [](auto p) { return p.first >= 1 && p.second >= 1; }));
}

}  // namespace detail

/// The atom produced by the two-dimensional cone on rays a, b, read from the
/// characters of the given maximal cone containing it. Also checks that every
/// other rank condition on that cone is vacuous for the forced filtrations.
inline Atom conditions_from_cone(const MurphyInstance& m, const Flag& flag) {
  const int n = m.n();
  const auto chars = m.chern->characters(flag);
  const auto labels = flag.labels();
  for (std::size_t k = 2; k < labels.size(); ++k)
    for (const auto& u : chars)
      if (pairing(u, label_vector(n, labels[k])) != 0)
        throw InternalAudit("character nonzero on composite ray " + labels[k].str());
  const int d = m.incidence.points();
  std::vector<std::pair<int, int>> values;
  for (const auto& u : chars) {
    const Int va = pairing(u, label_vector(n, labels[0]));
    const Int vb = pairing(u, label_vector(n, labels[1]));
    values.emplace_back(static_cast<int>(va), static_cast<int>(vb));
  }
  for (int side = 0; side < 2; ++side) {
    const int object = side == 0 ? flag.a : flag.b;
    const Signature expected{{Int(1), object <= d ? 1u : 2u}, {Int(2), 0u}};
    if (signature_of(chars, label_vector(n, labels[static_cast<std::size_t>(side)])) != expected)
      throw InternalAudit("ray " + std::to_string(object) + " does not carry a point/line filtration");
  }
  return detail::atom_for_pair(m.incidence, flag.a, flag.b, detail::joint_count(values));
}

/// One atom per unordered pair of objects, from the two-dimensional cone
/// {rho_a, rho_b}. Fails the audit if three original rays ever span a cone.
inline ConditionSet generate_conditions(const MurphyInstance& m) {
  const IncidenceData& inc = m.incidence;
  std::vector<Atom> atoms;
  if (m.degenerate()) {
    atoms.push_back(detail::atom_for_pair(inc, 1, 2, detail::joint_count(murphy_value_pairs(inc, 1, 2))));
    return ConditionSet(inc.points(), inc.lines(), std::move(atoms));
  }
  const int n = m.n();
  for (int a = 1; a <= n + 1; ++a)
    for (int b = a + 1; b <= n + 1; ++b)
      for (int c = b + 1; c <= n + 1; ++c)
        if (cone_membership(n, {RayLabel::original(a), RayLabel::original(b), RayLabel::original(c)}))
          throw InternalAudit("rays " + std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c) +
                              " span a cone");
  for (int a = 1; a <= n + 1; ++a)
    for (int b = a + 1; b <= n + 1; ++b) {
      const std::vector<RayLabel> pair{RayLabel::original(a), RayLabel::original(b)};
      if (!cone_membership(n, pair))
        throw InternalAudit("rays " + std::to_string(a) + "," + std::to_string(b) + " do not span a cone");
      atoms.push_back(conditions_from_cone(m, flag_through(n, pair)));
    }
  return ConditionSet(inc.points(), inc.lines(), std::move(atoms));
}

struct AuditViolation {
  std::vector<std::string> rays;
  std::string message;
};

/// No cone may contain three original rays, and every atom must involve at
/// most two objects. Exhaustive over the cone list when materialized; all ray
/// triples through the membership oracle otherwise.
inline std::optional<AuditViolation> audit_pairwise(const MurphyInstance& m) {
  if (m.degenerate()) return std::nullopt;
  const int n = m.n();
  for (int a = 1; a <= n + 1; ++a)
    for (int b = a + 1; b <= n + 1; ++b)
      for (int c = b + 1; c <= n + 1; ++c)
        if (cone_membership(n, {RayLabel::original(a), RayLabel::original(b), RayLabel::original(c)}))
          return AuditViolation{{std::to_string(a), std::to_string(b), std::to_string(c)},
                                "three original rays span a cone"};
  if (m.fan->materialized()) {
    const Fan& fan = m.fan->fan();
    for (const auto& cone : fan.max_cones()) {
      std::vector<std::string> originals;
      for (auto r : cone)
        if (m.fan->label_of(r).is_original()) originals.push_back(m.fan->label_of(r).str());
      if (originals.size() >= 3) return AuditViolation{originals, "maximal cone " + to_string(cone) + " holds three original rays"};
    }
  }
  return std::nullopt;
}

/// The same audit on an arbitrary fan, given which rays play the role of the
/// original ones.
inline std::optional<AuditViolation> audit_pairwise(const Fan& fan, const std::vector<std::size_t>& original_rays) {
  for (const auto& cone : fan.max_cones()) {
    std::vector<std::string> hits;
    for (auto r : cone)
      if (std::find(original_rays.begin(), original_rays.end(), r) != original_rays.end())
        hits.push_back(fan.ray(r).str());
    if (hits.size() >= 3) return AuditViolation{hits, "maximal cone " + to_string(cone) + " holds three original rays"};
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

/// All configurations over F_p satisfying every atom, canonically sorted.
inline std::vector<FpConfiguration> solutions(const ConditionSet& cs, std::uint32_t p,
                                              const SearchOptions& options = {}) {
  const PrimeField field(p);
  const int d = cs.points();
  const int objects = d + cs.lines();
  // Per object pair: the atoms constraining it, in object numbering.
  std::map<std::pair<int, int>, std::vector<Atom>> by_pair;
  std::vector<std::pair<int, int>> links;
  for (const auto& a : cs.atoms()) {
    int x = 0, y = 0;
    switch (a.kind) {
      case AtomKind::Incident:
      case AtomKind::NonIncident: x = a.i - 1, y = d + a.j - 1; break;
      case AtomKind::DistinctPoints: x = a.i - 1, y = a.j - 1; break;
      case AtomKind::DistinctLines: x = d + a.i - 1, y = d + a.j - 1; break;
    }
    by_pair[{std::min(x, y), std::max(x, y)}].push_back(a);
    if (a.kind == AtomKind::Incident) links.emplace_back(x, y);
  }
  auto order = detail::constraint_order(objects, links);

  detail::PairCheck pair_ok = [&](int x, const detail::FpTriple& tx, int y, const detail::FpTriple& ty) {
    auto it = by_pair.find({std::min(x, y), std::max(x, y)});
    if (it == by_pair.end()) return true;
    const detail::FpTriple& lo = x < y ? tx : ty;
    const detail::FpTriple& hi = x < y ? ty : tx;
    for (const auto& a : it->second) {
      bool ok = false;
      switch (a.kind) {
        case AtomKind::Incident: ok = field.is_zero(dot3(field, lo, hi)); break;
        case AtomKind::NonIncident: ok = !field.is_zero(dot3(field, lo, hi)); break;
        case AtomKind::DistinctPoints:
        case AtomKind::DistinctLines: ok = some_minor_nonzero(field, lo, hi); break;
      }
      if (!ok) return false;
    }
    return true;
  };
  detail::LeafCheck leaf_ok = [&](const FpConfiguration& c) { return satisfies(cs, c); };
  return detail::search(field, d, cs.lines(), std::move(order), pair_ok, leaf_ok, options);
}

struct VerifyReport {
  std::uint32_t p = 0;
  std::size_t moduli_count = 0;
  std::size_t incidence_count = 0;
  bool equal = false;
  std::optional<FpConfiguration> first_discrepancy;
  std::string discrepancy_side;  // "moduli-only" or "incidence-only"
};

/// Compiles the moduli conditions for I and compares their F_p-solutions with
/// a direct enumeration of C_I.
inline VerifyReport verify_equivalence(const IncidenceData& incidence, std::uint32_t p,
                                       const SearchOptions& options = {}, bool allow_degenerate = false) {
  const MurphyInstance m = make_murphy_instance(incidence, FanMode::Lazy, allow_degenerate);
  const ConditionSet cs = generate_conditions(m);
  const auto moduli = solutions(cs, p, options);
  const auto direct = enumerate_c_i(incidence, p, options);
  VerifyReport r;
  r.p = p;
  r.moduli_count = moduli.size();
  r.incidence_count = direct.size();
  r.equal = moduli == direct;
  if (!r.equal) {
    std::vector<FpConfiguration> only_moduli, only_direct;
    std::set_difference(moduli.begin(), moduli.end(), direct.begin(), direct.end(), std::back_inserter(only_moduli));
    std::set_difference(direct.begin(), direct.end(), moduli.begin(), moduli.end(), std::back_inserter(only_direct));
    if (!only_moduli.empty()) {
      r.first_discrepancy = only_moduli.front();
      r.discrepancy_side = "moduli-only";
    } else if (!only_direct.empty()) {
      r.first_discrepancy = only_direct.front();
      r.discrepancy_side = "incidence-only";
    }
  }
  return r;
}

}  // namespace tvb
