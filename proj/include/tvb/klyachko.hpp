#pragma once

// Klyachko filtrations: one decreasing Z-indexed filtration of the fiber E per
// ray, and the compatibility check that recovers the characters u(σ) together
// with a splitting basis on each maximal cone.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tvb/chern.hpp"
#include "tvb/fan.hpp"
#include "tvb/incidence.hpp"
#include "tvb/linalg.hpp"
#include "tvb/murphy_fan.hpp"

namespace tvb {

/// E^ρ(j') = space for jump <= j' < next jump. Below the first jump the
/// filtration is the whole fiber; the last step is always the zero space.
template <class F>
struct FiltrationStep {
  Int jump;
  Subspace<F> space;
};

template <class F>
class Filtration {
 public:
  using Steps = std::vector<FiltrationStep<F>>;

  Filtration(F field, std::size_t rank) : field_(std::move(field)), rank_(rank) {
    if (rank == 0) throw InvalidArgument("filtration rank must be positive");
  }

  const F& field() const noexcept { return field_; }
  std::size_t rank() const noexcept { return rank_; }
  const std::map<std::size_t, Steps>& rays() const noexcept { return rays_; }

  void set_ray(std::size_t ray, Steps steps) {
    if (steps.empty()) throw InvalidArgument("a filtration needs at least one jump");
    for (std::size_t k = 0; k < steps.size(); ++k) {
      const auto& s = steps[k];
      if (s.space.ambient() != rank_) throw DimensionMismatch("filtration subspace in the wrong ambient space");
      const std::size_t above = k == 0 ? rank_ : steps[k - 1].space.dim();
      if (s.space.dim() >= above) throw InvalidArgument("filtration dimensions must strictly decrease");
      if (k > 0) {
        if (s.jump <= steps[k - 1].jump) throw InvalidArgument("filtration jumps must strictly increase");
        if (!steps[k - 1].space.contains(s.space)) throw InvalidArgument("filtration subspaces must be nested");
      }
    }
    if (steps.back().space.dim() != 0) throw InvalidArgument("the last filtration step must be the zero space");
    rays_[ray] = std::move(steps);
  }

  /// Single jump from the full space to zero at j = 1.
  void set_trivial(std::size_t ray) { set_ray(ray, {{Int(1), Subspace<F>::zero(field_, rank_)}}); }

  const Steps& steps(std::size_t ray) const {
    auto it = rays_.find(ray);
    if (it == rays_.end()) throw RayNotInFan("no filtration given for ray " + std::to_string(ray));
    return it->second;
  }

  Subspace<F> at(std::size_t ray, const Int& j) const {
    const Steps& s = steps(ray);
    const Subspace<F>* current = nullptr;
    for (const auto& step : s)
      if (step.jump <= j) current = &step.space;
    return current ? *current : Subspace<F>::full(field_, rank_);
  }

 private:
  F field_;
  std::size_t rank_;
  std::map<std::size_t, Steps> rays_;
};

template <class F>
struct ConeSplitting {
  RaySet cone;
  std::vector<Character> chars;  // sorted; basis[k] spans the line L_{chars[k]}
  Rows<F> basis;
};

template <class F>
struct CharacterAssignment {
  std::vector<ConeSplitting<F>> cones;  // aligned with the fan's maximal cones

  ChernDatum chern() const {
    ChernDatum c;
    for (const auto& s : cones) {
      c.rank = s.chars.size();
      c.chars.push_back(s.chars);
    }
    return c;
  }
};

struct Incompatible {
  RaySet cone;
  std::vector<Int> cell;
  std::string reason;
};

template <class F>
using CompatibilityResult = std::variant<CharacterAssignment<F>, Incompatible>;

namespace detail {

// Odometer over the product of per-coordinate value lists.
inline bool next_cell(std::vector<std::size_t>& idx, const std::vector<std::vector<Int>>& axes) {
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (++idx[i] < axes[i].size()) return true;
    idx[i] = 0;
  }
  return false;
}

}  // namespace detail

/// Per maximal cone with rays r_1..r_n: finite-differences the grid function
/// d(j) = dim ∩ E^{r_i}(j_i) to get the multiset of value vectors (hence the
/// characters via the dual basis), then builds a splitting basis from the
/// deepest intersections outward and checks that it reproduces every
/// filtration of the cone.
template <class F>
CompatibilityResult<F> check_compatibility(const Fan& fan, const Filtration<F>& filt) {
  const F& field = filt.field();
  const std::size_t r = filt.rank();
  const std::size_t n = fan.dim();
  for (std::size_t i = 0; i < fan.rays().size(); ++i) (void)filt.steps(i);

  CharacterAssignment<F> assignment;
  for (const RaySet& cone : fan.max_cones()) {
    const auto gens = fan.generators(cone);
    if (cone.size() != n || !is_unimodular(gens))
      throw NonSmoothCone("compatibility check needs smooth full-dimensional cones; " + to_string(cone) + " is not");

    // Values of <u, r_i> that can carry mass: one below each jump.
    std::vector<std::vector<Int>> axes(n);
    for (std::size_t i = 0; i < n; ++i)
      for (const auto& step : filt.steps(cone[i])) axes[i].push_back(step.jump - 1);

    std::map<std::vector<Int>, Subspace<F>> memo;
    auto intersection_at = [&](const std::vector<Int>& cell) -> const Subspace<F>& {
      auto it = memo.find(cell);
      if (it != memo.end()) return it->second;
      Subspace<F> w = Subspace<F>::full(field, r);
      for (std::size_t i = 0; i < n && w.dim() > 0; ++i) w = w.intersect(filt.at(cone[i], cell[i]));
      return memo.emplace(cell, std::move(w)).first->second;
    };

    std::vector<std::pair<std::vector<Int>, long long>> masses;
    long long total = 0;
    std::vector<std::size_t> idx(n, 0);
    do {
      std::vector<Int> cell(n);
      for (std::size_t i = 0; i < n; ++i) cell[i] = axes[i][idx[i]];
      long long m = 0;
      for (unsigned long long eps = 0; eps < (1ull << n); ++eps) {
        std::vector<Int> shifted = cell;
        int parity = 0;
        for (std::size_t i = 0; i < n; ++i)
          if (eps & (1ull << i)) {
            shifted[i] += 1;
            parity ^= 1;
          }
        const auto dim = static_cast<long long>(intersection_at(shifted).dim());
        m += parity ? -dim : dim;
      }
      if (m < 0) return Incompatible{cone, cell, "negative finite difference"};
      if (m > 0) masses.emplace_back(cell, m);
      total += m;
    } while (detail::next_cell(idx, axes));
    if (total != static_cast<long long>(r))
      return Incompatible{cone, {}, "finite differences sum to " + std::to_string(total) + ", not the rank"};

    // Deepest cells first: decreasing coordinate sum, ties by reverse lexicographic.
    std::sort(masses.begin(), masses.end(), [](const auto& x, const auto& y) {
      Int sx = 0, sy = 0;
      for (const auto& v : x.first) sx += v;
      for (const auto& v : y.first) sy += v;
      if (sx != sy) return sx > sy;
      return y.first < x.first;
    });

    ConeSplitting<F> split{cone, {}, {}};
    std::vector<std::pair<Character, Row<F>>> lines;
    Subspace<F> chosen = Subspace<F>::zero(field, r);
    for (const auto& [cell, m] : masses) {
      const Subspace<F>& w = intersection_at(cell);
      auto u = character_with_values(gens, cell);
      if (!u) throw InternalAudit("unimodular cone without integral dual basis");
      long long picked = 0;
      for (const auto& v : w.basis()) {
        if (picked == m) break;
        if (chosen.contains(v)) continue;
        chosen = chosen.sum(Subspace<F>::span(field, r, {v}));
        lines.emplace_back(*u, v);
        ++picked;
      }
      if (picked < m) return Incompatible{cone, cell, "no splitting basis extends through this cell"};
    }

    // The constructed basis must reproduce each filtration on the cone.
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<Int> checkpoints{filt.steps(cone[i]).front().jump - 1};
      for (const auto& step : filt.steps(cone[i])) checkpoints.push_back(step.jump);
      for (const auto& j : checkpoints) {
        Rows<F> vecs;
        for (const auto& [u, v] : lines)
          if (pairing(u, gens[i]) >= j) vecs.push_back(v);
        if (!(Subspace<F>::span(field, r, vecs) == filt.at(cone[i], j))) {
          std::vector<Int> cell(n, Int(0));
          cell[i] = j;
          return Incompatible{cone, cell, "splitting basis does not reproduce the filtration of ray " +
                                              std::to_string(cone[i])};
        }
      }
    }
    std::sort(lines.begin(), lines.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    for (auto& [u, v] : lines) {
      split.chars.push_back(u);
      split.basis.push_back(v);
    }
    assignment.cones.push_back(std::move(split));
  }
  return assignment;
}

// ---------------------------------------------------------------------------
// Filtration signatures: the (jump, dimension) sequence forced by a Chern datum.

using Signature = std::vector<std::pair<Int, std::size_t>>;

/// dim E^ρ(j) = #{u : <u, ρ> >= j}; lists each j where the dimension drops,
/// with the dimension from j on.
inline Signature signature_of(const std::vector<Character>& chars, const LatticeVector& ray) {
  std::vector<Int> values;
  for (const auto& u : chars) values.push_back(pairing(u, ray));
  std::sort(values.begin(), values.end());
  Signature out;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k + 1 < values.size() && values[k + 1] == values[k]) continue;
    out.emplace_back(values[k] + 1, values.size() - k - 1);
  }
  return out;
}

inline Signature filtration_signature(const Fan& fan, const ChernDatum& c, std::size_t ray) {
  if (ray >= fan.rays().size()) throw RayNotInFan("ray index " + std::to_string(ray) + " out of range");
  const auto& cones = fan.max_cones();
  for (std::size_t k = 0; k < cones.size(); ++k)
    if (std::binary_search(cones[k].begin(), cones[k].end(), ray)) return signature_of(c.chars.at(k), fan.ray(ray));
  throw RayNotInFan("ray " + std::to_string(ray) + " lies in no maximal cone");
}

inline Signature filtration_signature(const MurphyChern& rule, RayLabel ray) {
  check_label(rule.n(), ray);
  Flag f = flag_through(rule.n(), {ray});
  return signature_of(rule.characters(f), label_vector(rule.n(), ray));
}

// ---------------------------------------------------------------------------

/// The subspace of the fiber attached to object k of a configuration: a point
/// spans a line of k^3, a line [a:b:c] is the plane it annihilates.
template <class F>
Subspace<F> object_subspace(const Configuration<F>& config, int object) {
  const F& f = config.field();
  const auto& t = config.object(object);
  Row<F> v(t.begin(), t.end());
  Subspace<F> s = Subspace<F>::span(f, 3, {v});
  return object < static_cast<int>(config.points().size()) ? s : s.orthogonal();
}

/// Filtrations induced by a configuration on the blown-up fan: y_i at j = 1 on
/// the original rays, trivial on the composite rays.
template <class F>
Filtration<F> forced_filtration(const MurphyFanHandle& h, const Configuration<F>& config) {
  const F& f = config.field();
  Filtration<F> filt(f, 3);
  const Fan& fan = h.fan();
  const int objects = static_cast<int>(config.points().size() + config.lines().size());
  if (objects != h.n() + 1) throw DimensionMismatch("configuration size differs from n + 1");
  for (std::size_t ray = 0; ray < fan.rays().size(); ++ray) {
    RayLabel l = h.label_of(ray);
    if (!l.is_original()) {
      filt.set_trivial(ray);
      continue;
    }
    filt.set_ray(ray, {{Int(1), object_subspace(config, l.index() - 1)}, {Int(2), Subspace<F>::zero(f, 3)}});
  }
  return filt;
}

}  // namespace tvb
