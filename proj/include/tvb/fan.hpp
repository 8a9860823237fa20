#pragma once

// Rational polyhedral cones and simplicial fans: validation, star
// subdivision, smoothness and completeness, orbit dimensions.

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tvb/lattice.hpp"
#include "tvb/linalg.hpp"

namespace tvb {

/// Sorted indices into a fan's ray table. The empty set is the zero cone.
using RaySet = std::vector<std::size_t>;

inline std::string to_string(const RaySet& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + "}";
}

inline RaySet intersection(const RaySet& a, const RaySet& b) {
  RaySet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline bool is_subset(const RaySet& small, const RaySet& big) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

namespace detail {

inline std::vector<std::vector<Rat>> columns_as_rational(const std::vector<LatticeVector>& gens) {
  const std::size_t n = gens.empty() ? 0 : gens.front().size();
  std::vector<std::vector<Rat>> a(n, std::vector<Rat>(gens.size()));
  for (std::size_t j = 0; j < gens.size(); ++j)
    for (std::size_t i = 0; i < n; ++i) a[i][j] = Rat(gens[j][i]);
  return a;
}

/// Is `v` a nonnegative rational combination of `gens`?
inline bool in_cone(const std::vector<LatticeVector>& gens, const LatticeVector& v) {
  if (gens.empty()) return v.is_zero();
  std::vector<Rat> rhs(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) rhs[i] = Rat(v[i]);
  return nonnegative_solution(columns_as_rational(gens), rhs).has_value();
}

inline std::size_t rank_of(const std::vector<LatticeVector>& gens) {
  if (gens.empty()) return 0;
  RationalField q;
  Rows<RationalField> rows;
  for (const auto& g : gens) {
    Row<RationalField> r;
    for (const auto& c : g.coords()) r.emplace_back(c);
    rows.push_back(std::move(r));
  }
  return row_reduce(q, std::move(rows)).size();
}

}  // namespace detail

class Cone {
 public:
  const std::vector<LatticeVector>& generators() const noexcept { return generators_; }
  std::size_t ambient_dim() const noexcept { return ambient_; }
  std::size_t dim() const { return detail::rank_of(generators_); }
  bool contains(const LatticeVector& v) const { return detail::in_cone(generators_, v); }

  friend bool operator==(const Cone& a, const Cone& b) { return a.generators_ == b.generators_; }
  friend Cone make_cone(const std::vector<LatticeVector>& generators);

 private:
  std::size_t ambient_ = 0;
  std::vector<LatticeVector> generators_;
};

/// Primitivizes, drops redundant generators, sorts canonically. Throws
/// NotStronglyConvex when the cone contains a line.
inline Cone make_cone(const std::vector<LatticeVector>& generators) {
  if (generators.empty()) throw InvalidArgument("a cone needs at least one generator");
  const std::size_t n = generators.front().size();
  std::vector<LatticeVector> gens;
  for (const auto& g : generators) {
    if (g.size() != n) throw DimensionMismatch("cone generators of different rank");
    if (g.is_zero()) throw InvalidArgument("zero vector is not a valid cone generator");
    gens.push_back(g.primitive());
  }
  std::sort(gens.begin(), gens.end());
  gens.erase(std::unique(gens.begin(), gens.end()), gens.end());

  // A line exists iff some convex combination of the generators vanishes.
  {
    auto a = detail::columns_as_rational(gens);
    a.emplace_back(gens.size(), Rat(1));
    std::vector<Rat> rhs(n + 1);
    rhs[n] = 1;
    if (nonnegative_solution(a, rhs)) throw NotStronglyConvex("cone contains a line");
  }

  for (std::size_t i = 0; i < gens.size();) {
    std::vector<LatticeVector> others;
    for (std::size_t j = 0; j < gens.size(); ++j)
      if (j != i) others.push_back(gens[j]);
    if (!others.empty() && detail::in_cone(others, gens[i]))
      gens.erase(gens.begin() + static_cast<std::ptrdiff_t>(i));
    else
      ++i;
  }
  Cone c;
  c.ambient_ = n;
  c.generators_ = std::move(gens);
  return c;
}

// ---------------------------------------------------------------------------

/// A simplicial fan: rays in canonical (lexicographic) order and maximal cones
/// as sorted ray-index sets, themselves sorted. The constructor canonicalizes.
class Fan {
 public:
  Fan(std::size_t dim, std::vector<LatticeVector> rays, std::vector<RaySet> max_cones) : dim_(dim) {
    if (dim == 0) throw InvalidFan("fan dimension must be positive");
    for (const auto& r : rays) {
      if (r.size() != dim) throw InvalidFan("ray " + r.str() + " has wrong dimension");
      if (!r.is_primitive()) throw InvalidFan("ray " + r.str() + " is not a primitive lattice vector");
    }
    std::vector<std::size_t> order(rays.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rays[a] < rays[b]; });
    std::vector<std::size_t> remap(rays.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
      remap[order[k]] = k;
      rays_.push_back(rays[order[k]]);
      if (k > 0 && rays_[k] == rays_[k - 1]) throw InvalidFan("duplicate ray " + rays_[k].str());
    }
    for (auto& cone : max_cones) {
      if (cone.empty()) throw InvalidFan("empty maximal cone");
      RaySet mapped;
      for (auto idx : cone) {
        if (idx >= rays.size()) throw InvalidFan("ray index " + std::to_string(idx) + " out of range");
        mapped.push_back(remap[idx]);
      }
      std::sort(mapped.begin(), mapped.end());
      if (std::adjacent_find(mapped.begin(), mapped.end()) != mapped.end())
        throw InvalidFan("maximal cone repeats a ray");
      max_cones_.push_back(std::move(mapped));
    }
    std::sort(max_cones_.begin(), max_cones_.end());
    max_cones_.erase(std::unique(max_cones_.begin(), max_cones_.end()), max_cones_.end());
  }

  std::size_t dim() const noexcept { return dim_; }
  const std::vector<LatticeVector>& rays() const noexcept { return rays_; }
  const LatticeVector& ray(std::size_t i) const { return rays_.at(i); }
  const std::vector<RaySet>& max_cones() const noexcept { return max_cones_; }

  std::optional<std::size_t> index_of(const LatticeVector& v) const {
    auto it = std::lower_bound(rays_.begin(), rays_.end(), v);
    if (it == rays_.end() || *it != v) return std::nullopt;
    return static_cast<std::size_t>(it - rays_.begin());
  }

  std::vector<LatticeVector> generators(const RaySet& cone) const {
    std::vector<LatticeVector> out;
    for (auto i : cone) out.push_back(rays_.at(i));
    return out;
  }

  /// True iff `cone` is a face of some maximal cone (simplicial: any subset).
  bool contains_cone(const RaySet& cone) const {
    return std::any_of(max_cones_.begin(), max_cones_.end(),
                       [&](const RaySet& m) { return is_subset(cone, m); });
  }

  /// Maps a cone given by generators to its ray-index set.
  RaySet ray_set(const Cone& cone) const {
    RaySet s;
    for (const auto& g : cone.generators()) {
      auto idx = index_of(g);
      if (!idx) throw ConeNotInFan("generator " + g.str() + " is not a ray of the fan");
      s.push_back(*idx);
    }
    std::sort(s.begin(), s.end());
    if (!contains_cone(s)) throw ConeNotInFan("cone " + to_string(s) + " is not in the fan");
    return s;
  }

  /// Every cone of the fan (the face lattice), computed once and shared.
  const std::set<RaySet>& faces() const {
    std::call_once(memo_->once, [this] {
      for (const auto& m : max_cones_) {
        const std::size_t k = m.size();
        for (unsigned long long mask = 0; mask < (1ull << k); ++mask) {
          RaySet f;
          for (std::size_t i = 0; i < k; ++i)
            if (mask & (1ull << i)) f.push_back(m[i]);
          memo_->faces.insert(std::move(f));
        }
      }
    });
    return memo_->faces;
  }

  friend bool operator==(const Fan& a, const Fan& b) {
    return a.dim_ == b.dim_ && a.rays_ == b.rays_ && a.max_cones_ == b.max_cones_;
  }

 private:
  struct Memo {
    std::once_flag once;
    std::set<RaySet> faces;
  };
  std::size_t dim_;
  std::vector<LatticeVector> rays_;
  std::vector<RaySet> max_cones_;
  std::shared_ptr<Memo> memo_ = std::make_shared<Memo>();
};

// ---------------------------------------------------------------------------

struct FanViolation {
  enum class Kind { NotSimplicial, NestedMaximalCones, BadIntersection };
  Kind kind;
  RaySet first;
  RaySet second;
  RaySet intersection;
  std::string message;
};

namespace detail {

/// Does every point of cone(a) ∩ cone(b) have zero coefficient on the
/// generators of `a` outside the common index set? (For linearly independent
/// generators this is "the intersection is a face of cone(a)".)
inline bool intersection_is_face_of_first(const Fan& fan, const RaySet& a, const RaySet& b, const RaySet& common) {
  RaySet only_a;
  std::set_difference(a.begin(), a.end(), common.begin(), common.end(), std::back_inserter(only_a));
  if (only_a.empty()) return true;
  const std::size_t n = fan.dim();

  // Cheap certificate for full-dimensional a: a dual-basis functional
  // separating each extra generator of a from all of b.
  if (a.size() == n) {
    auto gens = fan.generators(a);
    std::vector<std::vector<Rat>> inv(n, std::vector<Rat>(n));
    RationalField q;
    Rows<RationalField> aug;
    for (std::size_t i = 0; i < n; ++i) {
      Row<RationalField> row;
      for (std::size_t j = 0; j < n; ++j) row.emplace_back(gens[i][j]);
      for (std::size_t j = 0; j < n; ++j) row.emplace_back(i == j ? 1 : 0);
      aug.push_back(std::move(row));
    }
    auto red = row_reduce(q, aug);
    // red = [I | G^{-1}] where G has the generators as rows; the dual basis
    // functional for generator k is column k of G^{-1}.
    bool certified = true;
    for (auto k_ray : only_a) {
      std::size_t k = static_cast<std::size_t>(std::find(a.begin(), a.end(), k_ray) - a.begin());
      for (auto b_ray : b) {
        Rat val = 0;
        for (std::size_t j = 0; j < n; ++j) val += red[j][n + k] * Rat(fan.ray(b_ray)[j]);
        if (val > 0) {
          certified = false;
          break;
        }
      }
      if (!certified) break;
    }
    if (certified) return true;
  }

  // LP: lambda, mu >= 0 with sum lambda_a a - sum mu_b b = 0 and the extra
  // generators of a carrying total weight 1.
  const std::size_t vars = a.size() + b.size();
  std::vector<std::vector<Rat>> lhs(n + 1, std::vector<Rat>(vars));
  for (std::size_t j = 0; j < a.size(); ++j)
    for (std::size_t i = 0; i < n; ++i) lhs[i][j] = Rat(fan.ray(a[j])[i]);
  for (std::size_t j = 0; j < b.size(); ++j)
    for (std::size_t i = 0; i < n; ++i) lhs[i][a.size() + j] = Rat(-fan.ray(b[j])[i]);
  for (std::size_t j = 0; j < a.size(); ++j)
    if (std::binary_search(only_a.begin(), only_a.end(), a[j])) lhs[n][j] = 1;
  std::vector<Rat> rhs(n + 1);
  rhs[n] = 1;
  return !nonnegative_solution(lhs, rhs).has_value();
}

}  // namespace detail

/// Checks that maximal cones are simplicial, none contains another, and any
/// two meet in a common face. Returns the first violation found.
inline std::optional<FanViolation> validate_fan(const Fan& fan) {
  const auto& cones = fan.max_cones();
  for (const auto& c : cones) {
    auto gens = fan.generators(c);
    if (detail::rank_of(gens) != gens.size())
      return FanViolation{FanViolation::Kind::NotSimplicial, c, {}, {},
                          "maximal cone " + to_string(c) + " has linearly dependent generators"};
  }
  for (std::size_t i = 0; i < cones.size(); ++i)
    for (std::size_t j = 0; j < cones.size(); ++j)
      if (i != j && is_subset(cones[i], cones[j]))
        return FanViolation{FanViolation::Kind::NestedMaximalCones, cones[i], cones[j], cones[i],
                            "maximal cone " + to_string(cones[i]) + " lies inside " + to_string(cones[j])};
  for (std::size_t i = 0; i < cones.size(); ++i)
    for (std::size_t j = i + 1; j < cones.size(); ++j) {
      RaySet common = intersection(cones[i], cones[j]);
      if (!detail::intersection_is_face_of_first(fan, cones[i], cones[j], common) ||
          !detail::intersection_is_face_of_first(fan, cones[j], cones[i], common))
        return FanViolation{FanViolation::Kind::BadIntersection, cones[i], cones[j], common,
                            "cones " + to_string(cones[i]) + " and " + to_string(cones[j]) +
                                " do not meet along a common face"};
    }
  return std::nullopt;
}

/// The fan of P^n: rays e_1..e_n and -(e_1+...+e_n), maximal cones all n-subsets.
inline Fan projective_fan(std::size_t n) {
  if (n == 0) throw InvalidArgument("projective space needs n >= 1");
  std::vector<LatticeVector> rays;
  LatticeVector last(n);
  for (std::size_t i = 0; i < n; ++i) {
    rays.push_back(LatticeVector::unit(n, i));
    last[i] = -1;
  }
  rays.push_back(last);
  std::vector<RaySet> cones;
  for (std::size_t skip = 0; skip <= n; ++skip) {
    RaySet c;
    for (std::size_t i = 0; i <= n; ++i)
      if (i != skip) c.push_back(i);
    cones.push_back(std::move(c));
  }
  return Fan(n, std::move(rays), std::move(cones));
}

/// Do these generators extend to a Z-basis of the lattice?
inline bool is_unimodular(const std::vector<LatticeVector>& gens) {
  if (gens.empty()) return true;
  auto factors = smith_normal_form(matrix_of_rows(gens));
  return factors.size() == gens.size() &&
         std::all_of(factors.begin(), factors.end(), [](const Int& d) { return d == 1; });
}

inline bool is_smooth(const Fan& fan) {
  return std::all_of(fan.max_cones().begin(), fan.max_cones().end(),
                     [&](const RaySet& c) { return is_unimodular(fan.generators(c)); });
}

/// Star subdivision at a smooth cone: inserts the sum of its generators and
/// replaces every maximal cone containing it by the joins of the new ray with
/// the facets that miss one of its generators.
inline Fan star_subdivide(const Fan& fan, const RaySet& cone) {
  RaySet sigma = cone;
  std::sort(sigma.begin(), sigma.end());
  if (sigma.empty() || !fan.contains_cone(sigma)) throw ConeNotInFan("cone " + to_string(sigma) + " is not in the fan");
  if (sigma.size() < 2) throw InvalidArgument("star subdivision needs a cone of dimension >= 2");
  auto gens = fan.generators(sigma);
  if (!is_unimodular(gens)) throw NonSmoothCone("cone " + to_string(sigma) + " is not smooth");

  LatticeVector new_ray(fan.dim());
  for (const auto& g : gens) new_ray += g;
  if (fan.index_of(new_ray)) throw InvalidFan("subdivision ray " + new_ray.str() + " already present");

  std::vector<LatticeVector> rays = fan.rays();
  const std::size_t new_index = rays.size();
  rays.push_back(new_ray);
  std::vector<RaySet> cones;
  for (const auto& m : fan.max_cones()) {
    if (!is_subset(sigma, m)) {
      cones.push_back(m);
      continue;
    }
    for (auto drop : sigma) {
      RaySet c;
      for (auto r : m)
        if (r != drop) c.push_back(r);
      c.push_back(new_index);
      cones.push_back(std::move(c));
    }
  }
  return Fan(fan.dim(), std::move(rays), std::move(cones));
}

inline Fan star_subdivide(const Fan& fan, const Cone& cone) { return star_subdivide(fan, fan.ray_set(cone)); }

/// Pure simplicial completeness: all maximal cones full-dimensional, every
/// ridge on exactly two of them, adjacency graph connected.
inline bool is_complete(const Fan& fan) {
  const auto& cones = fan.max_cones();
  if (cones.empty()) return false;
  for (const auto& c : cones)
    if (c.size() != fan.dim()) return false;
  std::map<RaySet, std::vector<std::size_t>> ridges;
  for (std::size_t i = 0; i < cones.size(); ++i)
    for (std::size_t drop = 0; drop < cones[i].size(); ++drop) {
      RaySet r = cones[i];
      r.erase(r.begin() + static_cast<std::ptrdiff_t>(drop));
      ridges[r].push_back(i);
    }
  std::vector<std::size_t> parent(cones.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& [ridge, owners] : ridges) {
    if (owners.size() != 2) return false;
    parent[find(owners[0])] = find(owners[1]);
  }
  for (std::size_t i = 0; i < cones.size(); ++i)
    if (find(i) != find(0)) return false;
  return true;
}

/// Dimension of the torus-orbit closure attached to a cone: n - dim(cone).
inline std::size_t orbit_closure_dim(const Fan& fan, const RaySet& cone) {
  RaySet c = cone;
  std::sort(c.begin(), c.end());
  if (!fan.contains_cone(c)) throw ConeNotInFan("cone " + to_string(c) + " is not in the fan");
  return fan.dim() - detail::rank_of(fan.generators(c));
}

}  // namespace tvb
