#pragma once

// The fan of P^n blown up, in order of decreasing cone dimension, along every
// torus-invariant linear subspace of codimension at least three.
//
// Rays are labelled by subsets S of {1..n+1}: singletons are the original rays
// of P^n, and |S| in [3, n] labels the inserted ray rho_S = sum_{i in S} rho_i.
// Maximal cones correspond to flags: a pair {a,b} together with a chain
// S_3 ⊂ S_4 ⊂ ... ⊂ S_n with {a,b} ⊂ S_3 and |S_k| = k.

#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tvb/fan.hpp"

namespace tvb {

/// Subset of {1..n+1}, stored as a bitmask (bit i-1 for index i).
class RayLabel {
 public:
  constexpr RayLabel() = default;
  constexpr explicit RayLabel(std::uint64_t mask) : mask_(mask) {}

  static RayLabel original(int i) {
    if (i < 1 || i > 63) throw InvalidLabel("original ray index " + std::to_string(i) + " out of range");
    return RayLabel(std::uint64_t{1} << (i - 1));
  }
  static RayLabel of(const std::vector<int>& members) {
    std::uint64_t m = 0;
    for (int i : members) m |= original(i).mask_;
    return RayLabel(m);
  }

  std::uint64_t mask() const noexcept { return mask_; }
  int size() const noexcept { return std::popcount(mask_); }
  bool is_original() const noexcept { return size() == 1; }
  bool contains(int i) const noexcept { return i >= 1 && i <= 64 && (mask_ >> (i - 1)) & 1u; }
  bool subset_of(RayLabel o) const noexcept { return (mask_ & ~o.mask_) == 0; }
  /// Index of an original ray label (1-based).
  int index() const {
    if (!is_original()) throw InvalidLabel("composite label " + str() + " has no single index");
    return std::countr_zero(mask_) + 1;
  }
  std::vector<int> members() const {
    std::vector<int> out;
    for (int i = 1; i <= 64; ++i)
      if (contains(i)) out.push_back(i);
    return out;
  }
  std::string str() const {
    std::string s = "{";
    bool first = true;
    for (int i : members()) {
      s += (first ? "" : ",") + std::to_string(i);
      first = false;
    }
    return s + "}";
  }

  friend bool operator==(RayLabel a, RayLabel b) { return a.mask_ == b.mask_; }
  friend bool operator!=(RayLabel a, RayLabel b) { return a.mask_ != b.mask_; }
  /// Canonical order: by size, then by member list.
  friend bool operator<(RayLabel a, RayLabel b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a.members() < b.members();
  }

 private:
  std::uint64_t mask_ = 0;
};

/// A maximal cone of the blown-up fan, given by its flag.
struct Flag {
  int a = 0;
  int b = 0;
  std::vector<RayLabel> chain;  // S_3 ⊂ ... ⊂ S_n

  std::vector<RayLabel> labels() const {
    std::vector<RayLabel> out{RayLabel::original(a), RayLabel::original(b)};
    out.insert(out.end(), chain.begin(), chain.end());
    return out;
  }
};

enum class FanMode { Materialized, Lazy };

inline constexpr int kMaxMaterializedN = 6;
inline constexpr int kMaxLabelN = 62;

inline Int binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  Int r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// (n+1) + sum_{k=3}^{n} C(n+1, k)
inline Int murphy_ray_count(int n) {
  Int total = n + 1;
  for (int k = 3; k <= n; ++k) total += binomial(n + 1, k);
  return total;
}

/// C(n+1, 2) * (n-1)!
inline Int murphy_max_cone_count(int n) {
  Int f = 1;
  for (int i = 2; i <= n - 1; ++i) f *= i;
  return binomial(n + 1, 2) * f;
}

/// rho_i = e_i for i <= n and rho_{n+1} = -(e_1 + ... + e_n); composites add up.
inline LatticeVector label_vector(int n, RayLabel label) {
  LatticeVector v(static_cast<std::size_t>(n));
  for (int i : label.members()) {
    if (i <= n)
      v[static_cast<std::size_t>(i - 1)] += 1;
    else
      for (int k = 0; k < n; ++k) v[static_cast<std::size_t>(k)] -= 1;
  }
  return v;
}

inline void check_label(int n, RayLabel label) {
  const int size = label.size();
  if (label.mask() >> (n + 1) != 0) throw InvalidLabel("label " + label.str() + " references an index above n+1");
  if (size == 0 || size == 2 || size > n)
    throw InvalidLabel("label " + label.str() + " is not a ray of the blown-up fan for n=" + std::to_string(n));
}

/// Every ray label of the fan for n, in canonical order.
inline std::vector<RayLabel> murphy_labels(int n) {
  std::vector<RayLabel> out;
  for (int i = 1; i <= n + 1; ++i) out.push_back(RayLabel::original(i));
  for (int k = 3; k <= n; ++k) {
    std::vector<RayLabel> stage;
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << (n + 1)); ++m)
      if (std::popcount(m) == k) stage.emplace_back(m);
    std::sort(stage.begin(), stage.end());
    out.insert(out.end(), stage.begin(), stage.end());
  }
  return out;
}

class MurphyFanHandle {
 public:
  int n() const noexcept { return n_; }
  FanMode mode() const noexcept { return fan_ ? FanMode::Materialized : FanMode::Lazy; }
  bool materialized() const noexcept { return fan_.has_value(); }

  const Fan& fan() const {
    if (!fan_) throw InvalidArgument("lazy Murphy fan has no materialized cone list");
    return *fan_;
  }

  LatticeVector ray_vector(RayLabel label) const {
    check_label(n_, label);
    return label_vector(n_, label);
  }

  /// Ray index in the materialized fan.
  std::size_t index_of(RayLabel label) const {
    auto idx = fan().index_of(ray_vector(label));
    if (!idx) throw InternalAudit("label " + label.str() + " missing from the materialized fan");
    return *idx;
  }
  RayLabel label_of(std::size_t ray_index) const { return labels_by_index_.at(ray_index); }

  Int ray_count() const { return murphy_ray_count(n_); }
  Int max_cone_count() const { return murphy_max_cone_count(n_); }

 private:
  friend MurphyFanHandle make_murphy_handle(int, std::optional<Fan>);
  int n_ = 0;
  std::optional<Fan> fan_;
  std::vector<RayLabel> labels_by_index_;
};

inline MurphyFanHandle make_murphy_handle(int n, std::optional<Fan> fan) {
  MurphyFanHandle h;
  h.n_ = n;
  if (fan) {
    std::map<LatticeVector, RayLabel> by_vector;
    for (auto l : murphy_labels(n)) by_vector.emplace(label_vector(n, l), l);
    for (const auto& r : fan->rays()) {
      auto it = by_vector.find(r);
      if (it == by_vector.end()) throw InternalAudit("unexpected ray " + r.str() + " in Murphy fan");
      h.labels_by_index_.push_back(it->second);
    }
  }
  h.fan_ = std::move(fan);
  return h;
}

/// Iterated star subdivision, stages k = n..3. `reorder` may permute the
/// centers within a stage (default: lexicographic).
inline Fan materialize_murphy_fan(int n, const std::function<void(std::vector<RayLabel>&)>& reorder = {}) {
  if (n < 2) throw InvalidArgument("the blown-up fan needs n >= 2");
  if (n > kMaxMaterializedN)
    throw MaterializationTooLarge("materialized mode supports n <= " + std::to_string(kMaxMaterializedN));
  Fan fan = projective_fan(static_cast<std::size_t>(n));
  for (int k = n; k >= 3; --k) {
    std::vector<RayLabel> centers;
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << (n + 1)); ++m)
      if (std::popcount(m) == k) centers.emplace_back(m);
    std::sort(centers.begin(), centers.end());
    if (reorder) reorder(centers);
    for (auto center : centers) {
      RaySet cone;
      for (int i : center.members()) {
        auto idx = fan.index_of(label_vector(n, RayLabel::original(i)));
        cone.push_back(*idx);
      }
      std::sort(cone.begin(), cone.end());
      fan = star_subdivide(fan, cone);
    }
  }
  return fan;
}

inline MurphyFanHandle build_murphy_fan(int n, FanMode mode) {
  if (n < 2) throw InvalidArgument("the blown-up fan needs n >= 2");
  if (n > kMaxLabelN) throw InvalidArgument("n above " + std::to_string(kMaxLabelN) + " is not supported");
  if (mode == FanMode::Lazy) return make_murphy_handle(n, std::nullopt);
  return make_murphy_handle(n, materialize_murphy_fan(n));
}

/// Membership rule: at most two original rays, composite labels form a chain,
/// and every original ray lies in the smallest composite present.
inline bool cone_membership(int n, const std::vector<RayLabel>& rays) {
  std::vector<RayLabel> originals, composites;
  for (auto l : rays) {
    check_label(n, l);
    auto& bucket = l.is_original() ? originals : composites;
    if (std::find(bucket.begin(), bucket.end(), l) == bucket.end()) bucket.push_back(l);
  }
  if (originals.size() > 2) return false;
  std::sort(composites.begin(), composites.end(), [](RayLabel x, RayLabel y) { return x.size() < y.size(); });
  for (std::size_t i = 1; i < composites.size(); ++i)
    if (!composites[i - 1].subset_of(composites[i])) return false;
  if (!composites.empty())
    for (auto o : originals)
      if (!o.subset_of(composites.front())) return false;
  return true;
}

inline bool cone_membership(const MurphyFanHandle& h, const std::vector<RayLabel>& rays) {
  return cone_membership(h.n(), rays);
}

inline void check_flag(int n, const Flag& flag) {
  auto fail = [](const std::string& why) { throw InvalidFlag(why); };
  if (flag.a < 1 || flag.a > n + 1 || flag.b < 1 || flag.b > n + 1 || flag.a == flag.b)
    fail("flag pair must be two distinct indices in 1..n+1");
  if (static_cast<int>(flag.chain.size()) != n - 2) fail("flag chain must have n-2 members");
  for (std::size_t k = 0; k < flag.chain.size(); ++k) {
    const RayLabel s = flag.chain[k];
    if (s.mask() >> (n + 1) != 0) fail("chain member " + s.str() + " out of range");
    if (s.size() != static_cast<int>(k) + 3) fail("chain member " + s.str() + " has the wrong size");
    if (k > 0 && !flag.chain[k - 1].subset_of(s)) fail("chain is not ascending");
  }
  if (!flag.chain.empty() && !(flag.chain.front().contains(flag.a) && flag.chain.front().contains(flag.b)))
    fail("pair must lie in the smallest chain member");
}

/// Lattice vectors rho_a, rho_b, rho_{S_3}, ..., rho_{S_n}; a Z-basis of N.
inline std::vector<LatticeVector> maximal_cone_rays(const MurphyFanHandle& h, const Flag& flag) {
  check_flag(h.n(), flag);
  std::vector<LatticeVector> out;
  for (auto l : flag.labels()) out.push_back(label_vector(h.n(), l));
  return out;
}

/// Reconstructs the flag of a maximal cone from its n labels (order ignored).
inline Flag flag_from_labels(int n, const std::vector<RayLabel>& labels) {
  Flag f;
  std::vector<RayLabel> originals;
  for (auto l : labels) (l.is_original() ? originals : f.chain).push_back(l);
  if (originals.size() != 2) throw InvalidFlag("a maximal cone has exactly two original rays");
  f.a = originals[0].index();
  f.b = originals[1].index();
  if (f.a > f.b) std::swap(f.a, f.b);
  std::sort(f.chain.begin(), f.chain.end(), [](RayLabel x, RayLabel y) { return x.size() < y.size(); });
  check_flag(n, f);
  return f;
}

/// Visits every maximal cone: pairs a < b, then orderings of the remaining
/// indices whose prefixes grow the chain.
inline void for_each_flag(int n, const std::function<void(const Flag&)>& visit) {
  for (int a = 1; a <= n + 1; ++a)
    for (int b = a + 1; b <= n + 1; ++b) {
      std::vector<int> rest;
      for (int i = 1; i <= n + 1; ++i)
        if (i != a && i != b) rest.push_back(i);
      Flag f{a, b, {}};
      std::function<void(std::uint64_t, std::uint64_t)> grow = [&](std::uint64_t current, std::uint64_t used) {
        if (static_cast<int>(f.chain.size()) == n - 2) {
          visit(f);
          return;
        }
        for (int i : rest) {
          std::uint64_t bit = std::uint64_t{1} << (i - 1);
          if (used & bit) continue;
          f.chain.emplace_back(current | bit);
          grow(current | bit, used | bit);
          f.chain.pop_back();
        }
      };
      grow(RayLabel::original(a).mask() | RayLabel::original(b).mask(), 0);
    }
}

/// Some maximal cone containing the given cone (which must pass the
/// membership rule). Missing indices are filled in increasing order.
inline Flag flag_through(int n, const std::vector<RayLabel>& cone) {
  if (!cone_membership(n, cone)) throw InvalidFlag("labels do not span a cone of the fan");
  std::vector<int> originals;
  std::vector<RayLabel> composites;
  for (auto l : cone) {
    if (l.is_original()) {
      if (std::find(originals.begin(), originals.end(), l.index()) == originals.end()) originals.push_back(l.index());
    } else if (std::find(composites.begin(), composites.end(), l) == composites.end()) {
      composites.push_back(l);
    }
  }
  std::sort(composites.begin(), composites.end(), [](RayLabel x, RayLabel y) { return x.size() < y.size(); });
  const RayLabel everything((std::uint64_t{1} << (n + 1)) - 1);
  auto next_target = [&](int size) {
    for (auto c : composites)
      if (c.size() > size) return c;
    return everything;
  };
  std::uint64_t current = 0;
  for (int i : originals) current |= RayLabel::original(i).mask();
  auto add_from = [&](RayLabel target) {
    for (int i : target.members())
      if (!((current >> (i - 1)) & 1u)) {
        current |= RayLabel::original(i).mask();
        return i;
      }
    throw InternalAudit("cannot extend flag inside " + target.str());
  };
  while (originals.size() < 2) originals.push_back(add_from(next_target(0)));
  Flag f{std::min(originals[0], originals[1]), std::max(originals[0], originals[1]), {}};
  for (int k = 3; k <= n; ++k) {
    auto exact = std::find_if(composites.begin(), composites.end(), [&](RayLabel c) { return c.size() == k; });
    if (exact != composites.end())
      current = exact->mask();
    else
      add_from(next_target(k));
    f.chain.emplace_back(current);
  }
  check_flag(n, f);
  return f;
}

template <class Rng>
Flag random_flag(int n, Rng& rng) {
  std::vector<int> perm;
  for (int i = 1; i <= n + 1; ++i) perm.push_back(i);
  std::shuffle(perm.begin(), perm.end(), rng);
  Flag f{std::min(perm[0], perm[1]), std::max(perm[0], perm[1]), {}};
  std::uint64_t current = RayLabel::original(perm[0]).mask() | RayLabel::original(perm[1]).mask();
  for (int k = 3; k <= n; ++k) {
    current |= RayLabel::original(perm[static_cast<std::size_t>(k - 1)]).mask();
    f.chain.emplace_back(current);
  }
  return f;
}

/// The maximal cone sharing with `flag` every ray except the one at
/// `position` (0 = a, 1 = b, 2.. = chain). Found through the membership oracle.
inline Flag adjacent_flag(int n, const Flag& flag, std::size_t position) {
  check_flag(n, flag);
  auto labels = flag.labels();
  if (position >= labels.size()) throw InvalidFlag("facet position out of range");
  const RayLabel dropped = labels[position];
  labels.erase(labels.begin() + static_cast<std::ptrdiff_t>(position));
  std::vector<RayLabel> candidates;
  for (std::uint64_t m = 1; m < (std::uint64_t{1} << (n + 1)); ++m) {
    RayLabel l(m);
    const int s = l.size();
    if (s == 2 || s > n || l == dropped) continue;
    if (std::find(labels.begin(), labels.end(), l) != labels.end()) continue;
    labels.push_back(l);
    if (cone_membership(n, labels)) candidates.push_back(l);
    labels.pop_back();
  }
  if (candidates.size() != 1)
    throw InternalAudit("facet of a maximal cone should have exactly one other neighbor, found " +
                        std::to_string(candidates.size()));
  labels.push_back(candidates.front());
  return flag_from_labels(n, labels);
}

}  // namespace tvb
