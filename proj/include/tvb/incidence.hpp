#pragma once

// Point/line incidence data, concrete configurations in a projective plane,
// and exhaustive enumeration of realizations over a prime field.

#include <algorithm>
#include <array>
#include <atomic>
#include <functional>
#include <numeric>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "tvb/exact.hpp"
#include "tvb/linalg.hpp"

namespace tvb {

/// Which of d points lie on which of d' lines: (i, j) in I iff x_i ∈ l_j.
/// Indices are 1-based. Objects are numbered 0..d+d'-1, points first.
class IncidenceData {
 public:
  IncidenceData() = default;
  IncidenceData(int points, int lines, std::vector<std::pair<int, int>> pairs)
      : points_(points), lines_(lines), pairs_(std::move(pairs)) {
    if (points < 0 || lines < 0) throw InvalidIncidence("negative object count");
    if (points + lines > 62) throw InvalidIncidence("at most 62 points and lines are supported");
    for (const auto& [i, j] : pairs_)
      if (i < 1 || i > points || j < 1 || j > lines)
        throw InvalidIncidence("incidence (" + std::to_string(i) + "," + std::to_string(j) + ") out of range");
    std::sort(pairs_.begin(), pairs_.end());
    pairs_.erase(std::unique(pairs_.begin(), pairs_.end()), pairs_.end());
  }

  int points() const noexcept { return points_; }
  int lines() const noexcept { return lines_; }
  int objects() const noexcept { return points_ + lines_; }
  const std::vector<std::pair<int, int>>& pairs() const noexcept { return pairs_; }

  bool incident(int point, int line) const {
    return std::binary_search(pairs_.begin(), pairs_.end(), std::make_pair(point, line));
  }
  bool is_point(int object) const noexcept { return object < points_; }
  /// 1-based point or line index of an object.
  int local_index(int object) const noexcept { return is_point(object) ? object + 1 : object - points_ + 1; }

  /// Point i becomes point_perm[i-1], line j becomes line_perm[j-1].
  IncidenceData relabeled(const std::vector<int>& point_perm, const std::vector<int>& line_perm) const {
    std::vector<std::pair<int, int>> out;
    for (const auto& [i, j] : pairs_)
      out.emplace_back(point_perm.at(static_cast<std::size_t>(i - 1)), line_perm.at(static_cast<std::size_t>(j - 1)));
    return IncidenceData(points_, lines_, std::move(out));
  }

  friend bool operator==(const IncidenceData& a, const IncidenceData& b) {
    return a.points_ == b.points_ && a.lines_ == b.lines_ && a.pairs_ == b.pairs_;
  }

 private:
  int points_ = 0;
  int lines_ = 0;
  std::vector<std::pair<int, int>> pairs_;
};

/// The Fano plane: points 1..7, line j = {j, j+1, j+3} (mod 7).
inline IncidenceData fano_incidence() {
  std::vector<std::pair<int, int>> pairs;
  for (int j = 0; j < 7; ++j)
    for (int off : {0, 1, 3}) pairs.emplace_back((j + off) % 7 + 1, j + 1);
  return IncidenceData(7, 7, std::move(pairs));
}

template <class F>
using Triple = std::array<typename F::value_type, 3>;

/// Scales a nonzero homogeneous triple so its first nonzero coordinate is 1.
template <class F>
Triple<F> normalize(const F& field, Triple<F> t) {
  std::size_t lead = 0;
  while (lead < 3 && field.is_zero(t[lead])) ++lead;
  if (lead == 3) throw InvalidArgument("zero triple is not a projective point");
  const auto scale = field.inv(t[lead]);
  for (auto& x : t) x = field.mul(x, scale);
  return t;
}

template <class F>
typename F::value_type dot3(const F& field, const Triple<F>& a, const Triple<F>& b) {
  auto s = field.zero();
  for (std::size_t k = 0; k < 3; ++k) s = field.add(s, field.mul(a[k], b[k]));
  return s;
}

/// Points and lines of P^2 over a field, in normalized homogeneous coordinates
/// (a line [a:b:c] is {ax + by + cz = 0}).
template <class F>
class Configuration {
 public:
  Configuration(F field, std::vector<Triple<F>> points, std::vector<Triple<F>> lines)
      : field_(std::move(field)), points_(std::move(points)), lines_(std::move(lines)) {
    for (auto& p : points_) p = normalize(field_, p);
    for (auto& l : lines_) l = normalize(field_, l);
  }

  const F& field() const noexcept { return field_; }
  const std::vector<Triple<F>>& points() const noexcept { return points_; }
  const std::vector<Triple<F>>& lines() const noexcept { return lines_; }
  /// Object k: point k for k < d, else line k - d.
  const Triple<F>& object(int k) const {
    return k < static_cast<int>(points_.size()) ? points_[static_cast<std::size_t>(k)]
                                                : lines_[static_cast<std::size_t>(k) - points_.size()];
  }

  friend bool operator==(const Configuration& a, const Configuration& b) {
    return a.points_ == b.points_ && a.lines_ == b.lines_;
  }
  friend bool operator<(const Configuration& a, const Configuration& b) {
    if (a.points_ != b.points_) return a.points_ < b.points_;
    return a.lines_ < b.lines_;
  }

 private:
  F field_;
  std::vector<Triple<F>> points_;
  std::vector<Triple<F>> lines_;
};

using FpConfiguration = Configuration<PrimeField>;

/// True iff x_i ∈ l_j exactly for (i,j) in I, and points (resp. lines) are
/// pairwise distinct.
template <class F>
bool check_configuration(const Configuration<F>& c, const IncidenceData& incidence) {
  if (static_cast<int>(c.points().size()) != incidence.points() ||
      static_cast<int>(c.lines().size()) != incidence.lines())
    throw DimensionMismatch("configuration size does not match the incidence data");
  const F& f = c.field();
  for (std::size_t i = 0; i < c.points().size(); ++i)
    for (std::size_t j = 0; j < c.lines().size(); ++j) {
      const bool on = f.is_zero(dot3(f, c.points()[i], c.lines()[j]));
      if (on != incidence.incident(static_cast<int>(i) + 1, static_cast<int>(j) + 1)) return false;
    }
  for (std::size_t i = 0; i < c.points().size(); ++i)
    for (std::size_t k = i + 1; k < c.points().size(); ++k)
      if (c.points()[i] == c.points()[k]) return false;
  for (std::size_t j = 0; j < c.lines().size(); ++j)
    for (std::size_t k = j + 1; k < c.lines().size(); ++k)
      if (c.lines()[j] == c.lines()[k]) return false;
  return true;
}

/// All p^2 + p + 1 normalized triples over F_p, sorted.
inline std::vector<Triple<PrimeField>> projective_plane(const PrimeField& f) {
  std::vector<Triple<PrimeField>> out;
  const std::uint32_t p = f.modulus();
  out.push_back({0, 0, 1});
  for (std::uint32_t z = 0; z < p; ++z) out.push_back({0, 1, z});
  for (std::uint32_t y = 0; y < p; ++y)
    for (std::uint32_t z = 0; z < p; ++z) out.push_back({1, y, z});
  std::sort(out.begin(), out.end());
  return out;
}

/// Applies g to every point and the inverse transpose of g to every line, so
/// incidences are preserved.
template <class F>
Configuration<F> apply_projectivity(const Configuration<F>& c, const std::array<Triple<F>, 3>& g) {
  const F& f = c.field();
  Rows<F> aug;
  for (std::size_t i = 0; i < 3; ++i) {
    Row<F> row(g[i].begin(), g[i].end());
    for (std::size_t j = 0; j < 3; ++j) row.push_back(i == j ? f.one() : f.zero());
    aug.push_back(std::move(row));
  }
  std::vector<std::size_t> pivots;
  auto red = row_reduce(f, aug, &pivots);
  if (pivots != std::vector<std::size_t>{0, 1, 2}) throw InvalidArgument("projectivity matrix is singular");
  // red = [I | g^{-1}]; lines transform by (g^{-1})^T.
  std::vector<Triple<F>> pts, lns;
  for (const auto& p : c.points()) {
    Triple<F> q{f.zero(), f.zero(), f.zero()};
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) q[i] = f.add(q[i], f.mul(g[i][j], p[j]));
    pts.push_back(q);
  }
  for (const auto& l : c.lines()) {
    Triple<F> q{f.zero(), f.zero(), f.zero()};
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) q[i] = f.add(q[i], f.mul(red[j][3 + i], l[j]));
    lns.push_back(q);
  }
  return Configuration<F>(f, std::move(pts), std::move(lns));
}

// ---------------------------------------------------------------------------
// Enumeration engine over F_p.

struct SearchOptions {
  enum class Strategy { Brute, Backtrack };
  Strategy strategy = Strategy::Backtrack;
  unsigned long long budget = 4'000'000'000ULL;  // assignment attempts
  unsigned workers = 1;
};

namespace detail {

/// Most-constrained-first order: repeatedly take the object with the most
/// strong links (incidences) to already placed objects, ties broken by total
/// degree and then index.
inline std::vector<int> constraint_order(int objects, const std::vector<std::pair<int, int>>& strong_links) {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(objects));
  for (auto [x, y] : strong_links) {
    adj[static_cast<std::size_t>(x)].push_back(y);
    adj[static_cast<std::size_t>(y)].push_back(x);
  }
  std::vector<int> order;
  std::vector<bool> placed(static_cast<std::size_t>(objects), false);
  std::vector<int> links_to_placed(static_cast<std::size_t>(objects), 0);
  for (int step = 0; step < objects; ++step) {
    int best = -1;
    for (int k = 0; k < objects; ++k) {
      if (placed[static_cast<std::size_t>(k)]) continue;
      auto key = [&](int o) {
        return std::make_tuple(links_to_placed[static_cast<std::size_t>(o)],
                               static_cast<int>(adj[static_cast<std::size_t>(o)].size()), -o);
      };
      if (best < 0 || key(k) > key(best)) best = k;
    }
    placed[static_cast<std::size_t>(best)] = true;
    order.push_back(best);
    for (int nb : adj[static_cast<std::size_t>(best)]) ++links_to_placed[static_cast<std::size_t>(nb)];
  }
  return order;
}

using FpTriple = Triple<PrimeField>;
using PairCheck = std::function<bool(int, const FpTriple&, int, const FpTriple&)>;
using LeafCheck = std::function<bool(const FpConfiguration&)>;

/// Depth-first search over assignments of projective triples to objects.
/// Backtracking prunes with `pair_ok` as soon as both objects are placed; the
/// brute strategy only applies `leaf_ok` to complete assignments.
inline std::vector<FpConfiguration> search(const PrimeField& field, int points, int lines, std::vector<int> order,
                                           const PairCheck& pair_ok, const LeafCheck& leaf_ok,
                                           const SearchOptions& options) {
  const int objects = points + lines;
  const auto plane = projective_plane(field);
  const bool prune = options.strategy == SearchOptions::Strategy::Backtrack;
  if (!prune) {
    order.resize(static_cast<std::size_t>(objects));
    std::iota(order.begin(), order.end(), 0);
  }
  std::atomic<unsigned long long> nodes{0};
  std::atomic<unsigned long long> found{0};
  std::atomic<bool> aborted{false};

  auto make_config = [&](const std::vector<FpTriple>& assignment) {
    std::vector<FpTriple> pts(assignment.begin(), assignment.begin() + points);
    std::vector<FpTriple> lns(assignment.begin() + points, assignment.end());
    return FpConfiguration(field, std::move(pts), std::move(lns));
  };

  auto run_worker = [&](unsigned worker, unsigned workers, std::vector<FpConfiguration>& out) {
    std::vector<FpTriple> assignment(static_cast<std::size_t>(objects));
    std::function<void(std::size_t)> place = [&](std::size_t depth) {
      if (aborted.load(std::memory_order_relaxed)) return;
      if (depth == static_cast<std::size_t>(objects)) {
        auto config = make_config(assignment);
        if (leaf_ok(config)) {
          out.push_back(std::move(config));
          found.fetch_add(1, std::memory_order_relaxed);
        }
        return;
      }
      const int obj = order[depth];
      for (std::size_t c = 0; c < plane.size(); ++c) {
        if (depth == 0 && c % workers != worker) continue;
        if (nodes.fetch_add(1, std::memory_order_relaxed) >= options.budget) {
          aborted = true;
          return;
        }
        const auto& t = plane[c];
        bool ok = true;
        if (prune)
          for (std::size_t prev = 0; prev < depth && ok; ++prev) {
            const int other = order[prev];
            ok = pair_ok(other, assignment[static_cast<std::size_t>(other)], obj, t);
          }
        if (!ok) continue;
        assignment[static_cast<std::size_t>(obj)] = t;
        place(depth + 1);
      }
    };
    if (objects == 0) {
      if (worker == 0 && leaf_ok(make_config(assignment))) out.push_back(make_config(assignment));
      return;
    }
    place(0);
  };

  const unsigned workers = std::max(1u, options.workers);
  std::vector<std::vector<FpConfiguration>> results(workers);
  if (workers == 1) {
    run_worker(0, 1, results[0]);
  } else {
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(run_worker, w, workers, std::ref(results[w]));
    for (auto& t : threads) t.join();
  }
  if (aborted) throw BudgetExceeded(nodes.load(), found.load());
  std::vector<FpConfiguration> merged;
  for (auto& r : results) std::move(r.begin(), r.end(), std::back_inserter(merged));
  std::sort(merged.begin(), merged.end());
  return merged;
}

}  // namespace detail

/// All configurations over F_p realizing the incidence data, canonically sorted.
inline std::vector<FpConfiguration> enumerate_c_i(const IncidenceData& incidence, std::uint32_t p,
                                                  const SearchOptions& options = {}) {
  const PrimeField field(p);
  std::vector<std::pair<int, int>> links;
  for (const auto& [i, j] : incidence.pairs()) links.emplace_back(i - 1, incidence.points() + j - 1);
  auto order = detail::constraint_order(incidence.objects(), links);

  detail::PairCheck pair_ok = [&](int x, const detail::FpTriple& tx, int y, const detail::FpTriple& ty) {
    if (incidence.is_point(x) == incidence.is_point(y)) return tx != ty;
    const int point = incidence.is_point(x) ? x : y;
    const int line = incidence.is_point(x) ? y : x;
    const bool on = field.is_zero(dot3(field, tx, ty));
    return on == incidence.incident(incidence.local_index(point), incidence.local_index(line));
  };
  detail::LeafCheck leaf_ok = [&](const FpConfiguration& c) { return check_configuration(c, incidence); };
  return detail::search(field, incidence.points(), incidence.lines(), std::move(order), pair_ok, leaf_ok, options);
}

}  // namespace tvb
