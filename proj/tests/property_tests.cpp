// Randomized invariants with fixed seeds. Every generator is a plain
// std::mt19937_64 so failures reproduce exactly.

#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "oracles.hpp"
#include "tvb/tvb.hpp"

using namespace tvb;

namespace {

constexpr std::uint64_t kSeed = 20240611;

IncidenceData random_incidence(std::mt19937_64& rng, int d, int dp) {
  std::bernoulli_distribution coin(0.4);
  std::vector<std::pair<int, int>> pairs;
  for (int i = 1; i <= d; ++i)
    for (int j = 1; j <= dp; ++j)
      if (coin(rng)) pairs.emplace_back(i, j);
  return IncidenceData(d, dp, pairs);
}

std::vector<IncidenceData> all_incidences(int objects) {
  std::vector<IncidenceData> out;
  for (int d = 0; d <= objects; ++d) {
    const int dp = objects - d;
    for (unsigned mask = 0; mask < (1u << (d * dp)); ++mask) {
      std::vector<std::pair<int, int>> pairs;
      for (int b = 0; b < d * dp; ++b)
        if (mask >> b & 1u) pairs.emplace_back(b / dp + 1, b % dp + 1);
      out.emplace_back(d, dp, pairs);
    }
  }
  return out;
}

std::vector<int> random_permutation(std::mt19937_64& rng, int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 1);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

Atom relabel(const Atom& a, const std::vector<int>& pp, const std::vector<int>& lp) {
  auto P = [&](int i) { return pp[static_cast<std::size_t>(i - 1)]; };
  auto Lm = [&](int j) { return lp[static_cast<std::size_t>(j - 1)]; };
  switch (a.kind) {
    case AtomKind::Incident:
    case AtomKind::NonIncident: return {a.kind, P(a.i), Lm(a.j)};
    case AtomKind::DistinctPoints: return {a.kind, std::min(P(a.i), P(a.j)), std::max(P(a.i), P(a.j))};
    case AtomKind::DistinctLines: return {a.kind, std::min(Lm(a.i), Lm(a.j)), std::max(Lm(a.i), Lm(a.j))};
  }
  return a;
}

std::array<Triple<PrimeField>, 3> random_invertible(std::mt19937_64& rng, std::uint32_t p) {
  std::uniform_int_distribution<std::uint32_t> entry(0, p - 1);
  for (;;) {
    std::array<Triple<PrimeField>, 3> g;
    oracle::Matrix m(3, std::vector<Int>(3));
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) m[i][j] = g[i][j] = entry(rng);
    if (oracle::cofactor_det(m) % p != 0) return g;
  }
}

// Smooth complete fans reached from P^n by random star subdivisions.
Fan random_smooth_fan(std::mt19937_64& rng, std::size_t n, int steps) {
  Fan f = projective_fan(n);
  for (int s = 0; s < steps; ++s) {
    const auto& cones = f.max_cones();
    const auto& m = cones[std::uniform_int_distribution<std::size_t>(0, cones.size() - 1)(rng)];
    RaySet face;
    for (auto r : m)
      if (std::bernoulli_distribution(0.6)(rng)) face.push_back(r);
    if (face.size() < 2) face = {m[0], m[1]};
    LatticeVector sum(n);
    for (auto r : face) sum += f.ray(r);
    if (f.index_of(sum)) continue;
    f = star_subdivide(f, face);
  }
  return f;
}

}  // namespace

// ---------------------------------------------------------------------------
// exact-core

TEST(SmithProperty, UnimodularInvarianceAndDeterminantalDivisors) {
  std::mt19937_64 rng(kSeed);
  int cases = 0;
  for (int trial = 0; trial < 240; ++trial) {
    const std::size_t rows = 1 + trial % 4, cols = 1 + (trial / 4) % 4;
    auto a = oracle::random_matrix(rng, rows, cols, 6);
    auto expected = oracle::invariant_factors(a);
    auto s = smith_decomposition(oracle::to_lib(a));
    ASSERT_EQ(s.factors, expected) << "trial " << trial;
    EXPECT_EQ(s.left * oracle::to_lib(a) * s.right, s.diagonal);
    for (std::size_t k = 1; k < s.factors.size(); ++k) EXPECT_EQ(s.factors[k] % s.factors[k - 1], 0);
    EXPECT_EQ(abs_int(oracle::cofactor_det(oracle::from_lib(s.left))), 1);
    EXPECT_EQ(abs_int(oracle::cofactor_det(oracle::from_lib(s.right))), 1);
    auto u = oracle::random_unimodular(rng, rows, 6);
    auto v = oracle::random_unimodular(rng, cols, 6);
    auto moved = oracle::multiply(oracle::multiply(u, a), v);
    EXPECT_EQ(smith_normal_form(oracle::to_lib(moved)), expected) << "trial " << trial;
    ++cases;
  }
  RecordProperty("cases", cases);
  EXPECT_GE(cases, 200);
}

TEST(SolveProperty, IntegralSolutionsAreFound) {
  std::mt19937_64 rng(kSeed + 1);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 1 + trial % 4;
    auto a = oracle::random_matrix(rng, n, n, 5);
    std::vector<Int> x(n);
    for (auto& c : x) c = std::uniform_int_distribution<int>(-9, 9)(rng);
    auto b = oracle::to_lib(a).apply(x);
    auto r = solve_integer_linear(oracle::to_lib(a), b);
    ASSERT_TRUE(r.integral()) << trial;
    EXPECT_EQ(oracle::to_lib(a).apply(*r.solution), b);
    if (oracle::cofactor_det(a) != 0) EXPECT_EQ(*r.solution, x);
  }
}

TEST(SolveProperty, RationalSolutionsMatchCramer) {
  std::mt19937_64 rng(kSeed + 2);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 2 + trial % 3;
    auto a = oracle::random_matrix(rng, n, n, 4);
    std::vector<Int> b(n);
    for (auto& c : b) c = std::uniform_int_distribution<int>(-9, 9)(rng);
    auto expected = oracle::cramer(a, b);
    if (!expected) continue;
    auto r = solve_integer_linear(oracle::to_lib(a), b);
    ASSERT_TRUE(r.rational_solution);
    EXPECT_EQ(*r.rational_solution, *expected);
    bool integral = std::all_of(expected->begin(), expected->end(),
                                [](const Rat& q) { return boost::multiprecision::denominator(q) == 1; });
    EXPECT_EQ(r.integral(), integral);
  }
}

// ---------------------------------------------------------------------------
// fan-kit

TEST(FanProperty, ProjectiveFansSmoothAndComplete) {
  for (std::size_t n = 1; n <= 6; ++n) {
    Fan f = projective_fan(n);
    EXPECT_TRUE(is_smooth(f));
    EXPECT_TRUE(is_complete(f));
    EXPECT_FALSE(validate_fan(f));
  }
}

TEST(FanProperty, StarSubdivisionPreservesStructure) {
  std::mt19937_64 rng(kSeed + 3);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + trial % 2;
    Fan f = random_smooth_fan(rng, n, 3);
    const auto& cones = f.max_cones();
    const auto& m = cones[std::uniform_int_distribution<std::size_t>(0, cones.size() - 1)(rng)];
    RaySet sigma{m[0], m[1]};
    if (n == 3 && trial % 3 == 0) sigma = m;
    LatticeVector sum(n);
    for (auto r : sigma) sum += f.ray(r);
    if (f.index_of(sum)) continue;
    Fan g = star_subdivide(f, sigma);
    ++checked;
    EXPECT_EQ(g.rays().size(), f.rays().size() + 1);
    EXPECT_FALSE(validate_fan(g));
    EXPECT_TRUE(is_smooth(g));
    EXPECT_TRUE(is_complete(g));
    // proper faces of sigma survive, sigma itself does not
    std::vector<LatticeVector> gens = f.generators(sigma);
    for (unsigned mask = 1; mask + 1 < (1u << sigma.size()); ++mask) {
      RaySet face;
      for (std::size_t i = 0; i < sigma.size(); ++i)
        if (mask >> i & 1u) face.push_back(*g.index_of(gens[i]));
      std::sort(face.begin(), face.end());
      EXPECT_TRUE(g.contains_cone(face));
    }
    RaySet whole;
    for (const auto& v : gens) whole.push_back(*g.index_of(v));
    std::sort(whole.begin(), whole.end());
    EXPECT_FALSE(g.contains_cone(whole));
  }
  EXPECT_GE(checked, 20);
}

TEST(FanProperty, CompletenessAgreesWithPointLocation) {
  std::mt19937_64 rng(kSeed + 4);
  std::uniform_int_distribution<int> coord(-7, 7);
  std::vector<Fan> fans{projective_fan(2), projective_fan(3), build_murphy_fan(3, FanMode::Materialized).fan(),
                        random_smooth_fan(rng, 2, 4), random_smooth_fan(rng, 3, 4)};
  fans.push_back(Fan(2, {{1, 0}, {0, 1}, {-1, 0}}, {{0, 1}, {1, 2}}));
  for (const auto& f : fans) {
    bool all_covered = true;
    for (int s = 0; s < 300 && all_covered; ++s) {
      std::vector<Int> v(f.dim());
      for (auto& x : v) x = coord(rng);
      bool hit = false;
      for (const auto& c : f.max_cones())
        if (c.size() == f.dim() && oracle::in_simplicial_cone(f.generators(c), v)) hit = true;
      all_covered = hit;
    }
    EXPECT_EQ(is_complete(f), all_covered);
  }
}

// ---------------------------------------------------------------------------
// murphy-fan

TEST(MurphyProperty, MaximalConesUnimodularWithTwoOriginalRays) {
  for (int n = 2; n <= 5; ++n) {
    auto h = build_murphy_fan(n, FanMode::Materialized);
    for (const auto& cone : h.fan().max_cones()) {
      EXPECT_TRUE(is_unimodular(h.fan().generators(cone)));
      int originals = 0;
      for (auto r : cone) originals += h.label_of(r).is_original();
      EXPECT_EQ(originals, 2);
    }
  }
}

TEST(MurphyProperty, StageOrderDoesNotMatter) {
  std::mt19937_64 rng(kSeed + 5);
  for (int n = 3; n <= 4; ++n) {
    Fan reference = materialize_murphy_fan(n);
    for (int trial = 0; trial < 5; ++trial) {
      Fan shuffled = materialize_murphy_fan(n, [&](std::vector<RayLabel>& c) { std::shuffle(c.begin(), c.end(), rng); });
      EXPECT_EQ(shuffled, reference) << "n=" << n;
    }
  }
}

TEST(MurphyProperty, MembershipMatchesFaceLatticeOnSamples) {
  std::mt19937_64 rng(kSeed + 6);
  auto h = build_murphy_fan(5, FanMode::Materialized);
  const auto& faces = h.fan().faces();
  std::uniform_int_distribution<std::size_t> ray(0, h.fan().rays().size() - 1);
  for (int s = 0; s < 3000; ++s) {
    std::set<std::size_t> pick;
    const std::size_t k = 1 + static_cast<std::size_t>(s % 5);
    while (pick.size() < k) pick.insert(ray(rng));
    RaySet set(pick.begin(), pick.end());
    std::vector<RayLabel> labels;
    for (auto r : set) labels.push_back(h.label_of(r));
    EXPECT_EQ(cone_membership(5, labels), faces.count(set) == 1);
  }
}

// ---------------------------------------------------------------------------
// divisor-kit

TEST(DivisorProperty, PrincipalDivisorsAreCartierAndTrivialInClassGroup) {
  std::mt19937_64 rng(kSeed + 7);
  std::vector<Fan> fans{projective_fan(2), build_murphy_fan(3, FanMode::Materialized).fan(),
                        Fan(2, {{1, 0}, {0, 1}, {-1, -2}}, {{0, 1}, {1, 2}, {2, 0}}), random_smooth_fan(rng, 3, 3)};
  std::uniform_int_distribution<int> coord(-6, 6);
  for (const auto& f : fans)
    for (int trial = 0; trial < 20; ++trial) {
      Character m(f.dim());
      for (std::size_t i = 0; i < f.dim(); ++i) m[i] = coord(rng);
      TDivisor d = principal_divisor(f, m);
      auto res = is_cartier(f, d);
      ASSERT_TRUE(std::holds_alternative<SupportFunction>(res));
      for (const auto& local : std::get<SupportFunction>(res).local) EXPECT_EQ(local, m);
      // zero in Cl: the coefficient vector lies in the image of M
      EXPECT_TRUE(solve_integer_linear(matrix_of_rows(f.rays()), d.coeffs).integral());
    }
}

TEST(DivisorProperty, EveryDivisorOnTheBlownUpThreefoldIsCartier) {
  std::mt19937_64 rng(kSeed + 8);
  const auto h = build_murphy_fan(3, FanMode::Materialized);
  const Fan& f = h.fan();
  std::uniform_int_distribution<int> coef(-5, 5);
  for (int trial = 0; trial < 50; ++trial) {
    TDivisor d;
    for (std::size_t r = 0; r < f.rays().size(); ++r) d.coeffs.push_back(coef(rng));
    auto res = is_cartier(f, d);
    ASSERT_TRUE(std::holds_alternative<SupportFunction>(res));
    const auto& s = std::get<SupportFunction>(res);
    for (std::size_t k = 0; k < f.max_cones().size(); ++k)
      for (auto r : f.max_cones()[k]) EXPECT_EQ(pairing(s.local[k], f.ray(r)), d.coeffs[r]);
  }
}

TEST(DivisorProperty, SupportFunctionIsHomogeneousAndMatchesRays) {
  std::mt19937_64 rng(kSeed + 9);
  const Fan f = random_smooth_fan(rng, 2, 5);
  std::uniform_int_distribution<int> coef(-4, 4), coord(-9, 9), scale(1, 7);
  for (int trial = 0; trial < 30; ++trial) {
    TDivisor d;
    for (std::size_t r = 0; r < f.rays().size(); ++r) d.coeffs.push_back(coef(rng));
    const auto s = std::get<SupportFunction>(is_cartier(f, d));
    for (std::size_t r = 0; r < f.rays().size(); ++r) {
      std::vector<Rat> x{Rat(f.ray(r)[0]), Rat(f.ray(r)[1])};
      EXPECT_EQ(evaluate_support(s, f, x), Rat(d.coeffs[r]));
    }
    std::vector<Rat> x{Rat(coord(rng), 3), Rat(coord(rng), 5)};
    const Rat t(scale(rng), 2);
    std::vector<Rat> tx{t * x[0], t * x[1]};
    EXPECT_EQ(evaluate_support(s, f, tx), t * evaluate_support(s, f, x));
  }
}

// ---------------------------------------------------------------------------
// chern / klyachko

TEST(ChernProperty, MurphyCharactersVanishOnCompositeRays) {
  std::mt19937_64 rng(kSeed + 10);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 9;
    const int d = std::uniform_int_distribution<int>(0, n + 1)(rng);
    MurphyChern rule(random_incidence(rng, d, n + 1 - d), n);
    Flag f = random_flag(n, rng);
    auto chars = rule.characters(f);
    ASSERT_EQ(chars.size(), 3u);
    for (auto l : f.chain)
      for (const auto& u : chars) EXPECT_EQ(pairing(u, label_vector(n, l)), 0);
  }
}

TEST(ChernProperty, SampledCompatibilityOnLargerFans) {
  std::mt19937_64 rng(kSeed + 11);
  for (int n = 4; n <= 7; ++n) {
    const int d = std::uniform_int_distribution<int>(0, n + 1)(rng);
    auto report = validate_chern_sampled(MurphyChern(random_incidence(rng, d, n + 1 - d), n), 250, kSeed + n);
    EXPECT_FALSE(report.violation) << n;
  }
}

TEST(KlyachkoProperty, ForcedFiltrationsRoundTripOverFiniteFields) {
  std::mt19937_64 rng(kSeed + 12);
  int checked = 0;
  for (int objects = 3; objects <= 4; ++objects) {
    auto h = build_murphy_fan(objects - 1, FanMode::Materialized);
    for (int trial = 0; trial < 6; ++trial) {
      const int d = std::uniform_int_distribution<int>(0, objects)(rng);
      IncidenceData inc = random_incidence(rng, d, objects - d);
      auto configs = enumerate_c_i(inc, 3);
      if (configs.empty()) continue;
      const auto& cfg = configs[std::uniform_int_distribution<std::size_t>(0, configs.size() - 1)(rng)];
      auto filt = forced_filtration(h, cfg);
      ++checked;
      auto res = check_compatibility(h.fan(), filt);
      ASSERT_EQ(res.index(), 0u) << std::get<Incompatible>(res).reason;
      const auto& a = std::get<0>(res);
      EXPECT_EQ(a.chern().chars, to_explicit(murphy_chern(inc, h), h).chars);
      // mass conservation and basis reproduction, checked independently
      const PrimeField f(3);
      for (const auto& s : a.cones) {
        EXPECT_EQ(s.chars.size(), 3u);
        EXPECT_EQ(Subspace<PrimeField>::span(f, 3, s.basis).dim(), 3u);
        for (auto r : s.cone)
          for (Int j : {0, 1, 2}) {
            Rows<PrimeField> vecs;
            for (std::size_t t = 0; t < 3; ++t)
              if (pairing(s.chars[t], h.fan().ray(r)) >= j) vecs.push_back(s.basis[t]);
            EXPECT_EQ(Subspace<PrimeField>::span(f, 3, vecs), filt.at(r, j));
          }
      }
    }
  }
  EXPECT_GE(checked, 6);
}

TEST(KlyachkoProperty, SplitBundlesAreCompatible) {
  std::mt19937_64 rng(kSeed + 13);
  const RationalField q;
  std::uniform_int_distribution<int> jump(-3, 3);
  for (int trial = 0; trial < 20; ++trial) {
    Fan fan = random_smooth_fan(rng, 2, 2);
    // E = L_1 + L_2 with a fixed basis; each ray gets a jump per summand.
    Filtration<RationalField> filt(q, 2);
    std::vector<std::pair<int, int>> jumps;
    for (std::size_t r = 0; r < fan.rays().size(); ++r) {
      int a = jump(rng), b = jump(rng);
      jumps.emplace_back(a, b);
      using S = Subspace<RationalField>;
      if (a == b)
        filt.set_ray(r, {{a, S::zero(q, 2)}});
      else if (a < b)
        filt.set_ray(r, {{a, S::span(q, 2, {{0, 1}})}, {b, S::zero(q, 2)}});
      else
        filt.set_ray(r, {{b, S::span(q, 2, {{1, 0}})}, {a, S::zero(q, 2)}});
    }
    auto res = check_compatibility(fan, filt);
    ASSERT_EQ(res.index(), 0u);
    const auto& assignment = std::get<0>(res);
    for (std::size_t k = 0; k < fan.max_cones().size(); ++k) {
      std::multiset<std::vector<Int>> got, want;
      for (const auto& u : assignment.cones[k].chars) {
        std::vector<Int> v;
        for (auto r : fan.max_cones()[k]) v.push_back(pairing(u, fan.ray(r)));
        got.insert(v);
      }
      std::vector<Int> va, vb;
      for (auto r : fan.max_cones()[k]) {
        va.push_back(jumps[r].first - 1);
        vb.push_back(jumps[r].second - 1);
      }
      want = {va, vb};
      EXPECT_EQ(got, want);
    }
  }
}

// ---------------------------------------------------------------------------
// moduli / incidence

TEST(ModuliProperty, RelabelingEquivariance) {
  std::mt19937_64 rng(kSeed + 14);
  for (int trial = 0; trial < 60; ++trial) {
    const int objects = 3 + trial % 6;
    const int d = std::uniform_int_distribution<int>(0, objects)(rng);
    IncidenceData inc = random_incidence(rng, d, objects - d);
    auto pp = random_permutation(rng, d), lp = random_permutation(rng, objects - d);
    auto cs = generate_conditions(make_murphy_instance(inc));
    auto moved = generate_conditions(make_murphy_instance(inc.relabeled(pp, lp)));
    std::vector<Atom> expected;
    for (const auto& a : cs.atoms()) expected.push_back(relabel(a, pp, lp));
    std::sort(expected.begin(), expected.end());
    EXPECT_EQ(moved.atoms(), expected);
  }
}

TEST(ModuliProperty, ProjectivitiesPreserveSolutionSets) {
  std::mt19937_64 rng(kSeed + 15);
  for (int trial = 0; trial < 12; ++trial) {
    const std::uint32_t p = trial % 2 ? 3 : 2;
    const int objects = 3 + trial % 2;
    const int d = std::uniform_int_distribution<int>(0, objects)(rng);
    IncidenceData inc = random_incidence(rng, d, objects - d);
    auto sols = solutions(generate_conditions(make_murphy_instance(inc)), p);
    std::sort(sols.begin(), sols.end());
    auto g = random_invertible(rng, p);
    std::vector<FpConfiguration> moved;
    for (const auto& c : sols) moved.push_back(apply_projectivity(c, g));
    std::sort(moved.begin(), moved.end());
    EXPECT_EQ(moved, sols);
  }
}

TEST(IncidenceProperty, BacktrackingAgreesWithBruteForce) {
  SearchOptions brute;
  brute.strategy = SearchOptions::Strategy::Brute;
  for (int objects = 1; objects <= 4; ++objects)
    for (const auto& inc : all_incidences(objects)) {
      auto fast = enumerate_c_i(inc, 2);
      EXPECT_EQ(fast, enumerate_c_i(inc, 2, brute));
      std::vector<std::pair<int, int>> pairs = inc.pairs();
      EXPECT_EQ(fast.size(), oracle::count_realizations(inc.points(), inc.lines(), pairs, 2));
    }
}

TEST(IncidenceProperty, ModuliEqualsIncidenceSweep) {
  // every I with 2 <= d + d' <= 5 over F_2 and F_3
  for (int objects = 2; objects <= 5; ++objects)
    for (const auto& inc : all_incidences(objects))
      for (std::uint32_t p : {2u, 3u}) {
        auto r = verify_equivalence(inc, p, {}, objects == 2);
        EXPECT_TRUE(r.equal) << "d=" << inc.points() << " d'=" << inc.lines() << " p=" << p;
      }
}
