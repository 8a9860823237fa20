#include <gtest/gtest.h>

#include "tvb/chern.hpp"
#include "tvb/klyachko.hpp"

using namespace tvb;

namespace {

using QSpace = Subspace<RationalField>;
const RationalField kQ;

QSpace line(const Row<RationalField>& v) { return QSpace::span(kQ, v.size(), {v}); }

}  // namespace

TEST(Filtration, RejectsMalformedSteps) {
  Filtration<RationalField> f(kQ, 2);
  EXPECT_THROW(f.set_ray(0, {{1, line({1, 0})}}), InvalidArgument);  // does not end at zero
  EXPECT_THROW(f.set_ray(0, {{1, QSpace::full(kQ, 2)}, {2, QSpace::zero(kQ, 2)}}), InvalidArgument);
  EXPECT_THROW(f.set_ray(0, {{2, line({1, 0})}, {1, QSpace::zero(kQ, 2)}}), InvalidArgument);
  EXPECT_THROW(f.set_ray(0, {{1, line({1, 0, 0})}, {2, QSpace::zero(kQ, 3)}}), DimensionMismatch);
  f.set_ray(0, {{1, line({1, 0})}, {3, QSpace::zero(kQ, 2)}});
  EXPECT_EQ(f.at(0, 0).dim(), 2u);
  EXPECT_EQ(f.at(0, 2).dim(), 1u);
  EXPECT_EQ(f.at(0, 3).dim(), 0u);
  EXPECT_THROW(f.steps(5), RayNotInFan);
}

TEST(Compatibility, TrivialFiltrationsGiveZeroCharacters) {
  Fan p2 = projective_fan(2);
  Filtration<RationalField> f(kQ, 3);
  for (std::size_t r = 0; r < 3; ++r) f.set_trivial(r);
  auto res = check_compatibility(p2, f);
  ASSERT_EQ(res.index(), 0u);
  auto c = std::get<0>(res).chern();
  for (const auto& u : c.chars)
    for (const auto& ch : u) EXPECT_TRUE(ch.is_zero());
}

TEST(Compatibility, RankOneRecoversTheSupportFunction) {
  Fan p2 = projective_fan(2);
  Filtration<PrimeField> f(PrimeField(5), 1);
  const std::vector<Int> jumps{4, -2, 7};
  for (std::size_t r = 0; r < 3; ++r) f.set_ray(r, {{jumps[r], Subspace<PrimeField>::zero(PrimeField(5), 1)}});
  auto res = check_compatibility(p2, f);
  ASSERT_EQ(res.index(), 0u);
  const auto& a = std::get<0>(res);
  for (std::size_t k = 0; k < p2.max_cones().size(); ++k)
    for (auto r : p2.max_cones()[k]) EXPECT_EQ(pairing(a.cones[k].chars[0], p2.ray(r)), jumps[r] - 1);
}

TEST(Compatibility, ThreeLinesInAPlaneAreIncompatible) {
  Fan p3 = projective_fan(3);
  Filtration<RationalField> f(kQ, 2);
  f.set_trivial(0);
  const std::vector<Row<RationalField>> dirs{{1, 0}, {0, 1}, {1, 1}};
  for (std::size_t r = 1; r <= 3; ++r) f.set_ray(r, {{1, line(dirs[r - 1])}, {2, QSpace::zero(kQ, 2)}});
  auto res = check_compatibility(p3, f);
  ASSERT_EQ(res.index(), 1u);
  EXPECT_EQ(std::get<Incompatible>(res).cone, (RaySet{1, 2, 3}));
}

TEST(Compatibility, MissingRayAndSingularConeRejected) {
  Fan p2 = projective_fan(2);
  Filtration<RationalField> f(kQ, 1);
  f.set_trivial(0);
  EXPECT_THROW(check_compatibility(p2, f), RayNotInFan);
  Fan p112(2, {{1, 0}, {0, 1}, {-1, -2}}, {{0, 1}, {1, 2}, {2, 0}});
  for (std::size_t r = 0; r < 3; ++r) f.set_trivial(r);
  EXPECT_THROW(check_compatibility(p112, f), NonSmoothCone);
}

TEST(Compatibility, ForcedFiltrationsRecoverTheRule) {
  IncidenceData inc(2, 1, {{1, 1}});
  auto h = build_murphy_fan(2, FanMode::Materialized);
  Configuration<RationalField> config(kQ, {{1, 0, 0}, {0, 0, 1}}, {{0, 0, 1}});
  ASSERT_TRUE(check_configuration(config, inc));
  auto res = check_compatibility(h.fan(), forced_filtration(h, config));
  ASSERT_EQ(res.index(), 0u);
  const auto& assignment = std::get<0>(res);
  EXPECT_EQ(assignment.chern().chars, to_explicit(murphy_chern(inc, h), h).chars);

  // the splitting basis reproduces each ray's filtration
  const auto filt = forced_filtration(h, config);
  for (std::size_t k = 0; k < h.fan().max_cones().size(); ++k) {
    const auto& s = assignment.cones[k];
    for (auto r : s.cone)
      for (Int j : {0, 1, 2}) {
        Rows<RationalField> vecs;
        for (std::size_t t = 0; t < s.chars.size(); ++t)
          if (pairing(s.chars[t], h.fan().ray(r)) >= j) vecs.push_back(s.basis[t]);
        EXPECT_EQ(QSpace::span(kQ, 3, vecs), filt.at(r, j));
      }
  }
}

TEST(Compatibility, ForcedFiltrationsOnBlownUpThreefold) {
  IncidenceData inc(2, 2, {{1, 1}, {2, 2}});
  auto h = build_murphy_fan(3, FanMode::Materialized);
  Configuration<RationalField> config(kQ, {{1, 0, 0}, {0, 1, 0}}, {{0, 1, 0}, {1, 0, 0}});
  ASSERT_TRUE(check_configuration(config, inc));
  auto res = check_compatibility(h.fan(), forced_filtration(h, config));
  ASSERT_EQ(res.index(), 0u) << std::get<Incompatible>(res).reason;
  EXPECT_EQ(std::get<0>(res).chern().chars, to_explicit(murphy_chern(inc, h), h).chars);
}

TEST(ObjectSubspace, PointsAreLinesAndLinesArePlanes) {
  Configuration<RationalField> c(kQ, {{1, 2, 3}}, {{1, 1, -1}});
  EXPECT_EQ(object_subspace(c, 0).dim(), 1u);
  auto plane = object_subspace(c, 1);
  EXPECT_EQ(plane.dim(), 2u);
  EXPECT_TRUE(plane.contains(Row<RationalField>{1, 2, 3}));
}
