#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "edl/qform.hpp"

using namespace edl;

namespace {

constexpr double pi = std::numbers::pi;
const cplx I(0, 1);

struct Setup {
  std::shared_ptr<const FamilyAtlas> atlas;
  CandidateSolution c;
  std::shared_ptr<const CandidateField> member;
  std::shared_ptr<const ModeBump> bump;
};

// linear f keeps member + eps * mode an exact solution
const Setup& linear_setup()
{
  static Setup s = [] {
    Setup s;
    s.atlas = build_atlas(linear(1), 0.5, 2.0, 24);
    s.c = make_candidate(s.atlas, Vec3::UnitZ(), 1.0);
    s.member = std::make_shared<CandidateField>(s.c);
    s.bump = std::make_shared<ModeBump>(s.c, 3, 0.3);
    return s;
  }();
  return s;
}

std::shared_ptr<const ScalarField> perturbed(double eps)
{
  const auto& s = linear_setup();
  return std::make_shared<PerturbedField>(s.member, s.bump, eps);
}

MeshOptions mesh(int nr)
{
  MeshOptions m;
  m.n_rho = nr;
  m.n_theta = 2 * nr;
  return m;
}

const DiskDomain& unit_disk()
{
  static DiskDomain d(Vec3::UnitZ(), 1.0);
  return d;
}

}  // namespace

TEST(Hopf, Definition)
{
  TracelessForm q;
  q.q11 = 1;
  EXPECT_EQ(hopf_component(q), cplx(1, 0));
  q.q11 = 0;
  q.q12 = 1;
  EXPECT_EQ(hopf_component(q), cplx(0, -1));
}

TEST(Hopf, RotationLaws)
{
  TracelessForm q;
  q.q11 = 0.7;
  q.q12 = -0.4;
  const cplx P = hopf_component(q);
  for (double th : {0.1, 0.9, 2.3, -1.7}) {
    EXPECT_LE(std::abs(hopf_component(rotate_form(q, th)) - std::exp(-2.0 * I * th) * P), 1e-14);
    EXPECT_LE(std::abs(hopf_component(rotate_frame(q, th)) - std::exp(2.0 * I * th) * P), 1e-14);
    EXPECT_NEAR(rotate_frame(q, th).norm(), q.norm(), 1e-15);
  }
}

TEST(Hopf, FrameCovarianceOfQ)
{
  const auto& s = linear_setup();
  const auto u = perturbed(1e-2);
  const auto& dom = u->domain();
  for (double rho : {0.3, 1.0, 1.5})
    for (double th : {0.2, 2.5}) {
      const Vec3 x = dom.point(rho, th);
      const auto q = qform_at(s.atlas, *u, x).form;
      const Vec3 a = fixed_frame(x).first;
      const auto qa = in_frame(q, a);
      const double ang = std::atan2(a.dot(q.e2), a.dot(q.e1));
      EXPECT_LE(std::abs(hopf_component(qa) - std::exp(2.0 * I * ang) * hopf_component(q)), 1e-10);
      // the form itself is frame independent
      const Vec3 b = qa.e2;
      EXPECT_NEAR(q(a, b), qa(a, b), 1e-12);
      EXPECT_NEAR(q(a, a), qa.q11, 1e-12);
    }
}

TEST(Index, PowersOfZ)
{
  for (int k = 1; k <= 4; ++k) {
    auto r = null_direction_index([k](cplx z) { return std::pow(z, k); }, 0.0, 1.0);
    EXPECT_EQ(r.index.twice, -k) << k;
    EXPECT_TRUE(r.negative);
  }
  EXPECT_EQ(null_direction_index([](cplx z) { return z * z * z; }, 0.0, 1.0).index.str(), "-3/2");
}

TEST(Index, AntiHolomorphicIsFlagged)
{
  auto r = null_direction_index([](cplx z) { return std::conj(z); }, 0.0, 1.0);
  EXPECT_EQ(r.index.twice, 1);
  EXPECT_EQ(r.index.str(), "1/2");
  EXPECT_FALSE(r.negative);
}

TEST(Index, NotIsolated)
{
  auto P = [](cplx z) { return z - 0.5; };
  EXPECT_THROW(null_direction_index(P, 0.0, 0.5), DomainError);
  EXPECT_THROW(null_direction_index([](cplx) { return cplx(0); }, 0.0, 1.0), DomainError);
  EXPECT_THROW(null_direction_index(P, 0.0, 0.0), DomainError);
}

TEST(Index, RefinesFastArguments)
{
  auto r = null_direction_index([](cplx z) { return std::pow(z, 300); }, 0.0, 1.0);
  EXPECT_EQ(r.index.twice, -300);
  EXPECT_GT(r.samples, 720);
}

TEST(QField, SyntheticPowers)
{
  for (int k = 1; k <= 4; ++k) {
    auto src = synthetic_source(unit_disk(), [k](cplx z) { return std::pow(z, k); });
    auto rep = qform_field(src, unit_disk(), mesh(48), "synthetic");
    ASSERT_EQ(rep.zeros.size(), 1u) << k;
    EXPECT_LE(std::abs(rep.zeros[0].z), 1e-9);
    ASSERT_TRUE(rep.zeros[0].index);
    EXPECT_EQ(rep.zeros[0].index->index.twice, -k);
    EXPECT_TRUE(rep.all_indices_negative());
  }
}

TEST(QField, SyntheticChartComponentRoundTrips)
{
  auto P = [](cplx z) { return cplx(0.3, -0.2) + z * z; };
  auto src = synthetic_source(unit_disk(), P);
  for (cplx z : {cplx(0.1, 0.2), cplx(-0.5, 0.3), cplx(0.0, -0.8)}) {
    const Vec3 x = unit_disk().from_chart(z);
    EXPECT_LE(std::abs(unit_disk().to_chart(x) - z), 1e-14);
    EXPECT_LE(std::abs(chart_P(unit_disk(), src(x).form) - P(z)), 1e-13);
  }
}

TEST(QField, TwoZeroAdditivity)
{
  const cplx a(0.3, 0.1), b(-0.25, -0.2);
  auto P = [&](cplx z) { return (z - a) * (z - b); };
  auto rep = qform_field(synthetic_source(unit_disk(), P), unit_disk(), mesh(64), "two");
  ASSERT_EQ(rep.zeros.size(), 2u);
  int total = 0;
  for (const auto& z : rep.zeros) {
    ASSERT_TRUE(z.index);
    EXPECT_EQ(z.index->index.twice, -1);
    EXPECT_LE(std::min(std::abs(z.z - a), std::abs(z.z - b)), 1e-9);
    total += z.index->index.twice;
  }
  const auto big = null_direction_index(P, 0.0, 0.9);
  EXPECT_EQ(big.index.twice, total);
  EXPECT_EQ(big.index.twice, -2);
}

TEST(QField, SyntheticZbarFlagged)
{
  auto rep = qform_field(synthetic_source(unit_disk(), [](cplx z) { return std::conj(z); }), unit_disk(), mesh(32));
  ASSERT_EQ(rep.zeros.size(), 1u);
  ASSERT_TRUE(rep.zeros[0].index);
  EXPECT_EQ(rep.zeros[0].index->index.twice, 1);
  EXPECT_FALSE(rep.all_indices_negative());
}

TEST(QField, MemberIsIdenticallyZero)
{
  const auto& s = linear_setup();
  auto rep = qform_field(s.atlas, s.member, MeshOptions{});
  EXPECT_EQ(rep.nodes.size(), 128u * 256u);
  EXPECT_LE(rep.max_abs_Q, 1e-7);
  EXPECT_LE(rep.max_abs_residual, 1e-7);
  EXPECT_TRUE(rep.identically_zero);
  EXPECT_TRUE(rep.zeros.empty());
}

TEST(QField, AllenCahnMemberIsIdenticallyZero)
{
  auto atlas = build_atlas(allen_cahn(), 0.2, 0.8, 24);
  auto member = std::make_shared<CandidateField>(make_candidate(atlas, Vec3(0.6, 0, 0.8), 0.5));
  auto rep = qform_field(atlas, member, mesh(48));
  EXPECT_LE(rep.max_abs_Q, 1e-7);
  EXPECT_LE(rep.max_abs_residual, 1e-7);
}

TEST(QField, PerturbedScalesLinearly)
{
  const auto& s = linear_setup();
  auto r1 = qform_field(s.atlas, perturbed(1e-2), mesh(64));
  auto r2 = qform_field(s.atlas, perturbed(5e-3), mesh(64));
  EXPECT_GT(r1.max_abs_Q, 1e-4);
  EXPECT_FALSE(r1.identically_zero);
  const double a = r1.max_abs_Q / 1e-2, b = r2.max_abs_Q / 5e-3;
  EXPECT_LE(std::abs(a - b), 0.1 * std::max(a, b));
  // exact solutions of the PDE
  EXPECT_LE(r1.max_abs_residual, 1e-7);
  for (const auto* r : {&r1, &r2}) {
    EXPECT_FALSE(r->zeros.empty());
    EXPECT_LE(r->zeros.size(), 8u);
    EXPECT_TRUE(r->all_indices_negative());
  }
}

TEST(QField, PerturbedZeroSetStableUnderRefinement)
{
  const auto& s = linear_setup();
  auto coarse = qform_field(s.atlas, perturbed(1e-2), mesh(64));
  auto fine = qform_field(s.atlas, perturbed(1e-2), mesh(128));
  ASSERT_EQ(coarse.zeros.size(), fine.zeros.size());
  for (std::size_t i = 0; i < coarse.zeros.size(); ++i) {
    EXPECT_LE(std::abs(coarse.zeros[i].z - fine.zeros[i].z), 1e-6);
    ASSERT_TRUE(coarse.zeros[i].index && fine.zeros[i].index);
    EXPECT_EQ(coarse.zeros[i].index->index, fine.zeros[i].index->index);
  }
}

TEST(QField, OutsideRegionNamesTheJet)
{
  const auto& s = linear_setup();
  auto u = std::make_shared<PerturbedField>(s.member, s.bump, 5.0);
  try {
    qform_field(s.atlas, u, mesh(16));
    FAIL() << "expected OutsideRegion";
  } catch (const OutsideRegion& e) {
    EXPECT_NE(std::string(e.what()).find("(a, |w|)"), std::string::npos);
  }
}

TEST(QField, MeshValidation)
{
  auto src = synthetic_source(unit_disk(), [](cplx z) { return z; });
  MeshOptions m;
  m.n_rho = 2;
  EXPECT_THROW(qform_field(src, unit_disk(), m), DomainError);
}

TEST(Boundary, LineOfCurvature)
{
  const auto& s = linear_setup();
  EXPECT_LE(boundary_line_check(s.atlas, *s.member), 1e-8);
  const Vec3 e = Vec3(1, 0.3, 0.2).normalized();
  auto keep = std::make_shared<PerturbedField>(s.member, std::make_shared<ProductBump>(2, e), 1e-2);
  EXPECT_LE(boundary_line_check(s.atlas, *keep), 1e-6);
  // constant Neumann data is lost with k = 1
  auto vary = std::make_shared<PerturbedField>(s.member, std::make_shared<ProductBump>(1, e), 1e-2);
  EXPECT_GT(boundary_line_check(s.atlas, *vary), 1e-4);
}

TEST(Similarity, HolomorphicSynthetic)
{
  auto rep = similarity_check(synthetic_source(unit_disk(), [](cplx z) { return z; }), unit_disk());
  EXPECT_GT(rep.testable_nodes, 0);
  EXPECT_LE(rep.max_ratio, 1e-6);
  EXPECT_TRUE(rep.resolved);
}

TEST(Similarity, MemberHasNoTestableNodes)
{
  const auto& s = linear_setup();
  auto rep = similarity_check(s.atlas, s.member, 16);
  EXPECT_EQ(rep.testable_nodes, 0);
  EXPECT_EQ(rep.note, "no testable nodes");
}

TEST(Similarity, PerturbedRatioBoundedAndStable)
{
  const auto& s = linear_setup();
  auto rep = similarity_check(s.atlas, perturbed(1e-2));
  EXPECT_GT(rep.testable_nodes, 100);
  EXPECT_TRUE(rep.resolved) << rep.max_ratio << " vs " << rep.max_ratio_half;
  EXPECT_LT(rep.max_ratio, 1.0);
}

TEST(Similarity, AntiHolomorphicRatioIsLarge)
{
  // dbar(zbar) = 1, so the ratio blows up near the zero
  auto rep = similarity_check(synthetic_source(unit_disk(), [](cplx z) { return std::conj(z); }), unit_disk(), 40,
                              1e-2);
  EXPECT_GT(rep.max_ratio, 10.0);
}
