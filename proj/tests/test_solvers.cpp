#include "support.hpp"

#include <gtest/gtest.h>

using namespace bap;
using namespace bap::testing;

namespace {

Vector v2(double x, double y) { return make_vector({x, y}); }
Vector v3(double x, double y, double z) { return make_vector({x, y, z}); }

SolverParams tight() {
  SolverParams p;
  p.tol = 1e-12;
  return p;
}

}  // namespace

// ---------------------------------------------------------------------------
// Alternating projections.

TEST(Alternating, BoxEllipse) {
  const auto r = alternating_projections(box_a(), ellipse_b(), v2(2, 3), tight());
  ASSERT_TRUE(r.converged);
  EXPECT_FALSE(r.diverging);
  EXPECT_NEAR((r.a - v2(0, 0)).cwiseAbs().maxCoeff(), 0.0, 1e-6);
  EXPECT_NEAR((r.b - v2(0, 1)).cwiseAbs().maxCoeff(), 0.0, 1e-6);
  EXPECT_NEAR(r.distance, 1.0, 1e-6);
  EXPECT_EQ(r.method, "alternating");
}

TEST(Alternating, MonotoneTrace) {
  Sampler smp(31);
  for (const auto& file : {"01_box_ellipse_euclidean.json", "05_triangle_box.json", "06_pentagon_drop.json",
                           "08_lens_intersections.json"}) {
    const auto spec = corpus_spec(file);
    for (int i = 0; i < 4; ++i) {
      const auto r = alternating_projections(spec.set_a(), spec.set_b(), smp.gaussian(spec.dimension, 4), tight());
      for (std::size_t k = 1; k < r.trace.size(); ++k) EXPECT_LE(r.trace[k], r.trace[k - 1] + 1e-12) << file;
    }
  }
}

TEST(Alternating, IdenticalSetsGiveZero) {
  const SetExpr ball = make_ball(v2(0, 0), 1);
  const auto r = alternating_projections(ball, ball, v2(4, -7));
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.distance, 0.0, 1e-12);
  EXPECT_TRUE(r.a.isApprox(r.b));
}

TEST(Alternating, DistanceMatchesNorm) {
  const auto r = alternating_projections(box_a(), ellipse_b(), v2(-1, 3));
  EXPECT_NEAR(r.distance, (r.a - r.b).norm(), 1e-12 * (1 + r.distance));
  EXPECT_TRUE(contains(box_a(), r.a));
  EXPECT_TRUE(contains(ellipse_b(), r.b));
}

TEST(Alternating, ExpSetsDiverge) {
  const auto spec = corpus_spec("09_exp_no_bap.json");
  SolverParams p = spec.solver.params;
  const auto r = alternating_projections(spec.set_a(), spec.set_b(), v2(0, 3), p);
  EXPECT_TRUE(r.diverging);
  EXPECT_FALSE(r.converged);
  EXPECT_GT(r.distance, 2.0);
  EXPECT_LT(r.distance, 2.05);
}

TEST(Alternating, UnboundedIteratesComeInPairs) {
  const auto spec = corpus_spec("09_exp_no_bap.json");
  for (double radius : {4.0, 7.0, 10.0}) {
    SolverParams p = spec.solver.params;
    p.blowup_radius = radius;
    const auto r = alternating_projections(spec.set_a(), spec.set_b(), v2(0, 3), p);
    ASSERT_TRUE(r.diverging);
    if (r.max_a_norm > radius) EXPECT_GT(r.max_b_norm, radius / 2);
    if (r.max_b_norm > radius) EXPECT_GT(r.max_a_norm, radius / 2);
  }
}

TEST(Alternating, RejectsBadInput) {
  SolverParams p;
  p.tol = 0;
  EXPECT_THROW(alternating_projections(box_a(), ellipse_b(), v2(0, 0), p), std::invalid_argument);
  p = {};
  p.max_iter = 0;
  EXPECT_THROW(alternating_projections(box_a(), ellipse_b(), v2(0, 0), p), std::invalid_argument);
  EXPECT_THROW(alternating_projections(box_a(), ellipse_b(), v3(0, 0, 0)), DimensionError);
  EXPECT_THROW(solve_bap(box_a(), ellipse_b(), NormSpec::infinity(), v2(0, 0), v2(0, 0),
                         SolverParams{.method = Method::Alternating}),
               PreconditionError);
}

TEST(Alternating, MaxIterStopsWithoutConvergence) {
  SolverParams p = tight();
  p.max_iter = 2;
  const auto r = alternating_projections(box_a(), ellipse_b(), v2(2, 3), p);
  EXPECT_FALSE(r.converged);
  EXPECT_FALSE(r.diverging);
  EXPECT_EQ(r.iterations, 2);
}

// ---------------------------------------------------------------------------
// Descent.

TEST(Descent, LinfBoxEllipseSeeds) {
  const auto spec = corpus_spec("02_box_ellipse_linf.json");
  std::vector<Vector> as;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto [x0, y0] = seeded_start(seed, 0, 2, 3.0);
    const auto r = general_norm_descent(spec.set_a(), spec.set_b(), spec.norm, x0, y0, spec.solver.params);
    EXPECT_NEAR(r.distance, 1.0, 1e-4) << "seed " << seed;
    EXPECT_NEAR(r.distance, norm_eval(spec.norm, r.a - r.b), 1e-12);
    as.push_back(r.a);
  }
  double spread = 0;
  for (const auto& a : as) spread = std::max(spread, (a - as.front()).norm());
  EXPECT_GT(spread, 1e-3);
}

TEST(Descent, LinfSegments3d) {
  const auto spec = corpus_spec("03_segments_linf.json");
  const auto r = general_norm_descent(spec.set_a(), spec.set_b(), spec.norm, v3(0.3, 0.1, 0), v3(0, -0.4, 1.5),
                                      spec.solver.params);
  EXPECT_NEAR(r.distance, 1.5, 1e-4);
}

TEST(Descent, EuclideanMatchesAlternating) {
  SolverParams p;
  p.max_iter = 20000;
  const auto d = general_norm_descent(box_a(), ellipse_b(), NormSpec::euclidean(), v2(2, -1), v2(1, 3), p);
  const auto a = alternating_projections(box_a(), ellipse_b(), v2(2, -1), tight());
  EXPECT_NEAR(d.distance, a.distance, 1e-4);
  EXPECT_NEAR((d.a - a.a).norm(), 0.0, 1e-2);
}

TEST(Descent, ConstantStep) {
  SolverParams p;
  p.max_iter = 5000;
  p.step.kind = StepSchedule::Kind::Constant;
  p.step.c = 1e-2;
  const auto r = general_norm_descent(box_a(), ellipse_b(), NormSpec::lp(1), v2(1, -1), v2(1, 2), p);
  EXPECT_NEAR(r.distance, 1.0, 1e-2);
}

// ---------------------------------------------------------------------------
// Simultaneous projections.

TEST(Simultaneous, SinglePartsReduceToBoxEllipse) {
  SolverParams p;
  p.tol = 1e-9;
  const auto r = simultaneous_projection_solve({box_a()}, {ellipse_b()}, v2(2, 3), p);
  EXPECT_NEAR((r.a - v2(0, 0)).norm(), 0.0, 1e-4);
  EXPECT_NEAR((r.b - v2(0, 1)).norm(), 0.0, 1e-4);
}

TEST(Simultaneous, LensesMatchOracle) {
  const auto spec = corpus_spec("08_lens_intersections.json");
  const auto r = simultaneous_projection_solve(spec.a_parts, spec.b_parts, v2(0, 0), spec.solver.params);
  const auto o = grid_min_distance(spec.set_a(), spec.set_b(), spec.norm, spec.oracle->bbox, 1e-3);
  EXPECT_NEAR(r.distance, o.dist_estimate, 2e-3);
}

TEST(Simultaneous, EqualPartsGiveZero) {
  const std::vector<SetExpr> parts = {make_ball(v2(0, 0), 1), make_ball(v2(1, 0), 1)};
  SolverParams p;
  p.tol = 1e-8;
  const auto r = simultaneous_projection_solve(parts, parts, v2(3, 3), p);
  EXPECT_NEAR(r.distance, 0.0, 1e-6);
}

TEST(Simultaneous, RejectsEmptyLists) {
  EXPECT_THROW(simultaneous_projection_solve({}, {box_a()}, v2(0, 0)), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Multistart.

TEST(Multistart, BoxEllipseOneCluster) {
  SolverParams p = tight();
  p.seed = 1;
  const auto m = multistart_bap(box_a(), ellipse_b(), NormSpec::euclidean(), 8, p);
  EXPECT_EQ(m.runs.size(), 8u);
  EXPECT_EQ(m.cluster_count, 1);
  EXPECT_NEAR(m.best_distance, 1.0, 1e-9);
}

TEST(Multistart, EllipseCylinderSignature) {
  const auto spec = corpus_spec("04_ellipse_cylinder.json");
  const auto m = multistart_bap(spec.set_a(), spec.set_b(), spec.norm, 8, spec.solver.params);
  ASSERT_GE(m.cluster_count, 2);
  EXPECT_LE(m.difference_spread, 1e-5);
  for (std::size_t i = 0; i < m.representatives.size(); ++i) {
    for (std::size_t j = i + 1; j < m.representatives.size(); ++j) {
      const auto& p = m.runs[static_cast<std::size_t>(m.representatives[i].second)];
      const auto& q = m.runs[static_cast<std::size_t>(m.representatives[j].second)];
      EXPECT_GT((p.a - q.a).norm(), 10 * spec.solver.params.tol);
    }
  }
}

TEST(Multistart, LinfSeveralClusters) {
  const auto spec = corpus_spec("02_box_ellipse_linf.json");
  const auto m = multistart_bap(spec.set_a(), spec.set_b(), spec.norm, 8, spec.solver.params);
  EXPECT_GE(m.cluster_count, 2);
  EXPECT_NEAR(m.best_distance, 1.0, 1e-4);
}

TEST(Multistart, Deterministic) {
  const auto spec = corpus_spec("02_box_ellipse_linf.json");
  const auto m1 = multistart_bap(spec.set_a(), spec.set_b(), spec.norm, 4, spec.solver.params);
  const auto m2 = multistart_bap(spec.set_a(), spec.set_b(), spec.norm, 4, spec.solver.params);
  for (std::size_t i = 0; i < m1.runs.size(); ++i) {
    EXPECT_TRUE(same_vector(m1.runs[i].a, m2.runs[i].a));
    EXPECT_EQ(m1.runs[i].distance, m2.runs[i].distance);
  }
}

TEST(Multistart, NeedsTwoStarts) {
  EXPECT_THROW(multistart_bap(box_a(), ellipse_b(), NormSpec::euclidean(), 1), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Uniqueness certificates.

TEST(Uniqueness, BoxEllipseEuclidean) {
  const auto c = certify_uniqueness({box_a()}, {ellipse_b()}, NormSpec::euclidean());
  EXPECT_EQ(c.verdict, UniquenessVerdict::AtMostOne);
  EXPECT_EQ(c.fired_rule, "Thm4.5(ii)");
  EXPECT_FALSE(c.trace.empty());
}

TEST(Uniqueness, BoxEllipseLinfIsUnknown) {
  const auto c = certify_uniqueness({box_a()}, {ellipse_b()}, NormSpec::infinity());
  EXPECT_EQ(c.verdict, UniquenessVerdict::Unknown);
  EXPECT_EQ(c.fired_rule, "none");
}

TEST(Uniqueness, PentagonDrop) {
  const auto spec = corpus_spec("06_pentagon_drop.json");
  const auto c = certify_uniqueness(spec.a_parts, spec.b_parts, spec.norm);
  EXPECT_EQ(c.verdict, UniquenessVerdict::AtMostOne);
  EXPECT_TRUE(c.fired_rule == "Thm4.5(iii)" || c.fired_rule == "Thm4.5(ii)" || c.corollary == "Cor4.6") << c.fired_rule;
}

TEST(Uniqueness, NonParallelCylinders) {
  const auto spec = corpus_spec("07_two_cylinders.json");
  const auto c = certify_uniqueness(spec.a_parts, spec.b_parts, spec.norm);
  EXPECT_EQ(c.verdict, UniquenessVerdict::AtMostOne);
  EXPECT_EQ(c.fired_rule, "Thm4.5(iii)");
}

TEST(Uniqueness, StrictlyConvexPartsAnyNorm) {
  const std::vector<SetExpr> a = {make_ellipsoid(v2(0, 0), v2(2, 1)), make_ball(v2(1, 0), 1.5)};
  const std::vector<SetExpr> b = {make_ball(v2(0, 5), 1)};
  const auto c = certify_uniqueness(a, b, NormSpec::infinity());
  EXPECT_EQ(c.verdict, UniquenessVerdict::AtMostOne);
  EXPECT_EQ(c.fired_rule, "Thm4.2");
  EXPECT_EQ(certify_uniqueness({a[0]}, b, NormSpec::lp(1)).fired_rule, "Cor4.3");
}

TEST(Uniqueness, AffineDifferenceSpaces) {
  const SetExpr l1 = make_affine(v3(0, 0, 0), v3(1, 0, 0));
  const SetExpr l2 = make_affine(v3(0, 0, 1), v3(0, 1, 0));
  const auto c = certify_uniqueness({l1}, {l2}, NormSpec::euclidean());
  EXPECT_EQ(c.verdict, UniquenessVerdict::AtMostOne);
  const SetExpr l3 = make_affine(v3(0, 0, 1), v3(1, 0, 0));
  EXPECT_NE(certify_uniqueness({l1}, {l3}, NormSpec::euclidean()).verdict, UniquenessVerdict::AtMostOne);
}

TEST(Uniqueness, NeverNotUniqueWithoutWitnesses) {
  for (const auto& e : builtin_corpus()) {
    const auto spec = parse_problem(e.text);
    EXPECT_NE(certify_uniqueness(spec.a_parts, spec.b_parts, spec.norm).verdict, UniquenessVerdict::NotUnique)
        << e.file;
  }
}

TEST(Uniqueness, WitnessesYieldNotUnique) {
  for (const auto& file : {"02_box_ellipse_linf.json", "04_ellipse_cylinder.json"}) {
    const auto spec = corpus_spec(file);
    const auto plain = certify_uniqueness(spec.a_parts, spec.b_parts, spec.norm);
    EXPECT_NE(plain.verdict, UniquenessVerdict::AtMostOne) << file;
    const auto m = multistart_bap(spec.set_a(), spec.set_b(), spec.norm, 8, spec.solver.params);
    UniquenessOptions opt;
    opt.tol = spec.solver.params.tol;
    opt.witnesses = m.runs;
    const auto c = certify_uniqueness(spec.a_parts, spec.b_parts, spec.norm, opt);
    ASSERT_EQ(c.verdict, UniquenessVerdict::NotUnique) << file;
    ASSERT_TRUE(c.witness.has_value());
    const auto& [p, q] = *c.witness;
    EXPECT_GT(std::max((p.a - q.a).norm(), (p.b - q.b).norm()), 10 * opt.tol);
    EXPECT_NEAR(p.distance, q.distance, 1e-6 * (1 + p.distance));
  }
}

TEST(Uniqueness, AddingStrictlyConvexPartKeepsVerdict) {
  Sampler smp(32);
  int checked = 0;
  for (const auto& e : builtin_corpus()) {
    const auto spec = parse_problem(e.text);
    const auto base = certify_uniqueness(spec.a_parts, spec.b_parts, spec.norm);
    if (base.verdict != UniquenessVerdict::AtMostOne) continue;
    auto parts = spec.a_parts;
    parts.push_back(make_ball(Vector::Zero(spec.dimension), 100.0));
    EXPECT_EQ(certify_uniqueness(parts, spec.b_parts, spec.norm).verdict, UniquenessVerdict::AtMostOne) << e.file;
    auto bparts = spec.b_parts;
    bparts.push_back(make_ellipsoid(Vector::Zero(spec.dimension), Vector::Constant(spec.dimension, 50.0)));
    EXPECT_EQ(certify_uniqueness(spec.a_parts, bparts, spec.norm).verdict, UniquenessVerdict::AtMostOne) << e.file;
    ++checked;
  }
  EXPECT_GE(checked, 5);
}

TEST(Uniqueness, SoundAgainstOracleOn2d) {
  int checked = 0;
  for (const auto& e : builtin_corpus()) {
    const auto spec = parse_problem(e.text);
    if (spec.dimension != 2 || !spec.oracle) continue;
    if (certify_uniqueness(spec.a_parts, spec.b_parts, spec.norm).verdict != UniquenessVerdict::AtMostOne) continue;
    const auto solved = run_solve(spec);
    if (!solved.primary.converged) continue;
    const auto o = grid_min_distance(spec.set_a(), spec.set_b(), spec.norm, spec.oracle->bbox, spec.oracle->resolution);
    EXPECT_LE(o.tie_diameter, 3 * spec.oracle->resolution) << e.file;
    ++checked;
  }
  EXPECT_GE(checked, 3);
}

// ---------------------------------------------------------------------------
// Existence certificates.

TEST(Existence, BoundedSets) {
  const auto c = certify_existence(box_a(), ellipse_b(), NormSpec::euclidean(), 2);
  EXPECT_EQ(c.verdict, ExistenceVerdict::Exists);
  EXPECT_EQ(c.fired_rule, "bothCompact");
}

TEST(Existence, ExpSetsSuspected) {
  const auto spec = corpus_spec("09_exp_no_bap.json");
  ExistenceOptions opt;
  opt.probe = run_solve(spec).primary;
  const auto c = certify_existence(spec.set_a(), spec.set_b(), spec.norm, 2, opt);
  EXPECT_EQ(c.verdict, ExistenceVerdict::SuspectedNotAttained);
  EXPECT_TRUE(c.shared_ray.has_value());
}

TEST(Existence, Polytopes) {
  const SetExpr p1 = make_polytope({{v2(0, 1), 0}, {v2(1, 1), 3}});
  const SetExpr p2 = make_polytope({{v2(0, -1), -2}, {v2(-1, 1), 5}});
  const auto c = certify_existence(p1, p2, NormSpec::euclidean(), 2);
  EXPECT_EQ(c.verdict, ExistenceVerdict::Exists);
  EXPECT_EQ(c.fired_rule, "polyhedral");
}

TEST(Existence, Cylinders) {
  const auto spec = corpus_spec("07_two_cylinders.json");
  const auto c = certify_existence(spec.set_a(), spec.set_b(), spec.norm, 3);
  EXPECT_EQ(c.verdict, ExistenceVerdict::Exists);
  EXPECT_EQ(c.fired_rule, "hypercylinders");
}

TEST(Existence, IntersectingSets) {
  const auto c = certify_existence(make_ball(v2(0, 0), 1), make_ball(v2(1, 0), 1), NormSpec::euclidean(), 2);
  EXPECT_EQ(c.verdict, ExistenceVerdict::Exists);
  EXPECT_EQ(c.fired_rule, "intersectionNonempty");
}

TEST(Existence, AffineAndCatalog) {
  const SetExpr l1 = make_affine(v3(0, 0, 0), v3(1, 0, 0));
  const SetExpr l2 = make_affine(v3(0, 0, 1), v3(0, 1, 0));
  const auto c = certify_existence(l1, l2, NormSpec::euclidean(), 3);
  EXPECT_EQ(c.verdict, ExistenceVerdict::Exists);
  bool has_min_norm = false;
  for (const auto& e : c.catalog) {
    if (e.id == "minNormAttained") {
      has_min_norm = true;
      EXPECT_FALSE(e.machine_checkable);
    }
  }
  EXPECT_TRUE(has_min_norm);
}

TEST(Existence, DimensionMismatchThrows) {
  EXPECT_THROW(certify_existence(box_a(), ellipse_b(), NormSpec::euclidean(), 3), DimensionError);
}

TEST(Existence, ExistsMatchesBoundedConvergedRun) {
  for (const auto& e : builtin_corpus()) {
    const auto spec = parse_problem(e.text);
    const auto solved = run_solve(spec);
    ExistenceOptions opt;
    opt.probe = solved.primary;
    const auto c = certify_existence(spec.set_a(), spec.set_b(), spec.norm, spec.dimension, opt);
    if (c.verdict != ExistenceVerdict::Exists) continue;
    EXPECT_TRUE(solved.primary.converged) << e.file;
    EXPECT_FALSE(solved.primary.diverging) << e.file;
    EXPECT_LT(solved.primary.max_a_norm, spec.solver.params.blowup_radius) << e.file;
  }
}
