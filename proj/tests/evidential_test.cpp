#include <cmath>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "uncmap/classifiers/classifier.hpp"
#include "uncmap/evidential.hpp"
#include "uncmap/measures.hpp"

using namespace uncmap;

namespace {

constexpr FocalSet A = 0b001, B = 0b010, C = 0b100, AB = 0b011, OMEGA3 = 0b111;

MassFunction random_mass(SplitMix64& rng, int k) {
  const FocalSet omega = MassFunction::full_frame(k);
  std::map<FocalSet, double> focal;
  const int n = 1 + static_cast<int>(rng.index(4));
  for (int i = 0; i < n; ++i) focal[static_cast<FocalSet>(1 + rng.index(omega))] += 0.05 + rng.uniform();
  double sum = 0;
  for (auto& [s, m] : focal) sum += m;
  for (auto& [s, m] : focal) m /= sum;
  return MassFunction(k, focal);
}

void expect_near(const MassFunction& a, const MassFunction& b, double tol) {
  std::set<FocalSet> sets;
  for (const auto& [s, m] : a.focal()) sets.insert(s);
  for (const auto& [s, m] : b.focal()) sets.insert(s);
  for (FocalSet s : sets) EXPECT_NEAR(a.mass(s), b.mass(s), tol) << "set " << s;
}

TEST(MassFunction, ValidatesInput) {
  EXPECT_THROW(MassFunction(3, {{A, 0.5}}), InvalidArgument);
  EXPECT_THROW(MassFunction(3, {{0, 0.5}, {A, 0.5}}), InvalidArgument);
  EXPECT_THROW(MassFunction(3, {{0b1000, 1.0}}), InvalidArgument);
  EXPECT_THROW(MassFunction(3, {{A, 1.5}, {B, -0.5}}), InvalidArgument);
  EXPECT_THROW(MassFunction::vacuous(0), InvalidArgument);
  EXPECT_THROW(MassFunction::vacuous(kMaxFrameSize + 1), InvalidArgument);
  const MassFunction m(3, {{A, 0.6}, {OMEGA3, 0.4}});
  EXPECT_FALSE(m.is_vacuous());
  EXPECT_FALSE(m.is_bayesian());
  EXPECT_TRUE(MassFunction::vacuous(3).is_vacuous());
  EXPECT_TRUE(MassFunction::bayesian(ProbabilityVector({0.2, 0.8})).is_bayesian());
}

TEST(Dempster, VacuousIsNeutral) {
  SplitMix64 rng(1);
  for (int i = 0; i < 200; ++i) {
    const auto b = random_mass(rng, 3);
    const auto ab = dempster_combine(MassFunction::vacuous(3), b);
    const auto ba = dempster_combine(b, MassFunction::vacuous(3));
    EXPECT_EQ(ab.focal(), b.focal());
    EXPECT_EQ(ba.focal(), b.focal());
  }
}

TEST(Dempster, SelfCombinationOfSimpleSupport) {
  // (0.95 A + 0.05 O)^2: A*A, A*O, O*A give A; O*O gives O.
  const MassFunction a(3, {{A, 0.95}, {OMEGA3, 0.05}});
  const auto r = dempster_combine(a, a);
  EXPECT_NEAR(r.mass(A), 0.95 * 0.95 + 2 * 0.95 * 0.05, 1e-15);
  EXPECT_NEAR(r.mass(A), 0.9975, 1e-12);
  EXPECT_NEAR(r.mass(OMEGA3), 0.0025, 1e-12);
  EXPECT_EQ(r.focal().size(), 2u);
}

TEST(Dempster, ConflictIsRenormalized) {
  const MassFunction a(3, {{A, 0.5}, {OMEGA3, 0.5}});
  const MassFunction b(3, {{B, 0.5}, {OMEGA3, 0.5}});
  const auto r = dempster_combine(a, b);
  // Conflict 0.25 removed; the remaining 0.25 + 0.25 + 0.25 is rescaled by 1/0.75.
  EXPECT_NEAR(r.mass(A), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(r.mass(B), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(r.mass(OMEGA3), 1.0 / 3.0, 1e-15);
}

TEST(Dempster, TotalConflictIsUndefined) {
  const MassFunction a(3, {{A, 1.0}});
  const MassFunction b(3, {{B, 1.0}});
  try {
    dempster_combine(a, b);
    FAIL();
  } catch (const CombinationUndefined& e) {
    EXPECT_EQ(std::string(e.code()), "combination_undefined");
  }
  EXPECT_THROW(dempster_combine(MassFunction::vacuous(3), MassFunction::vacuous(2)), InvalidArgument);
}

TEST(Dempster, CommutativeAndAssociative) {
  SplitMix64 rng(2024);
  int checked = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_mass(rng, 4), b = random_mass(rng, 4), c = random_mass(rng, 4);
    try {
      expect_near(dempster_combine(a, b), dempster_combine(b, a), 1e-9);
      expect_near(dempster_combine(dempster_combine(a, b), c), dempster_combine(a, dempster_combine(b, c)), 1e-9);
      ++checked;
    } catch (const CombinationUndefined&) {
      EXPECT_THROW(dempster_combine(dempster_combine(b, a), c), CombinationUndefined);
    }
  }
  EXPECT_GT(checked, 900);
}

TEST(Pignistic, Examples) {
  const auto v = pignistic(MassFunction::vacuous(3));
  for (double p : v) EXPECT_NEAR(p, 1.0 / 3.0, 1e-15);

  const ProbabilityVector p({0.1, 0.6, 0.3});
  const auto q = pignistic(MassFunction::bayesian(p));
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(q[k], p[k], 1e-15);

  const auto r = pignistic(MassFunction(3, {{AB, 0.6}, {C, 0.4}}));
  EXPECT_NEAR(r[0], 0.3, 1e-15);
  EXPECT_NEAR(r[1], 0.3, 1e-15);
  EXPECT_NEAR(r[2], 0.4, 1e-15);
}

EvidentialKnn ekknn(std::vector<Point2> pts, std::vector<int> lbl, int k_classes, int k, double gamma) {
  return EvidentialKnn(std::move(pts), std::move(lbl), k_classes, EvidentialKnnParams{k, 0.95, gamma});
}

TEST(EvidentialKnn, SingleNeighborAtZeroDistance) {
  const auto m = ekknn({{0, 0}, {10, 10}}, {0, 1}, 2, 1, 1.0).mass({0, 0});
  EXPECT_NEAR(m.mass(0b01), 0.95, 1e-15);
  EXPECT_NEAR(m.mass(0b11), 0.05, 1e-15);
}

TEST(EvidentialKnn, TwoCoincidentSameClassNeighbors) {
  const auto m = ekknn({{0, 0}, {0, 0}, {10, 10}}, {0, 0, 1}, 2, 2, 1.0).mass({0, 0});
  EXPECT_NEAR(m.mass(0b01), 0.9975, 1e-12);
  EXPECT_NEAR(m.mass(0b11), 0.0025, 1e-12);
}

TEST(EvidentialKnn, FarQueryIsVacuous) {
  const auto d = fixtures::mirrored_two_gaussians(3, 40);
  for (double gamma : {0.0, 0.5}) {
    const auto model = ekknn(d.points, d.labels, 2, 5, gamma);
    const double g = *std::min_element(model.class_gammas().begin(), model.class_gammas().end());
    // Every training point is within 10 of the origin; place the query so gamma d^2 >= 30.
    const double r = 10.0 + std::sqrt(30.0 / g) + 1.0;
    const auto m = model.mass({r, r});
    EXPECT_NEAR(m.mass(0b11), 1.0, 1e-9);
    EXPECT_TRUE(m.is_vacuous());
  }
}

TEST(EvidentialKnn, OutputStructureAndMonotonicity) {
  const auto d = fixtures::mirrored_two_gaussians(9, 50);
  const auto model = ekknn(d.points, d.labels, 2, 5, 0.0);
  SplitMix64 rng(4);
  for (const auto& q : fixtures::uniform_points(rng, 100, -6, 6)) {
    const auto m = model.mass(q);
    double sum = 0;
    for (const auto& [s, v] : m.focal()) {
      EXPECT_TRUE(cardinality(s) == 1 || s == 0b11) << s;
      sum += v;
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
  // Moving toward a lone class-0 point increases its singleton mass.
  const auto lone = ekknn({{0, 0}, {50, 50}}, {0, 1}, 2, 1, 1.0);
  double prev = -1;
  for (double x = 3.0; x >= 0.0; x -= 0.25) {
    const double v = lone.mass({x, 0}).mass(0b01);
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(EvidentialKnn, AutomaticGammaIsInverseMeanSquaredSpread) {
  const auto model = ekknn({{0, 0}, {2, 0}, {10, 0}, {10, 1}, {10, 3}}, {0, 0, 1, 1, 1}, 2, 2, 0.0);
  EXPECT_NEAR(model.class_gammas()[0], 1.0 / 4.0, 1e-12);
  EXPECT_NEAR(model.class_gammas()[1], 1.0 / ((1.0 + 9.0 + 4.0) / 3.0), 1e-12);
  const auto fixed = ekknn({{0, 0}, {2, 0}, {10, 0}}, {0, 0, 1}, 2, 2, 0.7);
  EXPECT_EQ(fixed.class_gammas()[0], 0.7);
  EXPECT_EQ(fixed.class_gammas()[1], 0.7);
}

TEST(EvidentialKnn, ThroughFittedModel) {
  const auto d = fixtures::mirrored_two_gaussians(9, 50);
  const FittedModel m = fit(ClassifierSpec::parse("evidential_knn:k=7"), d.points, d.labels, 2);
  const Point2 q{-1.5, 0.2};
  const auto mass = mass_function(m, q);
  const auto p = predict_proba(m, q);
  const auto bet = pignistic(mass);
  EXPECT_EQ(p[0], bet[0]);
  EXPECT_GT(p[0], p[1]);
  EXPECT_THROW(fit(ClassifierSpec::parse("evidential_knn:alpha0=0"), d.points, d.labels, 2), InvalidArgument);
}

}  // namespace
