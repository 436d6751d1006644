#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "uncmap/measures.hpp"

using namespace uncmap;

namespace {

ProbabilityVector pv(std::vector<double> v) { return ProbabilityVector(std::move(v)); }

ProbabilityVector random_pv(SplitMix64& rng, int k) {
  std::vector<double> v(static_cast<std::size_t>(k));
  double sum = 0;
  for (double& x : v) sum += (x = rng.uniform());
  for (double& x : v) x /= sum;
  return ProbabilityVector(std::move(v));
}

TEST(ProbabilityVector, Validation) {
  EXPECT_THROW(pv({0.5, 0.6}), InvalidArgument);
  EXPECT_THROW(pv({1.1, -0.1}), InvalidArgument);
  EXPECT_THROW(pv({}), InvalidArgument);
  EXPECT_NO_THROW(pv({0.5, 0.5 + 1e-10}));
}

TEST(Entropy, ClosedForms) {
  EXPECT_EQ(entropy(pv({1, 0, 0})), 0.0);
  EXPECT_NEAR(entropy(ProbabilityVector::uniform(3)), std::log2(3.0), 1e-12);
  EXPECT_NEAR(entropy(ProbabilityVector::uniform(3)), 1.58496, 1e-5);
  EXPECT_DOUBLE_EQ(entropy(pv({0.5, 0.25, 0.25})), 1.5);
}

TEST(Gini, ClosedForms) {
  EXPECT_EQ(gini(pv({1, 0})), 0.0);
  EXPECT_DOUBLE_EQ(gini(pv({0.5, 0.5})), 0.5);
  for (int k = 2; k <= 8; ++k) EXPECT_NEAR(gini(ProbabilityVector::uniform(static_cast<std::size_t>(k))), 1.0 - 1.0 / k, 1e-12);
}

TEST(LeastConfident, ClosedForms) {
  EXPECT_EQ(least_confident(pv({1, 0, 0})), 0.0);
  EXPECT_DOUBLE_EQ(least_confident(ProbabilityVector::uniform(4)), 0.75);
  EXPECT_NEAR(least_confident(pv({0.6, 0.3, 0.1})), 0.4, 1e-12);
}

TEST(Margin, ClosedForms) {
  EXPECT_EQ(margin(pv({1, 0})), 0.0);
  EXPECT_EQ(margin(pv({0.5, 0.5})), 1.0);
  EXPECT_NEAR(margin(pv({0.5, 0.3, 0.2})), 0.8, 1e-12);
  EXPECT_NEAR(margin(pv({0.2, 0.5, 0.3})), 0.8, 1e-12);
}

TEST(ProbabilityMeasures, PermutationInvariantAndBounded) {
  SplitMix64 rng(17);
  for (int i = 0; i < 500; ++i) {
    const int k = 2 + static_cast<int>(rng.index(5));
    auto p = random_pv(rng, k);
    std::vector<double> v(p.begin(), p.end());
    std::vector<double> w = v;
    std::reverse(w.begin(), w.end());
    std::rotate(w.begin(), w.begin() + 1, w.end());
    const auto q = ProbabilityVector(w);
    EXPECT_NEAR(entropy(p), entropy(q), 1e-12);
    EXPECT_NEAR(gini(p), gini(q), 1e-12);
    EXPECT_EQ(least_confident(p), least_confident(q));
    EXPECT_EQ(margin(p), margin(q));
    EXPECT_LE(entropy(p), std::log2(static_cast<double>(k)) + 1e-12);
    EXPECT_LE(gini(p), 1.0 - 1.0 / k + 1e-12);
    EXPECT_LE(least_confident(p), 1.0 - 1.0 / k + 1e-12);
    EXPECT_GE(margin(p), 0.0);
    EXPECT_LE(margin(p), 1.0);
  }
}

// Dense grid search over theta, evaluating the likelihood directly.
SupportPair grid_oracle(int s, int f, int points = 1'000'000) {
  const double hat = s + f == 0 ? 0.5 : static_cast<double>(s) / (s + f);
  const double norm = std::pow(hat, s) * std::pow(1 - hat, f);
  SupportPair best{0, 0};
  for (int i = 0; i <= points; ++i) {
    const double t = static_cast<double>(i) / points;
    const double lik = s + f == 0 ? 1.0 : std::pow(t, s) * std::pow(1 - t, f) / norm;
    best.pi_plus = std::max(best.pi_plus, std::min(lik, 2 * t - 1));
    best.pi_minus = std::max(best.pi_minus, std::min(lik, 1 - 2 * t));
  }
  return best;
}

TEST(RlDecomposition, NoDataIsFullyEpistemic) {
  const auto r = rl_decomposition(0, 0);
  EXPECT_EQ(r.epistemic, 1.0);
  EXPECT_EQ(r.aleatoric, 0.0);
}

TEST(RlDecomposition, OneSuccess) {
  const auto r = rl_decomposition(1, 0);
  const auto o = grid_oracle(1, 0);
  EXPECT_NEAR(o.pi_minus, 1.0 / 3.0, 1e-6);
  EXPECT_NEAR(r.support.pi_plus, 1.0, 1e-9);
  EXPECT_NEAR(r.support.pi_minus, o.pi_minus, 1e-6);
  EXPECT_NEAR(r.epistemic, 1.0 / 3.0, 1e-6);
  EXPECT_NEAR(r.aleatoric, 0.0, 1e-9);
}

TEST(RlDecomposition, TwoAndTwo) {
  const auto r = rl_decomposition(2, 2);
  const auto o = grid_oracle(2, 2);
  EXPECT_NEAR(r.epistemic, std::min(o.pi_plus, o.pi_minus), 1e-6);
  EXPECT_NEAR(r.aleatoric, 1 - std::max(o.pi_plus, o.pi_minus), 1e-6);
  EXPECT_NEAR(r.epistemic, 0.52, 0.01);
  EXPECT_NEAR(r.aleatoric, 0.48, 0.01);
}

TEST(RlDecomposition, MatchesGridOracle) {
  for (auto [s, f] : std::vector<std::pair<int, int>>{{0, 1}, {0, 5}, {3, 1}, {5, 2}, {7, 0}, {4, 4}, {10, 3}, {1, 9}}) {
    const auto r = rl_decomposition(s, f);
    const auto o = grid_oracle(s, f, 200'000);
    EXPECT_NEAR(r.support.pi_plus, o.pi_plus, 2e-5) << s << "," << f;
    EXPECT_NEAR(r.support.pi_minus, o.pi_minus, 2e-5) << s << "," << f;
    // The refined sup can only beat the grid.
    EXPECT_GE(r.support.pi_plus, o.pi_plus - 1e-12);
    EXPECT_GE(r.support.pi_minus, o.pi_minus - 1e-12);
  }
}

TEST(RlDecomposition, Properties) {
  double prev = 2.0;
  for (int n : {1, 2, 4, 8}) {
    const double e = rl_decomposition(n, n).epistemic;
    EXPECT_LT(e, prev) << n;
    prev = e;
  }
  for (int s = 0; s <= 12; ++s)
    for (int f = 0; f <= 12; ++f) {
      const auto r = rl_decomposition(s, f);
      EXPECT_LE(r.epistemic + r.aleatoric, 1.0 + 1e-6);
      EXPECT_GE(r.epistemic, 0.0);
      EXPECT_GE(r.aleatoric, -1e-12);
      const auto m = rl_decomposition(f, s);  // symmetric under swapping outcomes
      EXPECT_NEAR(r.epistemic, m.epistemic, 1e-9);
      EXPECT_NEAR(r.aleatoric, m.aleatoric, 1e-9);
    }
  EXPECT_THROW(rl_decomposition(-1, 0), InvalidArgument);
}

TEST(RlDecomposition, MajorityVersusRest) {
  const auto r = rl_decomposition(LocalCounts{{1, 3, 1}});
  const auto d = rl_decomposition(3, 2);
  EXPECT_EQ(r.epistemic, d.epistemic);
  EXPECT_EQ(r.aleatoric, d.aleatoric);
  const auto tie = rl_decomposition(LocalCounts{{2, 2, 0}});
  EXPECT_EQ(tie.epistemic, rl_decomposition(2, 2).epistemic);
}

EnsembleDistribution members(std::initializer_list<std::vector<double>> rows) {
  EnsembleDistribution e;
  for (const auto& r : rows) e.members.emplace_back(r);
  return e;
}

TEST(EnsembleDecomposition, IdenticalMembersHaveNoEpistemic) {
  SplitMix64 rng(8);
  for (int i = 0; i < 200; ++i) {
    const auto p = random_pv(rng, 3);
    EnsembleDistribution e;
    for (int m = 0; m < 1 + static_cast<int>(rng.index(50)); ++m) e.members.push_back(p);
    const auto d = ensemble_decomposition(e);
    EXPECT_EQ(d.epistemic, 0.0);
    EXPECT_EQ(d.epistemic_raw, 0.0);
    EXPECT_EQ(d.total, d.aleatoric);
  }
}

TEST(EnsembleDecomposition, MaximalDisagreement) {
  const auto d = ensemble_decomposition(members({{1, 0}, {0, 1}}));
  EXPECT_DOUBLE_EQ(d.total, 1.0);
  EXPECT_EQ(d.aleatoric, 0.0);
  EXPECT_DOUBLE_EQ(d.epistemic, 1.0);
}

TEST(EnsembleDecomposition, RandomMemberSets) {
  SplitMix64 rng(31);
  for (int i = 0; i < 1000; ++i) {
    const int k = 2 + static_cast<int>(rng.index(4));
    EnsembleDistribution e;
    for (int m = 0; m < 1 + static_cast<int>(rng.index(20)); ++m) e.members.push_back(random_pv(rng, k));
    const auto d = ensemble_decomposition(e);
    EXPECT_GE(d.epistemic_raw, -1e-12);
    EXPECT_GE(d.epistemic, 0.0);
    EXPECT_NEAR(d.total, d.aleatoric + d.epistemic_raw, 1e-12);
    // Direct recomputation.
    std::vector<double> mean(static_cast<std::size_t>(k), 0.0);
    double a = 0;
    for (const auto& p : e.members) {
      for (std::size_t c = 0; c < mean.size(); ++c) mean[c] += p[c] / static_cast<double>(e.members.size());
      double h = 0;
      for (double v : p) if (v > 0) h -= v * std::log2(v);
      a += h / static_cast<double>(e.members.size());
    }
    double t = 0;
    for (double v : mean) if (v > 0) t -= v * std::log2(v);
    EXPECT_NEAR(d.total, t, 1e-12);
    EXPECT_NEAR(d.aleatoric, a, 1e-12);
  }
}

TEST(Nonspecificity, Examples) {
  EXPECT_EQ(nonspecificity(MassFunction::bayesian(pv({0.2, 0.3, 0.5}))), 0.0);
  EXPECT_NEAR(nonspecificity(MassFunction::vacuous(3)), std::log2(3.0), 1e-12);
  EXPECT_NEAR(nonspecificity(MassFunction(3, {{0b011, 0.5}, {0b001, 0.5}})), 0.5, 1e-12);
}

TEST(Discord, Examples) {
  EXPECT_EQ(discord(MassFunction::vacuous(3)), 0.0);
  EXPECT_NEAR(discord(MassFunction(2, {{0b01, 0.5}, {0b10, 0.5}})), 1.0, 1e-12);
  for (int k = 2; k <= 6; ++k) {
    const auto v = MassFunction::vacuous(k);
    EXPECT_NEAR(nonspecificity(v) + discord(v), std::log2(static_cast<double>(k)), 1e-12);
  }
}

TEST(Discord, BayesianEqualsEntropy) {
  SplitMix64 rng(1000);
  for (int i = 0; i < 1000; ++i) {
    const auto m = MassFunction::bayesian(random_pv(rng, 2 + static_cast<int>(rng.index(6))));
    EXPECT_NEAR(discord(m), entropy(pignistic(m)), 1e-9);
  }
}

TEST(Registry, StableOrderAndContents) {
  const std::vector<std::string> ids = {"entropy", "gini", "least_confident", "margin", "rl_decomposition",
                                        "ensemble_decomposition", "nonspecificity", "discord"};
  const std::vector<Capability> caps = {Capability::probability,    Capability::probability,
                                        Capability::probability,    Capability::probability,
                                        Capability::local_counts,   Capability::ensemble_members,
                                        Capability::mass_function,  Capability::mass_function};
  const auto& reg = measure_registry();
  ASSERT_EQ(reg.size(), ids.size());
  std::set<std::string> seen;
  for (std::size_t i = 0; i < reg.size(); ++i) {
    EXPECT_EQ(reg[i].id, ids[i]);
    EXPECT_EQ(reg[i].required_capability, caps[i]);
    EXPECT_FALSE(reg[i].reference.empty());
    EXPECT_FALSE(reg[i].components.empty());
    EXPECT_TRUE(seen.insert(reg[i].id).second);
  }
  EXPECT_NE(find_measure("entropy").reference.find("Shannon"), std::string::npos);
  EXPECT_NE(find_measure("entropy").reference.find("1948"), std::string::npos);
  EXPECT_EQ(find_measure("rl_decomposition").components, (std::vector<std::string>{"epistemic", "aleatoric"}));
  EXPECT_EQ(find_measure("ensemble_decomposition").components,
            (std::vector<std::string>{"total", "aleatoric", "epistemic"}));
  EXPECT_THROW(find_measure("variance"), NotFoundError);
}

TEST(Registry, CompatibilityNamesBothSides) {
  try {
    check_compatible(ClassifierKind::gaussian_nb, find_measure("rl_decomposition"));
    FAIL();
  } catch (const CapabilityError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("rl_decomposition"), std::string::npos);
    EXPECT_NE(msg.find("gaussian_nb"), std::string::npos);
    EXPECT_EQ(std::string(e.code()), "capability_mismatch");
  }
  for (const auto& m : model_registry())
    for (const auto& d : measure_registry()) {
      if (m.has(d.required_capability))
        EXPECT_NO_THROW(check_compatible(m.kind, d));
      else
        EXPECT_THROW(check_compatible(m.kind, d), CapabilityError);
    }
}

}  // namespace
