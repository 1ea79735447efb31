#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "prva/evaluation.hpp"
#include "prva/samplers.hpp"
#include "test_support.hpp"

using namespace prva;

TEST(UniformStream, EquidistributionSanity) {
  UniformStream u(123);
  long double s = 0.0L;
  for (int i = 0; i < 1000000; ++i) s += static_cast<long double>(u.next_u64()) * 0x1.0p-64L;
  EXPECT_NEAR(static_cast<double>(s / 1e6L), 0.5, 0.002);
}

TEST(UniformStream, DeterministicStreams) {
  UniformStream a(9), b(9), c(10), d(9, 1);
  std::size_t same_c = 0, same_d = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.next_u64();
    ASSERT_EQ(x, b.next_u64());
    same_c += x == c.next_u64();
    same_d += x == d.next_u64();
  }
  EXPECT_EQ(same_c, 0u);
  EXPECT_EQ(same_d, 0u);
  for (int i = 0; i < 1000; ++i) {
    const double o = a.next_open_unit();
    EXPECT_GT(o, 0.0);
    EXPECT_LT(o, 1.0);
  }
}

TEST(NormalQuantile, AgainstBoostOracle) {
  const boost::math::normal_distribution<double> n01;
  for (double p : {1e-300, 1e-100, 1e-20, 1e-8, 1e-3, 0.02, 0.3, 0.5, 0.7, 0.975, 0.999, 1 - 1e-10, 1 - 1e-16}) {
    const double ref = boost::math::quantile(n01, p);
    EXPECT_NEAR(normal_quantile(p), ref, 1e-9 * std::max(1.0, std::abs(ref))) << p;
  }
  UniformStream u(4);
  for (int i = 0; i < 10000; ++i) {
    const double p = u.next_open_unit();
    ASSERT_NEAR(normal_quantile(p), boost::math::quantile(n01, p), 1e-9);
  }
  EXPECT_EQ(normal_quantile(0.5), 0.0);
  EXPECT_THROW(normal_quantile(1.5), DomainError);
}

TEST(Inversion, QuantileExamples) {
  EXPECT_EQ(quantile(GaussianSpec(0, 1), 0.5), 0.0);
  EXPECT_NEAR(quantile(GaussianSpec(0, 1), 0.975), 1.959963984540054, 1e-9);
  EXPECT_NEAR(quantile(StudentT{3.0}, 0.975), 3.182446305284263, 1e-9);
}

TEST(Inversion, CapabilityErrors) {
  UniformStream u(1);
  EXPECT_THROW(sample_inversion(GaussianMixture({0.0}, {1.0}, {1.0}), 10, u), CapabilityError);
  EXPECT_THROW(sample_inversion(Empirical{{1.0, 2.0}}, 10, u), CapabilityError);
  EXPECT_THROW(sample_inversion(StudentT{0.0}, 10, u), DomainError);
}

TEST(Inversion, StudentTPassesKs) {
  UniformStream u(8);
  const auto xs = sample_inversion(StudentT{4.0}, 20000, u);
  const boost::math::students_t t4(4.0);
  EXPECT_LT(test::ks_statistic(xs, [&](double x) { return boost::math::cdf(t4, x); }),
            test::ks_critical_1pct(xs.size()));
}

TEST(BoxMuller, FixedPair) {
  const auto [z0, z1] = box_muller_pair(std::exp(-2.0), 0.25);
  EXPECT_NEAR(z0, 0.0, 1e-12);
  EXPECT_NEAR(z1, 2.0, 1e-12);
}

TEST(BoxMuller, MomentsAtMillion) {
  UniformStream u(55);
  const auto s = summarize(sample_box_muller(GaussianSpec(0, 1), 1000000, u));
  EXPECT_NEAR(s.mean(), 0.0, 0.005);
  EXPECT_NEAR(s.stddev(), 1.0, 0.005);
}

TEST(BoxMuller, InvalidSpec) { EXPECT_THROW(GaussianSpec(5.0, 0.0), ValidationError); }

TEST(BoxMuller, AgreesWithInversionInW1) {
  UniformStream u(1), v(2);
  const auto a = sample_inversion(GaussianSpec(0, 1), 100000, u);
  const auto b = sample_box_muller(GaussianSpec(0, 1), 100000, v);
  EXPECT_LE(wasserstein1(EmpiricalDistribution(a), EmpiricalDistribution(b)), 0.02);
}

TEST(StudentTSampler, LargeDofApproachesNormal) {
  UniformStream u(3);
  const auto s = summarize(sample_student_t(1e6, 1000000, u));
  EXPECT_NEAR(s.stddev(), 1.0, 0.01);
}

TEST(StudentTSampler, Dof3Variance) {
  UniformStream u(21);
  const auto s = summarize(sample_student_t(3.0, 1000000, u));
  EXPECT_NEAR(s.variance(), 3.0, 0.1);
}

TEST(StudentTSampler, KsAgainstExactCdf) {
  for (double dof : {0.7, 2.5, 3.0, 10.0}) {
    UniformStream u(static_cast<std::uint64_t>(dof * 100));
    const auto xs = sample_student_t(dof, 20000, u);
    const boost::math::students_t t(dof);
    EXPECT_LT(test::ks_statistic(xs, [&](double x) { return boost::math::cdf(t, x); }),
              test::ks_critical_1pct(xs.size()))
        << dof;
  }
}

TEST(StudentTSampler, DomainError) {
  UniformStream u(1);
  EXPECT_THROW(sample_student_t(0.0, 10, u), DomainError);
  EXPECT_THROW(sample_student_t(-2.0, 10, u), DomainError);
}

namespace {

// Triangular density on [0, 1] with a uniform proposal.
struct Triangular {
  static double f(double x) { return x >= 0.0 && x <= 1.0 ? 2.0 * x : 0.0; }
  static double g(double x) { return x >= 0.0 && x <= 1.0 ? 1.0 : 0.0; }
  static double draw(UniformStream& u) { return u.next_unit(); }
};

}  // namespace

TEST(AcceptReject, DegenerateEnvelopeAcceptsAll) {
  UniformStream u(7), replay(7);
  const auto r = sample_accept_reject(Triangular::g, Triangular::draw, Triangular::g, 1.0, 1000, u);
  EXPECT_EQ(r.stats.rejected, 0u);
  EXPECT_EQ(r.stats.accepted, 1000u);
  for (double x : r.samples) {
    EXPECT_EQ(x, replay.next_unit());
    replay.next_unit();  // acceptance uniform
  }
}

TEST(AcceptReject, TriangularRateAndKs) {
  UniformStream u(2024);
  // 5e4 accepted from ~1e5 proposals
  const auto r = sample_accept_reject(Triangular::f, Triangular::draw, Triangular::g, 2.0, 50000, u);
  EXPECT_NEAR(r.stats.acceptance_rate(), 0.5, 0.008);
  EXPECT_NEAR(r.stats.proposals_per_sample(), 2.0, 0.1);
  EXPECT_LT(test::ks_statistic(r.samples, [](double x) { return std::clamp(x * x, 0.0, 1.0); }),
            test::ks_critical_1pct(r.samples.size()));
}

TEST(AcceptReject, DominanceViolationDetected) {
  UniformStream u(1);
  EXPECT_THROW(sample_accept_reject(Triangular::f, Triangular::draw, Triangular::g, 1.5, 1000, u), DominanceError);
  EXPECT_THROW(sample_accept_reject(Triangular::f, Triangular::draw, Triangular::g, 0.5, 10, u), DomainError);
}

TEST(AcceptReject, StarvationFloor) {
  // f is a narrow spike that the envelope covers but rarely hits.
  auto spike = [](double x) { return std::abs(x - 0.5) < 1e-7 ? 1.0 : 0.0; };
  UniformStream u(3);
  AcceptRejectOptions opt;
  opt.window = 10000;
  EXPECT_THROW(sample_accept_reject(spike, Triangular::draw, Triangular::g, 1.0, 10, u, opt), DominanceError);
}

TEST(ComponentSelector, RespectsZeroWeights) {
  const ComponentSelector sel({0.0, 0.5, 0.0, 0.5, 0.0});
  UniformStream u(5);
  for (int i = 0; i < 100000; ++i) {
    const auto k = sel(u.next_unit());
    ASSERT_TRUE(k == 1 || k == 3);
  }
  EXPECT_EQ(sel(0.0), 1u);
  EXPECT_EQ(sel(std::nextafter(1.0, 0.0)), 3u);
}

TEST(MixturePrva, SingleComponentMatchesSampleGaussian) {
  auto p1 = GaussianPipeline::simulated(NoiseSourceModel{}, 44);
  auto p2 = GaussianPipeline::simulated(NoiseSourceModel{}, 44);
  const auto a = sample_mixture_prva(GaussianMixture({0.0}, {1.0}, {1.0}), 1000, p1, p1.uniform());
  // One component: the selector still consumes one uniform per draw.
  std::vector<double> b(1000);
  const auto c = p2.coeffs_for(GaussianSpec(0, 1));
  for (auto& x : b) {
    p2.uniform().next_unit();
    x = p2.next(c);
  }
  EXPECT_EQ(a, b);
  const auto s = summarize(a);
  EXPECT_NEAR(s.mean(), 0.0, 5.0 / std::sqrt(1000.0));
}

TEST(MixturePrva, WeightedSeparatedComponents) {
  auto pipe = GaussianPipeline::simulated(NoiseSourceModel{}, 3);
  const auto xs = sample_mixture_prva(GaussianMixture({-10.0, 10.0}, {0.1, 0.1}, {0.25, 0.75}), 100000, pipe,
                                      pipe.uniform());
  double pos = 0;
  for (double x : xs) pos += x > 0.0;
  EXPECT_NEAR(pos / xs.size(), 0.75, 0.007);
}

TEST(MixturePrva, ZeroWeightExcluded) {
  auto pipe = GaussianPipeline::simulated(NoiseSourceModel{}, 4);
  const auto xs = sample_mixture_prva(GaussianMixture({0.0, 100.0}, {1.0, 1.0}, {1.0, 0.0}), 20000, pipe,
                                      pipe.uniform());
  for (double x : xs) ASSERT_LT(x, 50.0);
}

TEST(MixturePrva, KdeVarianceInflation) {
  UniformStream u(123);
  const auto data = sample_box_muller(GaussianSpec(0, 1), 1000, u);
  const auto mix = fit_kde(data, SilvermanBandwidth{});
  auto pipe = GaussianPipeline::simulated(NoiseSourceModel{}, 8);
  const auto xs = sample_mixture_prva(mix, 100000, pipe, pipe.uniform());
  const double h = mix.stds()[0];
  const double data_sd = sample_stddev(data);
  EXPECT_NEAR(sample_stddev(xs), std::sqrt(data_sd * data_sd + h * h), 0.02);
  EXPECT_NEAR(sample_stddev(xs), std::sqrt(mix.variance()), 0.02);
}

TEST(MixturePrva, ComponentFrequenciesChiSquare) {
  const std::vector<double> w{0.1, 0.2, 0.3, 0.15, 0.25};
  const GaussianMixture mix({0, 10, 20, 30, 40}, {0.5, 0.5, 0.5, 0.5, 0.5}, w);
  auto pipe = GaussianPipeline::simulated(NoiseSourceModel{}, 9);
  const std::size_t n = 100000;
  const auto xs = sample_mixture_prva(mix, n, pipe, pipe.uniform());
  std::vector<double> counts(w.size());
  for (double x : xs) counts[static_cast<std::size_t>(std::clamp(std::lround(x / 10.0), 0L, 4L))] += 1;
  double chi2 = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double e = w[i] * n;
    chi2 += (counts[i] - e) * (counts[i] - e) / e;
  }
  EXPECT_LT(chi2, test::chi2_critical(w.size() - 1, 0.01));
}

TEST(ParseTarget, Forms) {
  const auto g = parse_target("gaussian(0,1)");
  ASSERT_TRUE(std::holds_alternative<GaussianSpec>(g));
  EXPECT_EQ(std::get<GaussianSpec>(g).std(), 1.0);
  const auto g2 = parse_target(" gaussian( -2.5e1 , 0.5 ) ");
  EXPECT_EQ(std::get<GaussianSpec>(g2).mean(), -25.0);
  const auto t = parse_target("studentt(3)");
  EXPECT_EQ(std::get<StudentT>(t).dof, 3.0);
  EXPECT_THROW(parse_target("gaussian(0)"), UsageError);
  EXPECT_THROW(parse_target("gaussian(a,b)"), UsageError);
  EXPECT_THROW(parse_target("cauchy(1)"), UsageError);
  EXPECT_THROW(parse_target("/no/such/mixture.json"), UsageError);
  EXPECT_THROW(parse_target("gaussian(0,0)"), ValidationError);
  EXPECT_THROW(parse_target("studentt(0)"), DomainError);

  const auto path = testing::TempDir() + "mix_target.json";
  std::ofstream(path) << R"({"means":[0,1],"stds":[1,1],"weights":[0.5,0.4]})";
  EXPECT_THROW(parse_target(path), ValidationError);
  std::ofstream(path) << R"({"means":[0,1],"stds":[1,1],"weights":[0.5,0.5]})";
  EXPECT_TRUE(std::holds_alternative<GaussianMixture>(parse_target(path)));
}
