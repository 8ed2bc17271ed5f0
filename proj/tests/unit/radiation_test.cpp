/*
 * Copyright 2026 The cbrn_sim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "cbrn/common/errors.hpp"
#include "cbrn/radiation/gp.hpp"
#include "cbrn/radiation/radiation_map.hpp"
#include "cbrn/radiation/samples.hpp"

namespace cbrn::radiation
{
namespace
{

GeigerSampleSet make_set(std::initializer_list<std::tuple<double, double, double>> pts)
{
  GeigerSampleSet s;
  for (const auto & [x, y, r] : pts) {
    s.samples.push_back({{x, y, 0.0}, r});
  }
  return s;
}

/// Dense posterior: mean and predictive variance with an explicit inverse.
GpPrediction oracle(const GeigerSampleSet & d, const KernelParams & kp, double m0, const Point2 & q)
{
  const int n = static_cast<int>(d.size());
  auto k = [&](double ax, double ay, double bx, double by) {
      return kp.signal_var * std::exp(-((ax - bx) * (ax - bx) + (ay - by) * (ay - by)) /
             (2.0 * kp.lengthscale * kp.lengthscale));
    };
  Eigen::MatrixXd K(n, n);
  Eigen::VectorXd y(n);
  Eigen::VectorXd ks(n);
  for (int i = 0; i < n; ++i) {
    const auto & a = d.samples[i].pose;
    y(i) = d.samples[i].rate - m0;
    ks(i) = k(q.x, q.y, a.x, a.y);
    for (int j = 0; j < n; ++j) {
      const auto & b = d.samples[j].pose;
      K(i, j) = k(a.x, a.y, b.x, b.y) + (i == j ? kp.noise_var : 0.0);
    }
  }
  const Eigen::MatrixXd inv = K.inverse();
  return {m0 + ks.dot(inv * y), kp.signal_var + kp.noise_var - ks.dot(inv * ks)};
}

TEST(Gp, ThreeSampleOracle)
{
  const auto d = make_set({{0, 0, 10}, {1, 0, 2}, {0, 1, 2}});
  const KernelParams kp{1.0, 25.0, 1.0};
  const auto m = gp_fit(d, kp);
  EXPECT_NEAR(m.prior_mean(), 14.0 / 3.0, 1e-12);
  const auto p = gp_predict(m, {0.5, 0.5, 0.0});
  const auto o = oracle(d, kp, 14.0 / 3.0, {0.5, 0.5});
  EXPECT_NEAR(p.mean, o.mean, 1e-9);
  EXPECT_NEAR(p.variance, o.variance, 1e-9);
}

TEST(Gp, SingleSampleWeights)
{
  const auto d = make_set({{1.0, 2.0, 30.0}});
  KernelParams kp{0.5, 4.0, 0.01};
  GpOptions zero;
  zero.mean_mode = MeanMode::kZero;
  const auto mz = gp_fit(d, kp, zero);
  ASSERT_EQ(mz.weights().size(), 1u);
  EXPECT_NEAR(mz.weights()[0], 30.0 / 4.01, 1e-12);
  const auto mc = gp_fit(d, kp);
  EXPECT_NEAR(mc.weights()[0], 0.0, 1e-15);  // constant mean equals the sample
}

TEST(Gp, FiveSampleWeightsMatchDenseSolve)
{
  const auto d = make_set({{0.1, 0.2, 5}, {0.9, 0.4, 8}, {0.3, 1.5, 1}, {2.0, 2.0, 12}, {1.1, 1.0, 3}});
  const KernelParams kp{0.7, 9.0, 0.3};
  const auto m = gp_fit(d, kp);
  Eigen::MatrixXd K(5, 5);
  Eigen::VectorXd y(5);
  const double m0 = 29.0 / 5.0;
  for (int i = 0; i < 5; ++i) {
    y(i) = d.samples[i].rate - m0;
    for (int j = 0; j < 5; ++j) {
      const auto & a = d.samples[i].pose;
      const auto & b = d.samples[j].pose;
      K(i, j) = 9.0 * std::exp(-((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y)) / (2 * 0.49)) +
        (i == j ? 0.3 : 0.0);
    }
  }
  const Eigen::VectorXd w = K.inverse() * y;
  for (int i = 0; i < 5; ++i) {
    EXPECT_NEAR(m.weights()[i], w(i), 1e-9);
  }
}

TEST(Gp, DuplicatePosesWithoutNoiseAreSingular)
{
  const auto d = make_set({{1, 1, 3}, {1, 1, 5}});
  EXPECT_THROW(gp_fit(d, {1.0, 1.0, 0.0}), SingularKernel);
  EXPECT_NO_THROW(gp_fit(d, {1.0, 1.0, 0.1}));
}

TEST(Gp, InvalidParams)
{
  const auto d = make_set({{1, 1, 3}});
  EXPECT_THROW(gp_fit(d, {0.0, 1.0, 1.0}), InvalidParams);
  EXPECT_THROW(gp_fit(d, {1.0, -1.0, 1.0}), InvalidParams);
  EXPECT_THROW(gp_fit(d, {1.0, 1.0, -1.0}), InvalidParams);
}

TEST(Gp, FarQueryReturnsPrior)
{
  const auto d = make_set({{0, 0, 10}, {0.2, 0, 20}});
  const KernelParams kp{0.1, 4.0, 0.5};
  const auto p = gp_predict(gp_fit(d, kp), {50.0, 50.0, 0.0});
  EXPECT_NEAR(p.mean, 15.0, 1e-12);
  EXPECT_NEAR(p.variance, 4.5, 1e-12);
}

TEST(Gp, NoSamplesIsPrior)
{
  const KernelParams kp{1.0, 2.0, 0.5};
  const auto m = GpModel::prior(kp, 7.0);
  const auto p = gp_predict(m, {3.0, -1.0, 0.0});
  EXPECT_EQ(p.mean, 7.0);
  EXPECT_EQ(p.variance, 2.5);
  EXPECT_EQ(m.size(), 0u);
  EXPECT_THROW(gp_fit(GeigerSampleSet{}, kp), InvalidParams);
}

TEST(Gp, InterpolatesWithTinyNoise)
{
  const auto d = make_set({{0, 0, 10}, {1, 0, 2}, {0, 1, 4}});
  const auto m = gp_fit(d, {0.5, 25.0, 1e-8});
  EXPECT_NEAR(gp_predict(m, {1.0, 0.0, 0.0}).mean, 2.0, 1e-5);
  EXPECT_NEAR(gp_predict(m, {0.0, 1.0, 0.0}).mean, 4.0, 1e-5);
}

TEST(Gp, VarianceNeverGrowsWithData)
{
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const KernelParams kp{0.2 + u(rng), 1.0 + 5.0 * u(rng), 0.05 + u(rng)};
    GeigerSampleSet d;
    std::vector<Point2> queries;
    for (int q = 0; q < 10; ++q) {
      queries.push_back({3.0 * u(rng), 3.0 * u(rng)});
    }
    std::vector<double> prev(queries.size(), kp.signal_var + kp.noise_var);
    for (int n = 0; n < 15; ++n) {
      d.samples.push_back({{3.0 * u(rng), 3.0 * u(rng), 0.0}, 50.0 * u(rng)});
      const auto m = gp_fit(d, kp);
      for (std::size_t q = 0; q < queries.size(); ++q) {
        const double v = m.predict(queries[q]).variance;
        EXPECT_LE(v, prev[q] + 1e-9);
        prev[q] = v;
      }
    }
  }
}

TEST(Gp, SqrtTransformMapsBack)
{
  const auto d = make_set({{0, 0, 100}, {1, 0, 25}});
  GpOptions opt;
  opt.sqrt_transform = true;
  const KernelParams kp{0.5, 4.0, 0.25};
  const auto m = gp_fit(d, kp, opt);
  std::vector<double> scratch;
  const auto latent = m.predict_latent({0.3, 0.0}, scratch);
  const auto rate = m.predict({0.3, 0.0});
  EXPECT_NEAR(rate.mean, latent.mean * latent.mean + latent.variance, 1e-12);
  // Latent space is the plain GP on sqrt(rate).
  const auto o = oracle(make_set({{0, 0, 10}, {1, 0, 5}}), kp, 7.5, {0.3, 0.0});
  EXPECT_NEAR(latent.mean, o.mean, 1e-9);
  EXPECT_NEAR(latent.variance, o.variance, 1e-9);
}

TEST(Gp, DefaultParamsFromData)
{
  const auto d = make_set({{0, 0, 2}, {1, 0, 4}, {2, 0, 6}});
  const auto kp = default_kernel_params(d, 0.3);
  EXPECT_EQ(kp.lengthscale, 0.3);
  EXPECT_NEAR(kp.signal_var, 4.0, 1e-12);
  EXPECT_NEAR(kp.noise_var, 4.0, 1e-12);
}

GridGeometry geo(int w, int h, double res)
{
  GridGeometry g;
  g.width = w;
  g.height = h;
  g.resolution = res;
  return g;
}

TEST(Render, SingleBumpPeaksAtItsCell)
{
  const auto g = geo(10, 10, 0.1);
  const auto d = make_set({{0.55, 0.55, 100.0}});
  GpOptions opt;
  opt.mean_mode = MeanMode::kZero;
  const auto map = render_radiation_map(gp_fit(d, {0.2, 100.0, 1.0}, opt), g);
  EXPECT_EQ(map.argmax_mean(), g.index(Cell{5, 5}));
}

TEST(Render, EveryCellMatchesPointPrediction)
{
  const auto g = geo(23, 17, 0.1);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  GeigerSampleSet d;
  for (int i = 0; i < 40; ++i) {
    d.samples.push_back({{2.3 * u(rng), 1.7 * u(rng), 0.0}, 100.0 * u(rng)});
  }
  const auto m = gp_fit(d, {0.3, 400.0, 20.0});
  const auto par = render_radiation_map(m, g);
  const auto ser = render_radiation_map_serial(m, g);
  EXPECT_EQ(par.mean, ser.mean);
  EXPECT_EQ(par.variance, ser.variance);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto p = m.predict(g.center(i));
    EXPECT_EQ(par.mean[i], p.mean);
    EXPECT_EQ(par.variance[i], p.variance);
  }
}

TEST(Render, SampledCellIsMoreCertain)
{
  const auto g = geo(30, 30, 0.1);
  const auto d = make_set({{0.25, 0.25, 10.0}, {0.35, 0.25, 12.0}});
  const auto map = render_radiation_map(gp_fit(d, {0.3, 10.0, 1.0}), g);
  EXPECT_LT(map.variance[g.index(Cell{2, 2})], map.variance[g.index(Cell{29, 29})]);
}

RadiationMap radial_field(const GridGeometry & g)
{
  RadiationMap r;
  r.geometry = g;
  r.prior_mean = -1.0;
  r.prior_variance = -1.0;
  const Point2 c{g.width_m() / 2.0, g.height_m() / 2.0};
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double d = distance(g.center(i), c);
    r.mean.push_back(std::exp(-d * d));
    r.variance.push_back(d);
  }
  return r;
}

TEST(AlignMaps, IdentityIsExact)
{
  const auto g = geo(20, 14, 0.1);
  const auto r = radial_field(g);
  const auto a = align_maps(r, g, {0.0, 0.0, 0.0});
  EXPECT_EQ(a.mean, r.mean);
  EXPECT_EQ(a.variance, r.variance);
}

TEST(AlignMaps, IntegerTranslationShiftsCells)
{
  const auto g = geo(20, 14, 0.1);
  const auto r = radial_field(g);
  const int k = 3;
  const auto a = align_maps(r, g, {k * 0.1, 0.0, 0.0});
  for (int iy = 0; iy < 14; ++iy) {
    for (int ix = 0; ix < 20; ++ix) {
      const auto i = g.index(Cell{ix, iy});
      if (ix >= k) {
        EXPECT_EQ(a.mean[i], r.mean[g.index(Cell{ix - k, iy})]);
      } else {
        EXPECT_EQ(a.mean[i], r.prior_mean);
      }
    }
  }
}

TEST(AlignMaps, QuarterTurnOfRadialField)
{
  const auto g = geo(21, 21, 0.1);
  const auto r = radial_field(g);
  const auto a = align_maps(r, g, {0.0, 0.0, std::numbers::pi / 2});
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_NEAR(a.variance[i], r.variance[i], 0.1 * std::numbers::sqrt2);
  }
}

TEST(Synchronize, PairsWithinSkew)
{
  std::vector<TimedPose> poses{{1.0, {0, 0, 0}}, {4.5, {1, 0, 0}}};
  std::vector<TimedReading> readings{{1.02, {{}, 5, 0.5}}, {5.0, {{}, 7, 0.5}}};
  const auto r = synchronize(poses, readings, 0.1);
  ASSERT_EQ(r.set.size(), 1u);
  EXPECT_EQ(r.dropped, 1u);
  EXPECT_EQ(r.pairing, (std::vector<std::ptrdiff_t>{0, -1}));
  EXPECT_DOUBLE_EQ(r.set.samples[0].rate, 10.0);
}

TEST(Synchronize, MatchesExhaustiveSearch)
{
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<double> pt(100);
  std::vector<double> rt(100);
  for (auto & t : pt) {
    t = std::round(u(rng) * 100.0) / 100.0;
  }
  for (auto & t : rt) {
    t = std::round(u(rng) * 100.0) / 100.0;
  }
  std::sort(pt.begin(), pt.end());
  std::sort(rt.begin(), rt.end());
  for (std::size_t i = 0; i < pt.size(); ++i) {
    pt[i] += 1e-6 * static_cast<double>(i);  // distinct stamps
  }
  std::vector<TimedPose> poses;
  std::vector<TimedReading> readings;
  for (std::size_t i = 0; i < pt.size(); ++i) {
    poses.push_back({pt[i], {static_cast<double>(i), 0.0, 0.0}});
    readings.push_back({rt[i], {{}, 1, 1.0}});
  }
  const double skew = 0.05;
  const auto r = synchronize(poses, readings, skew);
  for (std::size_t j = 0; j < rt.size(); ++j) {
    std::ptrdiff_t best = -1;
    for (std::size_t i = 0; i < pt.size(); ++i) {
      const double d = std::abs(pt[i] - rt[j]);
      if (d <= skew + 1e-12 && (best < 0 || d < std::abs(pt[best] - rt[j]) - 1e-12)) {
        best = static_cast<std::ptrdiff_t>(i);
      }
    }
    EXPECT_EQ(r.pairing[j], best) << "reading " << j;
  }
}

TEST(SampleLog, RoundTrip)
{
  std::ostringstream out;
  write_sample_log_line(out, {1.5, {{2.0, 3.0, 0.1}, 42, 0.5}});
  write_sample_log_line(out, {2.0, {{2.5, 3.5, 0.0}, 7, 0.5}});
  std::istringstream in(out.str());
  const auto back = read_sample_log(in);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].reading.counts, 42);
  EXPECT_EQ(back[1].reading.pose.x, 2.5);
  const auto set = samples_from_log(back);
  EXPECT_DOUBLE_EQ(set.samples[0].rate, 84.0);
}

TEST(Quantize, ScalesAndClamps)
{
  EXPECT_EQ(quantize({0.0, 0.5, 1.0, 2.0, -1.0}, 1.0), (std::vector<std::uint8_t>{0, 128, 255, 255, 0}));
}

}  // namespace
}  // namespace cbrn::radiation
