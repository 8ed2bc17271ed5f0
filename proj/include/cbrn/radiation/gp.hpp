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

#ifndef CBRN__RADIATION__GP_HPP_
#define CBRN__RADIATION__GP_HPP_

#include <cstddef>
#include <vector>

#include "cbrn/common/geometry.hpp"
#include "cbrn/radiation/samples.hpp"

namespace cbrn::radiation
{

/// Squared-exponential (RBF) kernel
///   k(a, b) = signal_var * exp(-|a - b|^2 / (2 lengthscale^2))
/// plus i.i.d. Gaussian observation noise noise_var.
struct KernelParams
{
  double lengthscale{1.0};
  double signal_var{1.0};
  double noise_var{1.0};

  /// Throws InvalidParams unless lengthscale > 0, signal_var > 0, noise_var >= 0.
  void validate() const;
};

enum class MeanMode
{
  kConstant,  // prior mean = arithmetic mean of the training targets
  kZero,
};

struct GpOptions
{
  MeanMode mean_mode{MeanMode::kConstant};
  /// Regress on sqrt(rate) instead of rate (variance stabilizing).
  bool sqrt_transform{false};
  /// Larger sets are thinned uniformly before fitting.
  std::size_t max_samples{2000};
};

/// Default hyperparameters: the given lengthscale, signal variance equal to
/// the sample variance of the targets and noise variance equal to their
/// mean (Poisson noise ~ mean). Both variances are floored at 1e-6.
KernelParams default_kernel_params(
  const GeigerSampleSet & data, double lengthscale = 1.0,
  const GpOptions & options = {});

struct GpPrediction
{
  double mean{0.0};
  double variance{0.0};
};

/// Exact GP posterior over count rate. Immutable once fitted.
class GpModel
{
public:
  /// Model with no data: predicts (prior_mean, signal_var + noise_var).
  static GpModel prior(const KernelParams & params, double prior_mean = 0.0, const GpOptions & options = {});

  /// Factorizes K + noise_var I (Cholesky). On failure a diagonal jitter of
  /// 1e-10 .. 1e-6 times the mean diagonal is tried; a jittered factor is
  /// only accepted when every pivot exceeds four times the jitter, so an
  /// exactly singular Gram matrix is rejected. Throws SingularKernel.
  static GpModel fit(const GeigerSampleSet & data, const KernelParams & params, const GpOptions & options = {});

  GpPrediction predict(const Point2 & query) const;
  double predict_mean(const Point2 & query) const;

  /// Prediction in the regression space (sqrt space when transformed).
  GpPrediction predict_latent(const Point2 & query, std::vector<double> & scratch) const;

  /// Maps a latent prediction back to count-rate space.
  GpPrediction to_rate_space(const GpPrediction & latent) const;

  double kernel(const Point2 & a, const Point2 & b) const;

  const KernelParams & params() const {return params_;}
  const GpOptions & options() const {return options_;}
  std::size_t size() const {return points_.size();}
  const std::vector<Point2> & points() const {return points_;}
  const std::vector<double> & weights() const {return weights_;}
  double prior_mean() const {return prior_mean_;}
  double jitter() const {return jitter_;}
  /// Prior predictive variance in rate space.
  double prior_variance() const;

private:
  GpModel() = default;

  KernelParams params_;
  GpOptions options_;
  std::vector<Point2> points_;
  std::vector<double> chol_;  // row-major lower triangle, n x n
  std::vector<double> weights_;
  double prior_mean_{0.0};
  double jitter_{0.0};
};

inline GpModel gp_fit(const GeigerSampleSet & data, const KernelParams & params, const GpOptions & options = {})
{
  return GpModel::fit(data, params, options);
}

inline GpPrediction gp_predict(const GpModel & model, const Pose2D & query)
{
  return model.predict(query.position());
}

}  // namespace cbrn::radiation

#endif  // CBRN__RADIATION__GP_HPP_
