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

#include "cbrn/radiation/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cbrn/common/errors.hpp"

namespace cbrn::radiation
{

namespace
{

double target_of(double rate, const GpOptions & options)
{
  return options.sqrt_transform ? std::sqrt(std::max(rate, 0.0)) : rate;
}

std::vector<GeigerSample> thin(const std::vector<GeigerSample> & samples, std::size_t cap)
{
  if (cap == 0 || samples.size() <= cap) {
    return samples;
  }
  std::vector<GeigerSample> out;
  out.reserve(cap);
  for (std::size_t k = 0; k < cap; ++k) {
    out.push_back(samples[k * samples.size() / cap]);
  }
  return out;
}

/// In-place lower Cholesky of the row-major matrix `a` with `jitter` added
/// to the diagonal. Fails when a pivot drops to `floor` or below.
bool cholesky(std::vector<double> & a, std::size_t n, double jitter, double floor, double & min_pivot)
{
  min_pivot = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    double * row_j = &a[j * n];
    double d = row_j[j] + jitter;
    for (std::size_t k = 0; k < j; ++k) {
      d -= row_j[k] * row_j[k];
    }
    min_pivot = std::min(min_pivot, d);
    if (!(d > floor)) {
      return false;
    }
    const double l_jj = std::sqrt(d);
    row_j[j] = l_jj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double * row_i = &a[i * n];
      double s = row_i[j];
      for (std::size_t k = 0; k < j; ++k) {
        s -= row_i[k] * row_j[k];
      }
      row_i[j] = s / l_jj;
    }
  }
  return true;
}

/// Solves L y = b in place.
void forward_solve(const std::vector<double> & l, std::size_t n, double * b)
{
  for (std::size_t i = 0; i < n; ++i) {
    const double * row = &l[i * n];
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) {
      s -= row[k] * b[k];
    }
    b[i] = s / row[i];
  }
}

/// Solves L^T x = y in place.
void backward_solve(const std::vector<double> & l, std::size_t n, double * y)
{
  for (std::size_t ii = n; ii-- > 0; ) {
    double s = y[ii];
    for (std::size_t k = ii + 1; k < n; ++k) {
      s -= l[k * n + ii] * y[k];
    }
    y[ii] = s / l[ii * n + ii];
  }
}

}  // namespace

void KernelParams::validate() const
{
  if (!(lengthscale > 0.0) || !std::isfinite(lengthscale)) {
    throw InvalidParams("kernel lengthscale must be > 0");
  }
  if (!(signal_var > 0.0) || !std::isfinite(signal_var)) {
    throw InvalidParams("kernel signal variance must be > 0");
  }
  if (!(noise_var >= 0.0) || !std::isfinite(noise_var)) {
    throw InvalidParams("kernel noise variance must be >= 0");
  }
}

KernelParams default_kernel_params(
  const GeigerSampleSet & data, double lengthscale, const GpOptions & options)
{
  constexpr double floor = 1e-6;
  KernelParams p;
  p.lengthscale = lengthscale;
  if (data.empty()) {
    p.signal_var = 1.0;
    p.noise_var = 1.0;
    return p;
  }
  double mean = 0.0;
  for (const auto & s : data.samples) {
    mean += target_of(s.rate, options);
  }
  mean /= static_cast<double>(data.size());
  double var = 0.0;
  for (const auto & s : data.samples) {
    const double d = target_of(s.rate, options) - mean;
    var += d * d;
  }
  if (data.size() > 1) {
    var /= static_cast<double>(data.size() - 1);
  }
  p.signal_var = std::max(var, floor);
  p.noise_var = std::max(mean, floor);
  return p;
}

GpModel GpModel::prior(const KernelParams & params, double prior_mean, const GpOptions & options)
{
  params.validate();
  GpModel m;
  m.params_ = params;
  m.options_ = options;
  m.prior_mean_ = prior_mean;
  return m;
}

GpModel GpModel::fit(const GeigerSampleSet & data, const KernelParams & params, const GpOptions & options)
{
  params.validate();
  if (data.empty()) {
    throw InvalidParams("gp_fit needs at least one sample");
  }
  const auto samples = thin(data.samples, options.max_samples);
  const std::size_t n = samples.size();

  GpModel m;
  m.params_ = params;
  m.options_ = options;
  m.points_.reserve(n);
  std::vector<double> targets;
  targets.reserve(n);
  for (const auto & s : samples) {
    if (!std::isfinite(s.pose.x) || !std::isfinite(s.pose.y) || !std::isfinite(s.rate)) {
      throw InvalidParams("sample set contains non-finite values");
    }
    m.points_.push_back(s.pose.position());
    targets.push_back(target_of(s.rate, options));
  }
  if (options.mean_mode == MeanMode::kConstant) {
    double sum = 0.0;
    for (double t : targets) {
      sum += t;
    }
    m.prior_mean_ = sum / static_cast<double>(n);
  }

  std::vector<double> gram(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double k = m.kernel(m.points_[i], m.points_[j]);
      gram[i * n + j] = k;
      gram[j * n + i] = k;
    }
    gram[i * n + i] += params.noise_var;
  }
  const double mean_diag = params.signal_var + params.noise_var;
  const double eps_floor = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * mean_diag;

  bool ok = false;
  double min_pivot = 0.0;
  double jitter = 0.0;
  std::vector<double> factor = gram;
  ok = cholesky(factor, n, 0.0, eps_floor, min_pivot);
  for (double rel = 1e-10; !ok && rel <= 1e-6 * 1.0000001; rel *= 10.0) {
    jitter = rel * mean_diag;
    factor = gram;
    ok = cholesky(factor, n, jitter, std::max(eps_floor, 4.0 * jitter), min_pivot);
  }
  if (!ok) {
    std::ostringstream msg;
    msg << "Gram matrix is numerically singular (n = " << n << ", min pivot = " << min_pivot
        << ", diagonal = " << mean_diag << ", last jitter = " << jitter << ")";
    throw SingularKernel(msg.str());
  }
  m.jitter_ = jitter;
  // keep only the lower triangle meaningful; zero the rest for clarity
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      factor[i * n + j] = 0.0;
    }
  }
  m.chol_ = std::move(factor);

  m.weights_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    m.weights_[i] = targets[i] - m.prior_mean_;
  }
  forward_solve(m.chol_, n, m.weights_.data());
  backward_solve(m.chol_, n, m.weights_.data());
  return m;
}

double GpModel::kernel(const Point2 & a, const Point2 & b) const
{
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return params_.signal_var *
         std::exp(-(dx * dx + dy * dy) / (2.0 * params_.lengthscale * params_.lengthscale));
}

GpPrediction GpModel::predict_latent(const Point2 & query, std::vector<double> & scratch) const
{
  const std::size_t n = points_.size();
  const double prior_var = params_.signal_var + params_.noise_var;
  if (n == 0) {
    return {prior_mean_, prior_var};
  }
  scratch.resize(n);
  double mean = prior_mean_;
  for (std::size_t i = 0; i < n; ++i) {
    scratch[i] = kernel(query, points_[i]);
    mean += scratch[i] * weights_[i];
  }
  forward_solve(chol_, n, scratch.data());
  double explained = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    explained += scratch[i] * scratch[i];
  }
  return {mean, std::max(prior_var - explained, 0.0)};
}

GpPrediction GpModel::to_rate_space(const GpPrediction & latent) const
{
  if (!options_.sqrt_transform) {
    return latent;
  }
  // rate = y^2 with y ~ N(mu, s): E = mu^2 + s, Var = 2 s^2 + 4 mu^2 s
  const double mu = latent.mean;
  const double s = latent.variance;
  return {mu * mu + s, 2.0 * s * s + 4.0 * mu * mu * s};
}

GpPrediction GpModel::predict(const Point2 & query) const
{
  std::vector<double> scratch;
  return to_rate_space(predict_latent(query, scratch));
}

double GpModel::predict_mean(const Point2 & query) const
{
  if (options_.sqrt_transform) {
    return predict(query).mean;
  }
  double mean = prior_mean_;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    mean += kernel(query, points_[i]) * weights_[i];
  }
  return mean;
}

double GpModel::prior_variance() const
{
  return to_rate_space({prior_mean_, params_.signal_var + params_.noise_var}).variance;
}

}  // namespace cbrn::radiation
