// Copyright 2026 The wjdot Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wjdot/gaussian.hpp"

#include <algorithm>
#include <cmath>

#include "wjdot/error.hpp"

namespace wjdot {

namespace {

constexpr double kSymmetryTolerance = 1e-10;
constexpr double kEigenTolerance = 1e-10;

void check_spd(const Eigen::MatrixXd& a, const char* what) {
  if (a.rows() != a.cols())
    throw InputError(std::string(what) + ": matrix is not square");
  if (!a.allFinite()) throw InputError(std::string(what) + ": non-finite entry");
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance)
    throw InputError(std::string(what) + ": matrix is not symmetric");
}

}  // namespace

void GaussianSummary::validate() const {
  if (covariance.rows() != mean.size())
    throw InputError("gaussian summary: covariance does not match mean");
  check_spd(covariance, "gaussian summary");
  if (covariance.rows() > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(covariance,
                                                       Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -kEigenTolerance)
      throw InputError("gaussian summary: covariance is indefinite");
  }
}

GaussianSummary summarize(const Matrix& samples) {
  if (samples.rows() == 0) throw InputError("summarize: no samples");
  GaussianSummary g;
  g.mean = samples.colwise().mean().transpose();
  const Eigen::MatrixXd centered = samples.rowwise() - g.mean.transpose();
  g.covariance = centered.transpose() * centered / double(samples.rows());
  // Exact symmetry; the product above can differ in the last bit.
  g.covariance = 0.5 * (g.covariance + g.covariance.transpose()).eval();
  return g;
}

Eigen::MatrixXd sqrtm_spd(const Eigen::MatrixXd& a) {
  check_spd(a, "sqrtm_spd");
  if (a.rows() == 0) return a;
  const Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  if (eig.info() != Eigen::Success)
    throw InputError("sqrtm_spd: eigendecomposition failed");
  Eigen::VectorXd ev = eig.eigenvalues();
  if (ev.minCoeff() < -kEigenTolerance)
    throw InputError("sqrtm_spd: matrix is indefinite");
  ev = ev.cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd& v = eig.eigenvectors();
  Eigen::MatrixXd s = v * ev.asDiagonal() * v.transpose();
  return 0.5 * (s + s.transpose());
}

double bures_wasserstein(const GaussianSummary& p, const GaussianSummary& q) {
  if (p.mean.size() != q.mean.size())
    throw InputError("bures_wasserstein: dimension mismatch");
  p.validate();
  q.validate();
  const Eigen::MatrixXd root_p = sqrtm_spd(p.covariance);
  Eigen::MatrixXd middle = root_p * q.covariance * root_p;
  middle = 0.5 * (middle + middle.transpose()).eval();
  const Eigen::MatrixXd cross = sqrtm_spd(middle);
  const double mean_term = (p.mean - q.mean).squaredNorm();
  double trace_term =
      (p.covariance + q.covariance - 2.0 * cross).trace();
  if (trace_term < -1e-9)
    throw InputError("bures_wasserstein: negative trace term");
  trace_term = std::max(trace_term, 0.0);
  return std::sqrt(mean_term + trace_term);
}

}  // namespace wjdot
