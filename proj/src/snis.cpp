// Copyright 2026 The dimc Authors
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

#include "dimc/snis.hpp"

#include "dimc/errors.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <vector>

namespace dimc {

AuxStatPool::AuxStatPool(Vector reference, Matrix stats, nlohmann::json generator)
    : reference_(std::move(reference)), stats_(std::move(stats)), generator_(std::move(generator)) {
  if (stats_.rows() < 1) {
    throw std::invalid_argument("AuxStatPool: need at least one statistic");
  }
  check_dimension(static_cast<std::size_t>(stats_.cols()), reference_, "AuxStatPool reference");
  if (!stats_.allFinite()) {
    throw std::invalid_argument("AuxStatPool: statistics must be finite");
  }
  // Group bit-identical rows.
  std::map<std::vector<double>, Eigen::Index> index;
  std::vector<Eigen::Index> order;
  std::vector<double> counts;
  for (Eigen::Index l = 0; l < stats_.rows(); ++l) {
    std::vector<double> key(static_cast<std::size_t>(stats_.cols()));
    for (Eigen::Index k = 0; k < stats_.cols(); ++k) {
      key[static_cast<std::size_t>(k)] = stats_(l, k);
    }
    auto [it, inserted] = index.try_emplace(std::move(key), static_cast<Eigen::Index>(order.size()));
    if (inserted) {
      order.push_back(l);
      counts.push_back(0.0);
    }
    counts[static_cast<std::size_t>(it->second)] += 1.0;
  }
  distinct_.resize(static_cast<Eigen::Index>(order.size()), stats_.cols());
  counts_.resize(static_cast<Eigen::Index>(order.size()));
  for (std::size_t c = 0; c < order.size(); ++c) {
    distinct_.row(static_cast<Eigen::Index>(c)) = stats_.row(order[c]);
    counts_(static_cast<Eigen::Index>(c)) = counts[c];
  }
  log_counts_ = counts_.array().log().matrix();
}

namespace {

struct Weights {
  Eigen::ArrayXd w;  // per distinct row times its multiplicity, relative to the largest single weight
  double top = 0.0;
  double sum = 0.0;
};

Weights compute_weights(const AuxStatPool& pool, const Vector& theta) {
  check_dimension(pool.dim(), theta, "snis theta");
  const Vector delta = theta - pool.reference();
  const Eigen::ArrayXd lw = (pool.distinct_stats() * delta).array();
  const double top = lw.maxCoeff();
  if (!std::isfinite(top)) {
    std::ostringstream msg;
    msg << "importance weights underflow: |theta - reference| = " << delta.norm()
        << " is too large for this pool";
    throw SnisUnderflow(msg.str());
  }
  Weights out;
  out.w = pool.counts().array() * (lw - top).exp();
  out.top = top;
  out.sum = out.w.sum();
  if (!(out.sum > 0.0) || !std::isfinite(out.sum)) {
    throw SnisUnderflow("importance weights underflow: all weights vanished");
  }
  return out;
}

double effective_size(const AuxStatPool& pool, const Weights& w) {
  // Each distinct row c stands for counts_c identical draws of weight w_c / counts_c.
  const double sq = (w.w.square() / pool.counts().array()).sum();
  return w.sum * w.sum / sq;
}

}  // namespace

SnisRatio snis_log_ratio(const AuxStatPool& pool, const Vector& theta) {
  const auto w = compute_weights(pool, theta);
  SnisRatio r;
  r.log_ratio = w.top + std::log(w.sum) - std::log(static_cast<double>(pool.size()));
  r.ess = effective_size(pool, w);
  return r;
}

SnisMoments snis_moments(const AuxStatPool& pool, const Vector& theta) {
  const auto w = compute_weights(pool, theta);
  SnisMoments m;
  m.log_ratio = w.top + std::log(w.sum) - std::log(static_cast<double>(pool.size()));
  m.ess = effective_size(pool, w);
  const Vector normalized = (w.w / w.sum).matrix();
  m.mean = pool.distinct_stats().transpose() * normalized;
  const Matrix centered = pool.distinct_stats().rowwise() - m.mean.transpose();
  m.cov = centered.transpose() * normalized.asDiagonal() * centered;
  return m;
}

}  // namespace dimc
