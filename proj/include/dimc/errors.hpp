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

#ifndef DIMC_ERRORS_HPP
#define DIMC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dimc {

/// Parameter or statistic vector has the wrong length for the model.
class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The state space is too large to enumerate (so c(theta) and exact
/// draws are unavailable).
class IntractableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Importance weights degenerated: the target parameter is too far from
/// the pool's reference parameter.
class SnisUnderflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Effective sample size fell below the configured floor.
class EssTooLow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotPositiveDefinite : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Curvature diagnostic dimension r = p(p+1)/2 exceeds the cap.
class DiagnosticImpractical : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid experiment configuration; the message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dimc

#endif  // DIMC_ERRORS_HPP
