/*
 * Copyright 2026 The BTDM Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef BTDM_ERROR_HPP
#define BTDM_ERROR_HPP

#include <stdexcept>

namespace btdm {

/// Base class for domain errors. Argument errors use std::invalid_argument.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Payload shorter than the dominant-row bit count.
class PayloadTooSmall : public Error {
 public:
  using Error::Error;
};

/// Every solver restart produced a non-finite residual.
class SolverFailure : public Error {
 public:
  using Error::Error;
};

/// A factor was numerically rank deficient during orthonormalization.
class CanonicalizationFailure : public Error {
 public:
  using Error::Error;
};

/// Invalid or infeasible experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace btdm

#endif  // BTDM_ERROR_HPP
