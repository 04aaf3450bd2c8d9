// Copyright 2026 The MSTM Authors.
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

#ifndef MSTM_ERROR_HPP_
#define MSTM_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace mstm {

// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller passed arguments that cannot be acted on (bad dimensions,
// out-of-range ids, inconsistent weight count, ...).
class UsageError : public Error {
 public:
  using Error::Error;
};

// On-disk data is malformed (truncated file, bad magic, NaN payload).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Index construction failed an internal invariant.
class BuildError : public Error {
 public:
  using Error::Error;
};

// Weight training diverged or was fed unusable training data.
class TrainError : public Error {
 public:
  using Error::Error;
};

// Experiment configuration is inconsistent (unknown framework name,
// missing ground truth, empty sweep).
class SetupError : public Error {
 public:
  using Error::Error;
};

}  // namespace mstm

#endif  // MSTM_ERROR_HPP_
