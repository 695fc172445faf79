// Copyright 2026 The charnet Authors
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

#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace charnet {

/// Base class of every error raised by the library. The message always names
/// the offending input (work id, node, parameter, byte offset, ...).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or unusable input data (bad UTF-8, empty documents, bad files).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Precondition violations on numerical routines (shapes, sizes, domains).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Half-open index range [begin, end).
struct Range {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool empty() const { return begin == end; }
  bool contains(std::size_t i) const { return i >= begin && i < end; }
  bool contains(const Range& r) const { return r.begin >= begin && r.end <= end; }
  friend bool operator==(const Range&, const Range&) = default;
};

/// Row-major dense matrix used by every numerical module.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

}  // namespace charnet
