// Copyright 2026 The wfdiff Authors.
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

#ifndef WFDIFF_ERROR_HPP
#define WFDIFF_ERROR_HPP

#include <stdexcept>
#include <string>

namespace wfdiff {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The model violates one of the standing assumptions.
class InvalidModel : public Error {
 public:
  using Error::Error;
};

// Bound parameters, cycle thresholds or run sizes are out of range.
class InvalidParams : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double achieved)
      : Error(what), achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

// Not enough simulated data to form an estimate (e.g. an unvisited chain
// state, excessive censoring).
class EstimationError : public Error {
 public:
  using Error::Error;
};

}  // namespace wfdiff

#endif  // WFDIFF_ERROR_HPP
