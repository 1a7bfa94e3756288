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

#ifndef WFDIFF_EXPR_HPP
#define WFDIFF_EXPR_HPP

#include <string>
#include <string_view>
#include <vector>

#include "wfdiff/error.hpp"

namespace wfdiff {

class ExprError : public Error {
 public:
  ExprError(const std::string& what, std::size_t position)
      : Error(what), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Arithmetic expression in one variable `x`, compiled to a postfix program.
//
// Grammar: numbers, `x`, `+ - * / ^` (right-associative power, binding
// tighter than unary minus), parentheses, and the functions sqrt, exp, log.
// Evaluation never throws; domain errors surface as NaN or inf and are
// caught by model validation.
class Expression {
 public:
  static Expression parse(std::string_view source);

  double operator()(double x) const;
  const std::string& source() const { return source_; }

 private:
  enum class Op : unsigned char {
    kConst, kVar, kAdd, kSub, kMul, kDiv, kPow, kNeg, kSqrt, kExp, kLog
  };
  struct Instr {
    Op op;
    double value;
  };

  friend class ExprParser;

  std::string source_;
  std::vector<Instr> program_;
  std::size_t max_depth_ = 0;
};

}  // namespace wfdiff

#endif  // WFDIFF_EXPR_HPP
