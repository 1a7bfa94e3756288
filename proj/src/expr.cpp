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

#include "wfdiff/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

namespace wfdiff {

class ExprParser {
 public:
  explicit ExprParser(std::string_view src) : src_(src) {}

  Expression run() {
    Expression e;
    e.source_ = std::string(src_);
    out_ = &e.program_;
    parse_sum();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected character");
    if (out_->empty()) fail("empty expression");
    e.max_depth_ = max_depth_;
    return e;
  }

 private:
  using Op = Expression::Op;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ExprError("expression '" + std::string(src_) + "': " + msg +
                        " at position " + std::to_string(pos_),
                    pos_);
  }

  void skip_ws() {
    while (pos_ < src_.size() &&
           std::isspace(static_cast<unsigned char>(src_[pos_]))) {
      ++pos_;
    }
  }

  bool accept(char ch) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == ch) {
      ++pos_;
      return true;
    }
    return false;
  }

  void emit(Op op, double value = 0.0) {
    out_->push_back({op, value});
    switch (op) {
      case Op::kConst:
      case Op::kVar:
        ++depth_;
        break;
      case Op::kAdd:
      case Op::kSub:
      case Op::kMul:
      case Op::kDiv:
      case Op::kPow:
        --depth_;
        break;
      default:
        break;
    }
    if (depth_ > max_depth_) max_depth_ = depth_;
  }

  void parse_sum() {
    parse_product();
    for (;;) {
      if (accept('+')) {
        parse_product();
        emit(Op::kAdd);
      } else if (accept('-')) {
        parse_product();
        emit(Op::kSub);
      } else {
        return;
      }
    }
  }

  void parse_product() {
    parse_unary();
    for (;;) {
      if (accept('*')) {
        parse_unary();
        emit(Op::kMul);
      } else if (accept('/')) {
        parse_unary();
        emit(Op::kDiv);
      } else {
        return;
      }
    }
  }

  void parse_unary() {
    if (accept('-')) {
      parse_unary();
      emit(Op::kNeg);
    } else if (accept('+')) {
      parse_unary();
    } else {
      parse_power();
    }
  }

  void parse_power() {
    parse_primary();
    if (accept('^')) {
      parse_unary();
      emit(Op::kPow);
    }
  }

  void parse_primary() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    const char ch = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
      double value = 0.0;
      const char* begin = src_.data() + pos_;
      const auto [ptr, ec] =
          std::from_chars(begin, src_.data() + src_.size(), value);
      if (ec != std::errc()) fail("malformed number");
      pos_ += static_cast<std::size_t>(ptr - begin);
      emit(Op::kConst, value);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(ch))) {
      const std::size_t start = pos_;
      while (pos_ < src_.size() &&
             std::isalnum(static_cast<unsigned char>(src_[pos_]))) {
        ++pos_;
      }
      const std::string_view name = src_.substr(start, pos_ - start);
      if (name == "x") {
        emit(Op::kVar);
        return;
      }
      Op fn;
      if (name == "sqrt") {
        fn = Op::kSqrt;
      } else if (name == "exp") {
        fn = Op::kExp;
      } else if (name == "log") {
        fn = Op::kLog;
      } else {
        pos_ = start;
        fail("unknown identifier '" + std::string(name) + "'");
      }
      if (!accept('(')) fail("expected '(' after function name");
      parse_sum();
      if (!accept(')')) fail("expected ')'");
      emit(fn);
      return;
    }
    if (accept('(')) {
      parse_sum();
      if (!accept(')')) fail("expected ')'");
      return;
    }
    fail("unexpected character");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::vector<Expression::Instr>* out_ = nullptr;
  std::size_t depth_ = 0;
  std::size_t max_depth_ = 0;
};

Expression Expression::parse(std::string_view source) {
  return ExprParser(source).run();
}

double Expression::operator()(double x) const {
  // Programs from config files are tiny; a fixed stack avoids allocation on
  // the simulation hot path.
  constexpr std::size_t kInline = 32;
  double inline_stack[kInline] = {};
  std::vector<double> heap;
  double* stack = inline_stack;
  if (max_depth_ > kInline) {
    heap.resize(max_depth_);
    stack = heap.data();
  }
  std::size_t top = 0;
  for (const Instr& in : program_) {
    switch (in.op) {
      case Op::kConst:
        stack[top++] = in.value;
        break;
      case Op::kVar:
        stack[top++] = x;
        break;
      case Op::kAdd:
        --top;
        stack[top - 1] += stack[top];
        break;
      case Op::kSub:
        --top;
        stack[top - 1] -= stack[top];
        break;
      case Op::kMul:
        --top;
        stack[top - 1] *= stack[top];
        break;
      case Op::kDiv:
        --top;
        stack[top - 1] /= stack[top];
        break;
      case Op::kPow:
        --top;
        stack[top - 1] = std::pow(stack[top - 1], stack[top]);
        break;
      case Op::kNeg:
        stack[top - 1] = -stack[top - 1];
        break;
      case Op::kSqrt:
        stack[top - 1] = std::sqrt(stack[top - 1]);
        break;
      case Op::kExp:
        stack[top - 1] = std::exp(stack[top - 1]);
        break;
      case Op::kLog:
        stack[top - 1] = std::log(stack[top - 1]);
        break;
    }
  }
  return stack[0];
}

}  // namespace wfdiff
