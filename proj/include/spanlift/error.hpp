// Copyright 2026 The spanlift Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace spanlift {

enum class Err {
  kInvalidParam,
  kDomainMismatch,
  kShapeError,
  kNumericLimitDiverged,
  kUnsupportedPair,
  kUnsupportedProperty,
  kInvalidPartition,
  kInvalidGrid,
  kUndefinedLoss,
  kSyntaxError,
  kTypeMismatch,
  kUnboundVariable,
  kGuardNotBool,
  kBadTag,
  kMissingGrid,
  kFuelExhausted,
  kBadGradeArithmetic,
  kSideConditionFailed,
  kEntailmentUnknownStrict,
  kShapeMismatch,
  kMarginalMismatch,
  kDivergenceExceeded,
  kSupportViolation,
  kPreconditionViolated,
  kFlavorMismatch,
  kUnsupportedDirection,
  kUnsupportedFlavor,
  kUnsupportedRule,
  kBadProof,
  kIoError,
};

inline const char* err_name(Err e) {
  switch (e) {
    case Err::kInvalidParam: return "INVALID_PARAM";
    case Err::kDomainMismatch: return "DOMAIN_MISMATCH";
    case Err::kShapeError: return "SHAPE_ERROR";
    case Err::kNumericLimitDiverged: return "NUMERIC_LIMIT_DIVERGED";
    case Err::kUnsupportedPair: return "UNSUPPORTED_PAIR";
    case Err::kUnsupportedProperty: return "UNSUPPORTED_PROPERTY";
    case Err::kInvalidPartition: return "INVALID_PARTITION";
    case Err::kInvalidGrid: return "INVALID_GRID";
    case Err::kUndefinedLoss: return "UNDEFINED_LOSS";
    case Err::kSyntaxError: return "SYNTAX_ERROR";
    case Err::kTypeMismatch: return "TYPE_MISMATCH";
    case Err::kUnboundVariable: return "UNBOUND_VARIABLE";
    case Err::kGuardNotBool: return "GUARD_NOT_BOOL";
    case Err::kBadTag: return "BAD_TAG";
    case Err::kMissingGrid: return "MISSING_GRID";
    case Err::kFuelExhausted: return "FUEL_EXHAUSTED";
    case Err::kBadGradeArithmetic: return "BAD_GRADE_ARITHMETIC";
    case Err::kSideConditionFailed: return "SIDE_CONDITION_FAILED";
    case Err::kEntailmentUnknownStrict: return "ENTAILMENT_UNKNOWN_STRICT";
    case Err::kShapeMismatch: return "SHAPE_MISMATCH";
    case Err::kMarginalMismatch: return "MARGINAL_MISMATCH";
    case Err::kDivergenceExceeded: return "DIVERGENCE_EXCEEDED";
    case Err::kSupportViolation: return "SUPPORT_VIOLATION";
    case Err::kPreconditionViolated: return "PRECONDITION_VIOLATED";
    case Err::kFlavorMismatch: return "FLAVOR_MISMATCH";
    case Err::kUnsupportedDirection: return "UNSUPPORTED_DIRECTION";
    case Err::kUnsupportedFlavor: return "UNSUPPORTED_FLAVOR";
    case Err::kUnsupportedRule: return "UNSUPPORTED_RULE";
    case Err::kBadProof: return "BAD_PROOF";
    case Err::kIoError: return "IO_ERROR";
  }
  return "UNKNOWN";
}

// All recoverable failures are reported through this type. The code is the
// stable, machine-readable part; the message is for humans. line/col are
// meaningful only for kSyntaxError.
class Error : public std::runtime_error {
 public:
  Error(Err code, std::string msg, int line = -1, int col = -1)
      : std::runtime_error(std::string(err_name(code)) + ": " + msg),
        code_(code),
        line_(line),
        col_(col) {}

  Err code() const { return code_; }
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  Err code_;
  int line_;
  int col_;
};

[[noreturn]] inline void fail(Err code, const std::string& msg, int line = -1,
                              int col = -1) {
  throw Error(code, msg, line, col);
}

}  // namespace spanlift
