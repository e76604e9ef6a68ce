// Copyright 2026 The avcqc Authors
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

#include <stdexcept>
#include <string>
#include <string_view>

namespace avcqc {

enum class ErrorKind {
  NotSquare,
  NotHermitian,
  NotPositive,
  TraceNotOne,
  InvalidDistribution,
  InvalidJoint,
  DimensionMismatch,
  BadSubsystemIndex,
  AlphabetMismatch,
  LengthMismatch,
  DimOverflow,
  EnumerationOverflow,
  SolverDiverged,
  NonBinarySource,
  ZeroMutualInformation,
  Indeterminate,
  EmptyGrid,
  KeySetMismatch,
  ProfileOutOfRange,
  InvalidCode,
  InvalidArgument,
  SpecParseError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a machine-readable kind and a
/// message naming the violated bound.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotSquare:
      return "NotSquare";
    case ErrorKind::NotHermitian:
      return "NotHermitian";
    case ErrorKind::NotPositive:
      return "NotPositive";
    case ErrorKind::TraceNotOne:
      return "TraceNotOne";
    case ErrorKind::InvalidDistribution:
      return "InvalidDistribution";
    case ErrorKind::InvalidJoint:
      return "InvalidJoint";
    case ErrorKind::DimensionMismatch:
      return "DimensionMismatch";
    case ErrorKind::BadSubsystemIndex:
      return "BadSubsystemIndex";
    case ErrorKind::AlphabetMismatch:
      return "AlphabetMismatch";
    case ErrorKind::LengthMismatch:
      return "LengthMismatch";
    case ErrorKind::DimOverflow:
      return "DimOverflow";
    case ErrorKind::EnumerationOverflow:
      return "EnumerationOverflow";
    case ErrorKind::SolverDiverged:
      return "SolverDiverged";
    case ErrorKind::NonBinarySource:
      return "NonBinarySource";
    case ErrorKind::ZeroMutualInformation:
      return "ZeroMutualInformation";
    case ErrorKind::Indeterminate:
      return "Indeterminate";
    case ErrorKind::EmptyGrid:
      return "EmptyGrid";
    case ErrorKind::KeySetMismatch:
      return "KeySetMismatch";
    case ErrorKind::ProfileOutOfRange:
      return "ProfileOutOfRange";
    case ErrorKind::InvalidCode:
      return "InvalidCode";
    case ErrorKind::InvalidArgument:
      return "InvalidArgument";
    case ErrorKind::SpecParseError:
      return "SpecParseError";
  }
  return "Unknown";
}

}  // namespace avcqc
