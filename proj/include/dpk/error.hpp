// Copyright 2026 The dpk Authors.
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

#ifndef DPK_ERROR_HPP
#define DPK_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace dpk {

/// Every failure mode raised by the library. The enumerator name is the
/// user-visible error name (see to_string).
enum class ErrorCode {
  // ingest
  MalformedLine,
  NonFiniteValue,
  SingularLattice,
  UnknownSpecies,
  DimensionMismatch,
  ImaginaryMode,
  NonOrthonormal,
  CountMismatch,
  NormalizationError,
  MissingKey,
  InvalidOccupation,
  GapInverted,
  TrailingData,
  // lineshape
  AtomCountMismatch,
  SpeciesMismatch,
  DisplacementTooLarge,
  ZeroFrequencyMode,
  SmearingNonPositive,
  GridTooCoarse,
  NegativeTemperature,
  // photophysics
  GridMismatch,
  KindMismatch,
  NonPhysicalInput,
  OrderViolation,
  // spinham
  WrongTotalSpin,
  NucleusOutsideGrid,
  ExclusionRadiusTooLarge,
  FieldTooLarge,
  // levels
  MissingChemicalPotential,
  UnknownEntry,
  SameCharge,
  LevelOutsideGap,
  // kinetics
  SelectionRuleViolation,
  NegativeRate,
  Reducible,
  NonConvergent,
  StepFailure,
  NoSuchPair,
  InvalidPopulation,
  UnknownState,
};

std::string_view to_string(ErrorCode code) noexcept;

/// True for errors raised while reading input artifacts (as opposed to
/// failures of a computation on valid input).
bool is_input_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dpk

#endif  // DPK_ERROR_HPP
