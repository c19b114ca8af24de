// Copyright 2026 The qoed Authors
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

#ifndef QOED_ERRORS_H
#define QOED_ERRORS_H

#include <stdexcept>
#include <string>

namespace qoed {

/// Violated argument contract (bad lengths, negative weights, unknown ids, ...).
struct ContractError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Matrix dimensions incompatible with the requested operation.
struct ShapeError : ContractError {
    using ContractError::ContractError;
};

/// Input is not Hermitian/symmetric where the operation requires it.
struct PreconditionError : ContractError {
    using ContractError::ContractError;
};

/// Bloch vector outside the unit ball, or a measurement axis that is not unit norm.
struct InvalidStateError : ContractError {
    using ContractError::ContractError;
};

/// Scalar argument outside its documented range.
struct RangeError : ContractError {
    using ContractError::ContractError;
};

/// Base for failures caused by the numbers rather than by the call.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Trace expected to be real has an imaginary part above tolerance.
struct NonRealTraceError : NumericError {
    using NumericError::NumericError;
};

/// Elimination hit a vanishing pivot or the condition estimate is too large.
struct SingularMatrixError : NumericError {
    SingularMatrixError(const std::string &what, double pivot) : NumericError(what), pivot_magnitude(pivot) {
    }
    double pivot_magnitude;
};

/// Born-rule probability escaped [0, 1] by more than roundoff.
struct NumericalIntegrityError : NumericError {
    using NumericError::NumericError;
};

/// The design/Fisher information cannot identify every free parameter.
struct NotEstimableError : NumericError {
    using NumericError::NumericError;
};

/// Nelder-Mead asked to start from a point with non-finite likelihood.
struct InvalidStartError : NumericError {
    using NumericError::NumericError;
};

/// Landscape with no usable cells.
struct EmptyLandscapeError : NumericError {
    using NumericError::NumericError;
};

}  // namespace qoed

#endif  // QOED_ERRORS_H
