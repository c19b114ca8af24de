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

#ifndef QOED_LINALG_H
#define QOED_LINALG_H

#include <array>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "qoed/errors.h"

namespace qoed {

using Complex = std::complex<double>;

/// Default tolerances. Every operation that compares takes the tolerance as an argument;
/// these are only the values used when the caller does not pass one.
inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kInverseResidualTol = 1e-9;
inline constexpr double kMaxConditionEstimate = 1e12;

/// Dense row-major matrix with inline storage for at most 8x8 entries.
///
/// The artifact only ever handles two-qubit operators (4x4), single-qubit
/// operators (2x2) and small parameter-space blocks (up to 2p x 2p with p <= 4),
/// so everything lives on the stack and no allocation happens in hot loops.
template <typename T>
class Matrix {
   public:
    static constexpr std::size_t kMaxDim = 8;

    Matrix() : Matrix(1, 1) {
    }
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
        if (rows == 0 || cols == 0 || rows > kMaxDim || cols > kMaxDim) {
            throw ShapeError(
                "matrix dimensions must be in [1, 8], got " + std::to_string(rows) + "x" + std::to_string(cols));
        }
        data_.fill(T{});
    }
    Matrix(std::initializer_list<std::initializer_list<T>> rows);

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = T{1};
        }
        return m;
    }
    static Matrix diagonal(std::span<const T> values) {
        Matrix m(values.size(), values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            m(i, i) = values[i];
        }
        return m;
    }
    static Matrix diagonal(std::initializer_list<T> values) {
        return diagonal(std::span<const T>(values.begin(), values.size()));
    }

    std::size_t rows() const {
        return rows_;
    }
    std::size_t cols() const {
        return cols_;
    }
    bool is_square() const {
        return rows_ == cols_;
    }

    T &operator()(std::size_t r, std::size_t c) {
        return data_[r * cols_ + c];
    }
    const T &operator()(std::size_t r, std::size_t c) const {
        return data_[r * cols_ + c];
    }

    Matrix &operator+=(const Matrix &o);
    Matrix &operator-=(const Matrix &o);
    Matrix &operator*=(T s) {
        for (std::size_t k = 0; k < rows_ * cols_; ++k) {
            data_[k] *= s;
        }
        return *this;
    }
    friend Matrix operator+(Matrix a, const Matrix &b) {
        return a += b;
    }
    friend Matrix operator-(Matrix a, const Matrix &b) {
        return a -= b;
    }
    friend Matrix operator*(Matrix a, T s) {
        return a *= s;
    }
    friend Matrix operator*(T s, Matrix a) {
        return a *= s;
    }

    /// Largest absolute entry.
    double max_abs() const;

   private:
    std::size_t rows_;
    std::size_t cols_;
    std::array<T, kMaxDim * kMaxDim> data_;
};

using ComplexMatrix = Matrix<Complex>;
using RealMatrix = Matrix<double>;

/// Result of scanning a square matrix for (anti-)Hermiticity.
struct HermitianCheckReport {
    double max_asymmetry = 0;  ///< max |A[i][j] - conj(A[j][i])|
    bool is_hermitian_at(double tol) const {
        return max_asymmetry <= tol;
    }
};

template <typename T>
Matrix<T> matmul(const Matrix<T> &a, const Matrix<T> &b);

/// Kronecker product; result[(i*p+k),(j*q+l)] = a[i][j] * b[k][l].
template <typename T>
Matrix<T> kron(const Matrix<T> &a, const Matrix<T> &b);

/// Conjugate transpose (plain transpose for real matrices).
template <typename T>
Matrix<T> dagger(const Matrix<T> &a);

template <typename T>
T trace(const Matrix<T> &a);

/// Real part of the trace; throws NonRealTraceError if |Im Tr a| > tol.
double trace_real(const ComplexMatrix &a, double tol = kHermitianTol);

/// Tr(a b) without forming the product.
Complex trace_of_product(const ComplexMatrix &a, const ComplexMatrix &b);

template <typename T>
HermitianCheckReport hermitian_check(const Matrix<T> &a);

/// Eigenvalues of a Hermitian matrix, ascending, by cyclic Jacobi rotations.
/// Throws PreconditionError if the input is not Hermitian within `herm_tol`.
std::vector<double> sym_eigvals(const ComplexMatrix &a, double herm_tol = kHermitianTol);
std::vector<double> sym_eigvals(const RealMatrix &a, double herm_tol = kHermitianTol);

/// Inverse by Gauss-Jordan elimination with partial pivoting.
/// Throws SingularMatrixError if a pivot vanishes or the 1-norm condition
/// estimate exceeds `max_condition`.
template <typename T>
Matrix<T> inverse_small(const Matrix<T> &a, double max_condition = kMaxConditionEstimate);

/// max |a - b| entrywise; ShapeError if the shapes differ.
template <typename T>
double max_abs_diff(const Matrix<T> &a, const Matrix<T> &b);

template <typename T>
bool approx_equal(const Matrix<T> &a, const Matrix<T> &b, double tol) {
    return a.rows() == b.rows() && a.cols() == b.cols() && max_abs_diff(a, b) <= tol;
}

/// Real part of every entry.
RealMatrix real_part(const ComplexMatrix &a);
ComplexMatrix to_complex(const RealMatrix &a);

/// Pauli matrices.
ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();

}  // namespace qoed

#endif  // QOED_LINALG_H
