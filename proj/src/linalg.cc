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

#include "qoed/linalg.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qoed {

namespace {

double abs_value(double x) {
    return std::abs(x);
}
double abs_value(const Complex &x) {
    return std::abs(x);
}
double conj_value(double x) {
    return x;
}
Complex conj_value(const Complex &x) {
    return std::conj(x);
}

template <typename T>
double one_norm(const Matrix<T> &a) {
    double best = 0;
    for (std::size_t c = 0; c < a.cols(); ++c) {
        double col = 0;
        for (std::size_t r = 0; r < a.rows(); ++r) {
            col += abs_value(a(r, c));
        }
        best = std::max(best, col);
    }
    return best;
}

std::string shape_str(std::size_t r, std::size_t c) {
    return std::to_string(r) + "x" + std::to_string(c);
}

}  // namespace

template <typename T>
Matrix<T>::Matrix(std::initializer_list<std::initializer_list<T>> rows)
    : Matrix(rows.size(), rows.size() == 0 ? 0 : rows.begin()->size()) {
    std::size_t r = 0;
    for (const auto &row : rows) {
        if (row.size() != cols_) {
            throw ShapeError("ragged initializer list for matrix");
        }
        std::size_t c = 0;
        for (const T &v : row) {
            (*this)(r, c++) = v;
        }
        ++r;
    }
}

template <typename T>
Matrix<T> &Matrix<T>::operator+=(const Matrix &o) {
    if (o.rows_ != rows_ || o.cols_ != cols_) {
        throw ShapeError("cannot add " + shape_str(rows_, cols_) + " and " + shape_str(o.rows_, o.cols_));
    }
    for (std::size_t k = 0; k < rows_ * cols_; ++k) {
        data_[k] += o.data_[k];
    }
    return *this;
}

template <typename T>
Matrix<T> &Matrix<T>::operator-=(const Matrix &o) {
    if (o.rows_ != rows_ || o.cols_ != cols_) {
        throw ShapeError("cannot subtract " + shape_str(o.rows_, o.cols_) + " from " + shape_str(rows_, cols_));
    }
    for (std::size_t k = 0; k < rows_ * cols_; ++k) {
        data_[k] -= o.data_[k];
    }
    return *this;
}

template <typename T>
double Matrix<T>::max_abs() const {
    double m = 0;
    for (std::size_t k = 0; k < rows_ * cols_; ++k) {
        m = std::max(m, abs_value(data_[k]));
    }
    return m;
}

template <typename T>
Matrix<T> matmul(const Matrix<T> &a, const Matrix<T> &b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul of " + shape_str(a.rows(), a.cols()) + " by " + shape_str(b.rows(), b.cols()));
    }
    Matrix<T> out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const T aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) {
                out(i, j) += aik * b(k, j);
            }
        }
    }
    return out;
}

template <typename T>
Matrix<T> kron(const Matrix<T> &a, const Matrix<T> &b) {
    const std::size_t p = b.rows();
    const std::size_t q = b.cols();
    Matrix<T> out(a.rows() * p, a.cols() * q);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            for (std::size_t k = 0; k < p; ++k) {
                for (std::size_t l = 0; l < q; ++l) {
                    out(i * p + k, j * q + l) = a(i, j) * b(k, l);
                }
            }
        }
    }
    return out;
}

template <typename T>
Matrix<T> dagger(const Matrix<T> &a) {
    Matrix<T> out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            out(j, i) = conj_value(a(i, j));
        }
    }
    return out;
}

template <typename T>
T trace(const Matrix<T> &a) {
    if (!a.is_square()) {
        throw ShapeError("trace of non-square " + shape_str(a.rows(), a.cols()));
    }
    T s{};
    for (std::size_t i = 0; i < a.rows(); ++i) {
        s += a(i, i);
    }
    return s;
}

double trace_real(const ComplexMatrix &a, double tol) {
    Complex t = trace(a);
    if (std::abs(t.imag()) > tol) {
        throw NonRealTraceError("trace has imaginary part " + std::to_string(t.imag()));
    }
    return t.real();
}

Complex trace_of_product(const ComplexMatrix &a, const ComplexMatrix &b) {
    if (a.cols() != b.rows() || a.rows() != b.cols()) {
        throw ShapeError("trace_of_product shape mismatch");
    }
    Complex s{};
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            s += a(i, k) * b(k, i);
        }
    }
    return s;
}

template <typename T>
HermitianCheckReport hermitian_check(const Matrix<T> &a) {
    if (!a.is_square()) {
        throw ShapeError("hermitian_check of non-square " + shape_str(a.rows(), a.cols()));
    }
    HermitianCheckReport r;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = i; j < a.cols(); ++j) {
            r.max_asymmetry = std::max(r.max_asymmetry, abs_value(a(i, j) - conj_value(a(j, i))));
        }
    }
    return r;
}

std::vector<double> sym_eigvals(const ComplexMatrix &input, double herm_tol) {
    auto report = hermitian_check(input);
    if (!report.is_hermitian_at(herm_tol)) {
        throw PreconditionError("sym_eigvals: matrix is not Hermitian (max asymmetry " +
                                std::to_string(report.max_asymmetry) + ")");
    }
    const std::size_t n = input.rows();
    ComplexMatrix a = input;
    for (std::size_t i = 0; i < n; ++i) {
        a(i, i) = a(i, i).real();
        for (std::size_t j = i + 1; j < n; ++j) {
            Complex avg = 0.5 * (a(i, j) + std::conj(a(j, i)));
            a(i, j) = avg;
            a(j, i) = std::conj(avg);
        }
    }
    const double scale = std::max(a.max_abs(), std::numeric_limits<double>::min());

    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                off += std::norm(a(p, q));
            }
        }
        if (std::sqrt(off) <= 1e-17 * scale) {
            break;
        }
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double mag = std::abs(a(p, q));
                if (mag <= 1e-300 || mag <= 1e-19 * scale) {
                    a(p, q) = 0;
                    a(q, p) = 0;
                    continue;
                }
                // Rotate a(p,q) onto the positive real axis, then apply a real Jacobi rotation.
                const Complex ph = a(p, q) / mag;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double theta = (aqq - app) / (2 * mag);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
                const double c = 1 / std::sqrt(t * t + 1);
                const double s = t * c;
                const Complex cph = std::conj(ph);
                for (std::size_t r = 0; r < n; ++r) {
                    const Complex arp = a(r, p);
                    const Complex arq = a(r, q);
                    a(r, p) = c * arp - s * cph * arq;
                    a(r, q) = s * arp + c * cph * arq;
                }
                for (std::size_t r = 0; r < n; ++r) {
                    const Complex apr = a(p, r);
                    const Complex aqr = a(q, r);
                    a(p, r) = c * apr - s * ph * aqr;
                    a(q, r) = s * apr + c * ph * aqr;
                }
                a(p, q) = 0;
                a(q, p) = 0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
            }
        }
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = a(i, i).real();
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> sym_eigvals(const RealMatrix &a, double herm_tol) {
    return sym_eigvals(to_complex(a), herm_tol);
}

template <typename T>
Matrix<T> inverse_small(const Matrix<T> &a, double max_condition) {
    if (!a.is_square()) {
        throw ShapeError("inverse of non-square " + shape_str(a.rows(), a.cols()));
    }
    const std::size_t n = a.rows();
    Matrix<T> work = a;
    Matrix<T> inv = Matrix<T>::identity(n);
    const double scale = a.max_abs();
    double min_pivot = std::numeric_limits<double>::infinity();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        double best = abs_value(work(col, col));
        for (std::size_t r = col + 1; r < n; ++r) {
            double v = abs_value(work(r, col));
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        min_pivot = std::min(min_pivot, best);
        if (best == 0 || best <= 1e-15 * scale) {
            throw SingularMatrixError("inverse_small: vanishing pivot " + std::to_string(best), best);
        }
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) {
                std::swap(work(col, c), work(piv, c));
                std::swap(inv(col, c), inv(piv, c));
            }
        }
        const T d = work(col, col);
        for (std::size_t c = 0; c < n; ++c) {
            work(col, c) /= d;
            inv(col, c) /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) {
                continue;
            }
            const T f = work(r, col);
            if (f == T{}) {
                continue;
            }
            for (std::size_t c = 0; c < n; ++c) {
                work(r, c) -= f * work(col, c);
                inv(r, c) -= f * inv(col, c);
            }
        }
    }
    const double cond = one_norm(a) * one_norm(inv);
    if (!(cond <= max_condition)) {
        throw SingularMatrixError("inverse_small: condition estimate " + std::to_string(cond) + " exceeds limit",
                                  min_pivot);
    }
    return inv;
}

template <typename T>
double max_abs_diff(const Matrix<T> &a, const Matrix<T> &b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ShapeError("max_abs_diff of " + shape_str(a.rows(), a.cols()) + " and " + shape_str(b.rows(), b.cols()));
    }
    double m = 0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            m = std::max(m, abs_value(a(i, j) - b(i, j)));
        }
    }
    return m;
}

RealMatrix real_part(const ComplexMatrix &a) {
    RealMatrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            out(i, j) = a(i, j).real();
        }
    }
    return out;
}

ComplexMatrix to_complex(const RealMatrix &a) {
    ComplexMatrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            out(i, j) = a(i, j);
        }
    }
    return out;
}

ComplexMatrix pauli_x() {
    return ComplexMatrix{{0, 1}, {1, 0}};
}
ComplexMatrix pauli_y() {
    return ComplexMatrix{{0, Complex(0, -1)}, {Complex(0, 1), 0}};
}
ComplexMatrix pauli_z() {
    return ComplexMatrix{{1, 0}, {0, -1}};
}

template class Matrix<double>;
template class Matrix<Complex>;
template Matrix<double> matmul(const Matrix<double> &, const Matrix<double> &);
template Matrix<Complex> matmul(const Matrix<Complex> &, const Matrix<Complex> &);
template Matrix<double> kron(const Matrix<double> &, const Matrix<double> &);
template Matrix<Complex> kron(const Matrix<Complex> &, const Matrix<Complex> &);
template Matrix<double> dagger(const Matrix<double> &);
template Matrix<Complex> dagger(const Matrix<Complex> &);
template double trace(const Matrix<double> &);
template Complex trace(const Matrix<Complex> &);
template HermitianCheckReport hermitian_check(const Matrix<double> &);
template HermitianCheckReport hermitian_check(const Matrix<Complex> &);
template Matrix<double> inverse_small(const Matrix<double> &, double);
template Matrix<Complex> inverse_small(const Matrix<Complex> &, double);
template double max_abs_diff(const Matrix<double> &, const Matrix<double> &);
template double max_abs_diff(const Matrix<Complex> &, const Matrix<Complex> &);

}  // namespace qoed
