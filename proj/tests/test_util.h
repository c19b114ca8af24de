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

#ifndef QOED_TEST_UTIL_H
#define QOED_TEST_UTIL_H

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>
#include <vector>

#include "qoed/fisher.h"
#include "qoed/linalg.h"
#include "qoed/menu.h"
#include "qoed/model.h"

namespace qoed::testing {

using EMat = Eigen::MatrixXcd;
using EVec = Eigen::VectorXcd;

inline EMat to_eigen(const ComplexMatrix &m) {
    EMat out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            out(i, j) = m(i, j);
        }
    }
    return out;
}

inline ComplexMatrix from_eigen(const EMat &m) {
    ComplexMatrix out(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            out(i, j) = m(i, j);
        }
    }
    return out;
}

inline ComplexMatrix random_matrix(std::mt19937_64 &rng, std::size_t r, std::size_t c) {
    std::normal_distribution<double> n;
    ComplexMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < c; ++j) {
            m(i, j) = Complex(n(rng), n(rng));
        }
    }
    return m;
}

inline ComplexMatrix random_hermitian(std::mt19937_64 &rng, std::size_t n) {
    const ComplexMatrix a = random_matrix(rng, n, n);
    return (a + dagger(a)) * Complex(0.5);
}

inline RealMatrix random_spd(std::mt19937_64 &rng, std::size_t n, double ridge = 0.1) {
    std::normal_distribution<double> g;
    RealMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            a(i, j) = g(rng);
        }
    }
    RealMatrix out = matmul(a, dagger(a));
    for (std::size_t i = 0; i < n; ++i) {
        out(i, i) += ridge;
    }
    return out;
}

/// Single-qubit pure state cos(polar/2)|0> + e^{i azimuth} sin(polar/2)|1>.
inline EVec ket(BlochAngles a) {
    EVec v(2);
    v << std::cos(a.polar / 2), std::exp(Complex(0, a.azimuth)) * std::sin(a.polar / 2);
    return v;
}

inline EVec kron_vec(const EVec &a, const EVec &b) {
    EVec out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        for (Eigen::Index j = 0; j < b.size(); ++j) {
            out(i * b.size() + j) = a(i) * b(j);
        }
    }
    return out;
}

/// Time-ordered propagator of the printed interaction-picture Hamiltonian,
/// built from many short exact exponentials of the midpoint Hamiltonian.
inline EMat interaction_propagator_oracle(const ModelParams &p, double t, int steps = 4000) {
    EMat u = EMat::Identity(4, 4);
    const double dt = t / steps;
    for (int k = 0; k < steps; ++k) {
        const double tm = (k + 0.5) * dt;
        EMat h = EMat::Zero(4, 4);
        h(0, 0) = p.g;
        h(1, 1) = -p.g;
        h(2, 2) = -p.g;
        h(3, 3) = p.g;
        h(1, 2) = p.f * std::exp(Complex(0, 2 * p.delta_omega * tm));
        h(2, 1) = std::conj(h(1, 2));
        const EMat step = (Complex(0, -dt) * h).exp();
        u = step * u;
    }
    return u;
}

/// Outcome probabilities of a pure product experiment from state vectors (projective POVM).
inline std::array<double, 4> pure_probs_oracle(const Experiment &e, const EMat &u) {
    const EVec psi = u * kron_vec(ket(e.prep_angles[0]), ket(e.prep_angles[1]));
    std::array<double, 4> out{};
    for (int s1 = 0; s1 < 2; ++s1) {
        for (int s2 = 0; s2 < 2; ++s2) {
            auto axis = [&](int q, int s) {
                BlochAngles a = e.meas_angles[q];
                if (s == 1) {  // antipode
                    a = {std::numbers::pi - a.polar, a.azimuth + std::numbers::pi};
                }
                return ket(a);
            };
            const EVec m = kron_vec(axis(0, s1), axis(1, s2));
            out[2 * s1 + s2] = std::norm(m.dot(psi));
        }
    }
    return out;
}

/// Fisher matrix over (F, G) from the oracle propagator, central differences with step h.
inline RealMatrix fisher_oracle(const Experiment &e, const ModelParams &p, double h = 1e-5) {
    auto probs = [&](double f, double g) {
        return pure_probs_oracle(e, interaction_propagator_oracle(p.with_fg(f, g), e.t));
    };
    const auto base = probs(p.f, p.g);
    const auto fp = probs(p.f + h, p.g);
    const auto fm = probs(p.f - h, p.g);
    const auto gp = probs(p.f, p.g + h);
    const auto gm = probs(p.f, p.g - h);
    RealMatrix out(2, 2);
    for (int i = 0; i < 4; ++i) {
        const double df = (fp[i] - fm[i]) / (2 * h);
        const double dg = (gp[i] - gm[i]) / (2 * h);
        if (base[i] <= 1e-12) {
            continue;
        }
        out(0, 0) += df * df / base[i];
        out(0, 1) += df * dg / base[i];
        out(1, 1) += dg * dg / base[i];
    }
    out(1, 0) = out(0, 1);
    return out;
}

}  // namespace qoed::testing

#endif  // QOED_TEST_UTIL_H
