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

#include "qoed/model.h"

#include <cmath>

namespace qoed {

double ModelParams::omega() const {
    return std::hypot(f, delta_omega);
}

std::size_t ModelParams::free_count() const {
    std::size_t n = 0;
    for (bool b : free_mask) {
        n += b ? 1 : 0;
    }
    return n;
}

double ModelParams::get(Param p) const {
    switch (p) {
        case Param::kF:
            return f;
        case Param::kG:
            return g;
        case Param::kDeltaOmega:
            return delta_omega;
    }
    return 0;
}

void ModelParams::set(Param p, double value) {
    switch (p) {
        case Param::kF:
            f = value;
            break;
        case Param::kG:
            g = value;
            break;
        case Param::kDeltaOmega:
            delta_omega = value;
            break;
    }
}

std::vector<Param> ModelParams::free_params() const {
    std::vector<Param> out;
    for (std::size_t k = 0; k < 3; ++k) {
        if (free_mask[k]) {
            out.push_back(static_cast<Param>(k));
        }
    }
    return out;
}

std::vector<double> ModelParams::free_values() const {
    std::vector<double> out;
    for (Param p : free_params()) {
        out.push_back(get(p));
    }
    return out;
}

ModelParams ModelParams::with_free_values(const std::vector<double> &values) const {
    auto params = free_params();
    if (values.size() != params.size()) {
        throw ContractError("with_free_values: expected " + std::to_string(params.size()) + " values");
    }
    ModelParams out = *this;
    for (std::size_t k = 0; k < params.size(); ++k) {
        out.set(params[k], values[k]);
    }
    return out;
}

ModelParams ModelParams::with_fg(double f_value, double g_value) const {
    ModelParams out = *this;
    out.f = f_value;
    out.g = g_value;
    return out;
}

double sinc_t(double x, double t) {
    const double xt = x * t;
    if (std::abs(xt) < 1e-6) {
        return t * (1 - xt * xt / 6);
    }
    return std::sin(xt) / x;
}

Propagator unitary_closed(const ModelParams &params, double t) {
    const double f = params.f;
    const double g = params.g;
    const double dw = params.delta_omega;
    const double w = params.omega();
    const double s = sinc_t(w, t);
    const double c = std::cos(w * t);
    const Complex i(0, 1);
    const Complex outer = std::exp(-i * g * t);
    const Complex mid = std::exp(-i * (dw - g) * t);

    Propagator p;
    p.t = t;
    p.params = params;
    ComplexMatrix &u = p.u;
    u(0, 0) = outer;
    u(3, 3) = outer;
    u(1, 1) = mid * (c - i * dw * s);
    u(2, 2) = mid * (c + i * dw * s);
    u(1, 2) = -i * f * mid * s;
    u(2, 1) = -i * f * mid * s;
    return p;
}

ComplexMatrix frame_phase(const ModelParams &params, double t) {
    const Complex i(0, 1);
    return ComplexMatrix::diagonal({1, std::exp(2.0 * i * params.delta_omega * t), 1, 1});
}

Propagator unitary_interaction(const ModelParams &params, double t) {
    Propagator p = unitary_closed(params, t);
    // frame_phase is diagonal: only row 1 picks up the phase.
    const Complex ph = std::exp(Complex(0, 2.0 * params.delta_omega * t));
    for (std::size_t c = 0; c < 4; ++c) {
        p.u(1, c) *= ph;
    }
    return p;
}

Propagator propagate(const ModelParams &params, double t) {
    return params.frame == Frame::kInteraction ? unitary_interaction(params, t) : unitary_closed(params, t);
}

ComplexMatrix effective_hamiltonian(const ModelParams &params) {
    const double f = params.f;
    const double g = params.g;
    const double dw = params.delta_omega;
    return ComplexMatrix{{g, 0, 0, 0}, {0, 2 * dw - g, f, 0}, {0, f, -g, 0}, {0, 0, 0, g}};
}

ComplexMatrix interaction_hamiltonian(const ModelParams &params, double t) {
    const double f = params.f;
    const double g = params.g;
    const Complex e = std::exp(Complex(0, 2.0 * params.delta_omega * t));
    return ComplexMatrix{{g, 0, 0, 0}, {0, -g, f * e, 0}, {0, f * std::conj(e), -g, 0}, {0, 0, 0, g}};
}

namespace {

template <typename HamiltonianAt>
ComplexMatrix rk4(HamiltonianAt &&h_at, double t, std::size_t steps) {
    if (steps < 100) {
        throw RangeError("RK4 propagator needs at least 100 steps");
    }
    ComplexMatrix u = ComplexMatrix::identity(4);
    if (t == 0) {
        return u;
    }
    const double dt = t / static_cast<double>(steps);
    const Complex mi(0, -1);
    auto deriv = [&](double time, const ComplexMatrix &y) { return matmul(h_at(time), y) * mi; };
    for (std::size_t k = 0; k < steps; ++k) {
        const double t0 = dt * static_cast<double>(k);
        ComplexMatrix k1 = deriv(t0, u);
        ComplexMatrix k2 = deriv(t0 + dt / 2, u + k1 * Complex(dt / 2));
        ComplexMatrix k3 = deriv(t0 + dt / 2, u + k2 * Complex(dt / 2));
        ComplexMatrix k4 = deriv(t0 + dt, u + k3 * Complex(dt));
        u += (k1 + k2 * Complex(2) + k3 * Complex(2) + k4) * Complex(dt / 6);
    }
    return u;
}

}  // namespace

Propagator unitary_numeric(const ModelParams &params, double t, std::size_t steps) {
    const ComplexMatrix h = effective_hamiltonian(params);
    Propagator p;
    p.t = t;
    p.params = params;
    p.u = rk4([&](double) -> const ComplexMatrix & { return h; }, t, steps);
    return p;
}

Propagator unitary_interaction_numeric(const ModelParams &params, double t, std::size_t steps) {
    Propagator p;
    p.t = t;
    p.params = params;
    p.u = rk4([&](double time) { return interaction_hamiltonian(params, time); }, t, steps);
    return p;
}

}  // namespace qoed
