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

#ifndef QOED_MODEL_H
#define QOED_MODEL_H

#include <array>
#include <cstddef>
#include <vector>

#include "qoed/linalg.h"

namespace qoed {

/// Which propagator the outcome probabilities are computed with.
///
/// kInteraction is the time-ordered exponential of the rotating-frame coupling
/// Hamiltonian  G zz + (F e^{2i dw t} s+ s- + h.c.); its closed form is
/// frame_phase(t) * unitary_closed(t). kCorotating is unitary_closed alone, i.e.
/// the same dynamics observed in a frame that co-rotates with the detuning.
enum class Frame { kInteraction, kCorotating };

enum class Param : std::size_t { kF = 0, kG = 1, kDeltaOmega = 2 };

/// Coupling parameters (F, G) plus detuning delta_omega, in units where delta_omega ~ 1 and hbar = 1.
struct ModelParams {
    double f = 1.0;
    double g = 1.0;
    double delta_omega = 1.0;
    /// Which of (F, G, delta_omega) are estimation targets. Default: F and G.
    std::array<bool, 3> free_mask{true, true, false};
    Frame frame = Frame::kInteraction;

    /// sqrt(F^2 + delta_omega^2).
    double omega() const;
    std::size_t free_count() const;
    double get(Param p) const;
    void set(Param p, double value);
    /// Free parameters in (F, G, delta_omega) order.
    std::vector<Param> free_params() const;
    std::vector<double> free_values() const;
    ModelParams with_free_values(const std::vector<double> &values) const;
    ModelParams with_fg(double f_value, double g_value) const;
};

/// U(t) together with the point it was evaluated at.
struct Propagator {
    ComplexMatrix u{4, 4};
    double t = 0;
    ModelParams params;
};

/// Closed-form propagator in the detuning-co-rotating frame, basis {uu, ud, du, dd}:
///   diag block e^{-iGt} on uu and dd, and on {ud, du}
///   e^{-i(dw-G)t} [[cos - i dw sin/W, -i F sin/W], [-i F sin/W, cos + i dw sin/W]],  W = omega().
/// sin(Wt)/W falls back to its series when |Wt| < 1e-6.
Propagator unitary_closed(const ModelParams &params, double t);

/// Diagonal frame change diag(1, e^{2i dw t}, 1, 1) that maps unitary_closed onto the
/// interaction-picture propagator.
ComplexMatrix frame_phase(const ModelParams &params, double t);

/// Interaction-picture propagator T exp(-i int_0^t H_I), closed form.
Propagator unitary_interaction(const ModelParams &params, double t);

/// Dispatches on params.frame.
Propagator propagate(const ModelParams &params, double t);

/// Time-independent generator of unitary_closed: exp(-i H t) = unitary_closed(t).
ComplexMatrix effective_hamiltonian(const ModelParams &params);

/// Rotating-frame coupling Hamiltonian at time t (time dependent through e^{2i dw t}).
ComplexMatrix interaction_hamiltonian(const ModelParams &params, double t);

/// RK4 integration of dU/dt = -i H_eff U from U(0) = I. steps >= 100.
Propagator unitary_numeric(const ModelParams &params, double t, std::size_t steps);

/// RK4 integration of dU/dt = -i H_I(t) U from U(0) = I. steps >= 100.
Propagator unitary_interaction_numeric(const ModelParams &params, double t, std::size_t steps);

/// sin(x t)/x with the x -> 0 limit handled by its Taylor series.
double sinc_t(double x, double t);

}  // namespace qoed

#endif  // QOED_MODEL_H
