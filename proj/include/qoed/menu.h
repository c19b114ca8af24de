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

#ifndef QOED_MENU_H
#define QOED_MENU_H

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "qoed/linalg.h"

namespace qoed {

/// Polar angle phi (from +z) and azimuth theta of a point on the Bloch sphere;
/// |psi> = cos(phi/2)|up> + e^{i theta} sin(phi/2)|down>.
struct BlochAngles {
    double polar = 0;
    double azimuth = 0;
};

struct BlochVector {
    double x = 0;
    double y = 0;
    double z = 0;

    static BlochVector from_angles(BlochAngles a);
    double norm() const;
    BlochVector scaled(double s) const {
        return {x * s, y * s, z * s};
    }
    BlochVector operator-() const {
        return {-x, -y, -z};
    }
    friend bool operator==(const BlochVector &, const BlochVector &) = default;
};

/// Single-qubit operator (I + s v.sigma)/2.
ComplexMatrix bloch_operator(const BlochVector &v, double sign = 1.0);

/// One probe configuration: product preparation, product two-outcome-per-qubit
/// measurement and an evolution time.
///
/// Angles are the canonical representation (they are what menu files store);
/// the vectors are derived from them once at construction. prep_scale and
/// meas_scale are the (1 - eps) contractions applied by apply_gate_error.
struct Experiment {
    std::size_t id = 0;
    std::array<BlochAngles, 2> prep_angles{};
    std::array<BlochAngles, 2> meas_angles{};
    double t = 1.0;
    double prep_scale = 1.0;
    double meas_scale = 1.0;

    std::array<BlochVector, 2> prep{};       ///< includes prep_scale
    std::array<BlochVector, 2> meas_axes{};  ///< unit norm

    static Experiment make(std::size_t id, std::array<BlochAngles, 2> prep, std::array<BlochAngles, 2> meas, double t,
                           double prep_scale = 1.0, double meas_scale = 1.0);

    ComplexMatrix initial_state() const;
    /// M1..M4 in the order (++, +-, -+, --).
    std::array<ComplexMatrix, 4> povm() const;
};

struct MenuProvenance {
    std::string generator;
    std::vector<double> times;
    double eps_prep = 0;
    double eps_meas = 0;
};

/// Indexed, immutable list of experiments; ids are 0..n-1 in order.
struct ExperimentMenu {
    std::vector<Experiment> experiments;
    MenuProvenance provenance;

    std::size_t size() const {
        return experiments.size();
    }
    const Experiment &at(std::size_t id) const;
    /// Sorted distinct probe times.
    std::vector<double> distinct_times() const;
};

/// The 26 unit vectors (a x + b y + c z)/|.| with a, b, c in {-1, 0, 1}, in the
/// reference (polar, azimuth) listing order.
std::vector<BlochAngles> constellation26_angles();
std::vector<BlochVector> constellation26();

/// The 13 measurement axes left after identifying antipodal points; each class is
/// represented by its member with the lexicographically larger (z, y, x).
std::vector<BlochAngles> axes13_angles();
std::vector<BlochVector> axes13();

/// rho0 = (I + v1.sigma)/2 (x) (I + v2.sigma)/2. InvalidStateError if a norm exceeds 1.
ComplexMatrix product_state(const BlochVector &v1, const BlochVector &v2);

/// Product POVM for axes a1, a2 with optional contraction (1 - eps) of both axes.
/// InvalidStateError unless both axes have unit norm (within 1e-12).
std::array<ComplexMatrix, 4> product_povm(const BlochVector &a1, const BlochVector &a2, double contraction = 1.0);

/// constellation26^2 x axes13^2 x times, loops nested in (prep1, prep2, axis1, axis2, t) order.
ExperimentMenu build_full_menu(const std::vector<double> &times);

/// The 12 principal-axis configurations of the naive comparison strategy, at t = 1.
ExperimentMenu suboptimal_menu();

/// The two configurations that carry the A-optimal design at (F, G) = (1, 1), t = 1.
/// Row order: the 0.2-weight experiment, then the 0.8-weight experiment.
ExperimentMenu optimal_pair_menu();

/// Contract every preparation by (1 - eps_prep) and every POVM axis by (1 - eps_meas).
/// RangeError unless both eps are in [0, 1).
ExperimentMenu apply_gate_error(const ExperimentMenu &menu, double eps_prep, double eps_meas);

/// Keep only the listed ids, renumbered 0..k-1 in the given order.
ExperimentMenu sub_menu(const ExperimentMenu &menu, const std::vector<std::size_t> &ids);

}  // namespace qoed

#endif  // QOED_MENU_H
