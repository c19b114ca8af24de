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

#include "qoed/menu.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

namespace qoed {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNormTol = 1e-12;

double chi() {
    return std::acos(1 / std::sqrt(3.0));
}

}  // namespace

BlochVector BlochVector::from_angles(BlochAngles a) {
    const double s = std::sin(a.polar);
    return {s * std::cos(a.azimuth), s * std::sin(a.azimuth), std::cos(a.polar)};
}

double BlochVector::norm() const {
    return std::sqrt(x * x + y * y + z * z);
}

ComplexMatrix bloch_operator(const BlochVector &v, double sign) {
    const double x = sign * v.x;
    const double y = sign * v.y;
    const double z = sign * v.z;
    return ComplexMatrix{{0.5 * (1 + z), 0.5 * Complex(x, -y)}, {0.5 * Complex(x, y), 0.5 * (1 - z)}};
}

Experiment Experiment::make(std::size_t id, std::array<BlochAngles, 2> prep, std::array<BlochAngles, 2> meas,
                            double t, double prep_scale, double meas_scale) {
    Experiment e;
    e.id = id;
    e.prep_angles = prep;
    e.meas_angles = meas;
    e.t = t;
    e.prep_scale = prep_scale;
    e.meas_scale = meas_scale;
    for (std::size_t q = 0; q < 2; ++q) {
        e.prep[q] = BlochVector::from_angles(prep[q]).scaled(prep_scale);
        e.meas_axes[q] = BlochVector::from_angles(meas[q]);
    }
    return e;
}

ComplexMatrix Experiment::initial_state() const {
    return product_state(prep[0], prep[1]);
}

std::array<ComplexMatrix, 4> Experiment::povm() const {
    return product_povm(meas_axes[0], meas_axes[1], meas_scale);
}

const Experiment &ExperimentMenu::at(std::size_t id) const {
    if (id >= experiments.size()) {
        throw ContractError("experiment id " + std::to_string(id) + " not in menu of size " +
                            std::to_string(experiments.size()));
    }
    return experiments[id];
}

std::vector<double> ExperimentMenu::distinct_times() const {
    std::vector<double> ts;
    for (const auto &e : experiments) {
        ts.push_back(e.t);
    }
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    return ts;
}

std::vector<BlochAngles> constellation26_angles() {
    const double c = chi();
    std::vector<BlochAngles> out;
    out.push_back({0, 0});
    for (int k = 0; k < 4; ++k) {
        out.push_back({kPi / 4, k * kPi / 2});
    }
    for (int k = 0; k < 4; ++k) {
        out.push_back({c, kPi / 4 + k * kPi / 2});
    }
    for (int k = 0; k < 8; ++k) {
        out.push_back({kPi / 2, k * kPi / 4});
    }
    for (int k = 0; k < 4; ++k) {
        out.push_back({kPi - c, kPi / 4 + k * kPi / 2});
    }
    for (int k = 0; k < 4; ++k) {
        out.push_back({3 * kPi / 4, k * kPi / 2});
    }
    out.push_back({kPi, 0});
    return out;
}

std::vector<BlochVector> constellation26() {
    std::vector<BlochVector> out;
    for (auto a : constellation26_angles()) {
        out.push_back(BlochVector::from_angles(a));
    }
    return out;
}

std::vector<BlochAngles> axes13_angles() {
    auto angles = constellation26_angles();
    auto vectors = constellation26();
    auto key = [](const BlochVector &v) {
        // Exact zeros come out of sin/cos as ~1e-17; snap before comparing.
        auto snap = [](double x) { return std::abs(x) < 1e-12 ? 0.0 : x; };
        return std::make_tuple(snap(v.z), snap(v.y), snap(v.x));
    };
    std::vector<BlochAngles> out;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        const BlochVector anti = -vectors[i];
        // Keep v iff it is the larger member of its antipodal pair.
        if (key(vectors[i]) > key(anti)) {
            out.push_back(angles[i]);
        }
    }
    return out;
}

std::vector<BlochVector> axes13() {
    std::vector<BlochVector> out;
    for (auto a : axes13_angles()) {
        out.push_back(BlochVector::from_angles(a));
    }
    return out;
}

ComplexMatrix product_state(const BlochVector &v1, const BlochVector &v2) {
    if (v1.norm() > 1 + kNormTol || v2.norm() > 1 + kNormTol) {
        throw InvalidStateError("product_state: Bloch vector norm exceeds 1");
    }
    return kron(bloch_operator(v1), bloch_operator(v2));
}

std::array<ComplexMatrix, 4> product_povm(const BlochVector &a1, const BlochVector &a2, double contraction) {
    if (std::abs(a1.norm() - 1) > kNormTol || std::abs(a2.norm() - 1) > kNormTol) {
        throw InvalidStateError("product_povm: measurement axes must have unit norm");
    }
    if (!(contraction > 0 && contraction <= 1)) {
        throw RangeError("product_povm: contraction must be in (0, 1]");
    }
    const BlochVector b1 = a1.scaled(contraction);
    const BlochVector b2 = a2.scaled(contraction);
    const ComplexMatrix p1 = bloch_operator(b1, 1);
    const ComplexMatrix m1 = bloch_operator(b1, -1);
    const ComplexMatrix p2 = bloch_operator(b2, 1);
    const ComplexMatrix m2 = bloch_operator(b2, -1);
    return {kron(p1, p2), kron(p1, m2), kron(m1, p2), kron(m1, m2)};
}

ExperimentMenu build_full_menu(const std::vector<double> &times) {
    if (times.empty()) {
        throw ContractError("build_full_menu: times must be nonempty");
    }
    const auto states = constellation26_angles();
    const auto axes = axes13_angles();
    ExperimentMenu menu;
    menu.provenance = {"full", times, 0, 0};
    menu.experiments.reserve(states.size() * states.size() * axes.size() * axes.size() * times.size());
    std::size_t id = 0;
    for (const auto &s1 : states) {
        for (const auto &s2 : states) {
            for (const auto &a1 : axes) {
                for (const auto &a2 : axes) {
                    for (double t : times) {
                        menu.experiments.push_back(Experiment::make(id++, {s1, s2}, {a1, a2}, t));
                    }
                }
            }
        }
    }
    return menu;
}

ExperimentMenu suboptimal_menu() {
    const BlochAngles z{0, 0};
    const BlochAngles mz{kPi, 0};
    const BlochAngles x{kPi / 2, 0};
    const BlochAngles mx{-kPi / 2, 0};
    const BlochAngles y{kPi / 2, kPi / 2};
    const std::array<std::array<BlochAngles, 2>, 4> preps{{{z, z}, {z, mz}, {x, mx}, {x, z}}};
    ExperimentMenu menu;
    menu.provenance = {"suboptimal", {1.0}, 0, 0};
    std::size_t id = 0;
    for (const BlochAngles &m : {z, y, x}) {
        for (const auto &p : preps) {
            menu.experiments.push_back(Experiment::make(id++, p, {m, m}, 1.0));
        }
    }
    return menu;
}

ExperimentMenu optimal_pair_menu() {
    const double c = chi();
    ExperimentMenu menu;
    menu.provenance = {"table3", {1.0}, 0, 0};
    menu.experiments.push_back(
        Experiment::make(0, {{{c, kPi / 4}, {3 * kPi / 4, 3 * kPi / 2}}}, {{{kPi / 4, kPi}, {kPi / 4, 0}}}, 1.0));
    menu.experiments.push_back(Experiment::make(1, {{{c, kPi / 4}, {kPi - c, 7 * kPi / 4}}},
                                                {{{c, 5 * kPi / 4}, {kPi / 4, 0}}}, 1.0));
    return menu;
}

ExperimentMenu apply_gate_error(const ExperimentMenu &menu, double eps_prep, double eps_meas) {
    if (!(eps_prep >= 0 && eps_prep < 1) || !(eps_meas >= 0 && eps_meas < 1)) {
        throw RangeError("apply_gate_error: eps must be in [0, 1)");
    }
    ExperimentMenu out;
    out.provenance = menu.provenance;
    out.provenance.eps_prep = 1 - (1 - menu.provenance.eps_prep) * (1 - eps_prep);
    out.provenance.eps_meas = 1 - (1 - menu.provenance.eps_meas) * (1 - eps_meas);
    out.experiments.reserve(menu.size());
    for (const auto &e : menu.experiments) {
        out.experiments.push_back(Experiment::make(e.id, e.prep_angles, e.meas_angles, e.t,
                                                   e.prep_scale * (1 - eps_prep), e.meas_scale * (1 - eps_meas)));
    }
    return out;
}

ExperimentMenu sub_menu(const ExperimentMenu &menu, const std::vector<std::size_t> &ids) {
    ExperimentMenu out;
    out.provenance = menu.provenance;
    out.provenance.generator += "-subset";
    for (std::size_t k = 0; k < ids.size(); ++k) {
        const Experiment &e = menu.at(ids[k]);
        out.experiments.push_back(
            Experiment::make(k, e.prep_angles, e.meas_angles, e.t, e.prep_scale, e.meas_scale));
    }
    return out;
}

}  // namespace qoed
