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

#ifndef QOED_FISHER_H
#define QOED_FISHER_H

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <tuple>
#include <vector>

#include "qoed/linalg.h"
#include "qoed/menu.h"
#include "qoed/model.h"

namespace qoed {

/// Outcomes with p <= kProbFloor are treated as structurally forbidden.
inline constexpr double kProbFloor = 1e-12;
/// A forbidden outcome whose gradient norm exceeds this makes the Fisher matrix singular (flagged).
inline constexpr double kGradCeiling = 1e-6;
inline constexpr double kDefaultFdStep = 1e-6;
/// Raw Born probabilities outside [-kProbSlack, 1 + kProbSlack] signal a malformed state or POVM.
inline constexpr double kProbSlack = 1e-9;

using OutcomeProbs = std::array<double, 4>;

struct OutcomeDistribution {
    OutcomeProbs probs{};
    /// 4 x (#free params): d p_i / d theta_j.
    RealMatrix grads{4, 1};
};

struct FisherMatrix {
    RealMatrix m{1, 1};
    ModelParams theta_at;
    /// Set when an outcome with vanishing probability has a non-vanishing gradient:
    /// the information about some direction diverges and m is not trustworthy there.
    bool singular = false;

    std::size_t dim() const {
        return m.rows();
    }
};

/// p_i = Tr(M_i U rho0 U^dagger) for a precomputed propagator u.
/// Throws NumericalIntegrityError if a raw value leaves [-1e-9, 1 + 1e-9]; result is clamped to [0, 1].
OutcomeProbs born_probs(const ComplexMatrix &u, const Experiment &exp);

/// Same, with the initial state and POVM already built (hot loops).
OutcomeProbs born_probs(const ComplexMatrix &u, const ComplexMatrix &rho0, const std::array<ComplexMatrix, 4> &povm);

/// Born-rule outcome probabilities with the propagator selected by params.frame.
OutcomeProbs outcome_probs(const Experiment &exp, const ModelParams &params);

/// Central finite differences (p(theta + h e_j) - p(theta - h e_j)) / 2h over the free parameters.
OutcomeDistribution outcome_grads(const Experiment &exp, const ModelParams &params, double h = kDefaultFdStep);

/// sum_i grad p_i grad p_i^T / p_i with the vanishing-outcome rule described at kProbFloor / kGradCeiling.
FisherMatrix fisher_from_distribution(const OutcomeDistribution &dist, const ModelParams &params);

FisherMatrix experiment_fisher(const Experiment &exp, const ModelParams &params, double h = kDefaultFdStep);

/// sum_k w_k F_k. ContractError on length mismatch, negative weights, or |sum w - 1| > 1e-9.
FisherMatrix combined_fisher(std::span<const FisherMatrix> fishers, std::span<const double> weights);

/// Tr(F^{-1}) / n. NotEstimableError if F's smallest eigenvalue is <= 1e-12.
double cramer_rao_trace_bound(const FisherMatrix &f, std::size_t n);

/// Memoizes propagators per distinct (params, t).
///
/// Not thread-safe for insertion; warm it with prepare() and then share it read-only.
class PropagatorCache {
   public:
    const ComplexMatrix &get(const ModelParams &params, double t);
    /// Lookup that never inserts; throws ContractError on a miss.
    const ComplexMatrix &find(const ModelParams &params, double t) const;
    void prepare(const ModelParams &params, std::span<const double> times);
    std::size_t size() const {
        return cache_.size();
    }

   private:
    using Key = std::tuple<double, double, double, int, double>;
    static Key key(const ModelParams &params, double t);
    std::map<Key, ComplexMatrix> cache_;
};

/// Fisher matrix of every experiment in the menu at params.
///
/// Uses 2p + 1 propagator evaluations per distinct probe time and a parallel map
/// over experiments; output index k corresponds to menu id k.
std::vector<FisherMatrix> menu_fishers(const ExperimentMenu &menu, const ModelParams &params,
                                       double h = kDefaultFdStep);

/// Single-qubit, single-parameter probe used to study gate errors.
///
/// The qubit starts along +x with its Bloch vector contracted by (1 - eps_prep),
/// precesses by angle theta about z, and is measured along the in-plane axis with
/// azimuth meas_azimuth, contracted by (1 - eps_meas). Returns the scalar Fisher
/// information about theta (central differences with step h).
double single_qubit_rotation_fisher(double theta, double meas_azimuth, double eps_prep, double eps_meas,
                                    double h = kDefaultFdStep);

}  // namespace qoed

#endif  // QOED_FISHER_H
