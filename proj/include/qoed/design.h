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

#ifndef QOED_DESIGN_H
#define QOED_DESIGN_H

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qoed/fisher.h"

namespace qoed {

struct SolverOptions {
    /// Stop once equivalence_gap <= gap_tol_rel * objective.
    double gap_tol_rel = 1e-5;
    std::size_t max_iters = 20000;
    /// Exponent of the multiplicative update; halved on the fly if a step would increase the objective.
    double gamma = 1.0;
    /// Vertex-exchange steps performed after every multiplicative update.
    std::size_t exchanges_per_iter = 4;
    /// Weights at or below this are not reported as support.
    double support_tol = 1e-6;
    /// Support points whose Fisher matrices agree entrywise within this are merged in reports.
    double merge_tol = 1e-9;
    /// Extra seeded random (Dirichlet) starts; 0 means the single uniform start.
    std::size_t multistart = 0;
    std::uint64_t seed = 0;
};

/// Probability vector over menu ids.
struct DesignWeights {
    std::vector<double> weights;

    std::vector<std::size_t> support(double tol = 1e-6) const;
};

/// A reported support point: the lowest id of a group of experiments with
/// identical Fisher matrices, carrying the group's total weight.
struct SupportPoint {
    std::size_t id = 0;
    double weight = 0;
    std::vector<std::size_t> members;
};

struct DesignResult {
    DesignWeights weights;
    FisherMatrix fisher;  ///< combined at the optimum
    double objective = 0;  ///< Tr(fisher^{-1})
    double equivalence_gap = 0;
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<SupportPoint> merged_support;
    /// Objective after each iteration (non-increasing).
    std::vector<double> objective_history;
};

/// Tr((sum_E w_E I_E)^{-1}). NotEstimableError if the combination is singular.
double a_objective(std::span<const FisherMatrix> fishers, std::span<const double> weights);

/// Minimizes Tr(sum_E w_E I_E)^{-1} over the probability simplex.
///
/// Multiplicative updates w_E <- w_E (Tr(F^-1 I_E F^-1) / Tr F^-1)^gamma, each followed by
/// vertex-exchange steps that move mass from the worst support point to the experiment
/// with the largest directional derivative (exact line search). Deterministic for fixed
/// options and independent of the thread count.
DesignResult optimize_a_design(std::span<const FisherMatrix> fishers, const SolverOptions &opts = {});

/// max_E Tr(F^-1 I_E F^-1) - Tr(F^-1); <= 0 (to tolerance) exactly at an A-optimal design.
double equivalence_gap(std::span<const FisherMatrix> fishers, std::span<const double> weights);

/// True iff [[Q, I], [I, F]] is PSD (smallest eigenvalue >= -tol), i.e. Q >= F^-1.
bool schur_certificate(const RealMatrix &q, const FisherMatrix &f, double tol = 1e-9);

/// Exhaustive search over the simplex grid with spacing grid_step (at most 6 experiments).
/// Ties (within 1e-12 relative) go to the lexicographically smallest weight vector.
DesignWeights brute_force_design(std::span<const FisherMatrix> fishers, double grid_step);

/// Groups the support of `weights` by identical Fisher matrices.
std::vector<SupportPoint> merge_support(std::span<const FisherMatrix> fishers, std::span<const double> weights,
                                        double support_tol = 1e-6, double merge_tol = 1e-9);

}  // namespace qoed

#endif  // QOED_DESIGN_H
