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

#ifndef QOED_ESTIMATE_H
#define QOED_ESTIMATE_H

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qoed/design.h"
#include "qoed/fisher.h"
#include "qoed/menu.h"
#include "qoed/model.h"

namespace qoed {

struct DatasetEntry {
    std::size_t id = 0;
    std::uint64_t n_runs = 0;
    std::array<std::uint64_t, 4> counts{};
};

struct OutcomeDataset {
    std::vector<DatasetEntry> entries;
    std::uint64_t total_n = 0;
    std::uint64_t seed = 0;
    bool truth_hidden = true;

    /// Throws ContractError unless counts add up to n_runs and n_runs add up to total_n.
    void validate() const;
};

/// Rectangular (F, G) grid; both endpoints included.
struct GridSpec {
    double f_min = 0;
    double f_max = 3;
    std::size_t nf = 301;
    double g_min = 0;
    double g_max = 3.141592653589793;
    std::size_t ng = 301;

    void validate() const;
    double f_at(std::size_t i) const;
    double g_at(std::size_t j) const;
};

/// F in [0, 3]; G over one period [0, pi/t] when every probed experiment shares
/// the time t, otherwise [0, 2 pi / t_min].
GridSpec default_grid(const ExperimentMenu &menu, const OutcomeDataset &data, std::size_t nf = 301,
                      std::size_t ng = 301);

struct LikelihoodSurface {
    std::vector<double> f_axis;
    std::vector<double> g_axis;
    /// Row-major: loglik[i * g_axis.size() + j] is the value at (f_axis[i], g_axis[j]). May hold -inf.
    std::vector<double> loglik;
    double argmax_f = 0;
    double argmax_g = 0;
    double max_loglik = 0;
};

/// Largest-remainder apportionment of n runs; ties on the remainder go to the lowest id.
std::vector<std::uint64_t> allocate_runs(std::span<const double> weights, std::uint64_t n);

/// Draws n runs split by allocate_runs, each experiment from its own counter stream keyed by (seed, id).
OutcomeDataset sample_dataset(const ExperimentMenu &menu, std::span<const double> weights, const ModelParams &truth,
                              std::uint64_t n, std::uint64_t seed);

/// Precomputed states and POVMs for the experiments of one dataset.
class LikelihoodModel {
   public:
    LikelihoodModel(const OutcomeDataset &data, const ExperimentMenu &menu);

    /// sum_E sum_i n_i^E ln p_i^E(params); -inf if an observed outcome has p <= kProbFloor.
    double operator()(const ModelParams &params) const;

   private:
    struct Term {
        std::size_t time_index;
        ComplexMatrix rho0;
        std::array<ComplexMatrix, 4> povm;
        std::array<double, 4> counts;
    };
    std::vector<double> times_;
    std::vector<Term> terms_;
};

double log_likelihood(const OutcomeDataset &data, const ExperimentMenu &menu, const ModelParams &params);

/// Dense evaluation over the grid; argmax ties go to the lowest F, then the lowest G.
/// Values within 1e-12 (1 + |max| + total_n) of the maximum are ties, so roundoff in
/// p = 1 outcomes cannot pick the argmax of a flat surface.
/// `base` supplies delta_omega and the frame.
LikelihoodSurface mle_grid(const OutcomeDataset &data, const ExperimentMenu &menu, const GridSpec &grid,
                           const ModelParams &base = {});

struct RefineOptions {
    double initial_step = 0.02;
    double diameter_tol = 1e-6;
    std::size_t max_iters = 500;
};

/// Nelder-Mead ascent on the log-likelihood over the free parameters of `start`.
/// Returns the best vertex, which is never worse than the start.
ModelParams mle_refine(const OutcomeDataset &data, const ExperimentMenu &menu, const ModelParams &start,
                       const RefineOptions &opts = {});

/// Grid search followed by refinement from the grid argmax.
ModelParams mle_estimate(const OutcomeDataset &data, const ExperimentMenu &menu, const GridSpec &grid,
                         const ModelParams &base = {}, const RefineOptions &opts = {});

struct AdaptiveOptions {
    SolverOptions solver;
    std::size_t grid_nf = 301;
    std::size_t grid_ng = 301;
    /// Estimate from all data gathered so far rather than from the latest round alone.
    bool accumulate = true;
};

struct AdaptiveRound {
    std::size_t round = 0;
    ModelParams guess;  ///< parameters the design was optimized at
    DesignResult design;
    OutcomeDataset data;  ///< this round's runs only
    ModelParams estimate;
};

/// Guess, design, sample, estimate, and feed the estimate forward, `rounds` times.
std::vector<AdaptiveRound> adaptive_loop(const ExperimentMenu &menu, const ModelParams &theta_guess,
                                         const ModelParams &truth, std::size_t rounds, std::uint64_t n_per_round,
                                         std::uint64_t seed, const AdaptiveOptions &opts = {});

struct MonteCarloOptions {
    /// Grid resolution for the initial search of each trial.
    std::size_t grid_nf = 121;
    std::size_t grid_ng = 121;
    RefineOptions refine;
};

/// MLE from `trials` independent datasets of size n; trial k uses seed derive_seed(seed, n, k).
std::vector<ModelParams> monte_carlo_estimates(const ExperimentMenu &menu, std::span<const double> weights,
                                               const ModelParams &truth, std::uint64_t n, std::size_t trials,
                                               std::uint64_t seed, const MonteCarloOptions &opts = {});

struct MseRow {
    std::uint64_t n = 0;
    double mse_mean = 0;
    double mse_median = 0;
    /// Tr(I(theta_guess)^-1) / n for the design.
    double cr_reference = 0;
};

std::vector<MseRow> mse_curve(const ExperimentMenu &menu, std::span<const double> weights, const ModelParams &truth,
                              const ModelParams &theta_guess, std::span<const std::uint64_t> n_list,
                              std::size_t trials, std::uint64_t seed, const MonteCarloOptions &opts = {});

}  // namespace qoed

#endif  // QOED_ESTIMATE_H
