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

#include "qoed/estimate.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>

#include "qoed/parallel.h"
#include "qoed/rng.h"

namespace qoed {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double squared_error(const ModelParams &a, const ModelParams &b) {
    double s = 0;
    for (Param p : b.free_params()) {
        const double d = a.get(p) - b.get(p);
        s += d * d;
    }
    return s;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

OutcomeDataset merge_datasets(const OutcomeDataset &a, const OutcomeDataset &b) {
    std::map<std::size_t, DatasetEntry> by_id;
    for (const auto *d : {&a, &b}) {
        for (const auto &e : d->entries) {
            auto &slot = by_id[e.id];
            slot.id = e.id;
            slot.n_runs += e.n_runs;
            for (std::size_t i = 0; i < 4; ++i) {
                slot.counts[i] += e.counts[i];
            }
        }
    }
    OutcomeDataset out;
    out.seed = b.seed;
    out.truth_hidden = a.truth_hidden && b.truth_hidden;
    for (auto &[id, e] : by_id) {
        out.entries.push_back(e);
        out.total_n += e.n_runs;
    }
    return out;
}

}  // namespace

void OutcomeDataset::validate() const {
    std::uint64_t total = 0;
    for (const auto &e : entries) {
        std::uint64_t s = 0;
        for (auto c : e.counts) {
            s += c;
        }
        if (s != e.n_runs) {
            throw ContractError("dataset entry " + std::to_string(e.id) + ": counts do not add up to n_runs");
        }
        total += e.n_runs;
    }
    if (total != total_n) {
        throw ContractError("dataset: n_runs do not add up to total_n");
    }
}

void GridSpec::validate() const {
    if (!std::isfinite(f_min) || !std::isfinite(f_max) || !std::isfinite(g_min) || !std::isfinite(g_max)) {
        throw RangeError("grid bounds must be finite");
    }
    if (nf < 2 || ng < 2) {
        throw RangeError("grid needs at least 2 points per axis");
    }
    if (!(f_max > f_min) || !(g_max > g_min)) {
        throw RangeError("grid bounds must satisfy min < max");
    }
}

double GridSpec::f_at(std::size_t i) const {
    return f_min + (f_max - f_min) * static_cast<double>(i) / static_cast<double>(nf - 1);
}

double GridSpec::g_at(std::size_t j) const {
    return g_min + (g_max - g_min) * static_cast<double>(j) / static_cast<double>(ng - 1);
}

GridSpec default_grid(const ExperimentMenu &menu, const OutcomeDataset &data, std::size_t nf, std::size_t ng) {
    double t_min = std::numeric_limits<double>::infinity();
    double t_max = 0;
    for (const auto &e : data.entries) {
        const double t = menu.at(e.id).t;
        t_min = std::min(t_min, t);
        t_max = std::max(t_max, t);
    }
    GridSpec g;
    g.nf = nf;
    g.ng = ng;
    if (data.entries.empty() || !(t_min > 0)) {
        return g;
    }
    g.g_max = (t_min == t_max ? 1.0 : 2.0) * std::numbers::pi / t_min;
    return g;
}

std::vector<std::uint64_t> allocate_runs(std::span<const double> weights, std::uint64_t n) {
    if (n < 1) {
        throw RangeError("allocate_runs: n must be >= 1");
    }
    double total = 0;
    for (double w : weights) {
        if (!(w >= 0)) {
            throw ContractError("allocate_runs: negative weight");
        }
        total += w;
    }
    if (!(total > 0)) {
        throw ContractError("allocate_runs: weights sum to zero");
    }
    std::vector<std::uint64_t> out(weights.size());
    std::vector<double> rem(weights.size());
    std::uint64_t assigned = 0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        const double exact = weights[k] / total * static_cast<double>(n);
        out[k] = static_cast<std::uint64_t>(std::floor(exact));
        rem[k] = exact - static_cast<double>(out[k]);
        assigned += out[k];
    }
    std::vector<std::size_t> order(weights.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
    for (std::size_t k = 0; assigned < n; k = (k + 1) % order.size()) {
        if (weights[order[k]] > 0) {
            ++out[order[k]];
            ++assigned;
        }
    }
    return out;
}

OutcomeDataset sample_dataset(const ExperimentMenu &menu, std::span<const double> weights, const ModelParams &truth,
                              std::uint64_t n, std::uint64_t seed) {
    if (weights.size() != menu.size()) {
        throw ContractError("sample_dataset: need one weight per menu experiment");
    }
    const auto runs = allocate_runs(weights, n);
    OutcomeDataset data;
    data.seed = seed;
    data.total_n = n;
    for (std::size_t id = 0; id < runs.size(); ++id) {
        if (runs[id] > 0) {
            data.entries.push_back({id, runs[id], {}});
        }
    }
    parallel_for(data.entries.size(), [&](std::size_t k) {
        DatasetEntry &e = data.entries[k];
        const OutcomeProbs p = outcome_probs(menu.at(e.id), truth);
        const double c0 = p[0];
        const double c1 = c0 + p[1];
        const double c2 = c1 + p[2];
        CounterStream stream(seed, e.id);
        for (std::uint64_t r = 0; r < e.n_runs; ++r) {
            const double u = stream.uniform(r);
            const std::size_t i = u < c0 ? 0 : u < c1 ? 1 : u < c2 ? 2 : 3;
            ++e.counts[i];
        }
    });
    return data;
}

LikelihoodModel::LikelihoodModel(const OutcomeDataset &data, const ExperimentMenu &menu) {
    data.validate();
    for (const auto &e : data.entries) {
        const Experiment &x = menu.at(e.id);
        auto it = std::find(times_.begin(), times_.end(), x.t);
        const std::size_t ti = static_cast<std::size_t>(it - times_.begin());
        if (it == times_.end()) {
            times_.push_back(x.t);
        }
        Term term{ti, x.initial_state(), x.povm(), {}};
        for (std::size_t i = 0; i < 4; ++i) {
            term.counts[i] = static_cast<double>(e.counts[i]);
        }
        terms_.push_back(std::move(term));
    }
}

double LikelihoodModel::operator()(const ModelParams &params) const {
    std::vector<ComplexMatrix> u;
    u.reserve(times_.size());
    for (double t : times_) {
        u.push_back(propagate(params, t).u);
    }
    double ll = 0;
    for (const auto &term : terms_) {
        const OutcomeProbs p = born_probs(u[term.time_index], term.rho0, term.povm);
        for (std::size_t i = 0; i < 4; ++i) {
            if (term.counts[i] == 0) {
                continue;
            }
            if (p[i] <= kProbFloor) {
                return kNegInf;
            }
            ll += term.counts[i] * std::log(p[i]);
        }
    }
    return ll;
}

double log_likelihood(const OutcomeDataset &data, const ExperimentMenu &menu, const ModelParams &params) {
    return LikelihoodModel(data, menu)(params);
}

LikelihoodSurface mle_grid(const OutcomeDataset &data, const ExperimentMenu &menu, const GridSpec &grid,
                           const ModelParams &base) {
    grid.validate();
    const LikelihoodModel model(data, menu);
    LikelihoodSurface s;
    for (std::size_t i = 0; i < grid.nf; ++i) {
        s.f_axis.push_back(grid.f_at(i));
    }
    for (std::size_t j = 0; j < grid.ng; ++j) {
        s.g_axis.push_back(grid.g_at(j));
    }
    s.loglik.assign(grid.nf * grid.ng, 0.0);
    parallel_for(grid.nf, [&](std::size_t i) {
        for (std::size_t j = 0; j < grid.ng; ++j) {
            s.loglik[i * grid.ng + j] = model(base.with_fg(s.f_axis[i], s.g_axis[j]));
        }
    });
    // Cells within roundoff of the maximum count as tied; the lowest index wins.
    const double top = *std::max_element(s.loglik.begin(), s.loglik.end());
    const double tie_tol = 1e-12 * (1 + std::abs(top) + static_cast<double>(data.total_n));
    std::size_t best = 0;
    while (!(s.loglik[best] >= top - tie_tol)) {
        ++best;
    }
    s.argmax_f = s.f_axis[best / grid.ng];
    s.argmax_g = s.g_axis[best % grid.ng];
    s.max_loglik = s.loglik[best];
    return s;
}

ModelParams mle_refine(const OutcomeDataset &data, const ExperimentMenu &menu, const ModelParams &start,
                       const RefineOptions &opts) {
    const LikelihoodModel model(data, menu);
    const std::size_t dim = start.free_count();
    auto cost = [&](const std::vector<double> &x) {
        const double ll = model(start.with_free_values(x));
        return std::isnan(ll) ? std::numeric_limits<double>::infinity() : -ll;
    };
    std::vector<std::vector<double>> xs{start.free_values()};
    for (double v : xs[0]) {
        if (!std::isfinite(v)) {
            throw InvalidStartError("mle_refine: start is not finite");
        }
    }
    std::vector<double> fs{cost(xs[0])};
    if (!std::isfinite(fs[0])) {
        throw InvalidStartError("mle_refine: log-likelihood at the start is not finite");
    }
    for (std::size_t k = 0; k < dim; ++k) {
        auto x = xs[0];
        x[k] += opts.initial_step;
        fs.push_back(cost(x));
        xs.push_back(std::move(x));
    }
    std::vector<std::size_t> order(dim + 1);
    auto affine = [&](const std::vector<double> &a, const std::vector<double> &b, double t) {
        std::vector<double> out(dim);
        for (std::size_t k = 0; k < dim; ++k) {
            out[k] = a[k] + t * (b[k] - a[k]);
        }
        return out;
    };
    for (std::size_t it = 0; it < opts.max_iters; ++it) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
        double diameter = 0;
        for (std::size_t a = 0; a <= dim; ++a) {
            for (std::size_t b = a + 1; b <= dim; ++b) {
                double d2 = 0;
                for (std::size_t k = 0; k < dim; ++k) {
                    d2 += (xs[a][k] - xs[b][k]) * (xs[a][k] - xs[b][k]);
                }
                diameter = std::max(diameter, std::sqrt(d2));
            }
        }
        if (diameter <= opts.diameter_tol) {
            break;
        }
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[dim - 1];
        std::vector<double> centroid(dim, 0.0);
        for (std::size_t v = 0; v <= dim; ++v) {
            if (v == worst) {
                continue;
            }
            for (std::size_t k = 0; k < dim; ++k) {
                centroid[k] += xs[v][k] / static_cast<double>(dim);
            }
        }
        const auto xr = affine(centroid, xs[worst], -1.0);
        const double fr = cost(xr);
        if (fr < fs[best]) {
            const auto xe = affine(centroid, xs[worst], -2.0);
            const double fe = cost(xe);
            if (fe < fr) {
                xs[worst] = xe;
                fs[worst] = fe;
            } else {
                xs[worst] = xr;
                fs[worst] = fr;
            }
            continue;
        }
        if (fr < fs[second]) {
            xs[worst] = xr;
            fs[worst] = fr;
            continue;
        }
        const bool outside = fr < fs[worst];
        const auto xc = outside ? affine(centroid, xr, 0.5) : affine(centroid, xs[worst], 0.5);
        const double fc = cost(xc);
        if (outside ? fc <= fr : fc < fs[worst]) {
            xs[worst] = xc;
            fs[worst] = fc;
            continue;
        }
        for (std::size_t v = 0; v <= dim; ++v) {
            if (v == best) {
                continue;
            }
            xs[v] = affine(xs[best], xs[v], 0.5);
            fs[v] = cost(xs[v]);
        }
    }
    std::size_t best = 0;
    for (std::size_t v = 1; v <= dim; ++v) {
        if (fs[v] < fs[best]) {
            best = v;
        }
    }
    return start.with_free_values(xs[best]);
}

ModelParams mle_estimate(const OutcomeDataset &data, const ExperimentMenu &menu, const GridSpec &grid,
                         const ModelParams &base, const RefineOptions &opts) {
    const LikelihoodSurface s = mle_grid(data, menu, grid, base);
    if (!std::isfinite(s.max_loglik)) {
        throw NotEstimableError("mle_estimate: likelihood vanishes on the whole grid");
    }
    return mle_refine(data, menu, base.with_fg(s.argmax_f, s.argmax_g), opts);
}

std::vector<AdaptiveRound> adaptive_loop(const ExperimentMenu &menu, const ModelParams &theta_guess,
                                         const ModelParams &truth, std::size_t rounds, std::uint64_t n_per_round,
                                         std::uint64_t seed, const AdaptiveOptions &opts) {
    if (rounds < 1) {
        throw RangeError("adaptive_loop: rounds must be >= 1");
    }
    std::vector<AdaptiveRound> trace;
    ModelParams guess = theta_guess;
    OutcomeDataset all;
    for (std::size_t r = 0; r < rounds; ++r) {
        AdaptiveRound round;
        round.round = r + 1;
        round.guess = guess;
        const auto fishers = menu_fishers(menu, guess);
        round.design = optimize_a_design(fishers, opts.solver);
        round.data = sample_dataset(menu, round.design.weights.weights, truth, n_per_round, derive_seed(seed, r));
        all = opts.accumulate ? merge_datasets(all, round.data) : round.data;
        const GridSpec grid = default_grid(menu, all, opts.grid_nf, opts.grid_ng);
        round.estimate = mle_estimate(all, menu, grid, guess);
        guess = round.estimate;
        trace.push_back(std::move(round));
    }
    return trace;
}

std::vector<ModelParams> monte_carlo_estimates(const ExperimentMenu &menu, std::span<const double> weights,
                                               const ModelParams &truth, std::uint64_t n, std::size_t trials,
                                               std::uint64_t seed, const MonteCarloOptions &opts) {
    std::vector<ModelParams> out(trials);
    parallel_for(trials, [&](std::size_t k) {
        const OutcomeDataset data = sample_dataset(menu, weights, truth, n, derive_seed(seed, n, k));
        const GridSpec grid = default_grid(menu, data, opts.grid_nf, opts.grid_ng);
        out[k] = mle_estimate(data, menu, grid, truth, opts.refine);
    });
    return out;
}

std::vector<MseRow> mse_curve(const ExperimentMenu &menu, std::span<const double> weights, const ModelParams &truth,
                              const ModelParams &theta_guess, std::span<const std::uint64_t> n_list,
                              std::size_t trials, std::uint64_t seed, const MonteCarloOptions &opts) {
    if (trials < 10) {
        throw RangeError("mse_curve: need at least 10 trials");
    }
    const auto fishers = menu_fishers(menu, theta_guess);
    std::vector<double> w(weights.begin(), weights.end());
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (double &x : w) {
        x /= total;
    }
    const double tr_inv = trace(inverse_small(combined_fisher(fishers, w).m));
    std::vector<MseRow> rows;
    for (std::uint64_t n : n_list) {
        const auto est = monte_carlo_estimates(menu, weights, truth, n, trials, seed, opts);
        std::vector<double> se;
        se.reserve(est.size());
        for (const auto &e : est) {
            se.push_back(squared_error(e, truth));
        }
        MseRow row;
        row.n = n;
        row.mse_mean = std::accumulate(se.begin(), se.end(), 0.0) / static_cast<double>(se.size());
        row.mse_median = median(se);
        row.cr_reference = tr_inv / static_cast<double>(n);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace qoed
