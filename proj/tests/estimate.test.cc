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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "qoed/parallel.h"
#include "qoed/rng.h"

using namespace qoed;

namespace {

constexpr double kPi = std::numbers::pi;

ModelParams at(double f, double g) {
    ModelParams p;
    p.f = f;
    p.g = g;
    return p;
}

const ModelParams kTruth = at(1.1, 0.9);
const std::vector<double> kOptWeights{0.2, 0.8};

Experiment stationary(std::size_t id = 0) {
    return Experiment::make(id, {{{0, 0}, {0, 0}}}, {{{0, 0}, {0, 0}}}, 1.0);
}

ExperimentMenu single(const Experiment &e) {
    ExperimentMenu m;
    m.experiments.push_back(e);
    return m;
}

double dist(const ModelParams &a, const ModelParams &b) {
    return std::hypot(a.f - b.f, a.g - b.g);
}

/// Table III pair repeated at each probe time.
ExperimentMenu multi_time_pair(const std::vector<double> &times) {
    const auto base = optimal_pair_menu();
    ExperimentMenu m;
    for (double t : times) {
        for (const auto &e : base.experiments) {
            m.experiments.push_back(Experiment::make(m.size(), e.prep_angles, e.meas_angles, t));
        }
    }
    return m;
}

}  // namespace

TEST(allocate_runs, examples) {
    const double opt[] = {0.2, 0.8};
    EXPECT_EQ(allocate_runs(opt, 200), (std::vector<std::uint64_t>{40, 160}));
    const double one[] = {1.0};
    EXPECT_EQ(allocate_runs(one, 7), (std::vector<std::uint64_t>{7}));
    const std::vector<double> uniform(12, 1.0 / 12);
    const auto a = allocate_runs(uniform, 200);
    EXPECT_EQ(std::accumulate(a.begin(), a.end(), std::uint64_t{0}), 200u);
    for (std::size_t k = 0; k < a.size(); ++k) {
        EXPECT_TRUE(a[k] == 16 || a[k] == 17);
        // Equal remainders go to the lowest ids first.
        EXPECT_EQ(a[k], k < 8 ? 17u : 16u);
    }
    const double third[] = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    EXPECT_EQ(allocate_runs(third, 2), (std::vector<std::uint64_t>{1, 1, 0}));
    EXPECT_THROW(allocate_runs(opt, 0), ContractError);
}

TEST(sample_dataset, stationary_counts) {
    const auto menu = single(stationary());
    const double w[] = {1.0};
    const auto d = sample_dataset(menu, w, kTruth, 500, 3);
    d.validate();
    ASSERT_EQ(d.entries.size(), 1u);
    EXPECT_EQ(d.entries[0].counts, (std::array<std::uint64_t, 4>{500, 0, 0, 0}));
    EXPECT_EQ(d.total_n, 500u);
    EXPECT_EQ(d.seed, 3u);
}

TEST(sample_dataset, frequencies_within_four_sigma) {
    const auto menu = single(optimal_pair_menu().at(1));
    const double w[] = {1.0};
    const std::uint64_t n = 1000000;
    const auto d = sample_dataset(menu, w, kTruth, n, 17);
    const auto p = outcome_probs(menu.at(0), kTruth);
    for (int i = 0; i < 4; ++i) {
        const double sigma = std::sqrt(n * p[i] * (1 - p[i]));
        EXPECT_LE(std::abs(static_cast<double>(d.entries[0].counts[i]) - n * p[i]), 4 * sigma) << i;
    }
}

TEST(sample_dataset, deterministic_across_thread_counts) {
    const auto menu = suboptimal_menu();
    const std::vector<double> w(12, 1.0 / 12);
    const std::size_t saved = thread_count();
    set_thread_count(1);
    const auto a = sample_dataset(menu, w, kTruth, 5000, 99);
    set_thread_count(4);
    const auto b = sample_dataset(menu, w, kTruth, 5000, 99);
    set_thread_count(saved);
    ASSERT_EQ(a.entries.size(), b.entries.size());
    for (std::size_t k = 0; k < a.entries.size(); ++k) {
        EXPECT_EQ(a.entries[k].id, b.entries[k].id);
        EXPECT_EQ(a.entries[k].counts, b.entries[k].counts);
    }
    const auto c = sample_dataset(menu, w, kTruth, 5000, 100);
    bool differs = false;
    for (std::size_t k = 0; k < a.entries.size(); ++k) {
        differs |= a.entries[k].counts != c.entries[k].counts;
    }
    EXPECT_TRUE(differs);
}

TEST(sample_dataset, draws_follow_counter_stream_layout) {
    // Oracle: categorical inversion of the documented stream for one experiment.
    const auto menu = single(optimal_pair_menu().at(0));
    const double w[] = {1.0};
    const auto d = sample_dataset(menu, w, kTruth, 1000, 5);
    const auto p = outcome_probs(menu.at(0), kTruth);
    CounterStream s(5, 0);
    std::array<std::uint64_t, 4> counts{};
    for (std::uint64_t k = 0; k < 1000; ++k) {
        const double u = s.uniform(k);
        double acc = 0;
        int i = 0;
        for (; i < 3; ++i) {
            acc += p[i];
            if (u < acc) {
                break;
            }
        }
        ++counts[i];
    }
    EXPECT_EQ(d.entries[0].counts, counts);
}

TEST(dataset, validate_rejects_inconsistent_counts) {
    OutcomeDataset d;
    d.entries.push_back({0, 3, {1, 1, 0, 0}});
    d.total_n = 3;
    EXPECT_THROW(d.validate(), ContractError);
    d.entries[0].counts = {1, 1, 1, 0};
    EXPECT_NO_THROW(d.validate());
    d.total_n = 4;
    EXPECT_THROW(d.validate(), ContractError);
}

TEST(log_likelihood, examples) {
    const auto menu = optimal_pair_menu();
    OutcomeDataset empty;
    EXPECT_EQ(log_likelihood(empty, menu, kTruth), 0.0);

    // +x on qubit 1 measured along z with no flip-flop: each outcome has probability 1/2.
    const auto half = single(Experiment::make(0, {{{kPi / 2, 0}, {0, 0}}}, {{{0, 0}, {0, 0}}}, 1.0));
    OutcomeDataset one;
    one.entries.push_back({0, 1, {0, 0, 1, 0}});
    one.total_n = 1;
    EXPECT_NEAR(log_likelihood(one, half, at(0, 0.7)), std::log(0.5), 1e-14);

    OutcomeDataset bad;
    bad.entries.push_back({5, 1, {1, 0, 0, 0}});
    bad.total_n = 1;
    EXPECT_THROW(log_likelihood(bad, menu, kTruth), ContractError);

    // An observed outcome the model forbids.
    OutcomeDataset forbidden;
    forbidden.entries.push_back({0, 1, {0, 1, 0, 0}});
    forbidden.total_n = 1;
    EXPECT_EQ(log_likelihood(forbidden, single(stationary()), kTruth), -INFINITY);
}

TEST(log_likelihood, matches_direct_sum_and_g_periodic) {
    const auto menu = optimal_pair_menu();
    const auto d = sample_dataset(menu, kOptWeights, kTruth, 200, 1);
    for (const auto &p : {at(1, 1), at(0.4, 2.5), at(2.2, 0.1)}) {
        double direct = 0;
        for (const auto &e : d.entries) {
            const auto probs = outcome_probs(menu.at(e.id), p);
            for (int i = 0; i < 4; ++i) {
                if (e.counts[i] > 0) {
                    direct += static_cast<double>(e.counts[i]) * std::log(probs[i]);
                }
            }
        }
        EXPECT_NEAR(log_likelihood(d, menu, p), direct, 1e-10 * std::abs(direct));
        EXPECT_NEAR(log_likelihood(d, menu, p), log_likelihood(d, menu, at(p.f, p.g + kPi)), 1e-8);
    }
}

TEST(mle_grid, flat_surface_tie_break) {
    const auto menu = single(stationary());
    OutcomeDataset d;
    d.entries.push_back({0, 10, {10, 0, 0, 0}});
    d.total_n = 10;
    GridSpec g{0.5, 2.0, 4, 0.25, 1.0, 3};
    const auto s = mle_grid(d, menu, g);
    EXPECT_EQ(s.argmax_f, 0.5);
    EXPECT_EQ(s.argmax_g, 0.25);
    EXPECT_EQ(s.loglik.size(), 12u);
    for (double v : s.loglik) {
        EXPECT_NEAR(v, 0.0, 1e-12);
    }
}

TEST(mle_grid, grid_spec_contract) {
    GridSpec g{0, 1, 1, 0, 1, 5};
    EXPECT_THROW(g.validate(), ContractError);
    g = {0, INFINITY, 3, 0, 1, 3};
    EXPECT_THROW(g.validate(), ContractError);
    g = {0, 3, 301, 0, kPi, 301};
    EXPECT_EQ(g.f_at(0), 0);
    EXPECT_EQ(g.f_at(300), 3);
    EXPECT_NEAR(g.g_at(150), kPi / 2, 1e-15);
}

TEST(mle_grid, default_pipeline_recovers_truth) {
    const auto menu = optimal_pair_menu();
    const auto d = sample_dataset(menu, kOptWeights, kTruth, 200, 1);
    const auto grid = default_grid(menu, d);
    EXPECT_EQ(grid.nf, 301u);
    EXPECT_EQ(grid.f_max, 3.0);
    EXPECT_NEAR(grid.g_max, kPi, 1e-15);
    const auto s = mle_grid(d, menu, grid);
    EXPECT_NEAR(*std::max_element(s.loglik.begin(), s.loglik.end()), s.max_loglik, 1e-9);
    const auto refined = mle_refine(d, menu, at(s.argmax_f, s.argmax_g));
    EXPECT_LE(dist(refined, at(s.argmax_f, s.argmax_g)), 0.05);
    // Three CR standard deviations at N = 200.
    EXPECT_LE(dist(refined, kTruth), 3 * std::sqrt(0.0042));
    EXPECT_GE(log_likelihood(d, menu, refined), s.max_loglik);
}

TEST(mle_grid, surface_is_g_periodic_for_single_time) {
    const auto menu = optimal_pair_menu();
    const auto d = sample_dataset(menu, kOptWeights, kTruth, 200, 2);
    const GridSpec g{0.2, 2.8, 14, 0.0, 2 * kPi, 41};  // G step pi/20
    const auto s = mle_grid(d, menu, g);
    for (std::size_t i = 0; i < g.nf; ++i) {
        for (std::size_t j = 0; j + 20 < g.ng; ++j) {
            EXPECT_NEAR(s.loglik[i * g.ng + j], s.loglik[i * g.ng + j + 20], 1e-8);
        }
    }
}

TEST(mle_grid, multi_time_breaks_periodicity) {
    const auto menu = multi_time_pair({1.0, 1.1, 1.4});
    const std::vector<double> w(menu.size(), 1.0 / menu.size());
    const auto d = sample_dataset(menu, w, kTruth, 3000, 4);
    const auto grid = default_grid(menu, d, 121, 241);
    EXPECT_NEAR(grid.g_max, 2 * kPi, 1e-15);
    const auto s = mle_grid(d, menu, grid);
    // Half-period shift no longer leaves the surface unchanged.
    double worst = 0;
    for (std::size_t i = 0; i < grid.nf; ++i) {
        for (std::size_t j = 0; j + 60 < grid.ng; ++j) {
            worst = std::max(worst, std::abs(s.loglik[i * grid.ng + j] - s.loglik[i * grid.ng + j + 60]));
        }
    }
    EXPECT_GT(worst, 1.0);
    // Everything within 5 log-units of the maximum sits in one peak near the truth.
    for (std::size_t i = 0; i < grid.nf; ++i) {
        for (std::size_t j = 0; j < grid.ng; ++j) {
            if (s.loglik[i * grid.ng + j] >= s.max_loglik - 5) {
                EXPECT_LE(dist(at(grid.f_at(i), grid.g_at(j)), at(s.argmax_f, s.argmax_g)), 0.3);
            }
        }
    }
    EXPECT_LE(dist(at(s.argmax_f, s.argmax_g), kTruth), 0.15);
}

TEST(mle_grid, invariant_under_outcome_relabeling) {
    // Flipping qubit 1's measurement axis swaps outcomes (0,1) <-> (2,3).
    const auto menu = optimal_pair_menu();
    ExperimentMenu flipped;
    for (const auto &e : menu.experiments) {
        auto m = e.meas_angles;
        m[0] = {kPi - m[0].polar, m[0].azimuth + kPi};
        flipped.experiments.push_back(Experiment::make(e.id, e.prep_angles, m, e.t));
    }
    const auto d = sample_dataset(menu, kOptWeights, kTruth, 300, 6);
    auto relabeled = d;
    for (auto &e : relabeled.entries) {
        e.counts = {e.counts[2], e.counts[3], e.counts[0], e.counts[1]};
    }
    const GridSpec g{0.5, 1.5, 21, 0.5, 1.5, 21};
    const auto a = mle_grid(d, menu, g);
    const auto b = mle_grid(relabeled, flipped, g);
    for (std::size_t k = 0; k < a.loglik.size(); ++k) {
        EXPECT_NEAR(a.loglik[k], b.loglik[k], 1e-9 * std::abs(a.loglik[k]));
    }
}

TEST(mle_refine, fixed_point_ascent_and_invalid_start) {
    const auto menu = optimal_pair_menu();
    const auto d = sample_dataset(menu, kOptWeights, kTruth, 2000, 8);
    const auto best = mle_refine(d, menu, at(1.05, 0.95));
    const auto again = mle_refine(d, menu, best);
    EXPECT_LE(dist(best, again), 1e-6);
    for (const auto &start : {at(0.8, 1.2), at(1.3, 0.6), at(1.1, 0.9)}) {
        EXPECT_GE(log_likelihood(d, menu, mle_refine(d, menu, start)), log_likelihood(d, menu, start));
    }

    OutcomeDataset forbidden;
    forbidden.entries.push_back({0, 1, {0, 1, 0, 0}});
    forbidden.total_n = 1;
    EXPECT_THROW(mle_refine(forbidden, single(stationary()), at(1, 1)), InvalidStartError);
    EXPECT_THROW(mle_refine(d, menu, at(NAN, 1)), InvalidStartError);
}

TEST(mle_refine, consistent_at_large_n) {
    const auto menu = optimal_pair_menu();
    const auto d = sample_dataset(menu, kOptWeights, kTruth, 100000, 9);
    const auto est = mle_estimate(d, menu, default_grid(menu, d, 121, 121));
    EXPECT_LE(std::abs(est.f - 1.1), 0.02);
    EXPECT_LE(std::abs(est.g - 0.9), 0.02);
}

TEST(adaptive_loop, single_round_matches_manual_pipeline) {
    const auto menu = sub_menu(build_full_menu({1.0}), [] {
        std::vector<std::size_t> ids;
        for (std::size_t k = 0; k < 114244; k += 37) {
            ids.push_back(k);
        }
        return ids;
    }());
    AdaptiveOptions opts;
    opts.grid_nf = 121;
    opts.grid_ng = 121;
    const auto trace = adaptive_loop(menu, at(1, 1), kTruth, 1, 200, 5, opts);
    ASSERT_EQ(trace.size(), 1u);
    const auto design = optimize_a_design(menu_fishers(menu, at(1, 1)));
    EXPECT_EQ(trace[0].design.weights.weights, design.weights.weights);
    const auto data = sample_dataset(menu, design.weights.weights, kTruth, 200, derive_seed(5, 0));
    const auto est = mle_estimate(data, menu, default_grid(menu, data, 121, 121), at(1, 1));
    EXPECT_EQ(trace[0].round, 1u);
    EXPECT_EQ(trace[0].estimate.f, est.f);
    EXPECT_EQ(trace[0].estimate.g, est.g);
    EXPECT_THROW(adaptive_loop(menu, at(1, 1), kTruth, 0, 200, 5, opts), RangeError);
}

TEST(adaptive_loop, median_error_non_increasing) {
    // A thinned menu keeps 50 seeded three-round runs affordable.
    std::vector<std::size_t> ids;
    for (std::size_t k = 0; k < 114244; k += 101) {
        ids.push_back(k);
    }
    const auto menu = sub_menu(build_full_menu({1.0}), ids);
    AdaptiveOptions opts;
    opts.grid_nf = 61;
    opts.grid_ng = 61;
    std::array<std::vector<double>, 3> err;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto trace = adaptive_loop(menu, at(1, 1), kTruth, 3, 200, seed, opts);
        for (std::size_t r = 0; r < 3; ++r) {
            err[r].push_back(dist(trace[r].estimate, kTruth));
        }
    }
    std::array<double, 3> med{};
    for (std::size_t r = 0; r < 3; ++r) {
        std::nth_element(err[r].begin(), err[r].begin() + 25, err[r].end());
        med[r] = err[r][25];
    }
    EXPECT_LE(med[1], med[0]);
    EXPECT_LE(med[2], med[1]);
}

TEST(adaptive_loop, truth_equal_to_guess_keeps_design) {
    const auto menu = sub_menu(build_full_menu({1.0}), [] {
        std::vector<std::size_t> ids;
        for (std::size_t k = 0; k < 114244; k += 53) {
            ids.push_back(k);
        }
        return ids;
    }());
    AdaptiveOptions opts;
    opts.grid_nf = 121;
    opts.grid_ng = 121;
    const auto trace = adaptive_loop(menu, at(1, 1), at(1, 1), 2, 20000, 3, opts);
    ASSERT_LE(dist(trace[0].estimate, at(1, 1)), 0.01);
    const auto s1 = trace[0].design.weights.support(1e-3);
    const auto s2 = trace[1].design.weights.support(1e-3);
    EXPECT_EQ(s1, s2);
}

TEST(mse_curve, saturates_cramer_rao_at_large_n) {
    const auto menu = optimal_pair_menu();
    const std::uint64_t ns[] = {10000, 20000};
    const auto rows = mse_curve(menu, kOptWeights, kTruth, at(1, 1), ns, 200, 11);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_NEAR(rows[0].cr_reference, 2 * rows[1].cr_reference, 1e-18);
    EXPECT_LE(std::abs(rows[0].mse_mean / rows[0].cr_reference - 1), 0.25) << rows[0].mse_mean;
    EXPECT_THROW(mse_curve(menu, kOptWeights, kTruth, at(1, 1), ns, 9, 11), RangeError);
}

TEST(monte_carlo_estimates, variance_not_below_bound_at_n200) {
    const auto menu = optimal_pair_menu();
    const auto est = monte_carlo_estimates(menu, kOptWeights, kTruth, 200, 200, 21);
    double mf = 0, mg = 0;
    for (const auto &e : est) {
        mf += e.f / est.size();
        mg += e.g / est.size();
    }
    double var = 0;
    for (const auto &e : est) {
        var += ((e.f - mf) * (e.f - mf) + (e.g - mg) * (e.g - mg)) / (est.size() - 1);
    }
    EXPECT_GE(var, 0.8 * 0.0042);
}
