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

#include "qoed/io.h"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

using namespace qoed;

TEST(format_double, round_trips_and_non_finite) {
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (int k = 0; k < 1000; ++k) {
        const double v = u(rng) * std::pow(10.0, k % 40 - 20);
        EXPECT_EQ(std::stod(format_double(v)), v);
    }
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
    EXPECT_EQ(format_double(-std::numeric_limits<double>::infinity()), "-inf");
    EXPECT_EQ(format_double(std::nan("")), "nan");
}

TEST(config_hash, fnv_reference_and_sensitivity) {
    // Published FNV-1a 64-bit test vectors.
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
    const Json a{{"n", 200}, {"seed", 1}};
    const Json b{{"n", 201}, {"seed", 1}};
    EXPECT_EQ(config_hash(a).size(), 16u);
    EXPECT_EQ(config_hash(a), config_hash(Json{{"seed", 1}, {"n", 200}}));
    EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(params_json, round_trip) {
    ModelParams p;
    p.f = 1.1;
    p.g = 0.9000000000000001;
    p.delta_omega = 0.7;
    p.free_mask = {true, false, true};
    p.frame = Frame::kCorotating;
    const auto q = params_from_json(params_to_json(p));
    EXPECT_EQ(q.f, p.f);
    EXPECT_EQ(q.g, p.g);
    EXPECT_EQ(q.delta_omega, p.delta_omega);
    EXPECT_EQ(q.free_mask, p.free_mask);
    EXPECT_EQ(q.frame, p.frame);
}

TEST(menu_json, round_trip_is_bit_stable) {
    const auto menu = apply_gate_error(optimal_pair_menu(), 0.01, 0.02);
    const Json j = menu_to_json(menu);
    const auto back = menu_from_json(Json::parse(j.dump()));
    ASSERT_EQ(back.size(), menu.size());
    for (std::size_t k = 0; k < menu.size(); ++k) {
        const auto &a = menu.experiments[k], &b = back.experiments[k];
        for (int q = 0; q < 2; ++q) {
            EXPECT_EQ(a.prep_angles[q].polar, b.prep_angles[q].polar);
            EXPECT_EQ(a.prep_angles[q].azimuth, b.prep_angles[q].azimuth);
            EXPECT_EQ(a.meas_angles[q].polar, b.meas_angles[q].polar);
            EXPECT_EQ(a.meas_angles[q].azimuth, b.meas_angles[q].azimuth);
        }
        EXPECT_EQ(a.t, b.t);
        EXPECT_EQ(a.prep_scale, b.prep_scale);
        EXPECT_EQ(a.meas_scale, b.meas_scale);
    }
    EXPECT_EQ(menu_to_json(back).dump(), j.dump());
    EXPECT_TRUE(j.contains("version"));
    EXPECT_TRUE(j.contains("provenance"));

    Json empty = j;
    empty["experiments"] = Json::array();
    EXPECT_THROW(menu_from_json(empty), ContractError);
    Json bad_ids = j;
    bad_ids["experiments"][0]["id"] = 5;
    EXPECT_THROW(menu_from_json(bad_ids), ContractError);
}

TEST(design_json, round_trip) {
    ModelParams p;
    const auto fs = menu_fishers(optimal_pair_menu(), p);
    SolverOptions opts;
    opts.gap_tol_rel = 1e-7;
    const auto r = optimize_a_design(fs, opts);
    const Json j = design_to_json(r, opts);
    const auto d = design_from_json(Json::parse(j.dump()));
    EXPECT_EQ(d.objective, r.objective);
    EXPECT_EQ(d.gap, r.equivalence_gap);
    EXPECT_EQ(d.iterations, r.iterations);
    EXPECT_EQ(d.converged, r.converged);
    EXPECT_EQ(d.theta_at.f, 1.0);
    const auto w = d.weights(2);
    EXPECT_NEAR(w[0], r.weights.weights[0], 1e-15);
    EXPECT_NEAR(w[0] + w[1], 1, 1e-15);
    EXPECT_EQ(solver_options_from_json(d.options).gap_tol_rel, 1e-7);
    EXPECT_THROW(d.weights(1), ContractError);
}

TEST(dataset_json, round_trip) {
    ModelParams truth;
    truth.f = 1.1;
    truth.g = 0.9;
    const auto d = sample_dataset(suboptimal_menu(), std::vector<double>(12, 1.0 / 12), truth, 200, 7);
    const Json j = dataset_to_json(d);
    EXPECT_EQ(j.at("total_n"), 200);
    EXPECT_EQ(j.at("seed"), 7);
    const auto back = dataset_from_json(Json::parse(j.dump()));
    ASSERT_EQ(back.entries.size(), d.entries.size());
    for (std::size_t k = 0; k < d.entries.size(); ++k) {
        EXPECT_EQ(back.entries[k].id, d.entries[k].id);
        EXPECT_EQ(back.entries[k].n_runs, d.entries[k].n_runs);
        EXPECT_EQ(back.entries[k].counts, d.entries[k].counts);
    }
    Json broken = j;
    broken["entries"][0]["counts"][0] = 1000;
    EXPECT_THROW(dataset_from_json(broken), ContractError);
}

TEST(csv, headers_and_preamble) {
    ModelParams p;
    const auto fs = menu_fishers(optimal_pair_menu(), p);
    std::ostringstream a;
    write_fisher_csv(a, fs, "qoed 0.1.0 config abc");
    std::istringstream in(a.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "# qoed 0.1.0 config abc");
    std::getline(in, line);
    EXPECT_EQ(line, "id,m11,m12,m22");
    std::getline(in, line);
    EXPECT_EQ(line.substr(0, 2), "0,");

    std::ostringstream b;
    const MseRow rows[] = {{50, 0.1, 0.05, 0.02}};
    write_mse_csv(b, rows);
    EXPECT_EQ(b.str().substr(0, b.str().find('\n')), "n,mse_optimal,mse_reference,mse_median");

    LandscapeGrid g;
    g.f_axis = {1};
    g.g_axis = {1, 2};
    g.inv11 = {0.5, INFINITY};
    g.inv22 = {0.3, INFINITY};
    g.flags = {CellFlag::kOk, CellFlag::kSingular};
    std::ostringstream c;
    write_landscape_csv(c, g);
    EXPECT_EQ(c.str(), "f,g,inv11,inv22,flag\n1,1,0.5,0.3,ok\n1,2,inf,inf,singular\n");

    LikelihoodSurface s;
    s.f_axis = {0, 1};
    s.g_axis = {2};
    s.loglik = {-1.5, -INFINITY};
    std::ostringstream d;
    write_surface_csv(d, s);
    EXPECT_EQ(d.str(), "f,g,loglik\n0,2,-1.5\n1,2,-inf\n");
}

TEST(read_json_file, errors) {
    EXPECT_THROW(read_json_file("/nonexistent/qoed/file.json"), ContractError);
    const std::string path = ::testing::TempDir() + "qoed_bad.json";
    write_text_file(path, "{not json");
    EXPECT_THROW(read_json_file(path), ContractError);
    write_text_file(path, "{\"a\": 1}");
    EXPECT_EQ(read_json_file(path).at("a"), 1);
}
