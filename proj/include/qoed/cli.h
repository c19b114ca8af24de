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

#ifndef QOED_CLI_H
#define QOED_CLI_H

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qoed/design.h"
#include "qoed/estimate.h"
#include "qoed/io.h"

namespace qoed {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitCertificateFail = 4;

/// Everything a run depends on. Every field has a config-file key of the same name.
struct RunConfig {
    double theta_f = 1.0;
    double theta_g = 1.0;
    double truth_f = 1.1;
    double truth_g = 0.9;
    double delta_omega = 1.0;
    std::vector<double> times{1.0};
    /// "full", "suboptimal", "table3", or a path to a menu JSON file.
    std::string menu = "full";
    std::uint64_t n = 200;
    std::uint64_t seed = 1;
    /// Unset means the command's own default grid.
    std::optional<GridSpec> grid;
    std::size_t threads = 0;  ///< 0 = all hardware threads
    std::string out = ".";
    double gate_error_prep = 0;
    double gate_error_meas = 0;
    std::string design;   ///< default <out>/design.json
    std::string dataset;  ///< default <out>/dataset.json
    std::size_t rounds = 3;
    std::size_t trials = 100;
    std::vector<std::uint64_t> n_list{50, 100, 200, 400, 800};
    SolverOptions solver;

    /// Throws ContractError on non-finite numbers, empty times, or unknown keys.
    static RunConfig from_json(const Json &j);
    Json to_json() const;
    /// Hash of to_json() without the fields that cannot change results (out, threads).
    std::string hash() const;

    ModelParams guess() const;
    ModelParams truth() const;
};

/// "fmin:fmax:nf,gmin:gmax:ng".
GridSpec parse_grid(const std::string &s);

/// Entry point of the qoed tool. Returns the process exit code.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace qoed

#endif  // QOED_CLI_H
