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

#ifndef QOED_IO_H
#define QOED_IO_H

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qoed/design.h"
#include "qoed/estimate.h"
#include "qoed/menu.h"
#include "qoed/sweep.h"

namespace qoed {

using Json = nlohmann::json;

inline constexpr std::string_view kArtifactVersion = "qoed 0.1.0";

/// Shortest representation that parses back to the same double; "inf", "-inf", "nan" otherwise.
std::string format_double(double v);

std::uint64_t fnv1a64(std::string_view bytes);

/// 16 hex digits of FNV-1a over the compact dump of `config`.
std::string config_hash(const Json &config);

Json params_to_json(const ModelParams &p);
ModelParams params_from_json(const Json &j);

Json menu_to_json(const ExperimentMenu &menu);
/// ContractError on an empty menu or ids that are not 0..n-1 in order.
ExperimentMenu menu_from_json(const Json &j);

Json fisher_to_json(const FisherMatrix &f);

/// Design file contents.
struct DesignFile {
    ModelParams theta_at;
    double objective = 0;
    double gap = 0;
    /// Every experiment with weight above the reporting threshold, by id.
    std::vector<std::pair<std::size_t, double>> support;
    std::vector<SupportPoint> merged_support;
    std::size_t iterations = 0;
    bool converged = false;
    Json options;

    /// Weights over a menu of the given size, renormalized to sum to 1.
    std::vector<double> weights(std::size_t menu_size) const;
};

Json solver_options_to_json(const SolverOptions &o);
SolverOptions solver_options_from_json(const Json &j, SolverOptions base = {});

Json design_to_json(const DesignResult &r, const SolverOptions &opts);
DesignFile design_from_json(const Json &j);

Json dataset_to_json(const OutcomeDataset &d);
OutcomeDataset dataset_from_json(const Json &j);

/// Each CSV writer emits "# <preamble>" first when the preamble is non-empty.
void write_fisher_csv(std::ostream &os, std::span<const FisherMatrix> fishers, std::string_view preamble = {});
void write_surface_csv(std::ostream &os, const LikelihoodSurface &s, std::string_view preamble = {});
void write_landscape_csv(std::ostream &os, const LandscapeGrid &g, std::string_view preamble = {});
void write_mse_csv(std::ostream &os, std::span<const MseRow> rows, std::string_view preamble = {});

/// ContractError if the file cannot be opened or parsed.
Json read_json_file(const std::string &path);
void write_text_file(const std::string &path, const std::string &text);

}  // namespace qoed

#endif  // QOED_IO_H
