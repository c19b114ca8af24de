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

#ifndef QOED_SWEEP_H
#define QOED_SWEEP_H

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "qoed/design.h"
#include "qoed/estimate.h"
#include "qoed/menu.h"
#include "qoed/model.h"

namespace qoed {

enum class CellFlag { kOk, kSingular, kNotConverged };

std::string_view cell_flag_name(CellFlag f);

struct LandscapeGrid {
    std::vector<double> f_axis;
    std::vector<double> g_axis;
    /// Row-major (f index major) diagonals of the inverse combined Fisher matrix.
    std::vector<double> inv11;
    std::vector<double> inv22;
    std::vector<CellFlag> flags;

    std::size_t index(std::size_t i, std::size_t j) const {
        return i * g_axis.size() + j;
    }
};

/// Square [0.25, 2] x [0.25, 2] grid with 36 points per axis.
GridSpec default_landscape_grid();

/// Solver options used per cell unless overridden: 500 iterations.
SolverOptions default_landscape_solver();

/// Re-optimizes the design at every grid point and records the inverse Fisher diagonals.
/// Cell failures are flagged, never thrown. `base` supplies delta_omega, frame and the free mask.
LandscapeGrid estimability_landscape(const ExperimentMenu &menu, const GridSpec &grid,
                                     const SolverOptions &opts = default_landscape_solver(),
                                     const ModelParams &base = {});

/// Evaluates one fixed design across the grid.
LandscapeGrid robustness_landscape(const ExperimentMenu &menu, std::span<const double> fixed_weights,
                                   const GridSpec &grid, const ModelParams &base = {});

struct ChannelStats {
    double mean = 0;
    double min = 0;
    double max = 0;
};

struct LandscapeStats {
    ChannelStats inv11;
    ChannelStats inv22;
    std::size_t ok_cells = 0;
};

/// Statistics over cells flagged ok. EmptyLandscapeError if there are none.
LandscapeStats landscape_stats(const LandscapeGrid &grid);

}  // namespace qoed

#endif  // QOED_SWEEP_H
