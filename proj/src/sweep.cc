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

#include "qoed/sweep.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qoed/parallel.h"

namespace qoed {

namespace {

LandscapeGrid empty_grid(const GridSpec &grid) {
    grid.validate();
    LandscapeGrid out;
    for (std::size_t i = 0; i < grid.nf; ++i) {
        out.f_axis.push_back(grid.f_at(i));
    }
    for (std::size_t j = 0; j < grid.ng; ++j) {
        out.g_axis.push_back(grid.g_at(j));
    }
    const std::size_t cells = grid.nf * grid.ng;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.inv11.assign(cells, nan);
    out.inv22.assign(cells, nan);
    out.flags.assign(cells, CellFlag::kSingular);
    return out;
}

// Records the inverse diagonals of f, or flags the cell singular.
void record(LandscapeGrid &g, std::size_t k, const FisherMatrix &f, CellFlag ok_flag) {
    if (f.singular || f.dim() < 2 || sym_eigvals(f.m, 1e-8).front() <= 1e-12) {
        g.flags[k] = CellFlag::kSingular;
        return;
    }
    const RealMatrix inv = inverse_small(f.m);
    g.inv11[k] = inv(0, 0);
    g.inv22[k] = inv(1, 1);
    g.flags[k] = ok_flag;
}

ChannelStats channel(const std::vector<double> &v, const std::vector<CellFlag> &flags) {
    ChannelStats s{0, std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    std::size_t n = 0;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (flags[k] != CellFlag::kOk) {
            continue;
        }
        s.mean += v[k];
        s.min = std::min(s.min, v[k]);
        s.max = std::max(s.max, v[k]);
        ++n;
    }
    s.mean /= static_cast<double>(n);
    return s;
}

}  // namespace

std::string_view cell_flag_name(CellFlag f) {
    switch (f) {
        case CellFlag::kOk:
            return "ok";
        case CellFlag::kSingular:
            return "singular";
        case CellFlag::kNotConverged:
            return "solver-not-converged";
    }
    return "?";
}

GridSpec default_landscape_grid() {
    return GridSpec{0.25, 2.0, 36, 0.25, 2.0, 36};
}

SolverOptions default_landscape_solver() {
    SolverOptions o;
    o.max_iters = 500;
    return o;
}

LandscapeGrid estimability_landscape(const ExperimentMenu &menu, const GridSpec &grid, const SolverOptions &opts,
                                     const ModelParams &base) {
    LandscapeGrid out = empty_grid(grid);
    // Cells run one after another; the Fisher sweep and the solver scan inside each cell are parallel.
    for (std::size_t i = 0; i < grid.nf; ++i) {
        for (std::size_t j = 0; j < grid.ng; ++j) {
            const std::size_t k = out.index(i, j);
            try {
                const ModelParams theta = base.with_fg(out.f_axis[i], out.g_axis[j]);
                const DesignResult r = optimize_a_design(menu_fishers(menu, theta), opts);
                record(out, k, r.fisher, r.converged ? CellFlag::kOk : CellFlag::kNotConverged);
            } catch (const NumericError &) {
                out.flags[k] = CellFlag::kSingular;
            }
        }
    }
    return out;
}

LandscapeGrid robustness_landscape(const ExperimentMenu &menu, std::span<const double> fixed_weights,
                                   const GridSpec &grid, const ModelParams &base) {
    if (fixed_weights.size() != menu.size()) {
        throw ContractError("robustness_landscape: need one weight per menu experiment");
    }
    std::vector<std::size_t> support;
    std::vector<double> w;
    double total = 0;
    for (std::size_t e = 0; e < fixed_weights.size(); ++e) {
        if (!(fixed_weights[e] >= 0)) {
            throw ContractError("robustness_landscape: negative weight");
        }
        if (fixed_weights[e] > 0) {
            support.push_back(e);
            w.push_back(fixed_weights[e]);
            total += fixed_weights[e];
        }
    }
    if (support.empty() || std::abs(total - 1) > 1e-9) {
        throw ContractError("robustness_landscape: weights must sum to 1");
    }
    LandscapeGrid out = empty_grid(grid);
    parallel_for(grid.nf * grid.ng, [&](std::size_t k) {
        const ModelParams theta = base.with_fg(out.f_axis[k / grid.ng], out.g_axis[k % grid.ng]);
        try {
            std::vector<FisherMatrix> fs;
            fs.reserve(support.size());
            for (std::size_t e : support) {
                fs.push_back(experiment_fisher(menu.at(e), theta));
            }
            record(out, k, combined_fisher(fs, w), CellFlag::kOk);
        } catch (const NumericError &) {
            out.flags[k] = CellFlag::kSingular;
        }
    });
    return out;
}

LandscapeStats landscape_stats(const LandscapeGrid &grid) {
    LandscapeStats s;
    s.ok_cells = static_cast<std::size_t>(std::count(grid.flags.begin(), grid.flags.end(), CellFlag::kOk));
    if (s.ok_cells == 0) {
        throw EmptyLandscapeError("landscape_stats: no cell is flagged ok");
    }
    s.inv11 = channel(grid.inv11, grid.flags);
    s.inv22 = channel(grid.inv22, grid.flags);
    return s;
}

}  // namespace qoed
