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

#include "qoed/fisher.h"

#include <algorithm>
#include <cmath>

#include "qoed/parallel.h"

namespace qoed {

namespace {

OutcomeProbs probs_from(const ComplexMatrix &u, const ComplexMatrix &rho0, const std::array<ComplexMatrix, 4> &povm) {
    const ComplexMatrix rho = matmul(matmul(u, rho0), dagger(u));
    OutcomeProbs p{};
    for (std::size_t i = 0; i < 4; ++i) {
        const double v = trace_of_product(povm[i], rho).real();
        if (!(v >= -kProbSlack && v <= 1 + kProbSlack)) {
            throw NumericalIntegrityError("Born probability " + std::to_string(v) + " outside [0, 1]");
        }
        p[i] = std::clamp(v, 0.0, 1.0);
    }
    return p;
}

// Parameter points for central differences: index 0 is the base point, then
// (+h, -h) pairs for each free parameter in order.
std::vector<ModelParams> stencil(const ModelParams &params, double h) {
    if (!(h > 0)) {
        throw RangeError("finite-difference step must be positive");
    }
    std::vector<ModelParams> pts{params};
    for (Param p : params.free_params()) {
        ModelParams plus = params;
        ModelParams minus = params;
        plus.set(p, params.get(p) + h);
        minus.set(p, params.get(p) - h);
        pts.push_back(plus);
        pts.push_back(minus);
    }
    return pts;
}

OutcomeDistribution distribution_from_stencil(std::span<const OutcomeProbs> probs, std::size_t n_free, double h) {
    OutcomeDistribution d;
    d.probs = probs[0];
    d.grads = RealMatrix(4, n_free);
    for (std::size_t j = 0; j < n_free; ++j) {
        const OutcomeProbs &plus = probs[1 + 2 * j];
        const OutcomeProbs &minus = probs[2 + 2 * j];
        for (std::size_t i = 0; i < 4; ++i) {
            d.grads(i, j) = (plus[i] - minus[i]) / (2 * h);
        }
    }
    return d;
}

}  // namespace

OutcomeProbs born_probs(const ComplexMatrix &u, const ComplexMatrix &rho0, const std::array<ComplexMatrix, 4> &povm) {
    return probs_from(u, rho0, povm);
}

OutcomeProbs born_probs(const ComplexMatrix &u, const Experiment &exp) {
    return probs_from(u, exp.initial_state(), exp.povm());
}

OutcomeProbs outcome_probs(const Experiment &exp, const ModelParams &params) {
    return born_probs(propagate(params, exp.t).u, exp);
}

OutcomeDistribution outcome_grads(const Experiment &exp, const ModelParams &params, double h) {
    const auto pts = stencil(params, h);
    const ComplexMatrix rho0 = exp.initial_state();
    const auto povm = exp.povm();
    std::vector<OutcomeProbs> probs;
    probs.reserve(pts.size());
    for (const auto &pt : pts) {
        probs.push_back(probs_from(propagate(pt, exp.t).u, rho0, povm));
    }
    return distribution_from_stencil(probs, params.free_count(), h);
}

FisherMatrix fisher_from_distribution(const OutcomeDistribution &dist, const ModelParams &params) {
    const std::size_t n = dist.grads.cols();
    FisherMatrix f;
    f.m = RealMatrix(n, n);
    f.theta_at = params;
    for (std::size_t i = 0; i < 4; ++i) {
        const double p = dist.probs[i];
        if (p <= kProbFloor) {
            double g2 = 0;
            for (std::size_t a = 0; a < n; ++a) {
                g2 += dist.grads(i, a) * dist.grads(i, a);
            }
            if (std::sqrt(g2) > kGradCeiling) {
                f.singular = true;
            }
            continue;
        }
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = a; b < n; ++b) {
                f.m(a, b) += dist.grads(i, a) * dist.grads(i, b) / p;
            }
        }
    }
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < a; ++b) {
            f.m(a, b) = f.m(b, a);
        }
    }
    return f;
}

FisherMatrix experiment_fisher(const Experiment &exp, const ModelParams &params, double h) {
    return fisher_from_distribution(outcome_grads(exp, params, h), params);
}

FisherMatrix combined_fisher(std::span<const FisherMatrix> fishers, std::span<const double> weights) {
    if (fishers.empty() || fishers.size() != weights.size()) {
        throw ContractError("combined_fisher: need one weight per Fisher matrix");
    }
    double total = 0;
    for (double w : weights) {
        if (!(w >= 0)) {
            throw ContractError("combined_fisher: negative weight");
        }
        total += w;
    }
    if (std::abs(total - 1) > 1e-9) {
        throw ContractError("combined_fisher: weights sum to " + std::to_string(total));
    }
    const std::size_t n = fishers[0].dim();
    FisherMatrix out;
    out.m = RealMatrix(n, n);
    out.theta_at = fishers[0].theta_at;
    for (std::size_t k = 0; k < fishers.size(); ++k) {
        if (fishers[k].dim() != n) {
            throw ShapeError("combined_fisher: Fisher matrices of different size");
        }
        if (weights[k] == 0) {
            continue;
        }
        out.m += fishers[k].m * weights[k];
        out.singular = out.singular || fishers[k].singular;
    }
    return out;
}

double cramer_rao_trace_bound(const FisherMatrix &f, std::size_t n) {
    if (n < 1) {
        throw RangeError("cramer_rao_trace_bound: n must be >= 1");
    }
    const auto ev = sym_eigvals(f.m, 1e-8);
    if (f.singular || ev.front() <= 1e-12) {
        throw NotEstimableError("Fisher matrix is singular (smallest eigenvalue " + std::to_string(ev.front()) +
                                "); some parameter is not identifiable under this design");
    }
    return trace(inverse_small(f.m)) / static_cast<double>(n);
}

PropagatorCache::Key PropagatorCache::key(const ModelParams &params, double t) {
    return {params.f, params.g, params.delta_omega, static_cast<int>(params.frame), t};
}

const ComplexMatrix &PropagatorCache::get(const ModelParams &params, double t) {
    auto k = key(params, t);
    auto it = cache_.find(k);
    if (it == cache_.end()) {
        it = cache_.emplace(k, propagate(params, t).u).first;
    }
    return it->second;
}

const ComplexMatrix &PropagatorCache::find(const ModelParams &params, double t) const {
    auto it = cache_.find(key(params, t));
    if (it == cache_.end()) {
        throw ContractError("PropagatorCache::find: no entry for requested (params, t)");
    }
    return it->second;
}

void PropagatorCache::prepare(const ModelParams &params, std::span<const double> times) {
    for (double t : times) {
        get(params, t);
    }
}

std::vector<FisherMatrix> menu_fishers(const ExperimentMenu &menu, const ModelParams &params, double h) {
    const auto pts = stencil(params, h);
    const auto times = menu.distinct_times();
    PropagatorCache cache;
    for (const auto &pt : pts) {
        cache.prepare(pt, times);
    }
    const std::size_t n_free = params.free_count();
    std::vector<FisherMatrix> out(menu.size());
    parallel_for(menu.size(), [&](std::size_t k) {
        const Experiment &e = menu.experiments[k];
        const ComplexMatrix rho0 = e.initial_state();
        const auto povm = e.povm();
        std::vector<OutcomeProbs> probs(pts.size());
        for (std::size_t s = 0; s < pts.size(); ++s) {
            probs[s] = probs_from(cache.find(pts[s], e.t), rho0, povm);
        }
        out[k] = fisher_from_distribution(distribution_from_stencil(probs, n_free, h), params);
    });
    return out;
}

double single_qubit_rotation_fisher(double theta, double meas_azimuth, double eps_prep, double eps_meas, double h) {
    if (!(eps_prep >= 0 && eps_prep < 1) || !(eps_meas >= 0 && eps_meas < 1)) {
        throw RangeError("single_qubit_rotation_fisher: eps must be in [0, 1)");
    }
    const BlochVector axis = BlochVector{std::cos(meas_azimuth), std::sin(meas_azimuth), 0}.scaled(1 - eps_meas);
    const ComplexMatrix plus = bloch_operator(axis, 1);
    const ComplexMatrix minus = bloch_operator(axis, -1);
    const ComplexMatrix rho0 = bloch_operator(BlochVector{1 - eps_prep, 0, 0});
    auto probs = [&](double angle) {
        const Complex ph = std::exp(Complex(0, -angle / 2));
        const ComplexMatrix u = ComplexMatrix::diagonal({ph, std::conj(ph)});
        const ComplexMatrix rho = matmul(matmul(u, rho0), dagger(u));
        return std::array<double, 2>{trace_of_product(plus, rho).real(), trace_of_product(minus, rho).real()};
    };
    const auto p = probs(theta);
    const auto hi = probs(theta + h);
    const auto lo = probs(theta - h);
    double info = 0;
    for (std::size_t i = 0; i < 2; ++i) {
        const double g = (hi[i] - lo[i]) / (2 * h);
        if (p[i] > kProbFloor) {
            info += g * g / p[i];
        }
    }
    return info;
}

}  // namespace qoed
