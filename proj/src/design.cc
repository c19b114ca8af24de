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

#include "qoed/design.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qoed/parallel.h"
#include "qoed/rng.h"

namespace qoed {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kExchangeSourceFrac = 1e-3;

// Fisher matrices are symmetric, so the solver works on packed upper triangles:
// entry (a, b) with a <= b lives at index a * p - a * (a - 1) / 2 + (b - a).
struct Packed {
    std::size_t p = 0;
    std::size_t u = 0;
    std::vector<double> data;  // n * u

    const double *row(std::size_t e) const {
        return data.data() + e * u;
    }
};

Packed pack(std::span<const FisherMatrix> fishers) {
    if (fishers.empty()) {
        throw ContractError("design: empty list of Fisher matrices");
    }
    Packed out;
    out.p = fishers[0].dim();
    out.u = out.p * (out.p + 1) / 2;
    out.data.reserve(fishers.size() * out.u);
    for (const auto &f : fishers) {
        if (f.dim() != out.p || !f.m.is_square()) {
            throw ShapeError("design: Fisher matrices of different size");
        }
        for (std::size_t a = 0; a < out.p; ++a) {
            for (std::size_t b = a; b < out.p; ++b) {
                out.data.push_back(f.m(a, b));
            }
        }
    }
    return out;
}

RealMatrix unpack(const double *v, std::size_t p) {
    RealMatrix m(p, p);
    std::size_t k = 0;
    for (std::size_t a = 0; a < p; ++a) {
        for (std::size_t b = a; b < p; ++b) {
            m(a, b) = v[k];
            m(b, a) = v[k];
            ++k;
        }
    }
    return m;
}

// Tr(M^-1) for a packed symmetric M, +inf if M is not positive definite.
double trace_inverse_packed(const double *v, std::size_t p) {
    if (p == 1) {
        return v[0] > 0 ? 1 / v[0] : kInf;
    }
    if (p == 2) {
        const double det = v[0] * v[2] - v[1] * v[1];
        if (!(v[0] > 0) || !(det > 1e-14 * (v[0] * v[2] + v[1] * v[1]))) {
            return kInf;
        }
        return (v[0] + v[2]) / det;
    }
    try {
        const RealMatrix m = unpack(v, p);
        const auto ev = sym_eigvals(m, 1e-8);
        if (!(ev.front() > 1e-14 * std::abs(ev.back()))) {
            return kInf;
        }
        return trace(inverse_small(m));
    } catch (const NumericError &) {
        return kInf;
    }
}

struct Evaluation {
    std::vector<double> f;  // packed combined Fisher
    RealMatrix finv{1, 1};
    double objective = kInf;
    // d_E = Tr(A I_E) = coef . packed(I_E), A = F^-1 F^-1.
    std::vector<double> coef;
};

std::vector<double> combine(const Packed &pk, std::span<const double> w) {
    std::vector<double> f(pk.u, 0.0);
    for (std::size_t e = 0; e < w.size(); ++e) {
        if (w[e] == 0) {
            continue;
        }
        const double *r = pk.row(e);
        for (std::size_t k = 0; k < pk.u; ++k) {
            f[k] += w[e] * r[k];
        }
    }
    return f;
}

bool evaluate_packed(const std::vector<double> &f, std::size_t p, Evaluation &ev) {
    ev.f = f;
    ev.objective = trace_inverse_packed(f.data(), p);
    if (!std::isfinite(ev.objective)) {
        return false;
    }
    ev.finv = inverse_small(unpack(f.data(), p));
    const RealMatrix a = matmul(ev.finv, ev.finv);
    ev.coef.assign(p * (p + 1) / 2, 0.0);
    std::size_t k = 0;
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = i; j < p; ++j) {
            ev.coef[k++] = (i == j ? 1.0 : 2.0) * a(i, j);
        }
    }
    return true;
}

double directional(const Packed &pk, const std::vector<double> &coef, std::size_t e) {
    const double *r = pk.row(e);
    double s = 0;
    for (std::size_t k = 0; k < pk.u; ++k) {
        s += coef[k] * r[k];
    }
    return s;
}

// Fills d with d_E for every E and returns argmax (lowest index on ties).
// Blocks are reduced in index order so the result does not depend on threads.
std::size_t scan_derivatives(const Packed &pk, const std::vector<double> &coef, std::vector<double> &d) {
    const std::size_t n = d.size();
    constexpr std::size_t kBlock = 4096;
    const std::size_t blocks = (n + kBlock - 1) / kBlock;
    std::vector<std::size_t> best(blocks);
    parallel_for(blocks, [&](std::size_t b) {
        const std::size_t lo = b * kBlock;
        const std::size_t hi = std::min(n, lo + kBlock);
        std::size_t arg = lo;
        for (std::size_t e = lo; e < hi; ++e) {
            d[e] = directional(pk, coef, e);
            if (d[e] > d[arg]) {
                arg = e;
            }
        }
        best[b] = arg;
    });
    std::size_t arg = best[0];
    for (std::size_t b = 1; b < blocks; ++b) {
        if (d[best[b]] > d[arg]) {
            arg = best[b];
        }
    }
    return arg;
}

// Minimizes the convex function a -> Tr((F + a D)^-1) over [0, a_max].
double exchange_line_search(const std::vector<double> &f, const double *dj, const double *dk, std::size_t p,
                            double a_max) {
    const std::size_t u = f.size();
    std::vector<double> m(u);
    RealMatrix diff = unpack(dj, p);
    diff -= unpack(dk, p);
    auto slope = [&](double a) {
        for (std::size_t k = 0; k < u; ++k) {
            m[k] = f[k] + a * (dj[k] - dk[k]);
        }
        if (!std::isfinite(trace_inverse_packed(m.data(), p))) {
            return kInf;  // left the PD cone: treat as beyond the minimum
        }
        const RealMatrix inv = inverse_small(unpack(m.data(), p));
        return -trace(matmul(matmul(inv, diff), inv));
    };
    if (slope(a_max) <= 0) {
        return a_max;
    }
    double lo = 0;
    double hi = a_max;
    for (int it = 0; it < 60 && hi - lo > 1e-16 * a_max; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (slope(mid) <= 0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

std::vector<double> normalized(std::vector<double> w) {
    double s = 0;
    for (double x : w) {
        s += x;
    }
    for (double &x : w) {
        x /= s;
    }
    return w;
}

DesignResult solve_from(const Packed &pk, std::span<const FisherMatrix> fishers, std::vector<double> w,
                        const SolverOptions &opts) {
    const std::size_t n = w.size();
    const std::size_t p = pk.p;
    DesignResult res;
    Evaluation ev;
    if (!evaluate_packed(combine(pk, w), p, ev)) {
        throw NotEstimableError("design: no invertible combination of the Fisher matrices exists");
    }
    std::vector<double> d(n);
    double gamma = opts.gamma;
    std::size_t it = 0;
    double gap = kInf;
    for (;; ++it) {
        const std::size_t jmax = scan_derivatives(pk, ev.coef, d);
        gap = d[jmax] - ev.objective;
        res.objective_history.push_back(ev.objective);
        // Linearity self-check: sum_E w_E d_E = Tr(F^-1 F F^-1) = Tr(F^-1).
        double avg = 0;
        for (std::size_t e = 0; e < n; ++e) {
            avg += w[e] * d[e];
        }
        if (std::abs(avg - ev.objective) > 1e-6 * ev.objective) {
            throw NumericalIntegrityError("design: weighted directional derivative does not match the objective");
        }
        if (gap <= opts.gap_tol_rel * ev.objective) {
            res.converged = true;
            break;
        }
        if (it >= opts.max_iters) {
            break;
        }

        // Multiplicative step, with gamma halved until the objective does not increase.
        for (int tries = 0; tries < 30; ++tries) {
            std::vector<double> trial(n);
            for (std::size_t e = 0; e < n; ++e) {
                if (w[e] > 0) {
                    const double r = d[e] / ev.objective;
                    trial[e] = w[e] * (gamma == 1.0 ? r : std::pow(r, gamma));
                }
            }
            trial = normalized(std::move(trial));
            Evaluation tev;
            if (evaluate_packed(combine(pk, trial), p, tev) && tev.objective <= ev.objective) {
                w = std::move(trial);
                ev = std::move(tev);
                break;
            }
            gamma *= 0.5;
        }

        // Vertex exchanges: move mass from the weakest support point to the steepest experiment.
        for (std::size_t x = 0; x < opts.exchanges_per_iter; ++x) {
            const std::size_t j = scan_derivatives(pk, ev.coef, d);
            // Only points carrying real mass are exchange sources; the multiplicative
            // step already drains the long tail of tiny weights.
            const double wmax = *std::max_element(w.begin(), w.end());
            std::size_t k = n;
            for (std::size_t e = 0; e < n; ++e) {
                if (w[e] > kExchangeSourceFrac * wmax && e != j && (k == n || d[e] < d[k])) {
                    k = e;
                }
            }
            if (k == n || d[j] - d[k] <= 1e-15 * ev.objective) {
                break;
            }
            const double a = exchange_line_search(ev.f, pk.row(j), pk.row(k), p, w[k]);
            if (!(a > 0)) {
                break;
            }
            std::vector<double> f = ev.f;
            for (std::size_t q = 0; q < pk.u; ++q) {
                f[q] += a * (pk.row(j)[q] - pk.row(k)[q]);
            }
            Evaluation tev;
            if (!evaluate_packed(f, p, tev) || tev.objective > ev.objective) {
                break;
            }
            w[j] += a;
            w[k] = (a == w[k]) ? 0.0 : w[k] - a;
            ev = std::move(tev);
        }

        // Refresh from scratch so rounding drift from incremental updates does not accumulate.
        w = normalized(std::move(w));
        Evaluation fresh;
        if (!evaluate_packed(combine(pk, w), p, fresh)) {
            throw NumericalIntegrityError("design: iterate left the positive-definite cone");
        }
        if (fresh.objective > res.objective_history.back() * (1 + 1e-12)) {
            throw NumericalIntegrityError("design: objective increased between iterations");
        }
        ev = std::move(fresh);
    }
    res.iterations = it;
    res.equivalence_gap = gap;
    res.objective = ev.objective;
    res.fisher.m = unpack(ev.f.data(), p);
    res.fisher.theta_at = fishers[0].theta_at;
    res.weights.weights = std::move(w);
    res.merged_support = merge_support(fishers, res.weights.weights, opts.support_tol, opts.merge_tol);
    return res;
}

}  // namespace

std::vector<std::size_t> DesignWeights::support(double tol) const {
    std::vector<std::size_t> out;
    for (std::size_t e = 0; e < weights.size(); ++e) {
        if (weights[e] > tol) {
            out.push_back(e);
        }
    }
    return out;
}

double a_objective(std::span<const FisherMatrix> fishers, std::span<const double> weights) {
    const FisherMatrix f = combined_fisher(fishers, weights);
    const auto ev = sym_eigvals(f.m, 1e-8);
    if (!(ev.front() > 1e-12)) {
        throw NotEstimableError("design: combined Fisher matrix is singular");
    }
    return trace(inverse_small(f.m));
}

DesignResult optimize_a_design(std::span<const FisherMatrix> fishers, const SolverOptions &opts) {
    const Packed pk = pack(fishers);
    if (!(opts.gap_tol_rel >= 0) || !(opts.gamma > 0) || !(opts.gamma <= 1)) {
        throw RangeError("optimize_a_design: need gap_tol_rel >= 0 and gamma in (0, 1]");
    }
    const std::size_t n = fishers.size();
    std::vector<std::size_t> candidates;
    for (std::size_t e = 0; e < n; ++e) {
        if (fishers[e].singular) {
            throw NotEstimableError("design: experiment " + std::to_string(e) + " has a flagged singular Fisher matrix");
        }
        if (trace(fishers[e].m) > 0) {
            candidates.push_back(e);
        }
    }
    if (candidates.empty()) {
        throw NotEstimableError("design: every experiment is uninformative at this parameter point");
    }
    std::vector<double> w0(n, 0.0);
    for (std::size_t e : candidates) {
        w0[e] = 1.0 / static_cast<double>(candidates.size());
    }
    DesignResult best = solve_from(pk, fishers, w0, opts);
    for (std::size_t s = 0; s < opts.multistart; ++s) {
        // Dirichlet(1, ..., 1) start over the candidates.
        CounterStream stream(derive_seed(opts.seed, s, 0xD15), 0);
        std::vector<double> w(n, 0.0);
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            w[candidates[i]] = -std::log1p(-stream.uniform(i));
        }
        DesignResult r = solve_from(pk, fishers, normalized(std::move(w)), opts);
        if (r.objective < best.objective) {
            best = std::move(r);
        }
    }
    return best;
}

double equivalence_gap(std::span<const FisherMatrix> fishers, std::span<const double> weights) {
    const Packed pk = pack(fishers);
    if (weights.size() != fishers.size()) {
        throw ContractError("equivalence_gap: need one weight per Fisher matrix");
    }
    combined_fisher(fishers, weights);  // validates the weights
    Evaluation ev;
    if (!evaluate_packed(combine(pk, weights), pk.p, ev)) {
        throw NotEstimableError("equivalence_gap: combined Fisher matrix is singular");
    }
    std::vector<double> d(fishers.size());
    const std::size_t j = scan_derivatives(pk, ev.coef, d);
    return d[j] - ev.objective;
}

bool schur_certificate(const RealMatrix &q, const FisherMatrix &f, double tol) {
    const std::size_t p = f.dim();
    if (q.rows() != p || q.cols() != p || 2 * p > RealMatrix::kMaxDim) {
        throw ShapeError("schur_certificate: Q and F must be p x p with p <= 4");
    }
    RealMatrix block(2 * p, 2 * p);
    for (std::size_t a = 0; a < p; ++a) {
        for (std::size_t b = 0; b < p; ++b) {
            block(a, b) = q(a, b);
            block(p + a, p + b) = f.m(a, b);
        }
        block(a, p + a) = 1;
        block(p + a, a) = 1;
    }
    return sym_eigvals(block, 1e-8).front() >= -tol;
}

DesignWeights brute_force_design(std::span<const FisherMatrix> fishers, double grid_step) {
    const std::size_t n = fishers.size();
    if (n == 0 || n > 6) {
        throw ContractError("brute_force_design: need between 1 and 6 Fisher matrices");
    }
    if (!(grid_step > 0 && grid_step <= 0.02)) {
        throw RangeError("brute_force_design: grid_step must be in (0, 0.02]");
    }
    const auto steps = static_cast<long>(std::llround(1.0 / grid_step));
    if (std::abs(static_cast<double>(steps) * grid_step - 1) > 1e-9) {
        throw RangeError("brute_force_design: 1 / grid_step must be an integer");
    }
    const Packed pk = pack(fishers);
    std::vector<long> c(n, 0);
    std::vector<long> best_c;
    double best = kInf;
    std::vector<double> f(pk.u);
    // Compositions of `steps` into n parts, visited in lexicographically increasing order.
    auto visit = [&](auto &&self, std::size_t i, long remaining) -> void {
        if (i + 1 == n) {
            c[i] = remaining;
            std::fill(f.begin(), f.end(), 0.0);
            for (std::size_t e = 0; e < n; ++e) {
                if (c[e] == 0) {
                    continue;
                }
                const double we = static_cast<double>(c[e]) / static_cast<double>(steps);
                for (std::size_t k = 0; k < pk.u; ++k) {
                    f[k] += we * pk.row(e)[k];
                }
            }
            const double obj = trace_inverse_packed(f.data(), pk.p);
            if (obj < best * (1 - 1e-12)) {
                best = obj;
                best_c = c;
            }
            return;
        }
        for (long v = 0; v <= remaining; ++v) {
            c[i] = v;
            self(self, i + 1, remaining - v);
        }
    };
    visit(visit, 0, steps);
    if (best_c.empty()) {
        throw NotEstimableError("brute_force_design: no grid point gives an invertible Fisher matrix");
    }
    DesignWeights out;
    for (long v : best_c) {
        out.weights.push_back(static_cast<double>(v) / static_cast<double>(steps));
    }
    return out;
}

std::vector<SupportPoint> merge_support(std::span<const FisherMatrix> fishers, std::span<const double> weights,
                                        double support_tol, double merge_tol) {
    if (weights.size() != fishers.size()) {
        throw ContractError("merge_support: need one weight per Fisher matrix");
    }
    std::vector<SupportPoint> out;
    for (std::size_t e = 0; e < weights.size(); ++e) {
        if (!(weights[e] > support_tol)) {
            continue;
        }
        bool merged = false;
        for (auto &sp : out) {
            const RealMatrix &rep = fishers[sp.id].m;
            if (max_abs_diff(rep, fishers[e].m) <= merge_tol * std::max(1.0, rep.max_abs())) {
                sp.weight += weights[e];
                sp.members.push_back(e);
                merged = true;
                break;
            }
        }
        if (!merged) {
            out.push_back({e, weights[e], {e}});
        }
    }
    return out;
}

}  // namespace qoed
