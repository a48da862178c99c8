// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <stdexcept>
#include <vector>

namespace ordstat {

/// Thrown when an adaptive quadrature fails to converge within its interval
/// budget. Carries the best available estimate so callers can degrade
/// gracefully instead of losing the work.
class NumericError : public std::runtime_error {
  public:
    NumericError(const std::string& what, double partial, double error_estimate)
        : std::runtime_error(what), partial_(partial), error_estimate_(error_estimate) {}
    double partial() const { return partial_; }
    double error_estimate() const { return error_estimate_; }

  private:
    double partial_;
    double error_estimate_;
};

namespace quad {

struct QuadOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_intervals = 4000;
    bool throw_on_failure = true;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    bool converged = false;
    long evaluations = 0;
};

namespace detail {

// Gauss 7 / Kronrod 15 panel, nodes and weights as in QUADPACK dqk15.
inline constexpr double kGK15Nodes[8] = {
    0.0,
    0.2077849550078985,
    0.4058451513773972,
    0.5860872354676911,
    0.7415311855993944,
    0.8648644233597691,
    0.9491079123427585,
    0.9914553711208126,
};
inline constexpr double kKronrodWeights[8] = {
    0.2094821410847278,
    0.2044329400752989,
    0.1903505780647854,
    0.1690047266392679,
    0.1406532597155259,
    0.1047900103222502,
    0.0630920926299785,
    0.0229353220105292,
};
// Gauss weights attach to the even-indexed nodes (0, 2, 4, 6).
inline constexpr double kGaussWeights[4] = {
    0.4179591836734694,
    0.3818300505051189,
    0.2797053914892767,
    0.1294849661688697,
};

struct Panel {
    double a, b;
    double value;
    double error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

template <class F>
Panel evaluate_panel(F&& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    const double f0 = f(mid);
    double kronrod = kKronrodWeights[0] * f0;
    double gauss = kGaussWeights[0] * f0;
    bool finite = std::isfinite(f0);
    for (int i = 1; i < 8; ++i) {
        const double dx = half * kGK15Nodes[i];
        const double fp = f(mid + dx);
        const double fm = f(mid - dx);
        finite = finite && std::isfinite(fp) && std::isfinite(fm);
        kronrod += kKronrodWeights[i] * (fp + fm);
        if ((i & 1) == 0) gauss += kGaussWeights[i / 2] * (fp + fm);
    }
    kronrod *= half;
    gauss *= half;

    // Non-finite samples (integrable singularity inside the panel) get a
    // finite sentinel error so the panel is subdivided until it shrinks away.
    constexpr double kSingularSentinel = 1e30;
    double err;
    if (!finite) {
        err = kSingularSentinel;
        kronrod = 0.0;
    } else {
        // QUADPACK-style sharpened estimate (200|K - G|)^{3/2}.
        err = std::abs(kronrod - gauss) * 200.0;
        err = err * std::sqrt(err) / 200.0;
        err = std::max(err, std::abs(kronrod) * 1e-16);
    }
    return Panel{a, b, kronrod, err};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod integration over [a, b], seeded with the
/// given breakpoints (useful when the integrand has known kinks or
/// singular endpoints). Panels never evaluate their own endpoints, so
/// integrable endpoint singularities are tolerated.
template <class F>
QuadResult integrate_segments(F&& f, std::span<const double> breakpoints, const QuadOptions& opt = {}) {
    if (breakpoints.size() < 2) throw std::invalid_argument("integrate_segments: need at least two breakpoints");

    std::priority_queue<detail::Panel> heap;
    double total = 0.0, total_err = 0.0;
    long evals = 0;
    double span_width = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        double a = breakpoints[i], b = breakpoints[i + 1];
        if (!(a <= b)) throw std::invalid_argument("integrate_segments: breakpoints not sorted");
        span_width += b - a;
        if (a == b) continue;
        auto p = detail::evaluate_panel(f, a, b);
        evals += 15;
        total += p.value;
        total_err += p.error;
        heap.push(p);
    }
    const double width_floor = std::max(span_width * 1e-15, 1e-300);

    int used = static_cast<int>(heap.size());
    while (total_err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total)) && !heap.empty()) {
        if (used >= opt.max_intervals) break;
        detail::Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (worst.b - worst.a < width_floor || mid <= worst.a || mid >= worst.b) {
            if (worst.error >= 1e29) {
                // Vanishing panel around an integrable singularity: its true
                // contribution is bounded by width * nearby values; drop it.
                total_err -= worst.error;
            }
            // Otherwise keep its (already counted) estimate and accept.
            continue;
        }
        auto left = detail::evaluate_panel(f, worst.a, mid);
        auto right = detail::evaluate_panel(f, mid, worst.b);
        evals += 30;
        ++used;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    QuadResult r;
    r.value = total;
    r.error = total_err;
    r.evaluations = evals;
    r.converged = total_err <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total));
    if (!r.converged && opt.throw_on_failure)
        throw NumericError("quadrature failed to converge", r.value, r.error);
    return r;
}

template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadOptions& opt = {}) {
    const double brk[2] = {a, b};
    return integrate_segments(std::forward<F>(f), std::span<const double>(brk, 2), opt);
}

/// Integral over [a, +inf) via x = a + tan(pi u / 2), u in [0, 1).
template <class F>
QuadResult integrate_upper(F&& f, double a, const QuadOptions& opt = {}) {
    auto g = [&f, a](double u) {
        const double t = std::tan(0.5 * M_PI * u);
        const double jac = 0.5 * M_PI * (1.0 + t * t);
        const double v = f(a + t);
        return v == 0.0 ? 0.0 : v * jac;
    };
    return integrate(g, 0.0, 1.0, opt);
}

/// Integral over (-inf, +inf) via x = tan(pi u / 2), u in (-1, 1).
template <class F>
QuadResult integrate_real_line(F&& f, const QuadOptions& opt = {}) {
    auto g = [&f](double u) {
        const double t = std::tan(0.5 * M_PI * u);
        const double jac = 0.5 * M_PI * (1.0 + t * t);
        const double v = f(t);
        return v == 0.0 ? 0.0 : v * jac;
    };
    const double brk[3] = {-1.0, 0.0, 1.0};
    return integrate_segments(g, std::span<const double>(brk, 3), opt);
}

}  // namespace quad
}  // namespace ordstat
