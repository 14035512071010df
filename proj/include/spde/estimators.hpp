/*
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "spde/scheme.hpp"

namespace spde {

struct RateRow {
    double tau = 0.0;
    double estimate = 0.0;
    double stderr_ = 0.0;
};

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double halfwidth = 0.0;  // ~2 standard errors of the slope, from the residuals
};

/// Empirical (tau, estimate) table with a log2-log2 least-squares fit. The fit
/// is absent when the estimates are degenerate (zero forcing).
struct RateTable {
    std::vector<RateRow> rows;
    std::optional<SlopeFit> fit;
};

/// Least squares on (log2 tau, log2 estimate). Needs >= 2 rows; rejects
/// nonpositive estimates.
SlopeFit fit_loglog_slope(const std::vector<std::pair<double, double>>& rows);

/// Strong error of the forward scheme against the coupled fine reference for
/// every tau = T/J in the ladder (ascending step counts, power-of-two nested).
/// The reference step is T / (ladder.back() * base.refinement); base.steps is
/// ignored. Per row, the estimate is the mixed L^p(time x paths; L^q) error
/// and the stderr comes from the per-path spread.
RateTable estimate_convergence(const SchemeConfig& base, std::span<const int> ladder_steps,
                               int paths);

/// Deterministic first-order study of the backward dual scheme against its
/// fine solve, for a time-constant dual datum with spectral coefficients
/// g_profile. Exponents are the conjugate pair (p', q') of the primal study;
/// only values in [2, infinity) are supported.
RateTable estimate_dual_convergence(const SpectralBasis& basis, const CoeffVector& g_profile,
                                    double horizon, std::span<const int> ladder_steps,
                                    int refinement, double p_prime, double q_prime);

/// Discrete maximal-regularity functionals at one step size, with r = p.
struct RegularityReport {
    double tau = 0.0;
    double time_functional = 0.0;   // l^p over j of ||(Y_{j+1}-Y_j)/sqrt(tau)||_{L^p(Omega;L^q)}
    double time_stderr = 0.0;
    double space_functional = 0.0;  // same pipeline on A^{1/2} Y_j
    double space_stderr = 0.0;
    double forcing_norm = 0.0;      // l^p over j of ||f_j||_{L^p(Omega;L^q(O;H))}
    std::optional<double> time_ratio;   // absent when the forcing norm vanishes
    std::optional<double> space_ratio;
};

struct RegularitySweep {
    std::vector<RegularityReport> reports;
    double budget = 1.5;
    std::optional<bool> time_uniform;   // max/min ratio <= budget; absent when degenerate
    std::optional<bool> space_uniform;
};

RegularityReport estimate_regularity(const SchemeConfig& config, int paths);

/// Runs estimate_regularity for every tau in the ladder on coupled paths
/// (sampled once at the finest ladder step) and flags whether each ratio stays
/// within the budget across the ladder.
RegularitySweep regularity_sweep(const SchemeConfig& base, std::span<const int> ladder_steps,
                                 int paths, double budget = 1.5);

struct IsometryResult {
    double lhs_moment = 0.0;  // MC estimate of E || sum_j f_j dW_j ||_{L^q}^p
    double rhs_moment = 0.0;  // || f ||_{L^q(O; L^2-in-time; H)}^p, deterministic
    double ratio = 0.0;
    double ratio_stderr = 0.0;
    bool degenerate = false;  // zero integrand
};

/// Monte Carlo check of the stochastic-integral isomorphism for a
/// deterministic step-function integrand (integrand[j] is the value on the
/// j-th interval of length tau). At p = q = 2 the ratio has expectation
/// exactly 1.
IsometryResult ito_isometry_check(const SpectralBasis& basis,
                                  const std::vector<HFieldCoeffs>& integrand, double tau,
                                  double p, double q, int paths, std::uint64_t master_seed);

struct DualityResult {
    double lhs = 0.0;           // E integral <y, -z' + A z>
    double rhs = 0.0;           // coarse pairing sum minus Brownian-bridge term
    double lhs_stderr = 0.0;
    double rhs_stderr = 0.0;
    double gap_stderr = 0.0;    // stderr of the per-path difference (shared paths)
    double relative_gap = 0.0;
    bool scale_degenerate = false;  // zero scale with a nonzero gap
};

/// Numerical check of the duality identity behind the convergence proof, at
/// p = q = 2, with deterministic dual datum g (time-constant spectral
/// profile). Both sides are estimated on the same paths; the identity holds
/// pathwise for the discrete realization, so the gap is pure roundoff.
DualityResult duality_identity_check(const SchemeConfig& config, const CoeffVector& g_profile,
                                     int paths);

}  // namespace spde
