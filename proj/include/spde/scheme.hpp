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

#include <cstdint>
#include <span>
#include <vector>

#include "spde/noise.hpp"
#include "spde/norms.hpp"
#include "spde/spectral.hpp"

namespace spde {

enum class ForcingKind {
    deterministic_decay,  // component n = amplitude * n^{-alpha} * profile
    adapted_lagged,       // the same scaled by tanh(beta_1(t_j)), zero at j = 0
};

enum class SpatialProfile { eigenfield_one, constant_one, custom };

/// Piecewise-constant-in-time forcing, constant on each coarse interval
/// [t_j, t_{j+1}). Component n carries the mode weight n^{-alpha}; alpha > 1/2
/// keeps the L^q(O;H) norm finite under truncation refinement.
struct ForcingSpec {
    ForcingKind kind = ForcingKind::deterministic_decay;
    double mode_decay_exponent = 1.0;
    SpatialProfile profile = SpatialProfile::eigenfield_one;
    CoeffVector custom_coeffs;  // spectral coefficients, used when profile == custom
    double amplitude = 1.0;
};

/// Spectral-coefficient representation of an L^q(O;H)-valued element: one
/// K-vector of spatial coefficients per retained noise mode.
struct HFieldCoeffs {
    int noise_modes = 0;
    int spatial_modes = 0;
    std::vector<double> coeffs;  // noise_modes x spatial_modes, row-major

    std::span<const double> row(int mode) const {
        return {coeffs.data() + static_cast<std::size_t>(mode) * spatial_modes,
                static_cast<std::size_t>(spatial_modes)};
    }
    std::span<double> row(int mode) {
        return {coeffs.data() + static_cast<std::size_t>(mode) * spatial_modes,
                static_cast<std::size_t>(spatial_modes)};
    }
};

/// Time-factored form of a ForcingSpec: the full coefficient of (mode n,
/// spatial mode k) at coarse index j is time_factor(j) * mode_weights[n] *
/// profile[k]. Both forcing kinds have this rank-one structure; the runners
/// exploit it so one step costs O(N + K) instead of O(N*K).
struct SeparableForcing {
    std::vector<double> mode_weights;  // n^{-alpha}, n = 1..N
    CoeffVector profile;               // K spectral coefficients
};

/// Sequence of spectral coefficient vectors, one per time node (ascending in
/// time for both the forward and the dual scheme). The forward scheme starts
/// at zero (node 0) and the dual scheme ends at zero (node J).
struct Trajectory {
    double step = 0.0;
    std::uint64_t path_index = 0;
    int num_modes = 0;
    std::vector<double> coeffs;  // num_nodes x num_modes, row-major

    int num_nodes() const {
        return num_modes == 0 ? 0 : static_cast<int>(coeffs.size()) / num_modes;
    }
    std::span<const double> node(int j) const {
        return {coeffs.data() + static_cast<std::size_t>(j) * num_modes,
                static_cast<std::size_t>(num_modes)};
    }
    CoeffVector node_vector(int j) const {
        auto s = node(j);
        return CoeffVector(s.begin(), s.end());
    }
};

struct SchemeConfig {
    const SpectralBasis* basis = nullptr;
    double horizon = 1.0;  // T
    int steps = 1;         // J coarse steps, tau = T/J
    int refinement = 1;    // fine steps per coarse step in the reference run
    ForcingSpec forcing;
    NoiseSpec noise;
    double p = 2.0;
    double q = 2.0;

    double tau() const { return horizon / steps; }
};

SeparableForcing make_separable_forcing(const ForcingSpec& spec, const SpectralBasis& basis,
                                        int noise_modes);

/// Amplitude times the adapted scalar at coarse node j. For adapted_lagged the
/// scalar is tanh of the mode-1 Brownian value at t_j, built from fine
/// increments strictly before fine index j * fine_steps_per_coarse; it is 0 at
/// j = 0 and F_{t_j}-measurable by construction.
double forcing_time_factor(const ForcingSpec& spec, int coarse_index,
                           const WienerPath* fine_path, int fine_steps_per_coarse);

/// Full N x K coefficient field of f(t_j). Rejects adapted_lagged without a
/// path.
HFieldCoeffs evaluate_forcing(const ForcingSpec& spec, const SpectralBasis& basis,
                              int noise_modes, int coarse_index,
                              const WienerPath* fine_path = nullptr,
                              int fine_steps_per_coarse = 1);

/// Grid representation of an H-valued coefficient field (one to_grid per
/// component), for norm evaluation.
HValuedField to_hvalued_field(const HFieldCoeffs& coeffs, const SpectralBasis& basis);

/// One implicit Euler step: Y <- (I + tau A)^{-1} (Y + sum_n f^(n) dW_n).
CoeffVector forward_step(const CoeffVector& Y, const HFieldCoeffs& f,
                         std::span<const double> dW, double tau, const SpectralBasis& basis);

/// Forward scheme from Y_0 = 0 over config.steps coarse steps. The path may be
/// finer than the coarse grid as long as its step count is a multiple of
/// config.steps; increments are coarsened internally and adapted forcings read
/// the fine path.
Trajectory run_forward(const SchemeConfig& config, const WienerPath& path);

/// Reference trajectory: the same scheme on the fine grid (config.steps *
/// config.refinement steps, matching path.num_steps) with the forcing frozen
/// at its coarse-interval values. With refinement = 1 this is exactly
/// run_forward.
Trajectory run_reference(const SchemeConfig& config, const WienerPath& path);

/// Backward dual scheme: Z_J = 0 and Z_j = (I + tau A)^{-1}(Z_{j+1} + I_j)
/// where I_j is the integral of the dual datum over [t_j, t_{j+1}]. The
/// returned trajectory is time-ascending with node J zero. Self-adjointness of
/// the spectral operator makes A* = A.
Trajectory dual_backward_run(const std::vector<CoeffVector>& cell_integrals, double tau,
                             const SpectralBasis& basis);

/// Fine backward-Euler solve of -z' + A z = g, z(T) = 0: g is given by its
/// value at the left node of each fine cell and integrated by the rectangle
/// rule.
Trajectory solve_dual_continuous(const std::vector<CoeffVector>& g_left_nodes,
                                 const SpectralBasis& basis, double fine_tau);

/// Exact second moment of the scalar implicit Euler chain
/// Y_{j+1} = rho (Y_j + sigma dbeta_j), rho = 1/(1 + tau lambda):
/// E|Y_j|^2 = sigma^2 tau rho^2 (1 - rho^{2j}) / (1 - rho^2).
double scalar_mode_oracle(double lambda, double sigma, double tau, int j);

}  // namespace spde
