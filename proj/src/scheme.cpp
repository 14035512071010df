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

#include "spde/scheme.hpp"

#include <cmath>
#include <stdexcept>

namespace spde {

namespace {

void require(bool cond, const char* what) {
    if (!cond) throw std::invalid_argument(what);
}

std::vector<double> resolvent_factors(const SpectralBasis& basis, double tau) {
    std::vector<double> inv(basis.num_modes());
    for (int k = 0; k < basis.num_modes(); ++k) inv[k] = 1.0 / (1.0 + tau * basis.eigenvalues[k]);
    return inv;
}

// Shared by run_forward and run_reference so that refinement = 1 reproduces
// the forward run bit for bit.
void separable_step(std::span<double> Y, double noise_coeff, std::span<const double> profile,
                    std::span<const double> inv_factors) {
    for (std::size_t k = 0; k < Y.size(); ++k)
        Y[k] = (Y[k] + noise_coeff * profile[k]) * inv_factors[k];
}

}  // namespace

SeparableForcing make_separable_forcing(const ForcingSpec& spec, const SpectralBasis& basis,
                                        int noise_modes) {
    require(noise_modes >= 1, "noise mode count must be >= 1");
    require(spec.mode_decay_exponent > 0.5,
            "forcing mode_decay_exponent must exceed 1/2");

    SeparableForcing out;
    out.mode_weights.resize(noise_modes);
    for (int n = 1; n <= noise_modes; ++n)
        out.mode_weights[n - 1] = std::pow(static_cast<double>(n), -spec.mode_decay_exponent);

    switch (spec.profile) {
        case SpatialProfile::eigenfield_one:
            out.profile.assign(basis.num_modes(), 0.0);
            out.profile[0] = 1.0;
            break;
        case SpatialProfile::constant_one: {
            std::vector<double> ones(basis.grid.total_points(), 1.0);
            out.profile = to_spectral(ones, basis);
            break;
        }
        case SpatialProfile::custom:
            require(static_cast<int>(spec.custom_coeffs.size()) == basis.num_modes(),
                    "custom profile length must equal the basis mode count");
            out.profile = spec.custom_coeffs;
            break;
    }
    return out;
}

double forcing_time_factor(const ForcingSpec& spec, int coarse_index,
                           const WienerPath* fine_path, int fine_steps_per_coarse) {
    require(coarse_index >= 0, "coarse index must be nonnegative");
    if (spec.kind == ForcingKind::deterministic_decay) return spec.amplitude;

    require(fine_path != nullptr, "adapted_lagged forcing requires a Wiener path");
    require(fine_steps_per_coarse >= 1, "fine steps per coarse step must be >= 1");
    if (coarse_index == 0) return 0.0;  // W(0) = 0
    const int fine_index = coarse_index * fine_steps_per_coarse;
    require(fine_index <= fine_path->num_steps, "coarse index extends past the path horizon");
    return spec.amplitude * std::tanh(fine_path->value_at(0, fine_index));
}

HFieldCoeffs evaluate_forcing(const ForcingSpec& spec, const SpectralBasis& basis,
                              int noise_modes, int coarse_index,
                              const WienerPath* fine_path, int fine_steps_per_coarse) {
    const SeparableForcing sep = make_separable_forcing(spec, basis, noise_modes);
    const double factor = forcing_time_factor(spec, coarse_index, fine_path, fine_steps_per_coarse);

    HFieldCoeffs field;
    field.noise_modes = noise_modes;
    field.spatial_modes = basis.num_modes();
    field.coeffs.resize(static_cast<std::size_t>(noise_modes) * basis.num_modes());
    for (int n = 0; n < noise_modes; ++n) {
        auto row = field.row(n);
        const double scale = factor * sep.mode_weights[n];
        for (int k = 0; k < basis.num_modes(); ++k) row[k] = scale * sep.profile[k];
    }
    return field;
}

HValuedField to_hvalued_field(const HFieldCoeffs& coeffs, const SpectralBasis& basis) {
    require(coeffs.spatial_modes == basis.num_modes(),
            "coefficient field does not match the basis");
    HValuedField field;
    field.grid = basis.grid;
    field.num_modes = coeffs.noise_modes;
    field.values.resize(static_cast<std::size_t>(coeffs.noise_modes) * basis.grid.total_points());
    for (int n = 0; n < coeffs.noise_modes; ++n)
        to_grid_into(coeffs.row(n), basis, field.component(n));
    return field;
}

CoeffVector forward_step(const CoeffVector& Y, const HFieldCoeffs& f,
                         std::span<const double> dW, double tau, const SpectralBasis& basis) {
    require(tau > 0.0, "forward step requires tau > 0");
    require(static_cast<int>(Y.size()) == basis.num_modes(), "state length must match the basis");
    require(f.spatial_modes == basis.num_modes(), "forcing field does not match the basis");
    require(static_cast<int>(dW.size()) == f.noise_modes,
            "increment count must match the forcing components");

    CoeffVector next = Y;
    for (int n = 0; n < f.noise_modes; ++n) {
        const double w = dW[n];
        if (w == 0.0) continue;
        auto row = f.row(n);
        for (int k = 0; k < f.spatial_modes; ++k) next[k] += w * row[k];
    }
    return resolvent_step(next, basis, tau);
}

namespace {

// Common driver: steps the separable scheme on the path's own grid, freezing
// the forcing factor per coarse interval of `coarse_steps`.
Trajectory run_separable(const SchemeConfig& config, const WienerPath& path, int coarse_steps) {
    require(config.basis != nullptr, "scheme config needs a basis");
    const SpectralBasis& basis = *config.basis;
    require(path.num_modes == config.noise.num_noise_modes,
            "path mode count must match the noise spec");
    require(coarse_steps >= 1 && path.num_steps % coarse_steps == 0,
            "path step count must be a multiple of the coarse step count");

    const int fine_per_coarse = path.num_steps / coarse_steps;
    const int K = basis.num_modes();
    const double h = config.horizon / path.num_steps;
    const SeparableForcing sep = make_separable_forcing(config.forcing, basis, path.num_modes);
    const std::vector<double> inv = resolvent_factors(basis, h);

    Trajectory traj;
    traj.step = h;
    traj.path_index = path.path_index;
    traj.num_modes = K;
    traj.coeffs.assign(static_cast<std::size_t>(path.num_steps + 1) * K, 0.0);

    std::vector<double> state(K, 0.0);
    double factor = 0.0;
    double beta1 = 0.0;  // running mode-1 Brownian value, for adapted forcings
    for (int i = 0; i < path.num_steps; ++i) {
        if (i % fine_per_coarse == 0) {
            if (config.forcing.kind == ForcingKind::deterministic_decay) {
                factor = config.forcing.amplitude;
            } else {
                factor = (i == 0) ? 0.0 : config.forcing.amplitude * std::tanh(beta1);
            }
        }
        double xi = 0.0;  // collapsed noise: sum_n w_n dbeta_n
        for (int n = 0; n < path.num_modes; ++n) xi += sep.mode_weights[n] * path.at(n, i);
        separable_step({state.data(), state.size()}, factor * xi, sep.profile, inv);
        std::copy(state.begin(), state.end(),
                  traj.coeffs.begin() + static_cast<std::size_t>(i + 1) * K);
        beta1 += path.at(0, i);
    }
    return traj;
}

}  // namespace

Trajectory run_forward(const SchemeConfig& config, const WienerPath& path) {
    require(config.steps >= 1, "step count must be >= 1");
    require(path.num_steps % config.steps == 0,
            "path step count must be a multiple of the scheme step count");
    const int factor = path.num_steps / config.steps;

    if (factor == 1) return run_separable(config, path, config.steps);

    // Coarse increments are exact sums of the fine ones; the adapted forcing
    // still reads the fine path, so we step the coarse chain directly.
    const SpectralBasis& basis = *config.basis;
    const int K = basis.num_modes();
    const double tau = config.tau();
    const SeparableForcing sep = make_separable_forcing(config.forcing, basis, path.num_modes);
    const std::vector<double> inv = resolvent_factors(basis, tau);
    const WienerPath coarse = coarsen(path, factor);

    Trajectory traj;
    traj.step = tau;
    traj.path_index = path.path_index;
    traj.num_modes = K;
    traj.coeffs.assign(static_cast<std::size_t>(config.steps + 1) * K, 0.0);

    std::vector<double> state(K, 0.0);
    double beta1 = 0.0;  // accumulated from the fine path, as the reference run sees it
    for (int j = 0; j < config.steps; ++j) {
        double factor_j;
        if (config.forcing.kind == ForcingKind::deterministic_decay) {
            factor_j = config.forcing.amplitude;
        } else {
            factor_j = (j == 0) ? 0.0 : config.forcing.amplitude * std::tanh(beta1);
        }
        double xi = 0.0;
        for (int n = 0; n < coarse.num_modes; ++n) xi += sep.mode_weights[n] * coarse.at(n, j);
        separable_step({state.data(), state.size()}, factor_j * xi, sep.profile, inv);
        std::copy(state.begin(), state.end(),
                  traj.coeffs.begin() + static_cast<std::size_t>(j + 1) * K);
        for (int i = j * factor; i < (j + 1) * factor; ++i) beta1 += path.at(0, i);
    }
    return traj;
}

Trajectory run_reference(const SchemeConfig& config, const WienerPath& path) {
    require(config.steps >= 1 && config.refinement >= 1, "invalid reference configuration");
    require(path.num_steps == config.steps * config.refinement,
            "path step count must equal steps * refinement");
    return run_separable(config, path, config.steps);
}

Trajectory dual_backward_run(const std::vector<CoeffVector>& cell_integrals, double tau,
                             const SpectralBasis& basis) {
    require(tau > 0.0, "dual scheme requires tau > 0");
    require(!cell_integrals.empty(), "dual scheme needs at least one cell integral");
    const int J = static_cast<int>(cell_integrals.size());
    const int K = basis.num_modes();
    const std::vector<double> inv = resolvent_factors(basis, tau);

    Trajectory traj;
    traj.step = tau;
    traj.num_modes = K;
    traj.coeffs.assign(static_cast<std::size_t>(J + 1) * K, 0.0);

    std::vector<double> state(K, 0.0);  // Z_J = 0
    for (int j = J - 1; j >= 0; --j) {
        const CoeffVector& cell = cell_integrals[j];
        require(static_cast<int>(cell.size()) == K, "cell integral length must match the basis");
        for (int k = 0; k < K; ++k) state[k] = (state[k] + cell[k]) * inv[k];
        std::copy(state.begin(), state.end(),
                  traj.coeffs.begin() + static_cast<std::size_t>(j) * K);
    }
    return traj;
}

Trajectory solve_dual_continuous(const std::vector<CoeffVector>& g_left_nodes,
                                 const SpectralBasis& basis, double fine_tau) {
    require(fine_tau > 0.0, "dual solve requires a positive fine step");
    std::vector<CoeffVector> cells;
    cells.reserve(g_left_nodes.size());
    for (const auto& g : g_left_nodes) {
        CoeffVector cell(g.size());
        for (std::size_t k = 0; k < g.size(); ++k) cell[k] = fine_tau * g[k];
        cells.push_back(std::move(cell));
    }
    return dual_backward_run(cells, fine_tau, basis);
}

double scalar_mode_oracle(double lambda, double sigma, double tau, int j) {
    if (!(lambda > 0.0) || !(sigma > 0.0) || !(tau > 0.0))
        throw std::invalid_argument("scalar_mode_oracle requires lambda, sigma, tau > 0");
    if (j < 0) throw std::invalid_argument("step index must be nonnegative");
    const double rho = 1.0 / (1.0 + tau * lambda);
    const double rho2 = rho * rho;
    return sigma * sigma * tau * rho2 * (1.0 - std::pow(rho2, j)) / (1.0 - rho2);
}

}  // namespace spde
