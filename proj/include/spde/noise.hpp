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

#include "spde/rng.hpp"

namespace spde {

/// Truncation level of the cylindrical Wiener process and the master seed all
/// path streams derive from.
struct NoiseSpec {
    int num_noise_modes = 64;
    std::uint64_t master_seed = 1;
};

/// Brownian increments of the first num_modes coordinates of the cylindrical
/// Wiener process on a uniform fine grid: entry (n, j) is
/// beta_n(t_{j+1}) - beta_n(t_j) with step fine_step.
///
/// All coarser increments in a study are additive coarsenings of one such
/// path, so every step size sees the same underlying Brownian motion.
struct WienerPath {
    int num_modes = 0;
    int num_steps = 0;
    double fine_step = 0.0;
    std::uint64_t path_index = 0;
    std::vector<double> increments;  // num_modes x num_steps, row-major

    std::span<const double> row(int mode) const {
        return {increments.data() + static_cast<std::size_t>(mode) * num_steps,
                static_cast<std::size_t>(num_steps)};
    }
    double& at(int mode, int step) {
        return increments[static_cast<std::size_t>(mode) * num_steps + step];
    }
    double at(int mode, int step) const {
        return increments[static_cast<std::size_t>(mode) * num_steps + step];
    }
    /// beta_mode value at node `step` (sum of the increments before it).
    double value_at(int mode, int step) const;
};

/// Draws an N x J matrix of independent N(0, fine_step) increments from the
/// stream. Draw order is fixed mode-major (mode 0 all steps, then mode 1, ...)
/// so that the output is a pure function of the stream, not of memory layout.
WienerPath sample_wiener_path(GaussianStream& stream, int num_modes, int num_steps,
                              double fine_step, std::uint64_t path_index = 0);

/// Sums groups of `factor` consecutive increments; factor must divide
/// num_steps. Coarsening is exact addition, so the total increment over the
/// horizon is bit-identical at every level.
WienerPath coarsen(const WienerPath& path, int factor);

}  // namespace spde
