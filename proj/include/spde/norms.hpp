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
#include <vector>

#include "spde/spectral.hpp"

namespace spde {

/// An L^q(O;H)-valued object on the grid: one spatial field per retained
/// noise mode (component n holds the H-coordinate <f(x), h_n>).
struct HValuedField {
    DomainGrid grid;
    int num_modes = 0;
    std::vector<double> values;  // num_modes x total_points, row-major

    std::span<const double> component(int mode) const {
        return {values.data() + static_cast<std::size_t>(mode) * grid.total_points(),
                static_cast<std::size_t>(grid.total_points())};
    }
    std::span<double> component(int mode) {
        return {values.data() + static_cast<std::size_t>(mode) * grid.total_points(),
                static_cast<std::size_t>(grid.total_points())};
    }
};

/// One nonnegative scalar per Monte Carlo path.
struct SampleSet {
    std::vector<double> values;
};

/// Empirical p-th moment root with the standard error of the p-th powers.
struct LpEstimate {
    double value = 0.0;          // ((1/M) sum v^p)^{1/p}
    double moment_mean = 0.0;    // (1/M) sum v^p
    double moment_stderr = 0.0;  // stderr of the mean of v^p
};

/// Quadrature L^q(O) norm: (sum_i weight * |v_i|^q)^{1/q}. Requires q >= 2.
double lq_norm(std::span<const double> field, const DomainGrid& grid, double q);

/// L^q(O;H) norm: pointwise Euclidean norm across components, then lq_norm.
double lq_H_norm(const HValuedField& field, double q);

/// Quadrature inner product of two grid fields.
double quad_inner_product(std::span<const double> a, std::span<const double> b,
                          const DomainGrid& grid);

/// Monte Carlo realization of an L^p(Omega) norm; p >= 2, nonempty samples.
LpEstimate lp_over_paths(const SampleSet& samples, double p);

/// (sum_j w |v_j|^p)^{1/p} with w = weight (if given) or 1. A weight of tau
/// turns the sum into the time integral of a step function.
double sequence_lp(std::span<const double> values, double p,
                   std::optional<double> weight = std::nullopt);

/// Mixed norm over paths and time cells: rows are paths, entry (m, j) is the
/// interval L^p-in-time-of-L^q norm on cell j. Returns
/// ((1/M) sum_m sum_j entry^p)^{1/p}.
double mixed_error_norm(const std::vector<std::vector<double>>& per_path_interval_values,
                        double p);

}  // namespace spde
