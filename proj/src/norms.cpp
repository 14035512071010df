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

#include "spde/norms.hpp"

#include <cmath>
#include <stdexcept>

namespace spde {

namespace {

void require(bool cond, const char* what) {
    if (!cond) throw std::invalid_argument(what);
}

void require_exponent(double p) {
    require(p >= 2.0 && std::isfinite(p), "exponent must lie in [2, infinity)");
}

}  // namespace

double lq_norm(std::span<const double> field, const DomainGrid& grid, double q) {
    require_exponent(q);
    require(static_cast<int>(field.size()) == grid.total_points(),
            "field length must equal the grid point count");
    const double w = grid.quadrature_weight();
    double acc = 0.0;
    if (q == 2.0) {
        for (double v : field) acc += v * v;
        return std::sqrt(w * acc);
    }
    for (double v : field) acc += std::pow(std::abs(v), q);
    return std::pow(w * acc, 1.0 / q);
}

double lq_H_norm(const HValuedField& field, double q) {
    require_exponent(q);
    require(field.num_modes >= 1, "H-valued field needs at least one component");
    const int points = field.grid.total_points();
    std::vector<double> pointwise(points, 0.0);
    for (int n = 0; n < field.num_modes; ++n) {
        auto comp = field.component(n);
        for (int i = 0; i < points; ++i) pointwise[i] += comp[i] * comp[i];
    }
    for (int i = 0; i < points; ++i) pointwise[i] = std::sqrt(pointwise[i]);
    return lq_norm(pointwise, field.grid, q);
}

double quad_inner_product(std::span<const double> a, std::span<const double> b,
                          const DomainGrid& grid) {
    require(a.size() == b.size(), "fields must have equal length");
    require(static_cast<int>(a.size()) == grid.total_points(),
            "field length must equal the grid point count");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return grid.quadrature_weight() * acc;
}

LpEstimate lp_over_paths(const SampleSet& samples, double p) {
    require_exponent(p);
    require(!samples.values.empty(), "sample set must be nonempty");
    const std::size_t M = samples.values.size();

    double sum = 0.0, sumsq = 0.0;
    for (double v : samples.values) {
        require(std::isfinite(v), "sample values must be finite");
        double vp = (p == 2.0) ? v * v : std::pow(std::abs(v), p);
        sum += vp;
        sumsq += vp * vp;
    }
    LpEstimate est;
    est.moment_mean = sum / static_cast<double>(M);
    est.value = std::pow(est.moment_mean, 1.0 / p);
    if (M > 1) {
        double var = (sumsq - sum * sum / static_cast<double>(M)) / static_cast<double>(M - 1);
        est.moment_stderr = std::sqrt(std::max(var, 0.0) / static_cast<double>(M));
    }
    return est;
}

double sequence_lp(std::span<const double> values, double p, std::optional<double> weight) {
    require_exponent(p);
    if (weight) require(*weight > 0.0, "weight must be positive");
    const double w = weight.value_or(1.0);
    double acc = 0.0;
    for (double v : values) acc += std::pow(std::abs(v), p);
    return std::pow(w * acc, 1.0 / p);
}

double mixed_error_norm(const std::vector<std::vector<double>>& per_path_interval_values,
                        double p) {
    require_exponent(p);
    require(!per_path_interval_values.empty(), "per-path matrix must be nonempty");
    const std::size_t M = per_path_interval_values.size();
    const std::size_t J = per_path_interval_values.front().size();
    double acc = 0.0;
    for (const auto& row : per_path_interval_values) {
        require(row.size() == J, "per-path rows must have equal length");
        for (double v : row) acc += std::pow(std::abs(v), p);
    }
    return std::pow(acc / static_cast<double>(M), 1.0 / p);
}

}  // namespace spde
