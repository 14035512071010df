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

#include "spde/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace spde {

namespace {

void require(bool cond, const std::string& what) {
    if (!cond) throw std::invalid_argument(what);
}

void require_length(const CoeffVector& coeffs, const SpectralBasis& basis) {
    require(static_cast<int>(coeffs.size()) == basis.num_modes(),
            "coefficient vector length must equal the basis mode count");
}

}  // namespace

std::vector<double> DomainGrid::axis_coordinates() const {
    std::vector<double> x(points_per_axis);
    for (int i = 0; i < points_per_axis; ++i) x[i] = static_cast<double>(i + 1) / (points_per_axis + 1);
    return x;
}

SpectralBasis build_dirichlet_laplacian_1d(int num_modes, int points_per_axis) {
    require(num_modes >= 1, "num_modes must be >= 1");
    require(num_modes <= points_per_axis,
            "num_modes must not exceed points_per_axis (unresolvable modes alias on the grid)");

    SpectralBasis basis;
    basis.grid = DomainGrid{1, points_per_axis};
    basis.eigenvalues.resize(num_modes);
    basis.eigenfields.resize(static_cast<std::size_t>(num_modes) * points_per_axis);

    const auto x = basis.grid.axis_coordinates();
    const double root2 = std::sqrt(2.0);
    for (int k = 1; k <= num_modes; ++k) {
        basis.eigenvalues[k - 1] = (k * M_PI) * (k * M_PI);
        double* row = basis.eigenfields.data() + static_cast<std::size_t>(k - 1) * points_per_axis;
        for (int i = 0; i < points_per_axis; ++i) row[i] = root2 * std::sin(k * M_PI * x[i]);
    }
    return basis;
}

SpectralBasis build_dirichlet_laplacian_2d(int modes_per_axis, int points_per_axis) {
    require(modes_per_axis >= 1, "modes_per_axis must be >= 1");
    require(modes_per_axis <= points_per_axis,
            "modes_per_axis must not exceed points_per_axis (unresolvable modes alias on the grid)");

    const int n = points_per_axis;
    const int K1 = modes_per_axis;

    struct Mode {
        double lambda;
        int k, l;
    };
    std::vector<Mode> modes;
    modes.reserve(static_cast<std::size_t>(K1) * K1);
    for (int k = 1; k <= K1; ++k)
        for (int l = 1; l <= K1; ++l)
            modes.push_back({M_PI * M_PI * (static_cast<double>(k) * k + static_cast<double>(l) * l), k, l});
    std::sort(modes.begin(), modes.end(), [](const Mode& a, const Mode& b) {
        if (a.lambda != b.lambda) return a.lambda < b.lambda;
        if (a.k != b.k) return a.k < b.k;
        return a.l < b.l;
    });

    SpectralBasis basis;
    basis.grid = DomainGrid{2, n};
    basis.eigenvalues.resize(modes.size());
    basis.eigenfields.resize(modes.size() * static_cast<std::size_t>(n) * n);

    const auto x = basis.grid.axis_coordinates();
    // Grid points flattened x-major: point (ix, iy) -> ix*n + iy.
    for (std::size_t m = 0; m < modes.size(); ++m) {
        basis.eigenvalues[m] = modes[m].lambda;
        double* row = basis.eigenfields.data() + m * static_cast<std::size_t>(n) * n;
        for (int ix = 0; ix < n; ++ix) {
            double sx = 2.0 * std::sin(modes[m].k * M_PI * x[ix]);
            for (int iy = 0; iy < n; ++iy)
                row[static_cast<std::size_t>(ix) * n + iy] = sx * std::sin(modes[m].l * M_PI * x[iy]);
        }
    }
    return basis;
}

SpectralBasis make_synthetic_basis(std::vector<double> eigenvalues, int points_per_axis) {
    const int K = static_cast<int>(eigenvalues.size());
    SpectralBasis basis = build_dirichlet_laplacian_1d(K, points_per_axis);
    for (double lambda : eigenvalues)
        require(lambda > 0.0, "synthetic eigenvalues must be strictly positive");
    basis.eigenvalues = std::move(eigenvalues);
    return basis;
}

CoeffVector to_spectral(std::span<const double> field, const SpectralBasis& basis) {
    require(static_cast<int>(field.size()) == basis.grid.total_points(),
            "field length must equal the grid point count");
    const double w = basis.grid.quadrature_weight();
    CoeffVector coeffs(basis.num_modes());
    for (int k = 0; k < basis.num_modes(); ++k) {
        auto row = basis.eigenfield(k);
        double acc = 0.0;
        for (std::size_t i = 0; i < field.size(); ++i) acc += field[i] * row[i];
        coeffs[k] = w * acc;
    }
    return coeffs;
}

void to_grid_into(std::span<const double> coeffs, const SpectralBasis& basis,
                  std::span<double> out) {
    require(static_cast<int>(coeffs.size()) == basis.num_modes(),
            "coefficient vector length must equal the basis mode count");
    require(static_cast<int>(out.size()) == basis.grid.total_points(),
            "output length must equal the grid point count");
    std::fill(out.begin(), out.end(), 0.0);
    for (int k = 0; k < basis.num_modes(); ++k) {
        const double c = coeffs[k];
        if (c == 0.0) continue;
        auto row = basis.eigenfield(k);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += c * row[i];
    }
}

std::vector<double> to_grid(const CoeffVector& coeffs, const SpectralBasis& basis) {
    std::vector<double> field(basis.grid.total_points());
    to_grid_into(coeffs, basis, field);
    return field;
}

CoeffVector apply_fractional_power(const CoeffVector& coeffs, const SpectralBasis& basis,
                                   double exponent) {
    require_length(coeffs, basis);
    CoeffVector out(coeffs.size());
    for (std::size_t k = 0; k < coeffs.size(); ++k)
        out[k] = coeffs[k] * std::pow(basis.eigenvalues[k], exponent);
    return out;
}

CoeffVector resolvent_step(const CoeffVector& coeffs, const SpectralBasis& basis, double tau) {
    require_length(coeffs, basis);
    require(tau >= 0.0, "resolvent step requires tau >= 0");
    CoeffVector out(coeffs.size());
    for (std::size_t k = 0; k < coeffs.size(); ++k)
        out[k] = coeffs[k] / (1.0 + tau * basis.eigenvalues[k]);
    return out;
}

CoeffVector semigroup_apply(const CoeffVector& coeffs, const SpectralBasis& basis, double t) {
    require_length(coeffs, basis);
    require(t >= 0.0, "semigroup requires t >= 0");
    CoeffVector out(coeffs.size());
    for (std::size_t k = 0; k < coeffs.size(); ++k)
        out[k] = coeffs[k] * std::exp(-basis.eigenvalues[k] * t);
    return out;
}

}  // namespace spde
