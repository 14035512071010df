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

#include <span>
#include <vector>

namespace spde {

/// Spectral coefficients of a field with respect to a SpectralBasis.
using CoeffVector = std::vector<double>;

/// Uniform interior nodes of the unit interval (d=1) or unit square (d=2),
/// x_i = i/(n+1). Boundary nodes are excluded: every represented field
/// vanishes there. The rectangle-rule weight (n+1)^{-d} makes the sampled
/// sine system exactly orthonormal and sums to the domain volume 1.
struct DomainGrid {
    int dimension = 1;
    int points_per_axis = 0;

    int total_points() const {
        return dimension == 1 ? points_per_axis : points_per_axis * points_per_axis;
    }
    double quadrature_weight() const {
        double w = 1.0 / (points_per_axis + 1);
        return dimension == 1 ? w : w * w;
    }
    /// Interior coordinates along one axis.
    std::vector<double> axis_coordinates() const;
};

/// Eigensystem of the Dirichlet Laplacian (or a synthetic diagonal operator),
/// realizing A, its fractional powers, the resolvent (I + tau*A)^{-1} and the
/// semigroup e^{-tA} as diagonal maps on spectral coefficients.
///
/// Immutable after construction; safe to share across threads.
struct SpectralBasis {
    DomainGrid grid;
    std::vector<double> eigenvalues;   // ascending, strictly positive
    std::vector<double> eigenfields;   // num_modes x total_points, row-major

    int num_modes() const { return static_cast<int>(eigenvalues.size()); }
    std::span<const double> eigenfield(int k) const {
        return {eigenfields.data() + static_cast<std::size_t>(k) * grid.total_points(),
                static_cast<std::size_t>(grid.total_points())};
    }
};

/// 1D Dirichlet Laplacian on (0,1): lambda_k = (k*pi)^2, e_k = sqrt(2) sin(k*pi*x),
/// k = 1..num_modes. Rejects num_modes > points_per_axis (modes beyond the grid
/// alias and lose orthogonality).
SpectralBasis build_dirichlet_laplacian_1d(int num_modes, int points_per_axis);

/// 2D tensor-product version on (0,1)^2: lambda_{k,l} = pi^2 (k^2 + l^2),
/// e_{k,l} = 2 sin(k*pi*x) sin(l*pi*y), k,l = 1..modes_per_axis. Modes are
/// sorted by ascending eigenvalue with (k,l) lexicographic tie-break.
SpectralBasis build_dirichlet_laplacian_2d(int modes_per_axis, int points_per_axis);

/// Diagonal operator with prescribed eigenvalues on the 1D sine eigenfields;
/// used to exercise scheme arithmetic at chosen spectral points.
SpectralBasis make_synthetic_basis(std::vector<double> eigenvalues, int points_per_axis);

/// Quadrature projection onto the retained modes: coefficient k is the
/// discrete inner product of the field with eigenfield k.
CoeffVector to_spectral(std::span<const double> field, const SpectralBasis& basis);

/// Linear combination of eigenfields.
std::vector<double> to_grid(const CoeffVector& coeffs, const SpectralBasis& basis);

/// to_grid writing into a caller-provided buffer of size total_points.
void to_grid_into(std::span<const double> coeffs, const SpectralBasis& basis,
                  std::span<double> out);

/// Multiplies coefficient k by lambda_k^exponent. Defined for all real
/// exponents since the spectrum is strictly positive.
CoeffVector apply_fractional_power(const CoeffVector& coeffs, const SpectralBasis& basis,
                                   double exponent);

/// Multiplies coefficient k by (1 + tau*lambda_k)^{-1}; tau >= 0.
CoeffVector resolvent_step(const CoeffVector& coeffs, const SpectralBasis& basis, double tau);

/// Multiplies coefficient k by exp(-lambda_k * t); t >= 0.
CoeffVector semigroup_apply(const CoeffVector& coeffs, const SpectralBasis& basis, double t);

}  // namespace spde
