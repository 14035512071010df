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

#include "spde/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spde/parallel.hpp"

namespace spde {

namespace {

void require(bool cond, const char* what) {
    if (!cond) throw std::invalid_argument(what);
}

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

void validate_ladder(std::span<const int> ladder) {
    require(!ladder.empty(), "ladder must be nonempty");
    require(ladder.front() >= 1, "ladder step counts must be positive");
    for (std::size_t i = 1; i < ladder.size(); ++i) {
        require(ladder[i] > ladder[i - 1] && ladder[i] % ladder[i - 1] == 0 &&
                    is_power_of_two(ladder[i] / ladder[i - 1]),
                "ladder step counts must be nested by powers of two");
    }
}

void validate_exponent(double p) {
    require(p >= 2.0 && std::isfinite(p), "exponents must lie in [2, infinity)");
}

double pow_p(double v, double p) { return p == 2.0 ? v * v : std::pow(std::abs(v), p); }

double lq_of_grid(std::span<const double> field, double weight, double q) {
    double acc = 0.0;
    if (q == 2.0) {
        for (double v : field) acc += v * v;
        return std::sqrt(weight * acc);
    }
    for (double v : field) acc += std::pow(std::abs(v), q);
    return std::pow(weight * acc, 1.0 / q);
}

double lq_of_grid_difference(std::span<const double> a, std::span<const double> b, double weight,
                             double q) {
    double acc = 0.0;
    if (q == 2.0) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            double d = a[i] - b[i];
            acc += d * d;
        }
        return std::sqrt(weight * acc);
    }
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::pow(std::abs(a[i] - b[i]), q);
    return std::pow(weight * acc, 1.0 / q);
}

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
};

// Sequential reduction in index order: results do not depend on how the
// per-path values were produced.
MeanStderr reduce_mean(std::span<const double> values) {
    const std::size_t M = values.size();
    double sum = 0.0;
    for (double v : values) sum += v;
    MeanStderr out;
    out.mean = sum / static_cast<double>(M);
    if (M > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - out.mean) * (v - out.mean);
        out.stderr_ = std::sqrt(ss / static_cast<double>(M - 1) / static_cast<double>(M));
    }
    return out;
}

// Delta method: stderr of mean(S)^{1/p} from the stderr of mean(S).
double root_stderr(double moment_mean, double moment_stderr, double p) {
    if (moment_mean <= 0.0) return 0.0;
    return std::pow(moment_mean, 1.0 / p - 1.0) * moment_stderr / p;
}

RateTable assemble_rate_table(std::vector<RateRow> rows) {
    RateTable table;
    table.rows = std::move(rows);
    bool fittable = table.rows.size() >= 2;
    for (const auto& row : table.rows) fittable = fittable && row.estimate > 0.0;
    if (fittable) {
        std::vector<std::pair<double, double>> pts;
        pts.reserve(table.rows.size());
        for (const auto& row : table.rows) pts.emplace_back(row.tau, row.estimate);
        table.fit = fit_loglog_slope(pts);
    }
    return table;
}

}  // namespace

SlopeFit fit_loglog_slope(const std::vector<std::pair<double, double>>& rows) {
    require(rows.size() >= 2, "slope fit needs at least two rows");
    const std::size_t n = rows.size();
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        require(rows[i].first > 0.0, "slope fit requires positive tau");
        require(rows[i].second > 0.0, "slope fit requires positive estimates");
        xs[i] = std::log2(rows[i].first);
        ys[i] = std::log2(rows[i].second);
    }
    double xbar = 0.0, ybar = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        xbar += xs[i];
        ybar += ys[i];
    }
    xbar /= static_cast<double>(n);
    ybar /= static_cast<double>(n);

    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - xbar) * (xs[i] - xbar);
        sxy += (xs[i] - xbar) * (ys[i] - ybar);
    }
    require(sxx > 0.0, "slope fit requires at least two distinct tau values");

    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = ybar - fit.slope * xbar;
    if (n > 2) {
        double rss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
            rss += r * r;
        }
        fit.halfwidth = 2.0 * std::sqrt(rss / static_cast<double>(n - 2) / sxx);
    }
    return fit;
}

RateTable estimate_convergence(const SchemeConfig& base, std::span<const int> ladder_steps,
                               int paths) {
    require(base.basis != nullptr, "convergence study needs a basis");
    validate_ladder(ladder_steps);
    require(paths >= 2, "convergence study needs at least two paths");
    require(base.refinement >= 2 && is_power_of_two(base.refinement),
            "reference refinement must be a power of two and at least 2");
    validate_exponent(base.p);
    validate_exponent(base.q);

    const SpectralBasis& basis = *base.basis;
    const int fine_steps = ladder_steps.back() * base.refinement;
    const double h = base.horizon / fine_steps;
    const int points = basis.grid.total_points();
    const double weight = basis.grid.quadrature_weight();
    const std::size_t levels = ladder_steps.size();
    const bool shared_reference = base.forcing.kind == ForcingKind::deterministic_decay;

    // Per-path p-th power error sums, one vector per ladder level.
    std::vector<std::vector<double>> sums(levels,
                                          std::vector<double>(static_cast<std::size_t>(paths)));

    parallel_for(static_cast<std::size_t>(paths), [&](std::size_t m) {
        GaussianStream stream = derive_path_stream(base.noise.master_seed, m);
        const WienerPath path =
            sample_wiener_path(stream, base.noise.num_noise_modes, fine_steps, h, m);

        std::vector<double> ref_grid(static_cast<std::size_t>(fine_steps) * points);
        auto fill_reference_grid = [&](const Trajectory& ref) {
            for (int i = 0; i < fine_steps; ++i)
                to_grid_into(ref.node(i), basis,
                             {ref_grid.data() + static_cast<std::size_t>(i) * points,
                              static_cast<std::size_t>(points)});
        };
        if (shared_reference) {
            SchemeConfig ref_cfg = base;
            ref_cfg.steps = ladder_steps.back();
            ref_cfg.refinement = base.refinement;
            fill_reference_grid(run_reference(ref_cfg, path));
        }

        std::vector<double> coarse_grid(points);
        for (std::size_t level = 0; level < levels; ++level) {
            const int J = ladder_steps[level];
            SchemeConfig cfg = base;
            cfg.steps = J;
            cfg.refinement = fine_steps / J;
            if (!shared_reference) fill_reference_grid(run_reference(cfg, path));

            const Trajectory Y = run_forward(cfg, path);
            const int per_cell = fine_steps / J;
            double acc = 0.0;
            for (int j = 0; j < J; ++j) {
                to_grid_into(Y.node(j), basis, coarse_grid);
                for (int i = j * per_cell; i < (j + 1) * per_cell; ++i) {
                    std::span<const double> ref_row{
                        ref_grid.data() + static_cast<std::size_t>(i) * points,
                        static_cast<std::size_t>(points)};
                    acc += h * pow_p(lq_of_grid_difference(ref_row, coarse_grid, weight, base.q),
                                     base.p);
                }
            }
            sums[level][m] = acc;
        }
    });

    std::vector<RateRow> rows;
    rows.reserve(levels);
    for (std::size_t level = 0; level < levels; ++level) {
        const MeanStderr ms = reduce_mean(sums[level]);
        RateRow row;
        row.tau = base.horizon / ladder_steps[level];
        row.estimate = ms.mean > 0.0 ? std::pow(ms.mean, 1.0 / base.p) : 0.0;
        row.stderr_ = root_stderr(ms.mean, ms.stderr_, base.p);
        rows.push_back(row);
    }
    return assemble_rate_table(std::move(rows));
}

RateTable estimate_dual_convergence(const SpectralBasis& basis, const CoeffVector& g_profile,
                                    double horizon, std::span<const int> ladder_steps,
                                    int refinement, double p_prime, double q_prime) {
    validate_ladder(ladder_steps);
    require(horizon > 0.0, "horizon must be positive");
    require(refinement >= 2 && is_power_of_two(refinement),
            "reference refinement must be a power of two and at least 2");
    validate_exponent(p_prime);
    validate_exponent(q_prime);
    require(static_cast<int>(g_profile.size()) == basis.num_modes(),
            "dual datum length must match the basis");

    const int fine_steps = ladder_steps.back() * refinement;
    const double h = horizon / fine_steps;
    const double weight = basis.grid.quadrature_weight();

    const std::vector<CoeffVector> fine_nodes(static_cast<std::size_t>(fine_steps), g_profile);
    const Trajectory z_fine = solve_dual_continuous(fine_nodes, basis, h);

    std::vector<RateRow> rows;
    rows.reserve(ladder_steps.size());
    std::vector<double> diff(basis.num_modes());
    std::vector<double> grid(basis.grid.total_points());
    for (int J : ladder_steps) {
        const double tau = horizon / J;
        CoeffVector cell(g_profile.size());
        for (std::size_t k = 0; k < cell.size(); ++k) cell[k] = tau * g_profile[k];
        const Trajectory Z =
            dual_backward_run(std::vector<CoeffVector>(static_cast<std::size_t>(J), cell), tau,
                              basis);
        const int stride = fine_steps / J;
        double acc = 0.0;
        for (int j = 0; j < J; ++j) {
            auto fine_node = z_fine.node(j * stride);
            auto coarse_node = Z.node(j);
            for (int k = 0; k < basis.num_modes(); ++k) diff[k] = fine_node[k] - coarse_node[k];
            to_grid_into(diff, basis, grid);
            acc += tau * pow_p(lq_of_grid(grid, weight, q_prime), p_prime);
        }
        rows.push_back({tau, acc > 0.0 ? std::pow(acc, 1.0 / p_prime) : 0.0, 0.0});
    }
    return assemble_rate_table(std::move(rows));
}

namespace {

// Norm of the time-static unit forcing field (time factor 1); the forcing at
// step j is this field scaled by the factor, and lq_H_norm is homogeneous.
double unit_forcing_lqh_norm(const SeparableForcing& sep, const SpectralBasis& basis, double q) {
    HFieldCoeffs unit;
    unit.noise_modes = static_cast<int>(sep.mode_weights.size());
    unit.spatial_modes = basis.num_modes();
    unit.coeffs.resize(static_cast<std::size_t>(unit.noise_modes) * unit.spatial_modes);
    for (int n = 0; n < unit.noise_modes; ++n) {
        auto row = unit.row(n);
        for (int k = 0; k < unit.spatial_modes; ++k) row[k] = sep.mode_weights[n] * sep.profile[k];
    }
    return lq_H_norm(to_hvalued_field(unit, basis), q);
}

// Fills one path's norm rows for a single step size. time_row has J entries,
// space_row J+1, forcing_row J (absolute time factors, unscaled).
void regularity_path_rows(const SchemeConfig& cfg, const WienerPath& path,
                          std::span<double> time_row, std::span<double> space_row,
                          std::span<double> forcing_row) {
    const SpectralBasis& basis = *cfg.basis;
    const int J = cfg.steps;
    const int K = basis.num_modes();
    const double tau = cfg.tau();
    const double weight = basis.grid.quadrature_weight();
    const double inv_sqrt_tau = 1.0 / std::sqrt(tau);
    const int per_coarse = path.num_steps / J;

    const Trajectory Y = run_forward(cfg, path);

    std::vector<double> coeffs(K);
    std::vector<double> grid(basis.grid.total_points());
    std::vector<double> sqrt_lambda(K);
    for (int k = 0; k < K; ++k) sqrt_lambda[k] = std::sqrt(basis.eigenvalues[k]);

    for (int j = 0; j < J; ++j) {
        auto next = Y.node(j + 1);
        auto curr = Y.node(j);
        for (int k = 0; k < K; ++k) coeffs[k] = (next[k] - curr[k]) * inv_sqrt_tau;
        to_grid_into(coeffs, basis, grid);
        time_row[j] = lq_of_grid(grid, weight, cfg.q);
    }
    for (int j = 0; j <= J; ++j) {
        auto node = Y.node(j);
        for (int k = 0; k < K; ++k) coeffs[k] = node[k] * sqrt_lambda[k];
        to_grid_into(coeffs, basis, grid);
        space_row[j] = lq_of_grid(grid, weight, cfg.q);
    }
    for (int j = 0; j < J; ++j)
        forcing_row[j] = std::abs(forcing_time_factor(cfg.forcing, j, &path, per_coarse));
}

RegularityReport assemble_regularity(const SchemeConfig& cfg, int paths,
                                     const std::vector<double>& time_vals,
                                     const std::vector<double>& space_vals,
                                     const std::vector<double>& forcing_factors,
                                     double unit_forcing_norm) {
    const int J = cfg.steps;
    const double p = cfg.p;
    const std::size_t M = static_cast<std::size_t>(paths);

    auto column = [&](const std::vector<double>& vals, int cols, int j) {
        SampleSet s;
        s.values.resize(M);
        for (std::size_t m = 0; m < M; ++m) s.values[m] = vals[m * cols + j];
        return s;
    };
    auto functional = [&](const std::vector<double>& vals, int cols, double* stderr_out) {
        std::vector<double> per_step(cols);
        for (int j = 0; j < cols; ++j) per_step[j] = lp_over_paths(column(vals, cols, j), p).value;
        // Same p-th power sum path-wise, for the spread of the estimate.
        std::vector<double> per_path(M, 0.0);
        for (std::size_t m = 0; m < M; ++m)
            for (int j = 0; j < cols; ++j) per_path[m] += pow_p(vals[m * cols + j], p);
        const MeanStderr ms = reduce_mean(per_path);
        *stderr_out = root_stderr(ms.mean, ms.stderr_, p);
        return sequence_lp(per_step, p);
    };

    RegularityReport report;
    report.tau = cfg.tau();
    report.time_functional = functional(time_vals, J, &report.time_stderr);
    report.space_functional = functional(space_vals, J + 1, &report.space_stderr);

    std::vector<double> forcing_per_step(J);
    for (int j = 0; j < J; ++j) {
        SampleSet col = column(forcing_factors, J, j);
        for (double& v : col.values) v *= unit_forcing_norm;
        forcing_per_step[j] = lp_over_paths(col, p).value;
    }
    report.forcing_norm = sequence_lp(forcing_per_step, p);

    if (report.forcing_norm > 0.0) {
        report.time_ratio = report.time_functional / report.forcing_norm;
        report.space_ratio = report.space_functional / report.forcing_norm;
    }
    return report;
}

}  // namespace

RegularityReport estimate_regularity(const SchemeConfig& config, int paths) {
    require(config.basis != nullptr, "regularity estimate needs a basis");
    require(paths >= 2, "regularity estimate needs at least two paths");
    require(config.steps >= 1, "step count must be >= 1");
    validate_exponent(config.p);
    validate_exponent(config.q);

    const int J = config.steps;
    const double tau = config.tau();
    const std::size_t M = static_cast<std::size_t>(paths);
    std::vector<double> time_vals(M * J), space_vals(M * (J + 1)), forcing_factors(M * J);

    parallel_for(M, [&](std::size_t m) {
        GaussianStream stream = derive_path_stream(config.noise.master_seed, m);
        const WienerPath path =
            sample_wiener_path(stream, config.noise.num_noise_modes, J, tau, m);
        regularity_path_rows(config, path,
                             {time_vals.data() + m * J, static_cast<std::size_t>(J)},
                             {space_vals.data() + m * (J + 1), static_cast<std::size_t>(J + 1)},
                             {forcing_factors.data() + m * J, static_cast<std::size_t>(J)});
    });

    const SeparableForcing sep =
        make_separable_forcing(config.forcing, *config.basis, config.noise.num_noise_modes);
    const double unit_norm = unit_forcing_lqh_norm(sep, *config.basis, config.q);
    return assemble_regularity(config, paths, time_vals, space_vals, forcing_factors, unit_norm);
}

RegularitySweep regularity_sweep(const SchemeConfig& base, std::span<const int> ladder_steps,
                                 int paths, double budget) {
    require(base.basis != nullptr, "regularity sweep needs a basis");
    validate_ladder(ladder_steps);
    require(paths >= 2, "regularity sweep needs at least two paths");
    validate_exponent(base.p);
    validate_exponent(base.q);

    const int fine_steps = ladder_steps.back();
    const double fine_tau = base.horizon / fine_steps;
    const std::size_t M = static_cast<std::size_t>(paths);
    const std::size_t levels = ladder_steps.size();

    std::vector<std::vector<double>> time_vals(levels), space_vals(levels),
        forcing_factors(levels);
    for (std::size_t l = 0; l < levels; ++l) {
        const int J = ladder_steps[l];
        time_vals[l].resize(M * J);
        space_vals[l].resize(M * (J + 1));
        forcing_factors[l].resize(M * J);
    }

    parallel_for(M, [&](std::size_t m) {
        GaussianStream stream = derive_path_stream(base.noise.master_seed, m);
        const WienerPath path =
            sample_wiener_path(stream, base.noise.num_noise_modes, fine_steps, fine_tau, m);
        for (std::size_t l = 0; l < levels; ++l) {
            const int J = ladder_steps[l];
            SchemeConfig cfg = base;
            cfg.steps = J;
            regularity_path_rows(cfg, path,
                                 {time_vals[l].data() + m * J, static_cast<std::size_t>(J)},
                                 {space_vals[l].data() + m * (J + 1),
                                  static_cast<std::size_t>(J + 1)},
                                 {forcing_factors[l].data() + m * J, static_cast<std::size_t>(J)});
        }
    });

    const SeparableForcing sep =
        make_separable_forcing(base.forcing, *base.basis, base.noise.num_noise_modes);
    const double unit_norm = unit_forcing_lqh_norm(sep, *base.basis, base.q);

    RegularitySweep sweep;
    sweep.budget = budget;
    for (std::size_t l = 0; l < levels; ++l) {
        SchemeConfig cfg = base;
        cfg.steps = ladder_steps[l];
        sweep.reports.push_back(assemble_regularity(cfg, paths, time_vals[l], space_vals[l],
                                                    forcing_factors[l], unit_norm));
    }

    bool degenerate = false;
    double time_min = 0.0, time_max = 0.0, space_min = 0.0, space_max = 0.0;
    for (std::size_t l = 0; l < levels; ++l) {
        const auto& r = sweep.reports[l];
        if (!r.time_ratio || !r.space_ratio) {
            degenerate = true;
            break;
        }
        if (l == 0) {
            time_min = time_max = *r.time_ratio;
            space_min = space_max = *r.space_ratio;
        } else {
            time_min = std::min(time_min, *r.time_ratio);
            time_max = std::max(time_max, *r.time_ratio);
            space_min = std::min(space_min, *r.space_ratio);
            space_max = std::max(space_max, *r.space_ratio);
        }
    }
    if (!degenerate) {
        sweep.time_uniform = time_min > 0.0 && time_max <= budget * time_min;
        sweep.space_uniform = space_min > 0.0 && space_max <= budget * space_min;
    }
    return sweep;
}

IsometryResult ito_isometry_check(const SpectralBasis& basis,
                                  const std::vector<HFieldCoeffs>& integrand, double tau,
                                  double p, double q, int paths, std::uint64_t master_seed) {
    validate_exponent(p);
    validate_exponent(q);
    require(tau > 0.0, "isometry check requires tau > 0");
    require(!integrand.empty(), "isometry check needs a step integrand");
    require(paths >= 2, "isometry check needs at least two paths");
    const int J = static_cast<int>(integrand.size());
    const int N = integrand.front().noise_modes;
    const int K = basis.num_modes();
    for (const auto& f : integrand)
        require(f.noise_modes == N && f.spatial_modes == K,
                "integrand steps must share dimensions matching the basis");

    const int points = basis.grid.total_points();
    const double weight = basis.grid.quadrature_weight();

    // Deterministic side: pointwise squared L^2-in-time H norm, then L^q.
    std::vector<double> point_sq(points, 0.0);
    {
        std::vector<double> grid(points);
        for (int j = 0; j < J; ++j) {
            for (int n = 0; n < N; ++n) {
                to_grid_into(integrand[j].row(n), basis, grid);
                for (int i = 0; i < points; ++i) point_sq[i] += tau * grid[i] * grid[i];
            }
        }
    }
    std::vector<double> pointwise(points);
    for (int i = 0; i < points; ++i) pointwise[i] = std::sqrt(point_sq[i]);
    const double rhs_norm = lq_of_grid(pointwise, weight, q);
    const double rhs_moment = pow_p(rhs_norm, p);

    std::vector<double> samples(static_cast<std::size_t>(paths));
    parallel_for(samples.size(), [&](std::size_t m) {
        GaussianStream stream = derive_path_stream(master_seed, m);
        const WienerPath path = sample_wiener_path(stream, N, J, tau, m);
        CoeffVector integral(K, 0.0);
        for (int j = 0; j < J; ++j) {
            for (int n = 0; n < N; ++n) {
                const double w = path.at(n, j);
                auto row = integrand[j].row(n);
                for (int k = 0; k < K; ++k) integral[k] += w * row[k];
            }
        }
        std::vector<double> grid(points);
        to_grid_into(integral, basis, grid);
        samples[m] = pow_p(lq_of_grid(grid, weight, q), p);
    });

    const MeanStderr ms = reduce_mean(samples);
    IsometryResult result;
    result.lhs_moment = ms.mean;
    result.rhs_moment = rhs_moment;
    if (rhs_moment > 0.0) {
        result.ratio = ms.mean / rhs_moment;
        result.ratio_stderr = ms.stderr_ / rhs_moment;
    } else {
        result.degenerate = true;
    }
    return result;
}

DualityResult duality_identity_check(const SchemeConfig& config, const CoeffVector& g_profile,
                                     int paths) {
    require(config.basis != nullptr, "duality check needs a basis");
    require(config.p == 2.0 && config.q == 2.0, "duality check is defined at p = q = 2");
    require(config.steps >= 1 && config.refinement >= 1, "invalid duality configuration");
    require(paths >= 2, "duality check needs at least two paths");
    const SpectralBasis& basis = *config.basis;
    const int K = basis.num_modes();
    require(static_cast<int>(g_profile.size()) == K, "dual datum length must match the basis");

    const int J = config.steps;
    const int per_cell = config.refinement;
    const int fine_steps = J * per_cell;
    const double h = config.horizon / fine_steps;
    const int N = config.noise.num_noise_modes;

    // Deterministic dual side on the fine grid.
    const std::vector<CoeffVector> g_nodes(static_cast<std::size_t>(fine_steps), g_profile);
    const Trajectory Z = solve_dual_continuous(g_nodes, basis, h);

    const SeparableForcing sep = make_separable_forcing(config.forcing, basis, N);

    // Pairings of coefficient vectors stand in for quadrature inner products;
    // the two agree to roundoff by discrete orthonormality of the eigenfields.
    auto dot = [K](std::span<const double> a, std::span<const double> b) {
        double acc = 0.0;
        for (int k = 0; k < K; ++k) acc += a[k] * b[k];
        return acc;
    };

    // test_fn[i] = Z_i - Z_{i+1} + h A Z_i, the fine cell value of -z' + A z.
    std::vector<double> test_fn(static_cast<std::size_t>(fine_steps) * K);
    std::vector<double> bridge_weight(fine_steps);  // <profile, Z_{i+1} - Z_i>
    std::vector<double> profile_dot_Z(J);           // <profile, Z_{(j+1) per_cell}>
    for (int i = 0; i < fine_steps; ++i) {
        auto zi = Z.node(i);
        auto zn = Z.node(i + 1);
        double* row = test_fn.data() + static_cast<std::size_t>(i) * K;
        for (int k = 0; k < K; ++k) row[k] = zi[k] - zn[k] + h * basis.eigenvalues[k] * zi[k];
        double acc = 0.0;
        for (int k = 0; k < K; ++k) acc += sep.profile[k] * (zn[k] - zi[k]);
        bridge_weight[i] = acc;
    }
    for (int j = 0; j < J; ++j) profile_dot_Z[j] = dot(sep.profile, Z.node((j + 1) * per_cell));

    std::vector<double> lhs_samples(static_cast<std::size_t>(paths));
    std::vector<double> rhs_samples(static_cast<std::size_t>(paths));

    parallel_for(static_cast<std::size_t>(paths), [&](std::size_t m) {
        GaussianStream stream = derive_path_stream(config.noise.master_seed, m);
        const WienerPath path = sample_wiener_path(stream, N, fine_steps, h, m);
        const Trajectory y = run_reference(config, path);

        double lhs = 0.0;
        for (int i = 0; i < fine_steps; ++i)
            lhs += dot(y.node(i), {test_fn.data() + static_cast<std::size_t>(i) * K,
                                   static_cast<std::size_t>(K)});

        double rhs = 0.0;
        for (int j = 0; j < J; ++j) {
            const double factor = forcing_time_factor(config.forcing, j, &path, per_cell);
            double cell_increment = 0.0;  // collapsed coarse increment
            double bridge = 0.0;          // collapsed W(t) - W(t_j) at the current fine node
            double bridge_term = 0.0;
            for (int i = j * per_cell; i < (j + 1) * per_cell; ++i) {
                bridge_term += bridge * bridge_weight[i];
                double xi = 0.0;
                for (int n = 0; n < N; ++n) xi += sep.mode_weights[n] * path.at(n, i);
                bridge += xi;
                cell_increment += xi;
            }
            rhs += factor * (cell_increment * profile_dot_Z[j] - bridge_term);
        }
        lhs_samples[m] = lhs;
        rhs_samples[m] = rhs;
    });

    const MeanStderr lhs_ms = reduce_mean(lhs_samples);
    const MeanStderr rhs_ms = reduce_mean(rhs_samples);
    std::vector<double> diff(lhs_samples.size());
    for (std::size_t m = 0; m < diff.size(); ++m) diff[m] = lhs_samples[m] - rhs_samples[m];
    const MeanStderr gap_ms = reduce_mean(diff);

    DualityResult result;
    result.lhs = lhs_ms.mean;
    result.rhs = rhs_ms.mean;
    result.lhs_stderr = lhs_ms.stderr_;
    result.rhs_stderr = rhs_ms.stderr_;
    result.gap_stderr = gap_ms.stderr_;
    const double gap = std::abs(lhs_ms.mean - rhs_ms.mean);
    const double scale = std::max({std::abs(lhs_ms.mean), std::abs(rhs_ms.mean), lhs_ms.stderr_,
                                   rhs_ms.stderr_});
    if (scale > 0.0) {
        result.relative_gap = gap / scale;
    } else if (gap > 0.0) {
        result.scale_degenerate = true;
    }
    return result;
}

}  // namespace spde
