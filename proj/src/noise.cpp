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

#include "spde/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace spde {

double WienerPath::value_at(int mode, int step) const {
    double acc = 0.0;
    for (int j = 0; j < step; ++j) acc += at(mode, j);
    return acc;
}

WienerPath sample_wiener_path(GaussianStream& stream, int num_modes, int num_steps,
                              double fine_step, std::uint64_t path_index) {
    if (num_modes < 1) throw std::invalid_argument("num_modes must be >= 1");
    if (num_steps < 1) throw std::invalid_argument("num_steps must be >= 1");
    if (!(fine_step > 0.0)) throw std::invalid_argument("fine_step must be positive");

    WienerPath path;
    path.num_modes = num_modes;
    path.num_steps = num_steps;
    path.fine_step = fine_step;
    path.path_index = path_index;
    path.increments.resize(static_cast<std::size_t>(num_modes) * num_steps);

    const double scale = std::sqrt(fine_step);
    for (int n = 0; n < num_modes; ++n)
        for (int j = 0; j < num_steps; ++j) path.at(n, j) = scale * stream.next();
    return path;
}

namespace {

WienerPath sum_groups(const WienerPath& path, int factor) {
    WienerPath out;
    out.num_modes = path.num_modes;
    out.num_steps = path.num_steps / factor;
    out.fine_step = path.fine_step * factor;
    out.path_index = path.path_index;
    out.increments.resize(static_cast<std::size_t>(out.num_modes) * out.num_steps);
    for (int n = 0; n < out.num_modes; ++n) {
        for (int j = 0; j < out.num_steps; ++j) {
            double acc = 0.0;
            for (int i = 0; i < factor; ++i) acc += path.at(n, j * factor + i);
            out.at(n, j) = acc;
        }
    }
    return out;
}

}  // namespace

WienerPath coarsen(const WienerPath& path, int factor) {
    if (factor < 1) throw std::invalid_argument("coarsening factor must be >= 1");
    if (path.num_steps % factor != 0)
        throw std::invalid_argument("coarsening factor must divide the step count");
    if (factor == 1) return path;

    // Power-of-two factors reduce by repeated pairwise halving, so nested
    // coarsenings are bit-identical to a single one: coarsen(coarsen(p,2),2)
    // == coarsen(p,4) despite floating-point non-associativity.
    if ((factor & (factor - 1)) == 0) {
        WienerPath out = sum_groups(path, 2);
        for (int f = factor / 2; f > 1; f /= 2) out = sum_groups(out, 2);
        return out;
    }
    return sum_groups(path, factor);
}

}  // namespace spde
