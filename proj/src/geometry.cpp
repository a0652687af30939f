// SPDX-License-Identifier: Apache-2.0
//
// irssense: simulation and analysis toolkit for self-sensing IRS target localization
// Copyright (C) 2026 The irssense authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "irssense/geometry.hpp"

#include <cmath>

#include <fmt/format.h>

namespace irssense
{

void ArrayLayout::validate() const
{
    if (n_h < 1 || n_v < 1 || m < 1)
        throw ConfigError(fmt::format("array counts must be >= 1 (n_h={}, n_v={}, m={})", n_h, n_v, m));
    if (!(d_i > 0.0) || !(d_s > 0.0) || !(wavelength > 0.0))
        throw ConfigError("element spacing, sensor spacing and wavelength must be strictly positive");
}

void AngleSet::validate() const
{
    const double lim = kPi / 2.0 + 1e-12;
    for (double a : {theta_ci_h, theta_ci_v, theta_it_h, theta_it_v})
        if (!(std::abs(a) <= lim))
            throw ConfigError(fmt::format("angle {} rad outside [-pi/2, pi/2]", a));
}

namespace
{
// Offset of element m (0-indexed) from the array centroid, in element steps.
inline double centroid_offset(int m, int size) { return (2.0 * m + 1.0 - size) / 2.0; }
} // namespace

CVec steering_vector(double phase_diff, int size)
{
    if (size < 1)
        throw ConfigError("steering vector size must be >= 1");
    CVec u(size);
    for (int m = 0; m < size; ++m)
        u(m) = std::polar(1.0, centroid_offset(m, size) * kPi * phase_diff);
    return u;
}

CVec steering_vector(const SteeringSpec &spec) { return steering_vector(spec.phase_diff, spec.size); }

double horizontal_direction(double theta_h, double theta_v, double spacing, double wavelength)
{
    return 2.0 * spacing / wavelength * std::sin(theta_h) * std::sin(theta_v);
}

double vertical_direction(double theta_v, double spacing, double wavelength)
{
    return 2.0 * spacing / wavelength * std::cos(theta_v);
}

CVec upa_response(double theta_h, double theta_v, const ArrayLayout &layout)
{
    const CVec uh = steering_vector(horizontal_direction(theta_h, theta_v, layout.d_i, layout.wavelength), layout.n_h);
    const CVec uv = steering_vector(vertical_direction(theta_v, layout.d_i, layout.wavelength), layout.n_v);
    // Kronecker product, horizontal index major.
    CVec a(layout.n_h * layout.n_v);
    for (int p = 0; p < layout.n_h; ++p)
        a.segment(p * layout.n_v, layout.n_v) = uh(p) * uv;
    return a;
}

CVec controller_response(const AngleSet &angles, const ArrayLayout &layout)
{
    return upa_response(angles.theta_ci_h, angles.theta_ci_v, layout);
}

CVec target_response(const AngleSet &angles, const ArrayLayout &layout)
{
    return upa_response(angles.theta_it_h, angles.theta_it_v, layout);
}

CVec sensor_response(double theta, const ArrayLayout &layout)
{
    return steering_vector(2.0 * layout.d_s / layout.wavelength * std::sin(theta), layout.m);
}

double combined_direction(double theta, const AngleSet &angles, const ArrayLayout &layout)
{
    return horizontal_direction(theta, angles.theta_it_v, layout.d_i, layout.wavelength) +
           horizontal_direction(angles.theta_ci_h, angles.theta_ci_v, layout.d_i, layout.wavelength);
}

double combined_vertical_direction(const AngleSet &angles, const ArrayLayout &layout)
{
    return vertical_direction(angles.theta_it_v, layout.d_i, layout.wavelength) +
           vertical_direction(angles.theta_ci_v, layout.d_i, layout.wavelength);
}

CVec combined_manifold(double theta, const AngleSet &angles, const ArrayLayout &layout)
{
    return steering_vector(combined_direction(theta, angles, layout), layout.n_h);
}

ManifoldDerivatives manifold_derivatives(double theta, const AngleSet &angles, const ArrayLayout &layout)
{
    // d/dtheta of exp(j k pi phi(theta)) is j k pi phi'(theta) times the entry.
    const double b_rate = 2.0 * layout.d_s / layout.wavelength * std::cos(theta);
    const double q_rate = 2.0 * layout.d_i / layout.wavelength * std::cos(theta) * std::sin(angles.theta_it_v);

    ManifoldDerivatives out;
    const CVec b = sensor_response(theta, layout);
    out.b_dot.resize(layout.m);
    for (int m = 0; m < layout.m; ++m)
        out.b_dot(m) = kJ * (centroid_offset(m, layout.m) * kPi * b_rate) * b(m);

    const CVec q = combined_manifold(theta, angles, layout);
    out.q_dot.resize(layout.n_h);
    for (int n = 0; n < layout.n_h; ++n)
        out.q_dot(n) = kJ * (centroid_offset(n, layout.n_h) * kPi * q_rate) * q(n);
    return out;
}

CVec aligned_vertical_reflection(const AngleSet &angles, const ArrayLayout &layout)
{
    return steering_vector(combined_vertical_direction(angles, layout), layout.n_v).conjugate();
}

} // namespace irssense
