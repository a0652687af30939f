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

#pragma once

#include "irssense/types.hpp"

namespace irssense
{

/*
 * Array geometry for the self-sensing IRS.
 *
 * Every array is a centered uniform array: element m (1-indexed) of a length-N
 * steering vector carries phase (2m-1-N)*pi*phase_diff/2, so the phase origin
 * sits at the array centroid. Angles are radians throughout; degrees only at
 * the file/CLI boundary.
 */

struct SteeringSpec
{
    double phase_diff = 0.0; // normalized spatial phase between adjacent elements
    int size = 1;
};

struct ArrayLayout
{
    int n_h = 64;            // horizontal reflecting elements
    int n_v = 1;             // vertical reflecting elements
    int m = 8;               // horizontal sensors
    double d_i = 0.1;        // element spacing [m]
    double d_s = 0.1;        // sensor spacing [m]
    double wavelength = 0.2; // [m]

    int n_elements() const { return n_h * n_v; }
    void validate() const;
};

struct AngleSet
{
    double theta_ci_h = 0.0;          // controller -> IRS azimuth AoA
    double theta_ci_v = kPi / 2.0;    // controller -> IRS vertical AoA
    double theta_it_h = kPi / 3.0;    // target azimuth (the DOA being estimated)
    double theta_it_v = kPi / 2.0;    // IRS -> target vertical AoD

    void validate() const;
};

CVec steering_vector(double phase_diff, int size);
CVec steering_vector(const SteeringSpec &spec);

// Horizontal / vertical spatial directions of a planar array.
double horizontal_direction(double theta_h, double theta_v, double spacing, double wavelength);
double vertical_direction(double theta_v, double spacing, double wavelength);

// a(theta_h, theta_v) = u(phi_h, N_h) (x) u(phi_v, N_v)
CVec upa_response(double theta_h, double theta_v, const ArrayLayout &layout);
CVec controller_response(const AngleSet &angles, const ArrayLayout &layout);
CVec target_response(const AngleSet &angles, const ArrayLayout &layout);

// b(theta) = u((2 d_s / lambda) sin(theta), M)
CVec sensor_response(double theta, const ArrayLayout &layout);

// Spatial direction of the combined controller->element->target manifold,
// (2 d_I / lambda) [sin(theta) sin(theta_IT,v) + sin(theta_CI,h) sin(theta_CI,v)].
double combined_direction(double theta, const AngleSet &angles, const ArrayLayout &layout);

// Same for the vertical axis; used to align the vertical reflection vector.
double combined_vertical_direction(const AngleSet &angles, const ArrayLayout &layout);

// q(theta) = u(combined_direction(theta), N_h)
CVec combined_manifold(double theta, const AngleSet &angles, const ArrayLayout &layout);

struct ManifoldDerivatives
{
    CVec b_dot; // d b / d theta
    CVec q_dot; // d q / d theta
};

ManifoldDerivatives manifold_derivatives(double theta, const AngleSet &angles, const ArrayLayout &layout);

// Vertical reflection vector that co-phases the vertical factor:
// conj(u(combined_vertical_direction, N_v)).
CVec aligned_vertical_reflection(const AngleSet &angles, const ArrayLayout &layout);

} // namespace irssense
