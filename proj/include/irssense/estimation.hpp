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

#include <cstddef>
#include <vector>

#include "irssense/channel.hpp"

namespace irssense
{

// Centered uniform linear receive array, the search manifold of MUSIC.
struct UlaManifold
{
    int size = 8;
    double spacing_over_wavelength = 0.5;

    CVec response(double theta) const;
    static UlaManifold sensors(const ArrayLayout &layout) { return {layout.m, layout.d_s / layout.wavelength}; }
};

// R_Y = (1/T) Y Y^H, symmetrized.
CMat sample_covariance(const CMat &y);

struct MusicDecomposition
{
    CMat r_y;
    CVec signal_basis; // dominant eigenvector
    CMat noise_basis;  // remaining M-1 eigenvectors
    RVec eigenvalues;  // descending
    bool degenerate = false; // signal eigenvalue tied with the largest noise eigenvalue
};

MusicDecomposition decompose(const CMat &r_y);

struct DoaEstimate
{
    double theta_hat = 0.0;
    RVec spectrum;
    RVec grid;
    double peak_value = 0.0;
    Eigen::Index peak_index = 0;
    bool degenerate = false;
};

// Uniform grid in radians from lo_deg to hi_deg (inclusive) with step_deg spacing.
RVec angle_grid_deg(double lo_deg, double hi_deg, double step_deg);

struct MusicOptions
{
    bool refine_peak = false; // parabolic interpolation around the grid maximum
};

// P(theta) = 1 / (b^H U_z U_z^H b) over the grid; ties resolve to the lowest index.
DoaEstimate music_spectrum(const MusicDecomposition &decomp, const UlaManifold &manifold, const RVec &grid,
                           const MusicOptions &opts = {});

DoaEstimate music_estimate(const CMat &y, const UlaManifold &manifold, const RVec &grid,
                           const MusicOptions &opts = {});

// Manifold responses precomputed over a search grid; column i is response(grid(i)).
struct ManifoldTable
{
    RVec grid;
    CMat responses;

    static ManifoldTable build(const UlaManifold &manifold, const RVec &grid);
};

DoaEstimate music_spectrum(const MusicDecomposition &decomp, const ManifoldTable &table,
                           const MusicOptions &opts = {});

// Round trip BS -> IRS elements -> target -> IRS elements -> BS with the IRS
// sweeping a codebook of beams, one snapshot per beam.
struct BeamTrainingScene
{
    int n_elements = 64;
    double spacing_over_wavelength = 0.5;
    double theta_target = 0.0;  // target azimuth w.r.t. IRS
    double theta_source = 0.0;  // BS azimuth w.r.t. IRS
    Complex round_trip_gain;    // every gain except the two IRS array factors
    CVec rx_response;           // BS receive array response toward the IRS
    double noise_power = 0.0;
};

// Received vectors of a beam sweep, one column per codebook beam. The beam
// for candidate angle theta_k is conj(u(phi_k, N)), phi_k the combined
// source/target direction.
CMat beam_training_snapshots(const BeamTrainingScene &scene, const RVec &codebook_grid, Rng &rng,
                             NoiseMode noise = NoiseMode::on);

// theta_hat maximizes the received energy ||y_k||^2 over the codebook.
DoaEstimate beam_energy_argmax(const CMat &sweep, const RVec &codebook_grid);

DoaEstimate beam_training_estimate(const BeamTrainingScene &scene, const RVec &codebook_grid, Rng &rng,
                                   NoiseMode noise = NoiseMode::on);

struct AccuracyMetrics
{
    double rmse = 0.0;
    double p_success = 0.0;
    double rmse_stderr = 0.0; // delta-method standard error of the RMSE
    std::size_t count = 0;
};

// Boundary inclusive: |theta_hat - theta| <= delta counts as success.
AccuracyMetrics success_and_rmse(const std::vector<double> &estimates, double truth, double delta);
AccuracyMetrics metrics_from_errors(const std::vector<double> &errors, double delta);

} // namespace irssense
