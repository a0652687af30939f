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

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "irssense/geometry.hpp"
#include "irssense/random.hpp"

namespace irssense
{

// One static scatterer in the sensing scene. Its echo is removed by the
// background calibration, never estimated.
struct ClutterSpec
{
    double theta_h = 0.0;     // azimuth w.r.t. IRS [rad]
    double theta_v = kPi / 2; // vertical angle w.r.t. IRS [rad]
    double d_i = 10.0;        // IRS -> clutter [m]
    std::optional<double> d_c; // controller -> clutter [m]; derived from geometry when absent
    double kappa = 1.0;       // RCS [m^2]
};

// Physical parameters of one sensing scene. Defaults reproduce the reference
// setup: N=64, M=8, d_IT=30 m, theta=60 deg, kappa=7 dBsm, noise -109 dBm,
// lambda=0.2 m, d_CI=0.5 m, delta=0.01, T=64.
struct ScenarioConfig
{
    ArrayLayout layout;
    AngleSet angles;
    double d_ci = 0.5;             // controller -> IRS center [m]
    double d_it = 30.0;            // IRS -> target [m]
    std::optional<double> d_ct;    // controller -> target [m]; derived from geometry when absent
    double kappa = dbsm_to_m2(7.0);
    double noise_power = dbm_to_mw(-109.0); // sigma_0^2 [mW]
    double tx_power = dbm_to_mw(0.0);       // |x[t]|^2 [mW]
    int snapshots = 64;
    // Vertical-alignment power gain of the reflected link. The signal model
    // scales amplitudes by sqrt(eta_r) so closed-form powers carry eta_r linearly.
    double eta_r = 1.0;
    std::vector<ClutterSpec> clutters;
    double success_delta = 0.01;        // [rad]
    double user_theta = deg_to_rad(60); // helping-user azimuth w.r.t. IRS [rad]

    double controller_target_distance() const;
    double eta_amplitude() const;
    void validate() const;
};

// Distance between two points given in IRS-centered spherical coordinates
// (range, azimuth, vertical angle).
double point_distance(double r1, double theta_h1, double theta_v1, double r2, double theta_h2, double theta_v2);

struct ClutterLink
{
    Complex alpha_r; // reflected-link composite gain (includes small-scale fading)
    Complex alpha_d; // direct-link composite gain
    CVec b;          // sensor response toward the clutter
    CVec a;          // IRS response toward the clutter
};

struct ChannelRealization
{
    Complex alpha_ci;   // controller -> IRS elements path gain
    Complex beta_r;     // CN(0,1) fading, reflected link
    Complex beta_d;     // CN(0,1) fading, direct link
    double g_r_gain = 0; // IRS -> target -> sensors attenuation
    double g_d_gain = 0; // controller -> target -> sensors attenuation
    Complex alpha_r;    // beta_r * G_r
    Complex alpha_d;    // beta_d * G_d
    Complex gamma_r;    // alpha_r * alpha_ci * eta amplitude
    double eta_amplitude = 1.0;
    CVec h_cs;          // controller -> sensors leak
    std::vector<ClutterLink> clutter_links;

    CVec a_ci; // IRS response toward controller
    CVec a_it; // IRS response toward target
    CVec b;    // sensor response toward target
};

Complex controller_element_gain(double d_ci, double wavelength);
double reflected_attenuation(double wavelength, double kappa, double d_it);
double direct_attenuation(double wavelength, double kappa, double d_ct, double d_it);

ChannelRealization draw_realization(const ScenarioConfig &cfg, Rng &rng);
ChannelRealization draw_realization(const ScenarioConfig &cfg, std::uint64_t seed);

// Deterministic realization with beta_r = beta_d = 1 (no fading).
ChannelRealization nominal_realization(const ScenarioConfig &cfg);

enum class NoiseMode
{
    on,
    off
};

// IRS-reflected echo g_r for one full (N_h*N_v) reflection vector, before x[t].
CVec reflected_echo(const ChannelRealization &real, const CVec &phi0);
CVec direct_echo(const ChannelRealization &real);
// Controller leak plus all clutter echoes for one reflection vector, before x.
CVec background_channel(const ChannelRealization &real, const CVec &phi0);

CVec received_snapshot(const ScenarioConfig &cfg, const ChannelRealization &real, const CVec &phi0, Rng &rng,
                       NoiseMode noise = NoiseMode::on);

// Full reflection vectors phi0[t] = phi_h[t] (x) phi_v with the vertical
// factor aligned; columns are snapshots.
CMat expand_schedule(const CMat &horizontal, const ScenarioConfig &cfg);

// Offline background estimates, one per distinct reflection vector.
class BackgroundTable
{
public:
    void insert(const CVec &phi0, CVec estimate);
    const CVec *find(const CVec &phi0) const;
    std::size_t size() const { return entries_.size(); }

    double calibration_noise_power = 0.0;

private:
    static std::vector<double> key(const CVec &phi0);
    std::map<std::vector<double>, CVec> entries_;
};

BackgroundTable calibrate_background(const ScenarioConfig &cfg, const ChannelRealization &real,
                                     const CMat &schedule, Rng &rng, NoiseMode noise = NoiseMode::on);

struct SnapshotMatrix
{
    CMat y;      // cleaned snapshots, M x T
    CMat y_raw;  // raw snapshots, M x T
    double noise_var = 0.0; // effective sigma^2 = 2 sigma_0^2
};

SnapshotMatrix cancel_background(const CMat &y_raw, const BackgroundTable &table, const CMat &schedule);

// Calibrate, receive T snapshots, cancel. `schedule` holds full reflection vectors.
SnapshotMatrix simulate_snapshots(const ScenarioConfig &cfg, const ChannelRealization &real, const CMat &schedule,
                                  Rng &rng, NoiseMode noise = NoiseMode::on);

} // namespace irssense
