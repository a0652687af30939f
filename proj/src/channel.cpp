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

#include "irssense/channel.hpp"

#include <cmath>

#include <fmt/format.h>

namespace irssense
{

namespace
{
Eigen::Vector3d direction(double theta_h, double theta_v)
{
    // x along the horizontal array axis, z along the vertical axis, y along the normal.
    return {std::sin(theta_h) * std::sin(theta_v), std::cos(theta_h) * std::sin(theta_v), std::cos(theta_v)};
}

void require_positive(double v, const char *name)
{
    if (!(v > 0.0))
        throw ConfigError(fmt::format("{} must be strictly positive (got {})", name, v));
}

void require_unit_modulus(const CVec &phi0)
{
    for (Eigen::Index n = 0; n < phi0.size(); ++n)
        if (std::abs(std::abs(phi0(n)) - 1.0) > 1e-9)
            throw ConfigError(fmt::format("reflection coefficient {} has modulus {}, expected 1", n, std::abs(phi0(n))));
}
} // namespace

double point_distance(double r1, double theta_h1, double theta_v1, double r2, double theta_h2, double theta_v2)
{
    return (r1 * direction(theta_h1, theta_v1) - r2 * direction(theta_h2, theta_v2)).norm();
}

double ScenarioConfig::controller_target_distance() const
{
    if (d_ct)
        return *d_ct;
    return point_distance(d_ci, angles.theta_ci_h, angles.theta_ci_v, d_it, angles.theta_it_h, angles.theta_it_v);
}

double ScenarioConfig::eta_amplitude() const { return std::sqrt(eta_r); }

void ScenarioConfig::validate() const
{
    layout.validate();
    angles.validate();
    require_positive(d_ci, "d_ci");
    require_positive(d_it, "d_it");
    require_positive(controller_target_distance(), "d_ct");
    require_positive(noise_power, "noise_power");
    require_positive(tx_power, "tx_power");
    require_positive(success_delta, "success_delta");
    if (!(kappa >= 0.0))
        throw ConfigError("kappa must be non-negative");
    if (!(eta_r > 0.0))
        throw ConfigError("eta_r must be strictly positive");
    if (snapshots < 1)
        throw ConfigError("snapshots must be >= 1");
    for (const auto &c : clutters)
    {
        require_positive(c.d_i, "clutter d_i");
        if (c.d_c)
            require_positive(*c.d_c, "clutter d_c");
        if (!(c.kappa >= 0.0))
            throw ConfigError("clutter kappa must be non-negative");
    }
}

Complex controller_element_gain(double d_ci, double wavelength)
{
    require_positive(d_ci, "d_ci");
    return std::polar(wavelength / (4.0 * kPi * d_ci), 2.0 * kPi * d_ci / wavelength);
}

double reflected_attenuation(double wavelength, double kappa, double d_it)
{
    require_positive(d_it, "d_it");
    return std::sqrt(wavelength * wavelength * kappa / (64.0 * std::pow(kPi, 3) * std::pow(d_it, 4)));
}

double direct_attenuation(double wavelength, double kappa, double d_ct, double d_it)
{
    require_positive(d_ct, "d_ct");
    require_positive(d_it, "d_it");
    return std::sqrt(wavelength * wavelength * kappa / (64.0 * std::pow(kPi, 3) * d_ct * d_ct * d_it * d_it));
}

namespace
{
ChannelRealization deterministic_part(const ScenarioConfig &cfg)
{
    cfg.validate();
    const auto &L = cfg.layout;
    const auto &A = cfg.angles;

    ChannelRealization r;
    r.alpha_ci = controller_element_gain(cfg.d_ci, L.wavelength);
    r.g_r_gain = reflected_attenuation(L.wavelength, cfg.kappa, cfg.d_it);
    r.g_d_gain = direct_attenuation(L.wavelength, cfg.kappa, cfg.controller_target_distance(), cfg.d_it);
    r.eta_amplitude = cfg.eta_amplitude();
    r.a_ci = controller_response(A, L);
    r.a_it = target_response(A, L);
    r.b = sensor_response(A.theta_it_h, L);

    // Controller -> sensors leak, modeled like the controller -> element link.
    const double leak_dir = horizontal_direction(A.theta_ci_h, A.theta_ci_v, L.d_s, L.wavelength);
    r.h_cs = r.alpha_ci * steering_vector(leak_dir, L.m);
    return r;
}

void finish(ChannelRealization &r)
{
    r.alpha_r = r.beta_r * r.g_r_gain;
    r.alpha_d = r.beta_d * r.g_d_gain;
    r.gamma_r = r.alpha_r * r.alpha_ci * r.eta_amplitude;
}
} // namespace

ChannelRealization draw_realization(const ScenarioConfig &cfg, Rng &rng)
{
    ChannelRealization r = deterministic_part(cfg);
    r.beta_r = complex_normal(rng);
    r.beta_d = complex_normal(rng);
    finish(r);

    const auto &L = cfg.layout;
    for (const auto &c : cfg.clutters)
    {
        const double d_c = c.d_c ? *c.d_c
                                 : point_distance(cfg.d_ci, cfg.angles.theta_ci_h, cfg.angles.theta_ci_v, c.d_i,
                                                  c.theta_h, c.theta_v);
        ClutterLink link;
        link.alpha_r = complex_normal(rng) * reflected_attenuation(L.wavelength, c.kappa, c.d_i);
        link.alpha_d = complex_normal(rng) * direct_attenuation(L.wavelength, c.kappa, d_c, c.d_i);
        link.b = sensor_response(c.theta_h, L);
        link.a = upa_response(c.theta_h, c.theta_v, L);
        r.clutter_links.push_back(std::move(link));
    }
    return r;
}

ChannelRealization draw_realization(const ScenarioConfig &cfg, std::uint64_t seed)
{
    Rng rng(seed);
    return draw_realization(cfg, rng);
}

ChannelRealization nominal_realization(const ScenarioConfig &cfg)
{
    if (!cfg.clutters.empty())
        throw ConfigError("nominal realization is defined for clutter-free scenes only");
    ChannelRealization r = deterministic_part(cfg);
    r.beta_r = 1.0;
    r.beta_d = 1.0;
    finish(r);
    return r;
}

CVec reflected_echo(const ChannelRealization &real, const CVec &phi0)
{
    if (phi0.size() != real.a_it.size())
        throw ConfigError(fmt::format("reflection vector has {} entries, IRS has {}", phi0.size(), real.a_it.size()));
    // a_IT^T diag(phi0) a_CI
    const Complex s = (real.a_it.array() * phi0.array() * real.a_ci.array()).sum();
    return (real.eta_amplitude * real.alpha_r * real.alpha_ci * s) * real.b;
}

CVec direct_echo(const ChannelRealization &real) { return real.alpha_d * real.b; }

CVec background_channel(const ChannelRealization &real, const CVec &phi0)
{
    CVec g = real.h_cs;
    for (const auto &c : real.clutter_links)
    {
        const Complex s = (c.a.array() * phi0.array() * real.a_ci.array()).sum();
        g += (real.eta_amplitude * c.alpha_r * real.alpha_ci * s) * c.b + c.alpha_d * c.b;
    }
    return g;
}

CVec received_snapshot(const ScenarioConfig &cfg, const ChannelRealization &real, const CVec &phi0, Rng &rng,
                       NoiseMode noise)
{
    if (phi0.size() != cfg.layout.n_elements())
        throw ConfigError(
            fmt::format("reflection vector has {} entries, layout has {}", phi0.size(), cfg.layout.n_elements()));
    require_unit_modulus(phi0);
    const double x = std::sqrt(cfg.tx_power);
    CVec y = (reflected_echo(real, phi0) + direct_echo(real) + background_channel(real, phi0)) * x;
    if (noise == NoiseMode::on)
        y += complex_normal_vector(rng, y.size(), cfg.noise_power);
    return y;
}

CMat expand_schedule(const CMat &horizontal, const ScenarioConfig &cfg)
{
    const auto &L = cfg.layout;
    if (horizontal.rows() != L.n_h)
        throw ConfigError(fmt::format("schedule has {} rows, layout has {} horizontal elements", horizontal.rows(), L.n_h));
    const CVec phi_v = aligned_vertical_reflection(cfg.angles, L);
    CMat full(L.n_elements(), horizontal.cols());
    for (Eigen::Index t = 0; t < horizontal.cols(); ++t)
        for (int p = 0; p < L.n_h; ++p)
            full.col(t).segment(p * L.n_v, L.n_v) = horizontal(p, t) * phi_v;
    return full;
}

std::vector<double> BackgroundTable::key(const CVec &phi0)
{
    std::vector<double> k;
    k.reserve(2 * phi0.size());
    for (Eigen::Index n = 0; n < phi0.size(); ++n)
    {
        k.push_back(phi0(n).real());
        k.push_back(phi0(n).imag());
    }
    return k;
}

void BackgroundTable::insert(const CVec &phi0, CVec estimate) { entries_[key(phi0)] = std::move(estimate); }

const CVec *BackgroundTable::find(const CVec &phi0) const
{
    auto it = entries_.find(key(phi0));
    return it == entries_.end() ? nullptr : &it->second;
}

BackgroundTable calibrate_background(const ScenarioConfig &cfg, const ChannelRealization &real, const CMat &schedule,
                                     Rng &rng, NoiseMode noise)
{
    // No target is present offline; each distinct pattern is measured once with
    // the same probing amplitude used online.
    BackgroundTable table;
    table.calibration_noise_power = cfg.noise_power;
    const double x = std::sqrt(cfg.tx_power);
    for (Eigen::Index t = 0; t < schedule.cols(); ++t)
    {
        const CVec phi0 = schedule.col(t);
        if (table.find(phi0))
            continue;
        require_unit_modulus(phi0);
        CVec y = background_channel(real, phi0) * x;
        if (noise == NoiseMode::on)
            y += complex_normal_vector(rng, y.size(), cfg.noise_power);
        table.insert(phi0, std::move(y));
    }
    return table;
}

SnapshotMatrix cancel_background(const CMat &y_raw, const BackgroundTable &table, const CMat &schedule)
{
    if (y_raw.cols() != schedule.cols())
        throw ConfigError(fmt::format("{} snapshots but {} reflection vectors", y_raw.cols(), schedule.cols()));
    SnapshotMatrix out;
    out.y_raw = y_raw;
    out.y.resize(y_raw.rows(), y_raw.cols());
    for (Eigen::Index t = 0; t < y_raw.cols(); ++t)
    {
        const CVec *g = table.find(schedule.col(t));
        if (!g)
            throw ComputationError(fmt::format("no background calibration entry for snapshot {}", t));
        out.y.col(t) = y_raw.col(t) - *g;
    }
    out.noise_var = 2.0 * table.calibration_noise_power;
    return out;
}

SnapshotMatrix simulate_snapshots(const ScenarioConfig &cfg, const ChannelRealization &real, const CMat &schedule,
                                  Rng &rng, NoiseMode noise)
{
    const BackgroundTable table = calibrate_background(cfg, real, schedule, rng, noise);
    CMat y_raw(cfg.layout.m, schedule.cols());
    for (Eigen::Index t = 0; t < schedule.cols(); ++t)
        y_raw.col(t) = received_snapshot(cfg, real, schedule.col(t), rng, noise);
    return cancel_background(y_raw, table, schedule);
}

} // namespace irssense
