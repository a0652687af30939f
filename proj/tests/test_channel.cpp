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

#include <doctest.h>

#include "irssense/channel.hpp"
#include "irssense/reflection.hpp"
#include "oracles.hpp"

using namespace irssense;

namespace
{
ScenarioConfig small_scene()
{
    ScenarioConfig cfg;
    cfg.layout.n_h = 8;
    cfg.layout.m = 4;
    cfg.snapshots = 8;
    return cfg;
}
} // namespace

TEST_CASE("controller-target distance follows the law of cosines in the horizontal plane")
{
    ScenarioConfig cfg;
    const double th = cfg.angles.theta_it_h;
    const double ref = std::sqrt(cfg.d_ci * cfg.d_ci + cfg.d_it * cfg.d_it - 2.0 * cfg.d_ci * cfg.d_it * std::cos(th));
    CHECK(cfg.controller_target_distance() == doctest::Approx(ref).epsilon(1e-12));
    CHECK(cfg.controller_target_distance() == doctest::Approx(29.7531).epsilon(1e-5));
    cfg.d_ct = 12.0;
    CHECK(cfg.controller_target_distance() == 12.0);
}

TEST_CASE("path gains match the free-space and radar amplitudes")
{
    const double lam = 0.2, kappa = 5.0;
    CHECK(std::abs(controller_element_gain(0.5, lam)) == doctest::Approx(oracle::free_space_amplitude(lam, 0.5)));
    CHECK(reflected_attenuation(lam, kappa, 30.0) == doctest::Approx(oracle::radar_amplitude(lam, kappa, 30.0, 30.0)));
    CHECK(direct_attenuation(lam, kappa, 20.0, 30.0) == doctest::Approx(oracle::radar_amplitude(lam, kappa, 20.0, 30.0)));
    // At d_CI = 0.5 m and lambda = 0.2 m the controller link phase is 5 pi.
    CHECK(controller_element_gain(0.5, lam).real() < 0.0);
    CHECK(std::abs(controller_element_gain(0.5, lam).imag()) < 1e-15);
}

TEST_CASE("reflected echo equals the explicit per-element sum")
{
    ScenarioConfig cfg = small_scene();
    cfg.eta_r = 2.5;
    const ChannelRealization real = draw_realization(cfg, 11u);
    Rng rng(3);
    const CVec phi = ReflectionSchedule::random_phase(cfg.layout.n_h, 1, rng).column(0);
    Complex s = 0.0;
    for (int n = 0; n < cfg.layout.n_h; ++n)
        s += real.a_it(n) * phi(n) * real.a_ci(n);
    const CVec ref = std::sqrt(cfg.eta_r) * real.alpha_r * real.alpha_ci * s * real.b;
    CHECK((reflected_echo(real, phi) - ref).norm() < 1e-12 * ref.norm());
}

TEST_CASE("noiseless calibration removes leak and clutter exactly")
{
    ScenarioConfig cfg = small_scene();
    cfg.tx_power = dbm_to_mw(13.0);
    cfg.clutters.push_back({deg_to_rad(-20.0), kPi / 2, 8.0, std::nullopt, 30.0});
    cfg.clutters.push_back({deg_to_rad(35.0), kPi / 2, 14.0, 14.2, 3.0});
    Rng rng(7);
    const ChannelRealization real = draw_realization(cfg, rng);
    const CMat sched = expand_schedule(ReflectionSchedule::dft(cfg.layout.n_h, cfg.snapshots).matrix(), cfg);
    const SnapshotMatrix snap = simulate_snapshots(cfg, real, sched, rng, NoiseMode::off);
    CHECK(snap.noise_var == doctest::Approx(2.0 * cfg.noise_power));
    for (Eigen::Index t = 0; t < sched.cols(); ++t)
    {
        const CVec target = (reflected_echo(real, sched.col(t)) + direct_echo(real)) * std::sqrt(cfg.tx_power);
        CHECK((snap.y.col(t) - target).norm() <= 1e-12 * snap.y_raw.col(t).norm());
    }
}

TEST_CASE("cancellation noise has twice the receiver variance")
{
    ScenarioConfig cfg = small_scene();
    cfg.kappa = 0.0;
    Rng rng(17);
    const ChannelRealization real = draw_realization(cfg, rng);
    const CMat sched = expand_schedule(ReflectionSchedule::dft(cfg.layout.n_h, cfg.snapshots).matrix(), cfg);
    double acc = 0.0;
    int count = 0;
    for (int rep = 0; rep < 2000; ++rep)
    {
        const SnapshotMatrix snap = simulate_snapshots(cfg, real, sched, rng);
        acc += snap.y.squaredNorm();
        count += static_cast<int>(snap.y.size());
    }
    CHECK(acc / count == doctest::Approx(2.0 * cfg.noise_power).epsilon(0.02));
}

TEST_CASE("cancellation needs a calibration entry for every pattern")
{
    ScenarioConfig cfg = small_scene();
    Rng rng(1);
    const ChannelRealization real = draw_realization(cfg, rng);
    const CMat dft = ReflectionSchedule::dft(cfg.layout.n_h, cfg.snapshots).matrix();
    const BackgroundTable table = calibrate_background(cfg, real, dft.leftCols(2), rng);
    CHECK(table.size() == 2);
    CMat y = CMat::Zero(cfg.layout.m, 3);
    CHECK_THROWS_AS(cancel_background(y, table, dft.leftCols(3)), ComputationError);
}

TEST_CASE("calibration measures each distinct pattern once")
{
    ScenarioConfig cfg = small_scene();
    Rng rng(2);
    const ChannelRealization real = draw_realization(cfg, rng);
    const CMat ones = CMat::Ones(cfg.layout.n_h, 5);
    CHECK(calibrate_background(cfg, real, ones, rng).size() == 1);
}

TEST_CASE("received snapshot validates the reflection vector")
{
    ScenarioConfig cfg = small_scene();
    Rng rng(4);
    const ChannelRealization real = draw_realization(cfg, rng);
    CHECK_THROWS_AS(received_snapshot(cfg, real, CVec::Ones(cfg.layout.n_h + 1), rng), ConfigError);
    CVec bad = CVec::Ones(cfg.layout.n_h);
    bad(3) = 0.5;
    CHECK_THROWS_AS(received_snapshot(cfg, real, bad, rng), ConfigError);
}

TEST_CASE("realizations are reproducible from a seed")
{
    ScenarioConfig cfg = small_scene();
    const auto a = draw_realization(cfg, 99u);
    const auto b = draw_realization(cfg, 99u);
    CHECK(a.beta_r == b.beta_r);
    CHECK(a.beta_d == b.beta_d);
    CHECK(draw_realization(cfg, 100u).beta_r != a.beta_r);
}

TEST_CASE("fading draws are unit-power circular Gaussians")
{
    Rng rng(8);
    double p = 0.0;
    Complex mean = 0.0;
    const int n = 40000;
    for (int i = 0; i < n; ++i)
    {
        const Complex z = complex_normal(rng);
        p += std::norm(z);
        mean += z;
    }
    CHECK(p / n == doctest::Approx(1.0).epsilon(0.03));
    CHECK(std::abs(mean / static_cast<double>(n)) < 0.02);
}

TEST_CASE("expanded schedule repeats the aligned vertical factor")
{
    ScenarioConfig cfg = small_scene();
    cfg.layout.n_v = 3;
    const CMat h = ReflectionSchedule::dft(cfg.layout.n_h, cfg.snapshots).matrix();
    const CMat full = expand_schedule(h, cfg);
    const CVec phi_v = aligned_vertical_reflection(cfg.angles, cfg.layout);
    CHECK(full.rows() == cfg.layout.n_elements());
    for (int t = 0; t < cfg.snapshots; ++t)
        for (int p = 0; p < cfg.layout.n_h; ++p)
            for (int v = 0; v < 3; ++v)
                CHECK(std::abs(full(p * 3 + v, t) - h(p, t) * phi_v(v)) < 1e-14);
    CHECK_THROWS_AS(expand_schedule(h.topRows(4), cfg), ConfigError);
}

TEST_CASE("scenario validation")
{
    ScenarioConfig cfg;
    cfg.d_it = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.snapshots = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.clutters.push_back({});
    CHECK_THROWS_AS(nominal_realization(cfg), ConfigError);
}
