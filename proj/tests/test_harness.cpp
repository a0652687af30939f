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

#include <cstdlib>
#include <limits>
#include <sstream>

#include "irssense/harness.hpp"
#include "oracles.hpp"

using namespace irssense;

namespace
{
SchemeContext full_context()
{
    SchemeContext ctx;
    ctx.bs = BsGeometry{};
    ctx.mus = MusGeometry{0.5, 10.0, std::nullopt};
    return ctx;
}

ExperimentPlan small_plan()
{
    ExperimentPlan plan;
    plan.base = full_context();
    plan.base.cfg.tx_power = dbm_to_mw(10.0);
    plan.base.estimator.grid_step_deg = 0.05;
    plan.schemes = {SchemeId::proposed, SchemeId::bts, SchemeId::mus, SchemeId::bitib};
    plan.sweep = SweepParam::tx_power_dbm;
    plan.sweep_values = {0.0, 10.0};
    plan.trials = 12;
    plan.seed = 77;
    plan.crb.fading_draws = 2000;
    plan.workers = 1;
    return plan;
}

double mean_power(const SchemeChannel &ch, int draws)
{
    double acc = 0.0;
    for (int i = 0; i < draws; ++i)
    {
        Rng rng(1000 + i);
        acc += ch.synthesize(rng, NoiseMode::off).signal_power;
    }
    return acc / draws;
}
} // namespace

TEST_CASE("scheme names round-trip and codes are distinct")
{
    std::vector<std::uint64_t> codes;
    for (SchemeId s : kAllSchemes)
    {
        CHECK(parse_scheme(scheme_name(s)) == s);
        codes.push_back(scheme_code(s));
    }
    std::sort(codes.begin(), codes.end());
    CHECK(std::adjacent_find(codes.begin(), codes.end()) == codes.end());
    CHECK(scheme_name(SchemeId::proposed_random_phase) == "PROPOSED_RANDOM_PHASE");
    CHECK_THROWS_AS(parse_scheme("proposed"), ConfigError);
    CHECK(uses_base_station(SchemeId::bitib));
    CHECK_FALSE(uses_base_station(SchemeId::mus));
}

TEST_CASE("BS view matches the law of cosines")
{
    ScenarioConfig cfg;
    const BsGeometry bs;
    const BsView v = bs_view(cfg, bs);
    const double gap = bs.theta_i - cfg.angles.theta_it_h;
    const double d_bt = std::sqrt(bs.d_bi * bs.d_bi + cfg.d_it * cfg.d_it - 2.0 * bs.d_bi * cfg.d_it * std::cos(gap));
    CHECK(v.d_bt == doctest::Approx(d_bt).epsilon(1e-12));
    CHECK(v.d_bt == doctest::Approx(72.539).epsilon(1e-4));
    // Interior angle at the BS between the IRS and the target.
    const double at_bs = std::acos((bs.d_bi * bs.d_bi + d_bt * d_bt - cfg.d_it * cfg.d_it) / (2.0 * bs.d_bi * d_bt));
    CHECK(std::abs(v.target_angle - bs.theta_b) == doctest::Approx(at_bs).epsilon(1e-10));
    CHECK(rad_to_deg(v.target_angle) == doctest::Approx(88.13).epsilon(1e-3));
}

TEST_CASE("BS view rejects a target behind the array")
{
    ScenarioConfig cfg;
    BsGeometry bs;
    bs.theta_b = deg_to_rad(85.0);
    CHECK_THROWS_AS(bs_view(cfg, bs), ConfigError);
}

TEST_CASE("noiseless proposed trial recovers the target")
{
    SchemeContext ctx = full_context();
    for (SchemeId s : {SchemeId::proposed, SchemeId::proposed_random_phase, SchemeId::mus, SchemeId::bts})
    {
        const SchemeChannel ch(s, ctx);
        Rng rng(3);
        const SchemeSnapshots snap = ch.synthesize(rng, NoiseMode::off);
        CHECK(std::abs(ch.estimate(snap).theta_hat - snap.truth) < 1e-9);
    }
}

TEST_CASE("proposed synthesizer is the channel pipeline under a DFT schedule")
{
    const SchemeContext ctx = full_context();
    const SchemeChannel ch(SchemeId::proposed, ctx);
    Rng a(55), b(55);
    const SchemeSnapshots snap = ch.synthesize(a);
    const ChannelRealization real = draw_realization(ctx.cfg, b);
    const CMat sched = expand_schedule(ReflectionSchedule::dft(64, 64).matrix(), ctx.cfg);
    const SnapshotMatrix ref = simulate_snapshots(ctx.cfg, real, sched, b);
    CHECK((snap.y - ref.y).norm() == 0.0);
    CHECK(snap.truth == ctx.cfg.angles.theta_it_h);
}

TEST_CASE("infrastructure reflected link is far weaker than the self-sensing one")
{
    const SchemeContext ctx = full_context();
    CHECK(mean_power(SchemeChannel(SchemeId::bits, ctx), 300) < mean_power(SchemeChannel(SchemeId::proposed, ctx), 300));
}

TEST_CASE("beam-training echo power falls with the fourth power of the IRS-target range")
{
    SchemeContext near = full_context();
    near.cfg.d_it = 15.0;
    const SchemeContext far = full_context();
    const double ratio = mean_power(SchemeChannel(SchemeId::bitib, near), 50) /
                         mean_power(SchemeChannel(SchemeId::bitib, far), 50);
    CHECK(ratio == doctest::Approx(16.0).epsilon(1e-9));
}

TEST_CASE("schemes reject missing or inconsistent geometry")
{
    SchemeContext ctx;
    CHECK_THROWS_AS(SchemeChannel(SchemeId::btb, ctx), ConfigError);
    CHECK_THROWS_AS(SchemeChannel(SchemeId::mus, ctx), ConfigError);
    ctx.cfg.snapshots = 32;
    CHECK_THROWS_AS(SchemeChannel(SchemeId::proposed, ctx), ConfigError);
    CHECK_THROWS_AS((MusGeometry{2.0, 1.0, std::nullopt}.validate()), ConfigError);
}

TEST_CASE("sweeps set exactly one parameter")
{
    const SchemeContext ctx = full_context();
    CHECK(apply_sweep(ctx, SweepParam::tx_power_dbm, 20.0).cfg.tx_power == doctest::Approx(100.0));
    CHECK(apply_sweep(ctx, SweepParam::n_sensors, 12.0).cfg.layout.m == 12);
    CHECK(apply_sweep(ctx, SweepParam::n_elements, 32.0).cfg.layout.n_h == 32);
    CHECK(apply_sweep(ctx, SweepParam::d_it_m, 45.0).cfg.d_it == 45.0);
    CHECK(apply_sweep(ctx, SweepParam::d_ui_m, 3.0).mus->d_ui_fixed == 3.0);
    CHECK(apply_sweep(ctx, SweepParam::none, 3.0).cfg.d_it == ctx.cfg.d_it);
    CHECK_THROWS_AS(apply_sweep(ctx, SweepParam::n_sensors, 4.5), ConfigError);
    for (auto p : {SweepParam::none, SweepParam::d_ui_m, SweepParam::n_elements})
        CHECK(parse_sweep(sweep_name(p)) == p);
    CHECK_THROWS_AS(parse_sweep("power"), ConfigError);
}

TEST_CASE("plan validation")
{
    auto expect_bad = [](auto mutate) {
        ExperimentPlan p = small_plan();
        mutate(p);
        CHECK_THROWS_AS(p.validate(), ConfigError);
    };
    CHECK_NOTHROW(small_plan().validate());
    expect_bad([](ExperimentPlan &p) { p.trials = 0; });
    expect_bad([](ExperimentPlan &p) { p.schemes.clear(); });
    expect_bad([](ExperimentPlan &p) { p.schemes.push_back(SchemeId::bts); });
    expect_bad([](ExperimentPlan &p) { p.base.bs.reset(); });
    expect_bad([](ExperimentPlan &p) { p.base.mus.reset(); });
    expect_bad([](ExperimentPlan &p) { p.sweep_values = {10.0, 0.0}; });
    expect_bad([](ExperimentPlan &p) { p.sweep_values = {5.0, 5.0}; });
    expect_bad([](ExperimentPlan &p) { p.sweep_values.clear(); });
    expect_bad([](ExperimentPlan &p) { p.crb.fading_draws = -1; });
    expect_bad([](ExperimentPlan &p) { p.workers = -2; });
    expect_bad([](ExperimentPlan &p) {
        p.sweep = SweepParam::n_elements;
        p.sweep_values = {32.0, 128.0};
    });
}

TEST_CASE("worker count resolution")
{
    ::unsetenv("IRSSENSE_WORKERS");
    CHECK(resolve_workers(0) >= 1);
    ::setenv("IRSSENSE_WORKERS", "3", 1);
    CHECK(resolve_workers(0) == 3);
    CHECK(resolve_workers(5) == 5);
    ::setenv("IRSSENSE_WORKERS", "three", 1);
    CHECK_THROWS_AS(resolve_workers(0), ConfigError);
    ::setenv("IRSSENSE_WORKERS", "0", 1);
    CHECK_THROWS_AS(resolve_workers(0), ConfigError);
    ::unsetenv("IRSSENSE_WORKERS");
}

TEST_CASE("trial seeds separate schemes, points and trials")
{
    const ExperimentPlan plan = small_plan();
    const auto s = experiment_trial_seed(plan, SchemeId::proposed, 0, 0);
    CHECK(s != experiment_trial_seed(plan, SchemeId::bts, 0, 0));
    CHECK(s != experiment_trial_seed(plan, SchemeId::proposed, 1, 0));
    CHECK(s != experiment_trial_seed(plan, SchemeId::proposed, 0, 1));
    CHECK(s == trial_seed(77, scheme_code(SchemeId::proposed), 0, 0));
}

TEST_CASE("experiment output does not depend on the worker count")
{
    ExperimentPlan plan = small_plan();
    const ExperimentResult one = run_experiment(plan);
    plan.workers = 3;
    const ExperimentResult three = run_experiment(plan);
    REQUIRE(one.rows.size() == plan.schemes.size() * plan.sweep_values.size());
    CHECK(one.rows == three.rows);
    for (std::size_t i = 0; i < one.rows.size(); ++i)
        CHECK(one.diagnostics[i].errors_rad == three.diagnostics[i].errors_rad);
    std::ostringstream a, b;
    write_results(one, a);
    write_results(three, b);
    CHECK(a.str() == b.str());
}

TEST_CASE("a single trial can be replayed from its seed")
{
    const ExperimentPlan plan = small_plan();
    const ExperimentResult res = run_experiment(plan);
    for (std::size_t si = 0; si < plan.schemes.size(); ++si)
    {
        const std::size_t row = si * plan.sweep_values.size() + 1;
        const SchemeChannel ch(plan.schemes[si], apply_sweep(plan.base, plan.sweep, plan.sweep_values[1]));
        const double err = run_single_trial(ch, experiment_trial_seed(plan, plan.schemes[si], 1, 4));
        CHECK(res.rows[row].scheme == scheme_name(plan.schemes[si]));
        CHECK(res.diagnostics[row].errors_rad[4] == err);
    }
}

TEST_CASE("results rows carry metrics and the proposed bound")
{
    const ExperimentPlan plan = small_plan();
    const ExperimentResult res = run_experiment(plan);
    for (const auto &r : res.rows)
    {
        CHECK(r.trials == plan.trials);
        CHECK(r.seed == plan.seed);
        CHECK(r.sweep_param == "tx_power_dbm");
        CHECK(r.p_success >= 0.0);
        CHECK(r.p_success <= 1.0);
        CHECK(r.rmse_deg >= 0.0);
        if (r.scheme == "PROPOSED")
            CHECK(r.crb_deg2 > 0.0);
        else
            CHECK(std::isnan(r.crb_deg2));
    }
    // More power, smaller bound.
    CHECK(res.rows[1].crb_deg2 < res.rows[0].crb_deg2);
}

TEST_CASE("results CSV round trip")
{
    ExperimentResult r;
    r.rows.push_back({"PROPOSED", "tx_power_dbm", 10.0, 0.123456789012345, 0.5, -80.25, 1.0 / 3.0, 1000, 7});
    r.rows.push_back({"BTS", "none", 0.0, 2.5, 1.0, -99.0, std::numeric_limits<double>::quiet_NaN(), 10, 18446744073709551615ULL});
    std::stringstream ss;
    write_results(r, ss);
    const ExperimentResult back = parse_results(ss);
    CHECK(back.rows == r.rows);

    std::stringstream empty;
    write_results(ExperimentResult{}, empty);
    CHECK(empty.str() == "scheme,sweep_param,sweep_value,rmse_deg,p_success,mean_rx_power_dbm,crb_deg2,trials,seed\n");
    CHECK(parse_results(empty).rows.empty());
}

TEST_CASE("results CSV parse errors")
{
    std::istringstream bad_header("a,b\n");
    CHECK_THROWS_AS(parse_results(bad_header), ConfigError);
    std::istringstream short_row(
        "scheme,sweep_param,sweep_value,rmse_deg,p_success,mean_rx_power_dbm,crb_deg2,trials,seed\nBTS,none,0\n");
    CHECK_THROWS_AS(parse_results(short_row), ConfigError);
    std::istringstream bad_number(
        "scheme,sweep_param,sweep_value,rmse_deg,p_success,mean_rx_power_dbm,crb_deg2,trials,seed\n"
        "BTS,none,zero,1,1,1,1,1,1\n");
    CHECK_THROWS_AS(parse_results(bad_number), ConfigError);
}
