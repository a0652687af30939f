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

#include <sstream>

#include "irssense/config.hpp"

using namespace irssense;

namespace
{
ConfigFile parse(const std::string &text)
{
    std::istringstream in(text);
    return parse_config(in);
}

std::string error_of(const std::string &text)
{
    try
    {
        parse(text);
    }
    catch (const ConfigError &e)
    {
        return e.what();
    }
    return {};
}
} // namespace

TEST_CASE("empty file yields the reference scene")
{
    const ConfigFile f = parse("");
    const ScenarioConfig ref;
    CHECK(f.context.cfg.layout.n_h == ref.layout.n_h);
    CHECK(f.context.cfg.d_it == ref.d_it);
    CHECK(f.context.cfg.tx_power == ref.tx_power);
    CHECK_FALSE(f.plan);
    CHECK_FALSE(f.bs);
}

TEST_CASE("keys map to scenario fields with unit conversion")
{
    const ConfigFile f = parse(R"(
[array]
n_elements = 16
n_vertical = 2
n_sensors = 6
[geometry]
theta_deg = -30
d_it_m = 12.5
d_ct_m = 13
[target]
kappa_dbsm = 10
[link]
tx_power_dbm = 20
noise_dbm = -100
snapshots = 32
eta_r = 2
[estimation]
grid_step_deg = 0.1
refine_peak = true
success_delta_rad = 0.02
[crb]
c_index = 1
fading_draws = 0
[clutter_wall]
theta_h_deg = 10
d_i_m = 5
kappa_dbsm = 20
)");
    const auto &c = f.context.cfg;
    CHECK(c.layout.n_h == 16);
    CHECK(c.layout.n_v == 2);
    CHECK(c.layout.m == 6);
    CHECK(c.angles.theta_it_h == doctest::Approx(-kPi / 6.0));
    CHECK(c.d_it == 12.5);
    CHECK(c.controller_target_distance() == 13.0);
    CHECK(c.kappa == doctest::Approx(10.0));
    CHECK(c.tx_power == doctest::Approx(100.0));
    CHECK(c.noise_power == doctest::Approx(1e-10));
    CHECK(c.snapshots == 32);
    CHECK(c.eta_r == 2.0);
    CHECK(c.success_delta == 0.02);
    CHECK(f.context.estimator.refine_peak);
    CHECK(f.context.estimator.grid_step_deg == 0.1);
    CHECK(f.crb.c_index == 0);
    CHECK(f.crb.fading_draws == 0);
    REQUIRE(c.clutters.size() == 1);
    CHECK(c.clutters[0].kappa == doctest::Approx(100.0));
    CHECK_FALSE(c.clutters[0].d_c);
}

TEST_CASE("unknown sections and keys are rejected by name")
{
    CHECK(error_of("[link]\nx = 1\n").find("unknown key 'x'") != std::string::npos);
    CHECK(error_of("[foo]\na = 1\n").find("unknown section [foo]") != std::string::npos);
    CHECK(error_of("stray = 1\n").find("outside any section") != std::string::npos);
}

TEST_CASE("malformed values are rejected")
{
    CHECK_FALSE(error_of("[array]\nn_elements = 8.5\n").empty());
    CHECK_FALSE(error_of("[geometry]\nd_it_m = far\n").empty());
    CHECK_FALSE(error_of("[geometry]\nd_it_m = -3\n").empty());
    CHECK_FALSE(error_of("[crb]\nc_index = 0\n").empty());
    CHECK_FALSE(error_of("[crb]\nc_index = 65\n").empty());
    CHECK_FALSE(error_of("[estimation]\nrefine_peak = maybe\n").empty());
    CHECK_FALSE(error_of("[clutter_a]\ntheta_h_deg = 3\n").empty());
    CHECK_FALSE(error_of("[plan]\nschemes = PROPOSED\nseed = -4\n").empty());
    CHECK_FALSE(error_of("[plan]\nschemes = PROPOSED\nsweep_param = n_sensors\n").empty());
    CHECK_FALSE(error_of("[plan]\nschemes = PROPOSED\nsweep_values = 1, 2\n").empty());
    CHECK_FALSE(error_of("[plan]\nschemes = WHATEVER\n").empty());
}

TEST_CASE("plan section builds an experiment plan")
{
    const ConfigFile f = parse(R"(
[plan]
schemes = PROPOSED, BTS
trials = 50
seed = 0x10
sweep_param = tx_power_dbm
sweep_values = 0, 5, 10
output_csv = out.csv
workers = 2
[bs]
d_bi_m = 100
theta_i_deg = 80
theta_b_deg = 80
tx_antennas = 16
rx_antennas = 4
)");
    const ExperimentPlan p = make_plan(f);
    CHECK(p.schemes == std::vector<SchemeId>{SchemeId::proposed, SchemeId::bts});
    CHECK(p.trials == 50);
    CHECK(p.seed == 16);
    CHECK(p.sweep_values == std::vector<double>{0.0, 5.0, 10.0});
    CHECK(p.output_csv->string() == "out.csv");
    CHECK(p.workers == 2);
    REQUIRE(p.base.bs);
    CHECK(p.base.bs->tx_antennas == 16);
    CHECK(p.base.bs->bitib_grid_step_deg == 0.1);
    CHECK_FALSE(p.base.mus);
}

TEST_CASE("base-station schemes need every base-station key")
{
    const ConfigFile f = parse("[plan]\nschemes = BTB\n[bs]\nd_bi_m = 100\n");
    try
    {
        make_plan(f);
        FAIL("expected a config error");
    }
    catch (const ConfigError &e)
    {
        CHECK(std::string(e.what()) == "missing key bs.theta_i_deg");
    }
    CHECK_THROWS_AS(make_plan(parse("[plan]\nschemes = MUS\n")), ConfigError);
    CHECK_THROWS_AS(make_plan(parse("")), ConfigError);
}

TEST_CASE("shipped configs load")
{
    for (const char *name : {"reference.ini", "helping_user.ini", "rmse_vs_power.ini", "rmse_vs_sensors.ini",
                             "rmse_vs_elements.ini", "rmse_vs_crb.ini"})
    {
        CAPTURE(name);
        const ConfigFile f = load_config(std::filesystem::path(IRSSENSE_CONFIG_DIR) / name);
        if (f.plan)
            CHECK_NOTHROW(make_plan(f).validate());
    }
    CHECK_THROWS_AS(load_config("/nonexistent/plan.ini"), ConfigError);
}
