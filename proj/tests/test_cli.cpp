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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "irssense/cli.hpp"
#include "irssense/harness.hpp"

using namespace irssense;

namespace
{
struct Invocation
{
    int code = 0;
    std::string out;
    std::string err;
};

Invocation cli(std::vector<std::string> args)
{
    std::ostringstream out, err;
    Invocation r;
    r.code = run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string config(const char *name) { return (std::filesystem::path(IRSSENSE_CONFIG_DIR) / name).string(); }

std::filesystem::path scratch_dir()
{
    const auto dir = std::filesystem::temp_directory_path() / "irssense_cli_test";
    std::filesystem::create_directories(dir);
    return dir;
}
} // namespace

TEST_CASE("usage errors exit with the config code")
{
    CHECK(cli({}).code == kExitConfig);
    CHECK(cli({"bogus"}).code == kExitConfig);
    CHECK(cli({"crb"}).code == kExitConfig);
    CHECK(cli({"crb", "/nonexistent.ini"}).code == kExitConfig);
    CHECK(cli({"--help"}).code == kExitOk);
}

TEST_CASE("crb prints the bound summary and the agreement table")
{
    const Invocation r = cli({"crb", config("reference.ini"), "-n", "5"});
    REQUIRE(r.code == kExitOk);
    CHECK(r.out.find("# crb_closed = ") != std::string::npos);
    CHECK(r.out.find("constant factor") != std::string::npos);
    CHECK(r.out.find("theta_deg,crb_closed,crb_pipeline,crb_fd,ratio\n-81,") != std::string::npos);
    CHECK(cli({"crb", config("reference.ini"), "-n", "1"}).code == kExitConfig);
}

TEST_CASE("powers prints the threshold and the helping-user sweep")
{
    const auto path = scratch_dir() / "powers.csv";
    const Invocation r = cli({"powers", config("helping_user.ini"), "-n", "20", "-o", path.string()});
    REQUIRE(r.code == kExitOk);
    CHECK(r.out.find("# minimizer d_ui_m = 1.785") != std::string::npos);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "d_ui_m,p_r_dbm,p_d_dbm,p_c_dbm,d_ut_m,n_th");
    int rows = 0;
    for (std::string line; std::getline(in, line);)
        ++rows;
    CHECK(rows == 20);
}

TEST_CASE("spectrum dumps one row per grid angle")
{
    const Invocation r = cli({"spectrum", config("reference.ini"), "-s", "4"});
    REQUIRE(r.code == kExitOk);
    std::istringstream in(r.out);
    int rows = 0;
    for (std::string line; std::getline(in, line);)
        if (!line.empty() && line[0] != '#')
            ++rows;
    CHECK(rows == 18002); // header plus the 0.01 deg grid
    CHECK(cli({"spectrum", config("reference.ini"), "--scheme", "BITIB"}).code != kExitOk);
}

TEST_CASE("run writes the result CSV next to the plan")
{
    const auto dir = scratch_dir();
    {
        std::ofstream plan(dir / "plan.ini");
        plan << "[estimation]\ngrid_step_deg = 0.1\n"
                "[crb]\nfading_draws = 100\n"
                "[plan]\nschemes = PROPOSED\ntrials = 4\nseed = 9\nsweep_param = tx_power_dbm\n"
                "sweep_values = 0, 10\noutput_csv = result.csv\n";
    }
    std::filesystem::remove(dir / "result.csv");
    const Invocation r = cli({"run", (dir / "plan.ini").string(), "-w", "2"});
    REQUIRE(r.code == kExitOk);
    const ExperimentResult res = parse_results_csv(dir / "result.csv");
    REQUIRE(res.rows.size() == 2);
    CHECK(res.rows[0].trials == 4);
    CHECK(res.rows[1].sweep_value == 10.0);

    std::ofstream bad(dir / "bad.ini");
    bad << "[plan]\nschemes = PROPOSED\ntrials = 0\n";
    bad.close();
    CHECK(cli({"run", (dir / "bad.ini").string()}).code == kExitConfig);
}

TEST_CASE("validate runs a subset of checks")
{
    const Invocation r = cli({"validate", "--only", "1", "5"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("[PASS]  1 ") != std::string::npos);
    CHECK(r.out.find("[PASS]  5 ") != std::string::npos);
    CHECK(r.out.find("[PASS]  2 ") == std::string::npos);
}
