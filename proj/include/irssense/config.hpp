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

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "irssense/harness.hpp"

namespace irssense
{

// Raw values of a section whose keys are only required by some commands.
using RawSection = std::map<std::string, std::string>;

struct PlanSection
{
    std::vector<SchemeId> schemes;
    int trials = 1000;
    std::uint64_t seed = 1;
    SweepParam sweep = SweepParam::none;
    std::vector<double> sweep_values;
    std::optional<std::filesystem::path> output_csv;
    int workers = 0;
};

// Parsed scenario or plan file. Sections hold `key = value` pairs; physical
// quantities carry their unit in the key name. Unknown sections or keys are
// rejected.
struct ConfigFile
{
    SchemeContext context;
    CrbSettings crb;
    std::optional<RawSection> bs;
    std::optional<RawSection> mus;
    std::optional<PlanSection> plan;
};

ConfigFile parse_config(std::istream &in);
ConfigFile load_config(const std::filesystem::path &path);

// Geometry of the BS benchmarks; every key except bitib_grid_step_deg is required.
BsGeometry bs_geometry(const ConfigFile &file);
MusGeometry mus_geometry(const ConfigFile &file);

// Combines the scenario sections with [plan]; scheme-specific sections are
// checked here so the error names the missing key.
ExperimentPlan make_plan(const ConfigFile &file);

} // namespace irssense
