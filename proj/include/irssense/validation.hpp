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

#include <functional>
#include <string>
#include <vector>

namespace irssense
{

struct CheckResult
{
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
    double budget_seconds = 0.0;
};

struct ValidationOptions
{
    int workers = 0; // Monte Carlo workers; 0 = environment / hardware default
};

struct CheckSpec
{
    int id = 0;
    std::string name;
    double budget_seconds = 0.0;
    std::function<CheckResult(const ValidationOptions &)> run;
};

// The acceptance criteria in order. A check passes only when its numerical
// condition holds and it finishes within its time budget.
const std::vector<CheckSpec> &acceptance_checks();

CheckResult run_check(const CheckSpec &spec, const ValidationOptions &opts);
std::vector<CheckResult> run_acceptance_suite(const ValidationOptions &opts = {});

// "[PASS] 7 crb oracle agreement (0.12 s): detail"
std::string format_check(const CheckResult &r);

} // namespace irssense
