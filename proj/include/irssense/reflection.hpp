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
#include <filesystem>
#include <vector>

#include "irssense/channel.hpp"

namespace irssense
{

// N x T matrix of unit-modulus reflection coefficients; column t is phi[t].
class ReflectionSchedule
{
public:
    explicit ReflectionSchedule(CMat theta);

    // First N columns of a T x T DFT matrix: [Theta]_{n,t} = exp(-j 2 pi (t-1)(n-1) / T).
    static ReflectionSchedule dft(int n, int t);
    static ReflectionSchedule constant(int n, int t);
    static ReflectionSchedule random_phase(int n, int t, Rng &rng);

    int elements() const { return static_cast<int>(theta_.rows()); }
    int snapshots() const { return static_cast<int>(theta_.cols()); }
    const CMat &matrix() const { return theta_; }
    CVec column(int t) const { return theta_.col(t); }
    RMat phases() const;

private:
    CMat theta_;
};

// R_phi = (1/T) sum_t phi[t] phi[t]^H
CMat reflection_covariance(const ReflectionSchedule &schedule);

// B(theta) = M conj(q(theta)) q(theta)^T
CMat power_weight_matrix(double theta, const ScenarioConfig &cfg);

// tr(R_phi B(theta)) evaluated as M q^T R_phi conj(q).
double reflected_trace(const CMat &r_phi, double theta, const ScenarioConfig &cfg);

// Average received power at the sensors,
//   P = E[|gamma_r|^2] tr(R_phi B) + M E[|alpha_d|^2],
// scaled by the transmit power. Fading cross terms vanish since E[beta] = 0.
double average_power_objective(const ReflectionSchedule &schedule, const ScenarioConfig &cfg);

struct OptimalityReport
{
    bool unit_modulus = false;
    bool unit_diagonal = false;
    double trace_b = 0.0;             // tr(B) = N M
    double worst_case = 0.0;          // min over the grid of tr(R_phi B(theta))
    double best_sampled_worst_case = 0.0;
    std::vector<int> violating_samples; // random schedules whose worst case beats the candidate
    bool optimal() const { return unit_modulus && unit_diagonal && violating_samples.empty(); }
};

// Checks the max-min power problem for a candidate schedule against randomly
// drawn unit-modulus schedules of the same size, with B restricted to the
// realizable family B(theta) on `theta_grid`. Intended for small N and T.
OptimalityReport verify_maxmin_optimality(const ReflectionSchedule &candidate, const ScenarioConfig &cfg,
                                      const RVec &theta_grid, int samples, std::uint64_t seed);

// CSV of phases in radians: one row per element, one column per snapshot.
void write_schedule_csv(const ReflectionSchedule &schedule, const std::filesystem::path &path);

} // namespace irssense
