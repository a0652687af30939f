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

#include "irssense/reflection.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include <fmt/format.h>

namespace irssense
{

ReflectionSchedule::ReflectionSchedule(CMat theta) : theta_(std::move(theta))
{
    if (theta_.rows() < 1 || theta_.cols() < 1)
        throw ConfigError("reflection schedule must be non-empty");
    for (Eigen::Index t = 0; t < theta_.cols(); ++t)
        for (Eigen::Index n = 0; n < theta_.rows(); ++n)
            if (std::abs(std::abs(theta_(n, t)) - 1.0) > 1e-9)
                throw ConfigError(fmt::format("schedule entry ({}, {}) is not unit-modulus", n, t));
}

ReflectionSchedule ReflectionSchedule::dft(int n, int t)
{
    if (n < 1 || t < n)
        throw ConfigError(fmt::format("DFT schedule needs T >= N >= 1 (got N={}, T={})", n, t));
    CMat theta(n, t);
    for (int ti = 0; ti < t; ++ti)
        for (int ni = 0; ni < n; ++ni)
        {
            // Reduce the exponent modulo T first so large N*T stays exact.
            const long k = (static_cast<long>(ti) * ni) % t;
            theta(ni, ti) = std::polar(1.0, -2.0 * kPi * static_cast<double>(k) / t);
        }
    return ReflectionSchedule(std::move(theta));
}

ReflectionSchedule ReflectionSchedule::constant(int n, int t)
{
    return ReflectionSchedule(CMat::Ones(n, t));
}

ReflectionSchedule ReflectionSchedule::random_phase(int n, int t, Rng &rng)
{
    std::uniform_real_distribution<double> ud(0.0, 2.0 * kPi);
    CMat theta(n, t);
    for (int ti = 0; ti < t; ++ti)
        for (int ni = 0; ni < n; ++ni)
            theta(ni, ti) = std::polar(1.0, ud(rng));
    return ReflectionSchedule(std::move(theta));
}

RMat ReflectionSchedule::phases() const { return theta_.array().arg().matrix(); }

CMat reflection_covariance(const ReflectionSchedule &schedule)
{
    const CMat &th = schedule.matrix();
    CMat r = th * th.adjoint() / static_cast<double>(th.cols());
    // Symmetrize and pin the diagonal; each |phi_n|^2 is exactly one.
    r = (0.5 * (r + r.adjoint())).eval();
    for (Eigen::Index n = 0; n < r.rows(); ++n)
        r(n, n) = 1.0;
    return r;
}

CMat power_weight_matrix(double theta, const ScenarioConfig &cfg)
{
    const CVec q = combined_manifold(theta, cfg.angles, cfg.layout);
    return static_cast<double>(cfg.layout.m) * q.conjugate() * q.transpose();
}

double reflected_trace(const CMat &r_phi, double theta, const ScenarioConfig &cfg)
{
    const CVec q = combined_manifold(theta, cfg.angles, cfg.layout);
    return cfg.layout.m * (q.transpose() * r_phi * q.conjugate()).value().real();
}

double average_power_objective(const ReflectionSchedule &schedule, const ScenarioConfig &cfg)
{
    if (schedule.elements() != cfg.layout.n_h)
        throw ConfigError("schedule size does not match the horizontal element count");
    const ChannelRealization nominal = nominal_realization(cfg);
    // E|beta|^2 = 1, so the second moments are the squared deterministic gains.
    const double e_gamma = std::norm(nominal.alpha_ci) * cfg.eta_r * nominal.g_r_gain * nominal.g_r_gain;
    const double e_alpha_d = nominal.g_d_gain * nominal.g_d_gain;
    const double tr = reflected_trace(reflection_covariance(schedule), cfg.angles.theta_it_h, cfg);
    return cfg.tx_power * (e_gamma * tr + cfg.layout.m * e_alpha_d);
}

namespace
{
double worst_case_trace(const CMat &r_phi, const ScenarioConfig &cfg, const RVec &grid)
{
    double worst = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < grid.size(); ++i)
        worst = std::min(worst, reflected_trace(r_phi, grid(i), cfg));
    return worst;
}
} // namespace

OptimalityReport verify_maxmin_optimality(const ReflectionSchedule &candidate, const ScenarioConfig &cfg,
                                      const RVec &theta_grid, int samples, std::uint64_t seed)
{
    if (candidate.elements() != cfg.layout.n_h)
        throw ConfigError("schedule size does not match the horizontal element count");
    OptimalityReport rep;

    // The schedule constructor already rejects non-unit entries; re-check on the raw matrix.
    rep.unit_modulus = ((candidate.matrix().array().abs() - 1.0).abs() < 1e-12).all();
    const CMat raw = candidate.matrix() * candidate.matrix().adjoint() / static_cast<double>(candidate.snapshots());
    rep.unit_diagonal = ((raw.diagonal().array() - 1.0).abs() < 1e-12).all();

    rep.trace_b = power_weight_matrix(theta_grid(0), cfg).trace().real();
    rep.worst_case = worst_case_trace(reflection_covariance(candidate), cfg, theta_grid);

    Rng rng(seed);
    rep.best_sampled_worst_case = -std::numeric_limits<double>::infinity();
    const double tol = 1e-9 * std::max(1.0, rep.trace_b);
    for (int s = 0; s < samples; ++s)
    {
        const auto sample = ReflectionSchedule::random_phase(candidate.elements(), candidate.snapshots(), rng);
        const double wc = worst_case_trace(reflection_covariance(sample), cfg, theta_grid);
        rep.best_sampled_worst_case = std::max(rep.best_sampled_worst_case, wc);
        if (wc > rep.worst_case + tol)
            rep.violating_samples.push_back(s);
    }
    return rep;
}

void write_schedule_csv(const ReflectionSchedule &schedule, const std::filesystem::path &path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error(fmt::format("cannot open '{}' for writing", path.string()));
    const RMat ph = schedule.phases();
    for (Eigen::Index n = 0; n < ph.rows(); ++n)
    {
        for (Eigen::Index t = 0; t < ph.cols(); ++t)
            out << (t ? "," : "") << fmt::format("{}", ph(n, t));
        out << '\n';
    }
    if (!out)
        throw std::runtime_error(fmt::format("write to '{}' failed", path.string()));
}

} // namespace irssense
