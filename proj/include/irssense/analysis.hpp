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
#include <optional>
#include <vector>

#include "irssense/channel.hpp"
#include "irssense/reflection.hpp"

namespace irssense
{

// ---- average echo powers -------------------------------------------------

struct LinkPowers
{
    double p_r = 0.0; // IRS-reflected echo link
    double p_d = 0.0; // direct echo link
};

// Closed-form average powers at the sensors under an orthogonal reflection
// schedule, scaled by the transmit power:
//   P_r = N M eta_r lambda^4 kappa / (1024 pi^5 d_IT^4 d_CI^2)
//   P_d = M lambda^2 kappa / (64 pi^3 d_CT^2 d_IT^2)
LinkPowers echo_link_powers(const ScenarioConfig &cfg);

// Real-valued element count at which P_r equals P_d:
//   N_th = 16 pi^2 d_IT^2 d_CI^2 / (eta_r lambda^2 d_CT^2)
double element_threshold(const ScenarioConfig &cfg);

struct PowerBreakdown
{
    double p_r = 0.0;
    double p_d = 0.0;
    double p_c = 0.0;
    double n_th = 0.0;
    double d_ut = 0.0;
};

// Distance between a helping user at range d_ui (azimuth cfg.user_theta) and
// the target: sqrt(d_ui^2 + d_IT^2 - 2 d_ui d_IT cos(theta - theta_user)).
double user_target_distance(double d_ui, const ScenarioConfig &cfg);

// Powers when a user at distance d_ui sends the probing signal instead of the
// controller. Requires 0 < d_ui < d_IT.
PowerBreakdown user_aided_power(double d_ui, const ScenarioConfig &cfg);

// dP_c/dd_ui. For a user collinear with the target this is
//   (-2 N M eta lambda^4 kappa (d_IT-d)^3 + 32 M lambda^2 kappa pi^2 d_IT^2 d^3)
//   / (1024 pi^5 d_IT^4 d^3 (d_IT-d)^3).
double combined_power_derivative(double d_ui, const ScenarioConfig &cfg);

// Root of dP_c/dd_ui in (0, d_IT) by bracketing.
double combined_power_minimizer(const ScenarioConfig &cfg);

// Collinear case only: d* = d_IT r / (1 + r), r = (N eta lambda^2 / (16 pi^2 d_IT^2))^(1/3).
double combined_power_minimizer_closed_form(const ScenarioConfig &cfg);

// ---- Cramer-Rao bound ----------------------------------------------------

struct CrbOptions
{
    // Zero-based position of the nonzero entry of the auxiliary vector c;
    // defaults to ceil(N/2) - 1 (the ceil(N/2)-th element).
    std::optional<int> c_index;
    // Overrides xi = max(alpha_r, alpha_d) evaluated with unit fading.
    std::optional<Complex> xi;
};

// Quantities shared by every CRB route at one scenario.
struct CrbInputs
{
    double theta = 0.0;
    double w1 = 0.0;          // pi^2 d_s^2 / lambda^2
    double w2 = 0.0;          // pi^2 d_I^2 / lambda^2
    Complex xi;               // max(alpha_r, alpha_d)
    Complex kappa0;           // alpha_CI * eta amplitude
    double sigma2 = 0.0;      // effective noise variance 2 sigma_0^2 / tx_power
    double sigma_fun = 0.0;   // cos(theta) sin(theta_IT,v) + sin(theta_CI,h) sin(theta_CI,v)
    double sigma_bar_fun = 0.0; // sin(theta) sin(theta_IT,v) + sin(theta_CI,h) sin(theta_CI,v)
    CVec c;                   // auxiliary vector
    int c_index = 0;
};

CrbInputs crb_inputs(const ScenarioConfig &cfg, const ReflectionSchedule &schedule, const CrbOptions &opts = {});

// p(theta) = Re{ 2/(T conj(alpha_CI eta)) sum_t sum_n phi[t]_n exp(j(N+1-2n) pi d_I/lambda sigma_bar) }
double crb_correction_term(const CrbInputs &in, const ScenarioConfig &cfg, const ReflectionSchedule &schedule);

struct ClosedFormCrb
{
    double crb = 0.0;         // rad^2; +inf when xi = 0
    double p_theta = 0.0;
    double reflected_term = 0.0; // w2 (N^3-N)/6 sigma^2 M
    double element_term = 0.0;   // w1 (M^3-M)/6 cos^2 N
    double direct_term = 0.0;    // w1 (M^3-M)/6 cos^2 / |alpha_CI eta|^2
    double cross_term = 0.0;     // w1 (M^3-M)/6 cos^2 p(theta)
};

ClosedFormCrb crb_closed_form(const ScenarioConfig &cfg, const ReflectionSchedule &schedule,
                              const CrbOptions &opts = {});

struct FimResult
{
    Eigen::Matrix3d fim; // over [theta, Re xi, Im xi]
    double crb = 0.0;    // [F_tt - F_tx F_xx^-1 F_tx^T]^-1
};

// R_c = (1/T) sum_t (phi[t] + c)(phi[t] + c)^H
CMat auxiliary_covariance(const ReflectionSchedule &schedule, const CVec &c);

// FIM blocks of the sufficient-statistic model through their closed
// expressions, then the Schur complement.
FimResult crb_fim_pipeline(const ScenarioConfig &cfg, const ReflectionSchedule &schedule,
                                const CrbOptions &opts = {});

enum class DerivativeMode
{
    analytic,
    finite_difference
};

// Brute-force FIM of y[t] ~ CN(xi alpha_CI eta b(theta) q^T(theta)(phi[t] + c), sigma^2 I),
// F_ij = (2/sigma^2) sum_t Re{dmu_t/dw_i^H dmu_t/dw_j}.
FimResult crb_fd_oracle(const ScenarioConfig &cfg, const ReflectionSchedule &schedule, const CrbOptions &opts = {},
                        DerivativeMode mode = DerivativeMode::finite_difference, double step = 1e-6);

struct CrbReport
{
    double crb_closed = 0.0;
    double crb_pipeline = 0.0;
    double crb_fd = 0.0;
    double w1 = 0.0;
    double w2 = 0.0;
    Complex xi;
    double sigma_fun = 0.0;
    double sigma_bar_fun = 0.0;
    double p_theta = 0.0;
    Eigen::Matrix3d fim;
};

CrbReport crb_report(const ScenarioConfig &cfg, const ReflectionSchedule &schedule, const CrbOptions &opts = {});

enum class RatioClass
{
    constant_factor,
    structural
};

struct ConsistencyReport
{
    std::vector<double> theta;
    std::vector<double> crb_closed;
    std::vector<double> crb_pipeline;
    std::vector<double> crb_fd;
    std::vector<double> ratio; // closed / pipeline
    double mean_ratio = 0.0;
    double max_deviation = 0.0; // max |ratio - mean| / mean
    RatioClass classification = RatioClass::constant_factor;
};

// Relative spread above which the two CRB routes are called structurally different.
inline constexpr double kStructuralThreshold = 0.05;

ConsistencyReport crb_consistency_report(const ScenarioConfig &cfg, const ReflectionSchedule &schedule,
                                         const RVec &theta_grid, const CrbOptions &opts = {},
                                         bool with_fd_oracle = false);

// E_beta[|xi_nominal|^2 / |xi(beta)|^2] with xi(beta) = max(|beta_r| G_r, |beta_d| G_d).
// Every CRB route scales as 1/|xi|^2, so this converts a nominal CRB into a
// fading-averaged one.
double fading_average_factor(const ScenarioConfig &cfg, int draws, std::uint64_t seed);

} // namespace irssense
