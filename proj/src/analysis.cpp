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

#include "irssense/analysis.hpp"

#include <array>
#include <cmath>
#include <limits>

#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

namespace irssense
{

LinkPowers echo_link_powers(const ScenarioConfig &cfg)
{
    cfg.validate();
    const auto &L = cfg.layout;
    const double lam = L.wavelength;
    const double d_ct = cfg.controller_target_distance();
    LinkPowers p;
    p.p_r = cfg.tx_power * L.n_h * L.m * cfg.eta_r * std::pow(lam, 4) * cfg.kappa /
            (1024.0 * std::pow(kPi, 5) * std::pow(cfg.d_it, 4) * cfg.d_ci * cfg.d_ci);
    p.p_d = cfg.tx_power * L.m * lam * lam * cfg.kappa /
            (64.0 * std::pow(kPi, 3) * d_ct * d_ct * cfg.d_it * cfg.d_it);
    return p;
}

double element_threshold(const ScenarioConfig &cfg)
{
    cfg.validate();
    const double lam = cfg.layout.wavelength;
    const double d_ct = cfg.controller_target_distance();
    return 16.0 * kPi * kPi * cfg.d_it * cfg.d_it * cfg.d_ci * cfg.d_ci / (cfg.eta_r * lam * lam * d_ct * d_ct);
}

namespace
{
void require_user_range(double d_ui, const ScenarioConfig &cfg)
{
    if (!(d_ui > 0.0 && d_ui < cfg.d_it))
        throw ConfigError(fmt::format("user distance {} outside (0, d_IT={})", d_ui, cfg.d_it));
}

double relative_user_angle(const ScenarioConfig &cfg) { return cfg.angles.theta_it_h - cfg.user_theta; }
} // namespace

double user_target_distance(double d_ui, const ScenarioConfig &cfg)
{
    const double c = std::cos(relative_user_angle(cfg));
    return std::sqrt(std::max(0.0, d_ui * d_ui + cfg.d_it * cfg.d_it - 2.0 * d_ui * cfg.d_it * c));
}

PowerBreakdown user_aided_power(double d_ui, const ScenarioConfig &cfg)
{
    cfg.validate();
    require_user_range(d_ui, cfg);
    ScenarioConfig user = cfg;
    user.d_ci = d_ui;
    user.d_ct = user_target_distance(d_ui, cfg);
    if (!(*user.d_ct > 0.0))
        throw ConfigError("helping user coincides with the target");

    const LinkPowers lp = echo_link_powers(user);
    PowerBreakdown out;
    out.p_r = lp.p_r;
    out.p_d = lp.p_d;
    out.p_c = lp.p_r + lp.p_d;
    out.n_th = element_threshold(user);
    out.d_ut = *user.d_ct;
    return out;
}

double combined_power_derivative(double d_ui, const ScenarioConfig &cfg)
{
    cfg.validate();
    require_user_range(d_ui, cfg);
    const auto &L = cfg.layout;
    const double lam = L.wavelength;
    const double n = L.n_h;
    const double m = L.m;
    const double d = d_ui;
    const double dit = cfg.d_it;
    const double delta = relative_user_angle(cfg);

    if (std::abs(delta) < 1e-15)
    {
        const double e = dit - d;
        const double num = -2.0 * n * m * cfg.eta_r * std::pow(lam, 4) * cfg.kappa * e * e * e +
                           32.0 * m * lam * lam * cfg.kappa * kPi * kPi * dit * dit * d * d * d;
        const double den = 1024.0 * std::pow(kPi, 5) * std::pow(dit, 4) * d * d * d * e * e * e;
        return cfg.tx_power * num / den;
    }

    // General azimuth: dP_r/dd = -2 P_r / d, dP_d/dd = -P_d (2d - 2 d_IT cos) / d_UT^2.
    const PowerBreakdown p = user_aided_power(d, cfg);
    const double dut2 = p.d_ut * p.d_ut;
    return -2.0 * p.p_r / d - p.p_d * (2.0 * d - 2.0 * dit * std::cos(delta)) / dut2;
}

double combined_power_minimizer(const ScenarioConfig &cfg)
{
    cfg.validate();
    const double lo = cfg.d_it * 1e-9;
    const double hi = cfg.d_it * (1.0 - 1e-9);
    auto f = [&](double d) { return combined_power_derivative(d, cfg); };
    const double flo = f(lo);
    const double fhi = f(hi);
    if (!(flo < 0.0 && fhi > 0.0))
        throw ComputationError("combined power derivative does not change sign on (0, d_IT)");
    boost::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(50),
                                                     iters);
    return 0.5 * (r.first + r.second);
}

double combined_power_minimizer_closed_form(const ScenarioConfig &cfg)
{
    cfg.validate();
    if (std::abs(relative_user_angle(cfg)) > 1e-12)
        throw ConfigError("closed-form minimizer assumes the user is collinear with the target");
    const double lam = cfg.layout.wavelength;
    const double r =
        std::cbrt(cfg.layout.n_h * cfg.eta_r * lam * lam / (16.0 * kPi * kPi * cfg.d_it * cfg.d_it));
    return cfg.d_it * r / (1.0 + r);
}

// ---- CRB ------------------------------------------------------------------

CrbInputs crb_inputs(const ScenarioConfig &cfg, const ReflectionSchedule &schedule, const CrbOptions &opts)
{
    cfg.validate();
    const auto &L = cfg.layout;
    const auto &A = cfg.angles;
    if (schedule.elements() != L.n_h)
        throw ConfigError(
            fmt::format("schedule has {} elements, layout has {} horizontal elements", schedule.elements(), L.n_h));

    const ChannelRealization nominal = nominal_realization(cfg);
    CrbInputs in;
    in.theta = A.theta_it_h;
    in.w1 = kPi * kPi * L.d_s * L.d_s / (L.wavelength * L.wavelength);
    in.w2 = kPi * kPi * L.d_i * L.d_i / (L.wavelength * L.wavelength);
    if (opts.xi)
        in.xi = *opts.xi;
    else
        in.xi = std::abs(nominal.alpha_r) >= std::abs(nominal.alpha_d) ? nominal.alpha_r : nominal.alpha_d;
    in.kappa0 = nominal.alpha_ci * nominal.eta_amplitude;
    in.sigma2 = 2.0 * cfg.noise_power / cfg.tx_power;
    const double offset = std::sin(A.theta_ci_h) * std::sin(A.theta_ci_v);
    in.sigma_fun = std::cos(in.theta) * std::sin(A.theta_it_v) + offset;
    in.sigma_bar_fun = std::sin(in.theta) * std::sin(A.theta_it_v) + offset;

    in.c_index = opts.c_index.value_or((L.n_h + 1) / 2 - 1);
    if (in.c_index < 0 || in.c_index >= L.n_h)
        throw ConfigError(fmt::format("c index {} outside [0, {})", in.c_index, L.n_h));
    if (std::abs(in.kappa0) == 0.0)
        throw ComputationError("controller-element gain is zero");
    in.c = CVec::Zero(L.n_h);
    in.c(in.c_index) = 1.0 / in.kappa0;
    return in;
}

double crb_correction_term(const CrbInputs &in, const ScenarioConfig &cfg, const ReflectionSchedule &schedule)
{
    const auto &L = cfg.layout;
    const int n = L.n_h;
    const double rate = kPi * L.d_i / L.wavelength * in.sigma_bar_fun;
    Complex acc = 0.0;
    for (int t = 0; t < schedule.snapshots(); ++t)
        for (int k = 1; k <= n; ++k)
            acc += schedule.matrix()(k - 1, t) * std::polar(1.0, (n + 1.0 - 2.0 * k) * rate);
    const Complex scale = 2.0 / (static_cast<double>(schedule.snapshots()) * std::conj(in.kappa0));
    return (scale * acc).real();
}

ClosedFormCrb crb_closed_form(const ScenarioConfig &cfg, const ReflectionSchedule &schedule, const CrbOptions &opts)
{
    const CrbInputs in = crb_inputs(cfg, schedule, opts);
    const double n = cfg.layout.n_h;
    const double m = cfg.layout.m;
    const double t = schedule.snapshots();
    const double cos2 = std::cos(in.theta) * std::cos(in.theta);
    const double sensor_sum = (m * m * m - m) / 6.0;
    const double element_sum = (n * n * n - n) / 6.0;

    ClosedFormCrb out;
    out.p_theta = crb_correction_term(in, cfg, schedule);
    out.reflected_term = in.w2 * element_sum * in.sigma_fun * in.sigma_fun * m;
    out.element_term = in.w1 * sensor_sum * cos2 * n;
    out.direct_term = in.w1 * sensor_sum * cos2 / std::norm(in.kappa0);
    out.cross_term = in.w1 * sensor_sum * cos2 * out.p_theta;

    const double snr = t * std::norm(in.xi * in.kappa0) / in.sigma2;
    const double info = snr * (out.reflected_term + out.element_term + out.direct_term + out.cross_term);
    out.crb = info > 0.0 ? 0.5 / info : std::numeric_limits<double>::infinity();
    return out;
}

CMat auxiliary_covariance(const ReflectionSchedule &schedule, const CVec &c)
{
    if (c.size() != schedule.elements())
        throw ConfigError("auxiliary vector length does not match the schedule");
    const CMat chi = schedule.matrix().colwise() + c;
    return chi * chi.adjoint() / static_cast<double>(schedule.snapshots());
}

namespace
{
double schur_crb(const Eigen::Matrix3d &f)
{
    const Eigen::Matrix2d fxx = f.bottomRightCorner<2, 2>();
    const Eigen::RowVector2d ftx = f.block<1, 2>(0, 1);
    Eigen::FullPivLU<Eigen::Matrix2d> lu(fxx);
    if (!lu.isInvertible())
        throw ComputationError("nuisance block of the Fisher information is singular");
    const double eff = f(0, 0) - (ftx * lu.solve(ftx.transpose())).value();
    if (!(eff > 0.0))
        throw ComputationError("effective Fisher information for theta is not positive");
    return 1.0 / eff;
}
} // namespace

FimResult crb_fim_pipeline(const ScenarioConfig &cfg, const ReflectionSchedule &schedule, const CrbOptions &opts)
{
    const CrbInputs in = crb_inputs(cfg, schedule, opts);
    const auto &L = cfg.layout;
    const double t = schedule.snapshots();
    const double m = L.m;

    const CVec b = sensor_response(in.theta, L);
    const CVec q = combined_manifold(in.theta, cfg.angles, L);
    const ManifoldDerivatives der = manifold_derivatives(in.theta, cfg.angles, L);
    const CMat rc = auxiliary_covariance(schedule, in.c);

    // A = b q^T and its theta-derivative; the cross block keeps the trace form.
    const CMat a = b * q.transpose();
    const CMat a_dot = der.b_dot * q.transpose() + b * der.q_dot.transpose();

    const double gain = std::norm(in.kappa0);
    const double q_form = (q.transpose() * rc * q.conjugate()).value().real();
    const double qdot_form = (der.q_dot.transpose() * rc * der.q_dot.conjugate()).value().real();
    const Complex cross = (a * rc * a_dot.adjoint()).trace();

    const double f_tt = 2.0 * t * std::norm(in.xi) * gain / in.sigma2 * (q_form * der.b_dot.squaredNorm() + m * qdot_form);
    const Complex w = std::conj(in.xi) * gain * cross;
    const double f_tr = 2.0 * t / in.sigma2 * w.real();
    const double f_ti = 2.0 * t / in.sigma2 * (kJ * w).real();
    const double f_xx = 2.0 * t / in.sigma2 * m * gain * q_form;

    FimResult out;
    out.fim << f_tt, f_tr, f_ti, f_tr, f_xx, 0.0, f_ti, 0.0, f_xx;
    out.crb = schur_crb(out.fim);
    return out;
}

FimResult crb_fd_oracle(const ScenarioConfig &cfg, const ReflectionSchedule &schedule, const CrbOptions &opts,
                        DerivativeMode mode, double step)
{
    const CrbInputs in = crb_inputs(cfg, schedule, opts);
    const auto &L = cfg.layout;
    const CMat chi = schedule.matrix().colwise() + in.c;

    // Noiseless mean of all snapshots stacked column-wise, M x T.
    auto mean = [&](const Eigen::Vector3d &w) -> CMat {
        const Complex xi(w(1), w(2));
        const CVec b = sensor_response(w(0), L);
        const CVec q = combined_manifold(w(0), cfg.angles, L);
        const Eigen::RowVectorXcd proj = q.transpose() * chi;
        return (xi * in.kappa0) * b * proj;
    };

    const Eigen::Vector3d w0(in.theta, in.xi.real(), in.xi.imag());
    std::array<CMat, 3> d;
    if (mode == DerivativeMode::finite_difference)
    {
        for (int i = 0; i < 3; ++i)
        {
            Eigen::Vector3d hi = w0;
            Eigen::Vector3d lo = w0;
            hi(i) += step;
            lo(i) -= step;
            d[i] = (mean(hi) - mean(lo)) / (2.0 * step);
        }
    }
    else
    {
        const CVec b = sensor_response(in.theta, L);
        const CVec q = combined_manifold(in.theta, cfg.angles, L);
        const ManifoldDerivatives der = manifold_derivatives(in.theta, cfg.angles, L);
        const CMat base = in.kappa0 * b * (q.transpose() * chi);
        d[0] = in.xi * in.kappa0 * (der.b_dot * (q.transpose() * chi) + b * (der.q_dot.transpose() * chi));
        d[1] = base;
        d[2] = kJ * base;
    }

    FimResult out;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            out.fim(i, j) = 2.0 / in.sigma2 * (d[i].conjugate().cwiseProduct(d[j])).sum().real();
    out.crb = schur_crb(out.fim);
    return out;
}

CrbReport crb_report(const ScenarioConfig &cfg, const ReflectionSchedule &schedule, const CrbOptions &opts)
{
    const CrbInputs in = crb_inputs(cfg, schedule, opts);
    const ClosedFormCrb closed = crb_closed_form(cfg, schedule, opts);
    const FimResult pipe = crb_fim_pipeline(cfg, schedule, opts);
    const FimResult fd = crb_fd_oracle(cfg, schedule, opts);

    CrbReport r;
    r.crb_closed = closed.crb;
    r.crb_pipeline = pipe.crb;
    r.crb_fd = fd.crb;
    r.w1 = in.w1;
    r.w2 = in.w2;
    r.xi = in.xi;
    r.sigma_fun = in.sigma_fun;
    r.sigma_bar_fun = in.sigma_bar_fun;
    r.p_theta = closed.p_theta;
    r.fim = pipe.fim;
    return r;
}

ConsistencyReport crb_consistency_report(const ScenarioConfig &cfg, const ReflectionSchedule &schedule,
                                         const RVec &theta_grid, const CrbOptions &opts, bool with_fd_oracle)
{
    if (theta_grid.size() == 0)
        throw ConfigError("consistency report needs at least one angle");
    ConsistencyReport rep;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (Eigen::Index i = 0; i < theta_grid.size(); ++i)
    {
        ScenarioConfig at = cfg;
        at.angles.theta_it_h = theta_grid(i);
        const double closed = crb_closed_form(at, schedule, opts).crb;
        const double pipe = crb_fim_pipeline(at, schedule, opts).crb;
        rep.theta.push_back(theta_grid(i));
        rep.crb_closed.push_back(closed);
        rep.crb_pipeline.push_back(pipe);
        rep.crb_fd.push_back(with_fd_oracle ? crb_fd_oracle(at, schedule, opts).crb : nan);
        rep.ratio.push_back(closed / pipe);
    }
    double sum = 0.0;
    for (double r : rep.ratio)
        sum += r;
    rep.mean_ratio = sum / static_cast<double>(rep.ratio.size());
    rep.max_deviation = 0.0;
    for (double r : rep.ratio)
        rep.max_deviation = std::max(rep.max_deviation, std::abs(r - rep.mean_ratio) / std::abs(rep.mean_ratio));
    rep.classification =
        rep.max_deviation <= kStructuralThreshold ? RatioClass::constant_factor : RatioClass::structural;
    return rep;
}

double fading_average_factor(const ScenarioConfig &cfg, int draws, std::uint64_t seed)
{
    if (draws < 1)
        throw ConfigError("fading average needs at least one draw");
    const ChannelRealization nominal = nominal_realization(cfg);
    const double xi_nom = std::max(nominal.g_r_gain, nominal.g_d_gain);
    Rng rng(seed);
    double acc = 0.0;
    for (int i = 0; i < draws; ++i)
    {
        const double br = std::abs(complex_normal(rng));
        const double bd = std::abs(complex_normal(rng));
        const double xi = std::max(br * nominal.g_r_gain, bd * nominal.g_d_gain);
        acc += xi_nom * xi_nom / (xi * xi);
    }
    return acc / draws;
}

} // namespace irssense
