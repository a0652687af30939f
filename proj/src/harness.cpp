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

#include "irssense/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <fmt/format.h>

namespace irssense
{

namespace
{
struct SchemeInfo
{
    SchemeId id;
    std::string_view name;
    std::uint64_t code;
};

constexpr SchemeInfo kSchemeTable[] = {
    {SchemeId::proposed, "PROPOSED", 1},
    {SchemeId::btb, "BTB", 2},
    {SchemeId::bits, "BITS", 3},
    {SchemeId::bts, "BTS", 4},
    {SchemeId::bitib, "BITIB", 5},
    {SchemeId::mus, "MUS", 6},
    {SchemeId::proposed_random_phase, "PROPOSED_RANDOM_PHASE", 7},
};

const SchemeInfo &info(SchemeId id)
{
    for (const auto &s : kSchemeTable)
        if (s.id == id)
            return s;
    throw ConfigError("unknown scheme id");
}

// Azimuth of a horizontal-plane vector, measured from the +y normal toward +x.
double azimuth(const Eigen::Vector2d &v) { return std::atan2(v.x(), v.y()); }

double wrap_angle(double a) { return std::remainder(a, 2.0 * kPi); }

void require_angle(double a, const char *name)
{
    if (!(std::abs(a) < kPi / 2.0))
        throw ConfigError(fmt::format("{} must lie strictly inside (-90, 90) deg (got {} deg)", name, rad_to_deg(a)));
}

// Response of a BS transmit DFT beam toward azimuth psi; beam index cycles with t.
Complex scan_gain(int n_tx, double spacing, double psi, int t)
{
    const CVec a = steering_vector(2.0 * spacing * std::sin(psi), n_tx);
    const int k = t % n_tx;
    Complex acc = 0.0;
    for (int n = 0; n < n_tx; ++n)
        acc += a(n) * std::polar(1.0, -2.0 * kPi * static_cast<double>((static_cast<long>(k) * n) % n_tx) / n_tx);
    return acc / std::sqrt(static_cast<double>(n_tx));
}

double mean_column_power(const CMat &y)
{
    return y.cols() == 0 ? 0.0 : y.colwise().squaredNorm().sum() / static_cast<double>(y.cols());
}

void add_noise(CMat &y, Rng &rng, double var)
{
    for (Eigen::Index t = 0; t < y.cols(); ++t)
        y.col(t) += complex_normal_vector(rng, y.rows(), var);
}

ScenarioConfig user_scenario(const ScenarioConfig &cfg, double d_ui)
{
    ScenarioConfig u = cfg;
    u.d_ci = d_ui;
    u.angles.theta_ci_h = cfg.user_theta;
    u.angles.theta_ci_v = kPi / 2.0;
    // Far-field floor so a user sitting on the target stays finite.
    u.d_ct = std::max(user_target_distance(d_ui, cfg), cfg.layout.wavelength);
    return u;
}

bool same(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

int integral_value(double v, const char *name)
{
    if (!(std::abs(v - std::round(v)) < 1e-9) || std::abs(v) > 1e6)
        throw ConfigError(fmt::format("{} sweep value {} is not an integer", name, v));
    return static_cast<int>(std::lround(v));
}
} // namespace

std::string_view scheme_name(SchemeId id) { return info(id).name; }

SchemeId parse_scheme(std::string_view name)
{
    for (const auto &s : kSchemeTable)
        if (s.name == name)
            return s.id;
    throw ConfigError(fmt::format("unknown scheme '{}'", name));
}

std::uint64_t scheme_code(SchemeId id) { return info(id).code; }

bool uses_base_station(SchemeId id)
{
    return id == SchemeId::btb || id == SchemeId::bits || id == SchemeId::bts || id == SchemeId::bitib;
}

void BsGeometry::validate() const
{
    if (!(d_bi > 0.0))
        throw ConfigError("bs.d_bi_m must be strictly positive");
    require_angle(theta_i, "bs.theta_i_deg");
    require_angle(theta_b, "bs.theta_b_deg");
    if (tx_antennas < 1)
        throw ConfigError("bs.tx_antennas must be >= 1");
    if (rx_antennas < 2)
        throw ConfigError("bs.rx_antennas must be >= 2");
    if (!(spacing_over_wavelength > 0.0))
        throw ConfigError("BS antenna spacing must be strictly positive");
    if (!(bitib_grid_step_deg > 0.0))
        throw ConfigError("bs.bitib_grid_step_deg must be strictly positive");
}

BsView bs_view(const ScenarioConfig &cfg, const BsGeometry &bs)
{
    bs.validate();
    const double th = cfg.angles.theta_it_h;
    const Eigen::Vector2d bs_pos = bs.d_bi * Eigen::Vector2d(std::sin(bs.theta_i), std::cos(bs.theta_i));
    const Eigen::Vector2d target = cfg.d_it * Eigen::Vector2d(std::sin(th), std::cos(th));
    // Orient the BS normal so the IRS is seen at theta_b.
    const double normal = azimuth(-bs_pos) - bs.theta_b;
    const Eigen::Vector2d to_target = target - bs_pos;

    BsView v;
    v.d_bt = to_target.norm();
    v.target_angle = wrap_angle(azimuth(to_target) - normal);
    if (!(v.d_bt > 0.0))
        throw ConfigError("target coincides with the BS");
    if (!(std::abs(v.target_angle) < kPi / 2.0))
        throw ConfigError(
            fmt::format("target lies behind the BS array (azimuth {} deg in the BS frame)", rad_to_deg(v.target_angle)));
    return v;
}

void MusGeometry::validate() const
{
    if (!(d_ui_min > 0.0 && d_ui_max >= d_ui_min))
        throw ConfigError("mus.d_ui_min_m and mus.d_ui_max_m must satisfy 0 < min <= max");
    if (d_ui_fixed && !(*d_ui_fixed > 0.0))
        throw ConfigError("helping-user distance must be strictly positive");
}

void EstimatorSettings::validate() const
{
    if (!(grid_step_deg > 0.0))
        throw ConfigError("estimation.grid_step_deg must be strictly positive");
    if (!(grid_min_deg >= -90.0 && grid_max_deg <= 90.0 && grid_min_deg < grid_max_deg))
        throw ConfigError("estimation grid must satisfy -90 <= grid_min_deg < grid_max_deg <= 90");
}

// ---- scheme channels ---------------------------------------------------------

SchemeChannel::SchemeChannel(SchemeId id, const SchemeContext &ctx) : id_(id), ctx_(ctx)
{
    ctx_.cfg.validate();
    ctx_.estimator.validate();
    const auto &L = ctx_.cfg.layout;
    const RVec grid = ctx_.estimator.grid();

    if (uses_base_station(id_))
    {
        if (!ctx_.bs)
            throw ConfigError(fmt::format("scheme {} requires the [bs] section", scheme_name(id_)));
        view_ = bs_view(ctx_.cfg, *ctx_.bs);
    }
    if (id_ == SchemeId::mus)
    {
        if (!ctx_.mus)
            throw ConfigError("scheme MUS requires the [mus] section");
        ctx_.mus->validate();
    }
    if (id_ == SchemeId::proposed || id_ == SchemeId::proposed_random_phase || id_ == SchemeId::mus ||
        id_ == SchemeId::bits)
    {
        if (ctx_.cfg.snapshots < L.n_h)
            throw ConfigError(fmt::format("snapshots ({}) must be >= horizontal elements ({}) for the DFT schedule",
                                          ctx_.cfg.snapshots, L.n_h));
    }
    if (id_ == SchemeId::proposed)
        dft_schedule_ = expand_schedule(ReflectionSchedule::dft(L.n_h, ctx_.cfg.snapshots).matrix(), ctx_.cfg);

    switch (id_)
    {
    case SchemeId::btb:
        table_ = ManifoldTable::build({ctx_.bs->rx_antennas, ctx_.bs->spacing_over_wavelength}, grid);
        break;
    case SchemeId::bitib:
        codebook_ = angle_grid_deg(ctx_.estimator.grid_min_deg, ctx_.estimator.grid_max_deg,
                                   ctx_.bs->bitib_grid_step_deg);
        break;
    default:
        if (L.m < 2)
            throw ConfigError("MUSIC needs at least two sensors");
        table_ = ManifoldTable::build(UlaManifold::sensors(L), grid);
        break;
    }
}

SchemeSnapshots SchemeChannel::synthesize(Rng &rng, NoiseMode noise) const
{
    switch (id_)
    {
    case SchemeId::proposed:
        return synth_proposed(rng, noise, false);
    case SchemeId::proposed_random_phase:
        return synth_proposed(rng, noise, true);
    case SchemeId::mus:
        return synth_mus(rng, noise);
    case SchemeId::btb:
        return synth_btb(rng, noise);
    case SchemeId::bts:
        return synth_bts(rng, noise);
    case SchemeId::bits:
        return synth_bits(rng, noise);
    case SchemeId::bitib:
        return synth_bitib(rng, noise);
    }
    throw ConfigError("unknown scheme id");
}

DoaEstimate SchemeChannel::estimate(const SchemeSnapshots &snap) const
{
    if (id_ == SchemeId::bitib)
        return beam_energy_argmax(snap.y, codebook_);
    return music_spectrum(decompose(sample_covariance(snap.y)), table_, MusicOptions{ctx_.estimator.refine_peak});
}

namespace
{
SchemeSnapshots self_sensing(const ScenarioConfig &cfg, const CMat &schedule, Rng &rng, NoiseMode noise)
{
    const ChannelRealization real = draw_realization(cfg, rng);
    SchemeSnapshots out;
    out.y = simulate_snapshots(cfg, real, schedule, rng, noise).y;
    const double x2 = cfg.tx_power;
    double acc = 0.0;
    for (Eigen::Index t = 0; t < schedule.cols(); ++t)
        acc += (reflected_echo(real, schedule.col(t)) + direct_echo(real)).squaredNorm() * x2;
    out.signal_power = acc / static_cast<double>(schedule.cols());
    out.truth = cfg.angles.theta_it_h;
    return out;
}
} // namespace

SchemeSnapshots SchemeChannel::synth_proposed(Rng &rng, NoiseMode noise, bool random_phase) const
{
    const auto &cfg = ctx_.cfg;
    if (!random_phase)
        return self_sensing(cfg, dft_schedule_, rng, noise);
    const auto sched = ReflectionSchedule::random_phase(cfg.layout.n_h, cfg.snapshots, rng);
    return self_sensing(cfg, expand_schedule(sched.matrix(), cfg), rng, noise);
}

SchemeSnapshots SchemeChannel::synth_mus(Rng &rng, NoiseMode noise) const
{
    const auto &mus = *ctx_.mus;
    double d_ui = 0.0;
    if (mus.d_ui_fixed)
        d_ui = *mus.d_ui_fixed;
    else
        d_ui = std::uniform_real_distribution<double>(mus.d_ui_min, mus.d_ui_max)(rng);
    const ScenarioConfig user = user_scenario(ctx_.cfg, d_ui);
    const CMat sched = expand_schedule(ReflectionSchedule::dft(user.layout.n_h, user.snapshots).matrix(), user);
    return self_sensing(user, sched, rng, noise);
}

SchemeSnapshots SchemeChannel::synth_btb(Rng &rng, NoiseMode noise) const
{
    const auto &cfg = ctx_.cfg;
    const auto &bs = *ctx_.bs;
    const Complex beta = complex_normal(rng);
    const double g = direct_attenuation(cfg.layout.wavelength, cfg.kappa, view_->d_bt, view_->d_bt);
    const CVec rx = steering_vector(2.0 * bs.spacing_over_wavelength * std::sin(view_->target_angle), bs.rx_antennas);

    SchemeSnapshots out;
    out.y.resize(bs.rx_antennas, cfg.snapshots);
    const Complex amp = std::sqrt(cfg.tx_power) * beta * g;
    for (int t = 0; t < cfg.snapshots; ++t)
        out.y.col(t) = amp * scan_gain(bs.tx_antennas, bs.spacing_over_wavelength, view_->target_angle, t) * rx;
    out.signal_power = mean_column_power(out.y);
    if (noise == NoiseMode::on)
        add_noise(out.y, rng, cfg.noise_power);
    out.truth = view_->target_angle;
    return out;
}

SchemeSnapshots SchemeChannel::synth_bts(Rng &rng, NoiseMode noise) const
{
    const auto &cfg = ctx_.cfg;
    const auto &bs = *ctx_.bs;
    const Complex beta = complex_normal(rng);
    const double g = direct_attenuation(cfg.layout.wavelength, cfg.kappa, view_->d_bt, cfg.d_it);
    const CVec rx = sensor_response(cfg.angles.theta_it_h, cfg.layout);

    SchemeSnapshots out;
    out.y.resize(cfg.layout.m, cfg.snapshots);
    const Complex amp = std::sqrt(cfg.tx_power) * beta * g;
    for (int t = 0; t < cfg.snapshots; ++t)
        out.y.col(t) = amp * scan_gain(bs.tx_antennas, bs.spacing_over_wavelength, view_->target_angle, t) * rx;
    out.signal_power = mean_column_power(out.y);
    if (noise == NoiseMode::on)
        add_noise(out.y, rng, cfg.noise_power);
    out.truth = cfg.angles.theta_it_h;
    return out;
}

SchemeSnapshots SchemeChannel::synth_bits(Rng &rng, NoiseMode noise) const
{
    const auto &cfg = ctx_.cfg;
    const auto &L = cfg.layout;
    const auto &bs = *ctx_.bs;
    const Complex beta = complex_normal(rng);
    // The BS -> IRS link is static line of sight, so the BS steers a matched beam at the IRS.
    const Complex hop = controller_element_gain(bs.d_bi, L.wavelength) * std::sqrt(static_cast<double>(bs.tx_antennas));
    const double g = reflected_attenuation(L.wavelength, cfg.kappa, cfg.d_it);
    const double dir = 2.0 * L.d_i / L.wavelength * (std::sin(cfg.angles.theta_it_h) + std::sin(bs.theta_i));
    const CVec cascade = steering_vector(dir, L.n_h);
    const CMat sched = ReflectionSchedule::dft(L.n_h, cfg.snapshots).matrix();
    const CVec rx = sensor_response(cfg.angles.theta_it_h, L);

    SchemeSnapshots out;
    out.y.resize(L.m, cfg.snapshots);
    const Complex amp = std::sqrt(cfg.tx_power) * hop * cfg.eta_amplitude() * beta * g;
    for (int t = 0; t < cfg.snapshots; ++t)
        out.y.col(t) = (amp * (cascade.transpose() * sched.col(t)).value()) * rx;
    out.signal_power = mean_column_power(out.y);
    if (noise == NoiseMode::on)
        add_noise(out.y, rng, cfg.noise_power);
    out.truth = cfg.angles.theta_it_h;
    return out;
}

SchemeSnapshots SchemeChannel::synth_bitib(Rng &rng, NoiseMode noise) const
{
    const auto &cfg = ctx_.cfg;
    const auto &L = cfg.layout;
    const auto &bs = *ctx_.bs;
    const Complex beta = complex_normal(rng);
    const Complex hop = controller_element_gain(bs.d_bi, L.wavelength);

    BeamTrainingScene scene;
    scene.n_elements = L.n_h;
    scene.spacing_over_wavelength = L.d_i / L.wavelength;
    scene.theta_target = cfg.angles.theta_it_h;
    scene.theta_source = bs.theta_i;
    scene.round_trip_gain = std::sqrt(cfg.tx_power * bs.tx_antennas) * hop * hop * cfg.eta_r * beta *
                            reflected_attenuation(L.wavelength, cfg.kappa, cfg.d_it);
    scene.rx_response = steering_vector(2.0 * bs.spacing_over_wavelength * std::sin(bs.theta_b), bs.rx_antennas);
    scene.noise_power = cfg.noise_power;

    SchemeSnapshots out;
    out.y = beam_training_snapshots(scene, codebook_, rng, NoiseMode::off);
    out.signal_power = mean_column_power(out.y);
    if (noise == NoiseMode::on)
        add_noise(out.y, rng, cfg.noise_power);
    out.truth = cfg.angles.theta_it_h;
    return out;
}

// ---- sweeps and plans ---------------------------------------------------------

namespace
{
struct SweepInfo
{
    SweepParam p;
    std::string_view name;
};

constexpr SweepInfo kSweeps[] = {
    {SweepParam::none, "none"},           {SweepParam::tx_power_dbm, "tx_power_dbm"},
    {SweepParam::n_sensors, "n_sensors"}, {SweepParam::n_elements, "n_elements"},
    {SweepParam::d_it_m, "d_it_m"},       {SweepParam::d_ui_m, "d_ui_m"},
};
} // namespace

std::string_view sweep_name(SweepParam p)
{
    for (const auto &s : kSweeps)
        if (s.p == p)
            return s.name;
    throw ConfigError("unknown sweep parameter");
}

SweepParam parse_sweep(std::string_view name)
{
    for (const auto &s : kSweeps)
        if (s.name == name)
            return s.p;
    throw ConfigError(fmt::format("unknown sweep parameter '{}'", name));
}

SchemeContext apply_sweep(const SchemeContext &ctx, SweepParam param, double value)
{
    SchemeContext out = ctx;
    switch (param)
    {
    case SweepParam::none:
        break;
    case SweepParam::tx_power_dbm:
        out.cfg.tx_power = dbm_to_mw(value);
        break;
    case SweepParam::n_sensors:
        out.cfg.layout.m = integral_value(value, "n_sensors");
        break;
    case SweepParam::n_elements:
        out.cfg.layout.n_h = integral_value(value, "n_elements");
        break;
    case SweepParam::d_it_m:
        out.cfg.d_it = value;
        break;
    case SweepParam::d_ui_m:
        if (out.mus)
            out.mus->d_ui_fixed = value;
        break;
    }
    return out;
}

void ExperimentPlan::validate() const
{
    if (trials < 1)
        throw ConfigError("plan.trials must be >= 1");
    if (schemes.empty())
        throw ConfigError("plan.schemes must list at least one scheme");
    for (std::size_t i = 0; i < schemes.size(); ++i)
        for (std::size_t j = i + 1; j < schemes.size(); ++j)
            if (schemes[i] == schemes[j])
                throw ConfigError(fmt::format("scheme {} listed twice", scheme_name(schemes[i])));
    for (auto s : schemes)
    {
        if (uses_base_station(s) && !base.bs)
            throw ConfigError(fmt::format("scheme {} requires the [bs] section", scheme_name(s)));
        if (s == SchemeId::mus && !base.mus)
            throw ConfigError("scheme MUS requires the [mus] section");
    }
    if (sweep != SweepParam::none && sweep_values.empty())
        throw ConfigError("plan.sweep_values must be non-empty when a sweep parameter is set");
    if (!std::is_sorted(sweep_values.begin(), sweep_values.end()) ||
        std::adjacent_find(sweep_values.begin(), sweep_values.end()) != sweep_values.end())
        throw ConfigError("plan.sweep_values must be strictly increasing");
    if (sweep == SweepParam::n_elements)
        for (double v : sweep_values)
            if (v > base.cfg.snapshots)
                throw ConfigError(
                    fmt::format("n_elements sweep value {} exceeds link.snapshots ({})", v, base.cfg.snapshots));
    if (crb.fading_draws < 0)
        throw ConfigError("crb.fading_draws must be >= 0");
    if (workers < 0)
        throw ConfigError("plan.workers must be >= 0");
    base.estimator.validate();
    const std::vector<double> points = sweep == SweepParam::none ? std::vector<double>{0.0} : sweep_values;
    for (double v : points)
        apply_sweep(base, sweep, v).cfg.validate();
}

std::uint64_t experiment_trial_seed(const ExperimentPlan &plan, SchemeId scheme, std::size_t point, int trial)
{
    return trial_seed(plan.seed, scheme_code(scheme), point, static_cast<std::uint64_t>(trial));
}

namespace
{
struct TrialRecord
{
    double error = 0.0;
    double power = 0.0;
    bool ok = false;
    bool degenerate = false;
};

TrialRecord execute_trial(const SchemeChannel &channel, std::uint64_t seed)
{
    Rng rng(seed);
    const SchemeSnapshots snap = channel.synthesize(rng);
    const DoaEstimate est = channel.estimate(snap);
    return {est.theta_hat - snap.truth, snap.signal_power, true, est.degenerate};
}
} // namespace

double run_single_trial(const SchemeChannel &channel, std::uint64_t seed) { return execute_trial(channel, seed).error; }

int resolve_workers(int requested)
{
    if (requested > 0)
        return requested;
    if (const char *env = std::getenv("IRSSENSE_WORKERS"))
    {
        char *end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0)
            return static_cast<int>(v);
        throw ConfigError(fmt::format("IRSSENSE_WORKERS must be a positive integer (got '{}')", env));
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

double proposed_crb(const ScenarioConfig &cfg, const CrbSettings &crb, std::uint64_t seed)
{
    CrbOptions opts;
    opts.c_index = crb.c_index;
    const double nominal = crb_closed_form(cfg, ReflectionSchedule::dft(cfg.layout.n_h, cfg.snapshots), opts).crb;
    if (crb.fading_draws == 0)
        return nominal;
    return nominal * fading_average_factor(cfg, crb.fading_draws, seed);
}

ExperimentResult run_experiment(const ExperimentPlan &plan)
{
    plan.validate();
    const std::vector<double> points =
        plan.sweep == SweepParam::none ? std::vector<double>{0.0} : plan.sweep_values;
    const std::size_t n_points = points.size();
    const std::size_t n_schemes = plan.schemes.size();
    const auto n_trials = static_cast<std::size_t>(plan.trials);

    std::vector<SchemeContext> contexts;
    for (double v : points)
        contexts.push_back(apply_sweep(plan.base, plan.sweep, v));
    std::vector<SchemeChannel> channels;
    for (auto s : plan.schemes)
        for (const auto &ctx : contexts)
            channels.emplace_back(s, ctx);

    const std::size_t n_tasks = n_schemes * n_points * n_trials;
    std::vector<TrialRecord> records(n_tasks);
    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;

    auto worker = [&] {
        for (std::size_t task = next.fetch_add(1); task < n_tasks; task = next.fetch_add(1))
        {
            const std::size_t cell = task / n_trials;
            const int trial = static_cast<int>(task % n_trials);
            const SchemeId s = plan.schemes[cell / n_points];
            const std::size_t point = cell % n_points;
            const std::uint64_t seed = experiment_trial_seed(plan, s, point, trial);
            try
            {
                records[task] = execute_trial(channels[cell], seed);
            }
            catch (const std::exception &e)
            {
                std::lock_guard lock(log_mutex);
                fmt::print(stderr, "trial failed: scheme={} point={} trial={} seed={}: {}\n", scheme_name(s), point,
                           trial, seed, e.what());
            }
        }
    };

    const int n_workers = std::min<std::size_t>(static_cast<std::size_t>(resolve_workers(plan.workers)),
                                                std::max<std::size_t>(1, n_tasks));
    {
        std::vector<std::jthread> pool;
        for (int w = 1; w < n_workers; ++w)
            pool.emplace_back(worker);
        worker();
    }

    ExperimentResult result;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double deg2 = rad_to_deg(1.0) * rad_to_deg(1.0);
    for (std::size_t si = 0; si < n_schemes; ++si)
        for (std::size_t p = 0; p < n_points; ++p)
        {
            const std::size_t cell = si * n_points + p;
            RowDiagnostics diag;
            double power = 0.0;
            for (std::size_t t = 0; t < n_trials; ++t)
            {
                const TrialRecord &r = records[cell * n_trials + t];
                if (!r.ok)
                {
                    ++diag.failed_trials;
                    continue;
                }
                diag.errors_rad.push_back(r.error);
                power += r.power;
                diag.degenerate_trials += r.degenerate ? 1 : 0;
            }

            ResultRow row;
            row.scheme = std::string(scheme_name(plan.schemes[si]));
            row.sweep_param = std::string(sweep_name(plan.sweep));
            row.sweep_value = points[p];
            row.trials = plan.trials;
            row.seed = plan.seed;
            row.crb_deg2 = nan;
            if (diag.errors_rad.empty())
            {
                row.rmse_deg = nan;
                row.p_success = 0.0;
                row.mean_rx_power_dbm = nan;
            }
            else
            {
                const auto ok = static_cast<double>(diag.errors_rad.size());
                const AccuracyMetrics m = metrics_from_errors(diag.errors_rad, contexts[p].cfg.success_delta);
                row.rmse_deg = rad_to_deg(m.rmse);
                // Failed trials count as unsuccessful localizations.
                row.p_success = m.p_success * ok / static_cast<double>(plan.trials);
                row.mean_rx_power_dbm = mw_to_dbm(power / ok);
                diag.rmse_stderr_deg = rad_to_deg(m.rmse_stderr);
            }
            if (plan.schemes[si] == SchemeId::proposed)
                row.crb_deg2 = proposed_crb(contexts[p].cfg, plan.crb, mix64(plan.seed ^ mix64(p))) * deg2;

            result.rows.push_back(std::move(row));
            result.diagnostics.push_back(std::move(diag));
        }
    return result;
}

// ---- CSV ----------------------------------------------------------------------

namespace
{
constexpr std::string_view kHeader =
    "scheme,sweep_param,sweep_value,rmse_deg,p_success,mean_rx_power_dbm,crb_deg2,trials,seed";

std::vector<std::string> split_csv(const std::string &line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ','))
        out.push_back(field);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

double parse_double(const std::string &s, std::size_t line)
{
    try
    {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size())
            throw std::invalid_argument("trailing characters");
        return v;
    }
    catch (const std::exception &)
    {
        throw ConfigError(fmt::format("line {}: '{}' is not a number", line, s));
    }
}
} // namespace

bool ResultRow::operator==(const ResultRow &o) const
{
    return scheme == o.scheme && sweep_param == o.sweep_param && same(sweep_value, o.sweep_value) &&
           same(rmse_deg, o.rmse_deg) && same(p_success, o.p_success) &&
           same(mean_rx_power_dbm, o.mean_rx_power_dbm) && same(crb_deg2, o.crb_deg2) && trials == o.trials &&
           seed == o.seed;
}

void write_results(const ExperimentResult &result, std::ostream &out)
{
    out << kHeader << '\n';
    for (const auto &r : result.rows)
        out << fmt::format("{},{},{},{},{},{},{},{},{}\n", r.scheme, r.sweep_param, r.sweep_value, r.rmse_deg,
                           r.p_success, r.mean_rx_power_dbm, r.crb_deg2, r.trials, r.seed);
}

void emit_results(const ExperimentResult &result, const std::filesystem::path &path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error(fmt::format("cannot open '{}' for writing", path.string()));
    write_results(result, out);
    out.flush();
    if (!out)
        throw std::runtime_error(fmt::format("write to '{}' failed", path.string()));
}

ExperimentResult parse_results(std::istream &in)
{
    std::string line;
    if (!std::getline(in, line) || line != kHeader)
        throw ConfigError("results CSV has an unexpected header");
    ExperimentResult res;
    std::size_t lineno = 1;
    while (std::getline(in, line))
    {
        ++lineno;
        if (line.empty())
            continue;
        const auto f = split_csv(line);
        if (f.size() != 9)
            throw ConfigError(fmt::format("line {}: expected 9 fields, got {}", lineno, f.size()));
        ResultRow r;
        r.scheme = f[0];
        r.sweep_param = f[1];
        r.sweep_value = parse_double(f[2], lineno);
        r.rmse_deg = parse_double(f[3], lineno);
        r.p_success = parse_double(f[4], lineno);
        r.mean_rx_power_dbm = parse_double(f[5], lineno);
        r.crb_deg2 = parse_double(f[6], lineno);
        r.trials = static_cast<int>(parse_double(f[7], lineno));
        try
        {
            r.seed = std::stoull(f[8]);
        }
        catch (const std::exception &)
        {
            throw ConfigError(fmt::format("line {}: '{}' is not a seed", lineno, f[8]));
        }
        res.rows.push_back(std::move(r));
    }
    return res;
}

ExperimentResult parse_results_csv(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error(fmt::format("cannot open '{}' for reading", path.string()));
    return parse_results(in);
}

} // namespace irssense
