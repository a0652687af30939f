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

#include "irssense/validation.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <tuple>
#include <type_traits>

#include <fmt/format.h>

#include "irssense/analysis.hpp"
#include "irssense/harness.hpp"

namespace irssense
{

namespace
{
struct Outcome
{
    bool passed = false;
    std::string detail;
};

Outcome check_dft_optimality()
{
    const int n = 64, t = 64;
    const auto sched = ReflectionSchedule::dft(n, t);
    const CMat raw = sched.matrix() * sched.matrix().adjoint() / static_cast<double>(t);
    const double off = (raw - CMat::Identity(n, n)).cwiseAbs().maxCoeff();
    const CMat r_phi = reflection_covariance(sched);
    bool diag_ok = true;
    for (int i = 0; i < n; ++i)
        diag_ok = diag_ok && r_phi(i, i) == Complex(1.0, 0.0) && std::abs(raw(i, i) - 1.0) < 1e-12;
    return {off < 1e-12 && diag_ok, fmt::format("max|R - I| = {:.3e}, unit diagonal {}", off, diag_ok)};
}

Outcome check_geometry_identities()
{
    ScenarioConfig cfg;
    double worst_norm = 0.0, worst_b = 0.0, worst_q = 0.0;
    for (int size : {1, 2, 7, 8, 63, 64, 128})
        for (int k = 0; k <= 180; ++k)
        {
            const double phase = std::sin(deg_to_rad(-90.0 + k));
            worst_norm = std::max(worst_norm, std::abs(steering_vector(phase, size).squaredNorm() - size));
        }
    for (int k = 0; k <= 180; ++k)
    {
        const double th = deg_to_rad(-90.0 + k);
        const CVec b = sensor_response(th, cfg.layout);
        const CVec q = combined_manifold(th, cfg.angles, cfg.layout);
        const auto d = manifold_derivatives(th, cfg.angles, cfg.layout);
        worst_b = std::max(worst_b, std::abs(b.dot(d.b_dot)));
        worst_q = std::max(worst_q, std::abs(q.dot(d.q_dot)));
    }
    const bool ok = worst_norm <= 1e-12 && worst_b < 1e-10 && worst_q < 1e-10;
    return {ok, fmt::format("max| ||u||^2 - N | = {:.2e}, max|b^H b'| = {:.2e}, max|q^H q'| = {:.2e}", worst_norm,
                            worst_b, worst_q)};
}

Outcome check_noiseless_music()
{
    ScenarioConfig cfg;
    const EstimatorSettings est;
    const RVec grid = est.grid();
    const auto manifold = UlaManifold::sensors(cfg.layout);
    const ManifoldTable table = ManifoldTable::build(manifold, grid);
    Rng rng(20260101);
    std::uniform_int_distribution<Eigen::Index> pick(1, grid.size() - 2);
    std::uniform_real_distribution<double> off(deg_to_rad(-89.0), deg_to_rad(89.0));
    const double step = deg_to_rad(est.grid_step_deg);

    auto estimate = [&](double truth) {
        const CVec f = complex_normal_vector(rng, cfg.snapshots);
        const CMat y = manifold.response(truth) * f.adjoint();
        return music_spectrum(decompose(sample_covariance(y)), table).theta_hat;
    };

    int on_ok = 0, off_ok = 0;
    double worst_off = 0.0;
    for (int i = 0; i < 100; ++i)
    {
        const double truth = grid(pick(rng));
        on_ok += estimate(truth) == truth ? 1 : 0;
    }
    for (int i = 0; i < 100; ++i)
    {
        const double truth = off(rng);
        const double err = std::abs(estimate(truth) - truth);
        worst_off = std::max(worst_off, err);
        off_ok += err <= step * (1.0 + 1e-9) ? 1 : 0;
    }
    return {on_ok == 100 && off_ok == 100,
            fmt::format("on-grid exact {}/100, off-grid within one step {}/100 (worst {:.4f} deg)", on_ok, off_ok,
                        rad_to_deg(worst_off))};
}

Outcome check_echo_powers_monte_carlo()
{
    ScenarioConfig cfg;
    const LinkPowers closed = echo_link_powers(cfg);
    const CMat sched = expand_schedule(ReflectionSchedule::dft(cfg.layout.n_h, cfg.snapshots).matrix(), cfg);
    const int draws = 100000;
    Rng rng(424242);
    double acc_r = 0.0, acc_d = 0.0;
    for (int i = 0; i < draws; ++i)
    {
        const ChannelRealization real = draw_realization(cfg, rng);
        double snap = 0.0;
        for (Eigen::Index t = 0; t < sched.cols(); ++t)
            snap += reflected_echo(real, sched.col(t)).squaredNorm();
        acc_r += snap / static_cast<double>(sched.cols()) * cfg.tx_power;
        acc_d += direct_echo(real).squaredNorm() * cfg.tx_power;
    }
    const double err_r = std::abs(acc_r / draws / closed.p_r - 1.0);
    const double err_d = std::abs(acc_d / draws / closed.p_d - 1.0);
    return {err_r < 0.02 && err_d < 0.02,
            fmt::format("P_r rel. error {:.4f}, P_d rel. error {:.4f} over {} draws", err_r, err_d, draws)};
}

Outcome check_element_threshold()
{
    ScenarioConfig cfg;
    const double n_th = element_threshold(cfg);
    ScenarioConfig one = cfg;
    one.layout.n_h = 1;
    const LinkPowers unit = echo_link_powers(one);
    // P_r is linear in N, so P_r(N_th) = N_th * P_r(1).
    const double rel = std::abs(n_th * unit.p_r - unit.p_d) / unit.p_d;

    int first_cross = -1;
    bool consistent = true;
    const int limit = static_cast<int>(std::ceil(2.0 * n_th));
    for (int n = 1; n <= limit; ++n)
    {
        ScenarioConfig at = cfg;
        at.layout.n_h = n;
        const LinkPowers p = echo_link_powers(at);
        const bool above = p.p_r >= p.p_d;
        if (above && first_cross < 0)
            first_cross = n;
        if (first_cross > 0 && !above)
            consistent = false;
    }
    const int expected = static_cast<int>(std::ceil(n_th));
    return {rel < 1e-12 && first_cross == expected && consistent,
            fmt::format("N_th = {:.4f}, |P_r(N_th) - P_d|/P_d = {:.2e}, first N with P_r >= P_d = {} (expected {})",
                        n_th, rel, first_cross, expected)};
}

Outcome check_helping_user_minimizer()
{
    ScenarioConfig cfg;
    cfg.eta_r = 900.0 / cfg.layout.n_h;
    const double root = combined_power_minimizer(cfg);
    const int points = 10000;
    const double step = cfg.d_it / (points + 1);
    double best_d = 0.0, best_p = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= points; ++i)
    {
        const double d = step * i;
        const double p = user_aided_power(d, cfg).p_c;
        if (p < best_p)
        {
            best_p = p;
            best_d = d;
        }
    }
    const bool ok = std::abs(root - 1.785) <= 0.001 && std::abs(best_d - root) <= step;
    return {ok, fmt::format("root {:.5f} m, grid minimizer {:.5f} m (step {:.5f} m)", root, best_d, step)};
}

Outcome check_crb_oracle()
{
    Rng rng(777);
    std::uniform_real_distribution<double> theta(deg_to_rad(-80.0), deg_to_rad(80.0));
    double worst = 0.0;
    int cases = 0;
    for (auto [n, m, t] : {std::tuple{4, 4, 4}, std::tuple{8, 4, 8}, std::tuple{8, 8, 8}})
        for (int k = 0; k < 5; ++k)
        {
            ScenarioConfig cfg;
            cfg.layout.n_h = n;
            cfg.layout.m = m;
            cfg.snapshots = t;
            cfg.angles.theta_it_h = theta(rng);
            const auto sched = ReflectionSchedule::dft(n, t);
            const double pipe = crb_fim_pipeline(cfg, sched).crb;
            const double fd = crb_fd_oracle(cfg, sched).crb;
            worst = std::max(worst, std::abs(pipe - fd) / fd);
            ++cases;
        }
    return {worst < 1e-4, fmt::format("worst relative error {:.3e} over {} cases", worst, cases)};
}

Outcome check_consistency_report()
{
    ScenarioConfig cfg;
    const auto sched = ReflectionSchedule::dft(cfg.layout.n_h, cfg.snapshots);
    RVec grid(37);
    for (int i = 0; i < 37; ++i)
        grid(i) = deg_to_rad(-81.0 + 4.5 * i);
    const ConsistencyReport rep = crb_consistency_report(cfg, sched, grid);
    bool finite = rep.ratio.size() == 37;
    for (double r : rep.ratio)
        finite = finite && std::isfinite(r) && r > 0.0;
    const char *cls = rep.classification == RatioClass::constant_factor ? "constant factor" : "structural";
    return {finite, fmt::format("closed/pipeline mean ratio {:.4f}, max deviation {:.2f}% -> {}", rep.mean_ratio,
                                100.0 * rep.max_deviation, cls)};
}

Outcome check_crb_monotonicity()
{
    auto eval = [](ScenarioConfig cfg) {
        const auto sched = ReflectionSchedule::dft(cfg.layout.n_h, cfg.snapshots);
        return std::pair{crb_closed_form(cfg, sched).crb, crb_fim_pipeline(cfg, sched).crb};
    };
    bool ok = true;
    std::string trace = "M:";
    std::pair<double, double> prev{INFINITY, INFINITY};
    for (int m : {4, 6, 8, 10})
    {
        ScenarioConfig cfg;
        cfg.layout.m = m;
        const auto v = eval(cfg);
        ok = ok && v.first < prev.first && v.second < prev.second;
        prev = v;
        trace += fmt::format(" {:.3e}", v.first);
    }
    trace += " | N:";
    prev = {INFINITY, INFINITY};
    for (int n : {16, 32, 64, 128})
    {
        ScenarioConfig cfg;
        cfg.layout.n_h = n;
        cfg.snapshots = 128;
        const auto v = eval(cfg);
        ok = ok && v.first < prev.first && v.second < prev.second;
        prev = v;
        trace += fmt::format(" {:.3e}", v.first);
    }
    return {ok, "closed-form CRB [rad^2] " + trace + " (pipeline checked alongside)"};
}

Outcome check_high_snr_efficiency(const ValidationOptions &opts)
{
    ExperimentPlan plan;
    plan.schemes = {SchemeId::proposed};
    plan.sweep = SweepParam::tx_power_dbm;
    plan.sweep_values = {30.0};
    plan.trials = 1000;
    plan.seed = 1011;
    plan.workers = opts.workers;

    const ScenarioConfig cfg = apply_sweep(plan.base, plan.sweep, plan.sweep_values[0]).cfg;
    const LinkPowers p = echo_link_powers(cfg);
    // Per-sensor SNR after background cancellation doubles the noise.
    const double snr_db = linear_to_db((p.p_r + p.p_d) / cfg.layout.m / (2.0 * cfg.noise_power));

    const ExperimentResult res = run_experiment(plan);
    const ResultRow &row = res.rows.at(0);
    const double bound = std::sqrt(row.crb_deg2);
    const double ratio = row.rmse_deg / bound;
    const bool ok = snr_db >= 20.0 && ratio >= 1.0 && ratio <= 3.0;
    return {ok, fmt::format("SNR {:.1f} dB, RMSE {:.5f} deg (+/- {:.5f}), sqrt(CRB) {:.5f} deg, ratio {:.3f}", snr_db,
                            row.rmse_deg, res.diagnostics.at(0).rmse_stderr_deg, bound, ratio)};
}

Outcome check_scheme_ordering(const ValidationOptions &opts)
{
    ExperimentPlan plan;
    plan.base.bs = BsGeometry{};
    plan.schemes = {SchemeId::proposed, SchemeId::bits, SchemeId::bts, SchemeId::btb};
    plan.sweep = SweepParam::tx_power_dbm;
    plan.sweep_values = {10.0};
    plan.trials = 1000;
    plan.seed = 606;
    plan.workers = opts.workers;
    plan.crb.fading_draws = 0;
    const ExperimentResult res = run_experiment(plan);

    const double p_hi = res.rows[0].rmse_deg + 3.0 * res.diagnostics[0].rmse_stderr_deg;
    bool ok = std::isfinite(p_hi);
    std::string detail = fmt::format("PROPOSED {:.4f}+/-{:.4f}", res.rows[0].rmse_deg, res.diagnostics[0].rmse_stderr_deg);
    for (std::size_t i = 1; i < res.rows.size(); ++i)
    {
        const double lo = res.rows[i].rmse_deg - 3.0 * res.diagnostics[i].rmse_stderr_deg;
        ok = ok && p_hi < lo;
        detail += fmt::format(", {} {:.4f}+/-{:.4f}", res.rows[i].scheme, res.rows[i].rmse_deg,
                              res.diagnostics[i].rmse_stderr_deg);
    }
    return {ok, detail + " deg at 10 dBm"};
}

std::string slurp(const std::filesystem::path &p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome check_determinism()
{
    ExperimentPlan plan;
    plan.base.bs = BsGeometry{};
    plan.base.mus = MusGeometry{};
    plan.schemes = {SchemeId::proposed, SchemeId::bts, SchemeId::mus, SchemeId::proposed_random_phase};
    plan.sweep = SweepParam::tx_power_dbm;
    plan.sweep_values = {0.0, 20.0};
    plan.trials = 12;
    plan.seed = 99;
    plan.crb.fading_draws = 1000;

    const auto dir = std::filesystem::temp_directory_path() /
                     fmt::format("irssense-determinism-{}", std::chrono::steady_clock::now().time_since_epoch().count());
    std::filesystem::create_directories(dir);
    plan.workers = 1;
    const ExperimentResult first = run_experiment(plan);
    emit_results(first, dir / "a.csv");
    plan.workers = 3;
    emit_results(run_experiment(plan), dir / "b.csv");
    const bool same_bytes = slurp(dir / "a.csv") == slurp(dir / "b.csv");

    // One recorded trial re-run in isolation.
    const SchemeContext ctx = apply_sweep(plan.base, plan.sweep, plan.sweep_values[1]);
    const SchemeChannel channel(SchemeId::mus, ctx);
    const double again = run_single_trial(channel, experiment_trial_seed(plan, SchemeId::mus, 1, 5));
    const bool isolated = again == first.diagnostics[2 * 2 + 1].errors_rad.at(5);
    std::filesystem::remove_all(dir);
    return {same_bytes && isolated,
            fmt::format("byte-identical CSV across worker counts: {}, isolated trial re-run matches: {}", same_bytes,
                        isolated)};
}

template <typename F> std::function<CheckResult(const ValidationOptions &)> wrap(F f)
{
    return [f](const ValidationOptions &opts) {
        CheckResult r;
        Outcome o;
        if constexpr (std::is_invocable_v<F, const ValidationOptions &>)
            o = f(opts);
        else
            o = f();
        r.passed = o.passed;
        r.detail = std::move(o.detail);
        return r;
    };
}
} // namespace

const std::vector<CheckSpec> &acceptance_checks()
{
    static const std::vector<CheckSpec> checks = {
        {1, "DFT reflection optimality conditions", 1.0, wrap(check_dft_optimality)},
        {2, "steering-vector identities", 1.0, wrap(check_geometry_identities)},
        {3, "noiseless MUSIC exactness", 60.0, wrap(check_noiseless_music)},
        {4, "echo powers vs Monte Carlo", 60.0, wrap(check_echo_powers_monte_carlo)},
        {5, "element-count threshold", 1.0, wrap(check_element_threshold)},
        {6, "helping-user power minimizer", 1.0, wrap(check_helping_user_minimizer)},
        {7, "CRB pipeline vs finite-difference FIM", 10.0, wrap(check_crb_oracle)},
        {8, "closed-form vs pipeline CRB consistency", 10.0, wrap(check_consistency_report)},
        {9, "CRB monotonicity in M and N", 10.0, wrap(check_crb_monotonicity)},
        {10, "high-SNR MUSIC efficiency", 300.0, wrap(check_high_snr_efficiency)},
        {11, "scheme ordering at mid-range power", 600.0, wrap(check_scheme_ordering)},
        {12, "determinism", 60.0, wrap(check_determinism)},
    };
    return checks;
}

CheckResult run_check(const CheckSpec &spec, const ValidationOptions &opts)
{
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r;
    try
    {
        r = spec.run(opts);
    }
    catch (const std::exception &e)
    {
        r.passed = false;
        r.detail = fmt::format("exception: {}", e.what());
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.id = spec.id;
    r.name = spec.name;
    r.budget_seconds = spec.budget_seconds;
    if (r.passed && r.seconds > r.budget_seconds)
    {
        r.passed = false;
        r.detail += fmt::format(" [over time budget of {} s]", r.budget_seconds);
    }
    return r;
}

std::vector<CheckResult> run_acceptance_suite(const ValidationOptions &opts)
{
    std::vector<CheckResult> out;
    for (const auto &spec : acceptance_checks())
        out.push_back(run_check(spec, opts));
    return out;
}

std::string format_check(const CheckResult &r)
{
    return fmt::format("[{}] {:2} {} ({:.2f} s): {}", r.passed ? "PASS" : "FAIL", r.id, r.name, r.seconds, r.detail);
}

} // namespace irssense
