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

#include "irssense/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "irssense/config.hpp"
#include "irssense/validation.hpp"

namespace irssense
{

namespace
{
// Destination that is either a file or the supplied stream.
class Sink
{
public:
    Sink(const std::string &path, std::ostream &fallback) : stream_(&fallback)
    {
        if (path.empty())
            return;
        file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
        if (!*file_)
            throw std::runtime_error(fmt::format("cannot open '{}' for writing", path));
        stream_ = file_.get();
    }
    std::ostream &get() { return *stream_; }
    void finish(const std::string &path)
    {
        stream_->flush();
        if (!*stream_)
            throw std::runtime_error(fmt::format("write to '{}' failed", path.empty() ? "<stdout>" : path));
    }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream *stream_;
};

int cmd_run(const std::string &plan_path, int workers, const std::string &output, std::ostream &out)
{
    ExperimentPlan plan = make_plan(load_config(plan_path));
    if (workers > 0)
        plan.workers = workers;
    std::string dest = output;
    if (dest.empty() && plan.output_csv)
    {
        // Relative output paths resolve against the plan file's directory.
        const std::filesystem::path p = *plan.output_csv;
        dest = (p.is_relative() ? std::filesystem::path(plan_path).parent_path() / p : p).string();
    }
    const ExperimentResult res = run_experiment(plan);
    if (dest.empty())
    {
        write_results(res, out);
        return kExitOk;
    }
    emit_results(res, dest);
    for (const auto &r : res.rows)
        fmt::print(out, "{:<22} {}={:<8} rmse={:.6f} deg  p_success={:.3f}\n", r.scheme, r.sweep_param, r.sweep_value,
                   r.rmse_deg, r.p_success);
    fmt::print(out, "wrote {}\n", dest);
    return kExitOk;
}

int cmd_crb(const std::string &path, const std::string &output, int points, bool with_fd, std::ostream &out)
{
    const ConfigFile file = load_config(path);
    const ScenarioConfig &cfg = file.context.cfg;
    if (cfg.snapshots < cfg.layout.n_h)
        throw ConfigError("crb needs link.snapshots >= array.n_elements for the DFT schedule");
    if (points < 2)
        throw ConfigError("--points must be >= 2");
    const auto sched = ReflectionSchedule::dft(cfg.layout.n_h, cfg.snapshots);
    CrbOptions opts;
    opts.c_index = file.crb.c_index;

    const CrbReport rep = crb_report(cfg, sched, opts);
    const double to_deg2 = rad_to_deg(1.0) * rad_to_deg(1.0);
    fmt::print(out, "# theta = {} deg\n", rad_to_deg(cfg.angles.theta_it_h));
    fmt::print(out, "# crb_closed = {} rad^2 ({} deg^2)\n", rep.crb_closed, rep.crb_closed * to_deg2);
    fmt::print(out, "# crb_pipeline = {} rad^2 ({} deg^2)\n", rep.crb_pipeline, rep.crb_pipeline * to_deg2);
    fmt::print(out, "# crb_fd = {} rad^2 ({} deg^2)\n", rep.crb_fd, rep.crb_fd * to_deg2);
    fmt::print(out, "# w1 = {}, w2 = {}, |xi| = {}, sigma = {}, sigma_bar = {}, p = {}\n", rep.w1, rep.w2,
               std::abs(rep.xi), rep.sigma_fun, rep.sigma_bar_fun, rep.p_theta);
    if (file.crb.fading_draws > 0)
    {
        const double f = fading_average_factor(cfg, file.crb.fading_draws, 1);
        fmt::print(out, "# fading-averaged crb_closed = {} rad^2 (factor {} over {} draws)\n", rep.crb_closed * f, f,
                   file.crb.fading_draws);
    }

    RVec grid(points);
    for (int i = 0; i < points; ++i)
        grid(i) = deg_to_rad(-81.0 + 162.0 * i / (points - 1));
    const ConsistencyReport cr = crb_consistency_report(cfg, sched, grid, opts, with_fd);
    fmt::print(out, "# ratio closed/pipeline: mean {}, max deviation {}, {}\n", cr.mean_ratio, cr.max_deviation,
               cr.classification == RatioClass::constant_factor ? "constant factor" : "structural");

    Sink sink(output, out);
    auto &o = sink.get();
    o << "theta_deg,crb_closed,crb_pipeline,crb_fd,ratio\n";
    for (std::size_t i = 0; i < cr.theta.size(); ++i)
        o << fmt::format("{},{},{},{},{}\n", rad_to_deg(cr.theta[i]), cr.crb_closed[i], cr.crb_pipeline[i],
                         cr.crb_fd[i], cr.ratio[i]);
    sink.finish(output);
    return kExitOk;
}

int cmd_powers(const std::string &path, const std::string &output, int points, std::optional<double> d_lo,
               std::optional<double> d_hi, std::ostream &out)
{
    const ConfigFile file = load_config(path);
    const ScenarioConfig &cfg = file.context.cfg;
    const LinkPowers lp = echo_link_powers(cfg);
    fmt::print(out, "# P_r = {} dBm, P_d = {} dBm, N_th = {}\n", mw_to_dbm(lp.p_r), mw_to_dbm(lp.p_d),
               element_threshold(cfg));

    const double lo = d_lo.value_or(cfg.d_it / (points + 1));
    const double hi = d_hi.value_or(cfg.d_it * points / (points + 1));
    if (points < 2 || !(lo > 0.0 && hi < cfg.d_it && lo < hi))
        throw ConfigError("d_ui sweep must satisfy 0 < min < max < d_it_m with at least two points");

    try
    {
        const double root = combined_power_minimizer(cfg);
        fmt::print(out, "# minimizer d_ui_m = {} (P_c = {} dBm)\n", root, mw_to_dbm(user_aided_power(root, cfg).p_c));
        if (std::abs(cfg.angles.theta_it_h - cfg.user_theta) < 1e-12)
            fmt::print(out, "# closed-form minimizer d_ui_m = {}\n", combined_power_minimizer_closed_form(cfg));
    }
    catch (const ComputationError &e)
    {
        fmt::print(out, "# no interior minimizer: {}\n", e.what());
    }

    Sink sink(output, out);
    auto &o = sink.get();
    o << "d_ui_m,p_r_dbm,p_d_dbm,p_c_dbm,d_ut_m,n_th\n";
    for (int i = 0; i < points; ++i)
    {
        const double d = lo + (hi - lo) * i / (points - 1);
        const PowerBreakdown p = user_aided_power(d, cfg);
        o << fmt::format("{},{},{},{},{},{}\n", d, mw_to_dbm(p.p_r), mw_to_dbm(p.p_d), mw_to_dbm(p.p_c), p.d_ut,
                         p.n_th);
    }
    sink.finish(output);
    return kExitOk;
}

int cmd_validate(int workers, const std::vector<int> &only, std::ostream &out)
{
    ValidationOptions opts;
    opts.workers = workers;
    bool all = true;
    for (const auto &spec : acceptance_checks())
    {
        if (!only.empty() && std::find(only.begin(), only.end(), spec.id) == only.end())
            continue;
        const CheckResult r = run_check(spec, opts);
        out << format_check(r) << '\n' << std::flush;
        all = all && r.passed;
    }
    return all ? kExitOk : kExitValidation;
}

int cmd_spectrum(const std::string &path, const std::string &output, std::uint64_t seed, const std::string &scheme,
                 std::ostream &out)
{
    const ConfigFile file = load_config(path);
    const SchemeId id = parse_scheme(scheme);
    if (id == SchemeId::bitib)
        throw ConfigError("spectrum dumps need a MUSIC scheme; BITIB uses beam training");
    SchemeContext ctx = file.context;
    if (uses_base_station(id))
        ctx.bs = bs_geometry(file);
    if (id == SchemeId::mus)
        ctx.mus = mus_geometry(file);
    const SchemeChannel channel(id, ctx);
    Rng rng(seed);
    const SchemeSnapshots snap = channel.synthesize(rng);
    const DoaEstimate est = channel.estimate(snap);
    fmt::print(out, "# theta_hat = {} deg, truth = {} deg{}\n", rad_to_deg(est.theta_hat), rad_to_deg(snap.truth),
               est.degenerate ? " (degenerate eigenspace)" : "");

    Sink sink(output, out);
    auto &o = sink.get();
    o << "grid_deg,p_music\n";
    for (Eigen::Index i = 0; i < est.grid.size(); ++i)
        o << fmt::format("{},{}\n", rad_to_deg(est.grid(i)), est.spectrum(i));
    sink.finish(output);
    return kExitOk;
}
} // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
{
    CLI::App app{"Simulation and analysis toolkit for self-sensing IRS target localization", "irssense"};
    app.require_subcommand(1);

    std::string file, output, scheme = "PROPOSED";
    int workers = 0, points = 37, sweep_points = 200;
    bool no_fd = false;
    std::uint64_t seed = 1;
    std::optional<double> d_lo, d_hi;
    std::vector<int> only;

    auto *run = app.add_subcommand("run", "Execute a Monte Carlo experiment plan");
    run->add_option("plan", file, "Plan file")->required();
    run->add_option("-w,--workers", workers, "Worker threads (overrides IRSSENSE_WORKERS)")->check(CLI::NonNegativeNumber);
    run->add_option("-o,--output", output, "Result CSV (overrides plan.output_csv)");

    auto *crb = app.add_subcommand("crb", "CRB report and closed-form/pipeline agreement table");
    crb->add_option("scenario", file, "Scenario file")->required();
    crb->add_option("-o,--output", output, "Agreement CSV");
    crb->add_option("-n,--points", points, "Angles in the agreement grid");
    crb->add_flag("--no-fd", no_fd, "Skip the finite-difference column");

    auto *powers = app.add_subcommand("powers", "Echo powers, element threshold and helping-user sweep");
    powers->add_option("scenario", file, "Scenario file")->required();
    powers->add_option("-o,--output", output, "Sweep CSV");
    powers->add_option("-n,--points", sweep_points, "Sweep points");
    powers->add_option("--d-ui-min", d_lo, "Sweep start [m]");
    powers->add_option("--d-ui-max", d_hi, "Sweep end [m]");

    auto *validate = app.add_subcommand("validate", "Run the property and oracle acceptance suite");
    validate->add_option("-w,--workers", workers, "Worker threads")->check(CLI::NonNegativeNumber);
    validate->add_option("--only", only, "Run only these check ids");

    auto *spectrum = app.add_subcommand("spectrum", "Single-trial MUSIC spectrum dump");
    spectrum->add_option("scenario", file, "Scenario file")->required();
    spectrum->add_option("-o,--output", output, "Spectrum CSV");
    spectrum->add_option("-s,--seed", seed, "Trial seed");
    spectrum->add_option("--scheme", scheme, "Scheme name");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try
    {
        app.parse(reversed);
    }
    catch (const CLI::CallForHelp &)
    {
        out << app.help();
        return kExitOk;
    }
    catch (const CLI::CallForAllHelp &)
    {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    }
    catch (const CLI::ParseError &e)
    {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    try
    {
        if (run->parsed())
            return cmd_run(file, workers, output, out);
        if (crb->parsed())
            return cmd_crb(file, output, points, !no_fd, out);
        if (powers->parsed())
            return cmd_powers(file, output, sweep_points, d_lo, d_hi, out);
        if (validate->parsed())
            return cmd_validate(workers, only, out);
        if (spectrum->parsed())
            return cmd_spectrum(file, output, seed, scheme, out);
    }
    catch (const ConfigError &e)
    {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    catch (const std::exception &e)
    {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitConfig;
}

} // namespace irssense
