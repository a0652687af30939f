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
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "irssense/analysis.hpp"
#include "irssense/estimation.hpp"

namespace irssense
{

enum class SchemeId
{
    proposed,
    btb,
    bits,
    bts,
    bitib,
    mus,
    proposed_random_phase
};

inline constexpr SchemeId kAllSchemes[] = {SchemeId::proposed, SchemeId::btb,  SchemeId::bits,
                                           SchemeId::bts,      SchemeId::bitib, SchemeId::mus,
                                           SchemeId::proposed_random_phase};

std::string_view scheme_name(SchemeId id);
SchemeId parse_scheme(std::string_view name); // throws ConfigError
std::uint64_t scheme_code(SchemeId id);
bool uses_base_station(SchemeId id);

// Base station used by the infrastructure benchmarks. The IRS sits at the
// origin; the BS is at range d_bi and azimuth theta_i w.r.t. the IRS, and its
// array is rotated so the IRS appears at azimuth theta_b in the BS frame.
struct BsGeometry
{
    double d_bi = 100.0;
    double theta_i = deg_to_rad(80.0);
    double theta_b = deg_to_rad(80.0);
    int tx_antennas = 64;
    int rx_antennas = 8;
    double spacing_over_wavelength = 0.5;
    double bitib_grid_step_deg = 0.1; // beam-training codebook spacing

    void validate() const;
};

struct BsView
{
    double d_bt = 0.0;         // BS -> target [m]
    double target_angle = 0.0; // target azimuth in the BS frame [rad]
};

// Throws ConfigError when the target falls behind the BS array.
BsView bs_view(const ScenarioConfig &cfg, const BsGeometry &bs);

// Helping mobile user. Its range is uniform in [d_ui_min, d_ui_max] per trial
// unless pinned by d_ui_fixed; its azimuth is ScenarioConfig::user_theta.
struct MusGeometry
{
    double d_ui_min = 0.5;
    double d_ui_max = 100.0;
    std::optional<double> d_ui_fixed;

    void validate() const;
};

struct EstimatorSettings
{
    double grid_min_deg = -90.0;
    double grid_max_deg = 90.0;
    double grid_step_deg = 0.01;
    bool refine_peak = false;

    RVec grid() const { return angle_grid_deg(grid_min_deg, grid_max_deg, grid_step_deg); }
    void validate() const;
};

struct SchemeContext
{
    ScenarioConfig cfg;
    EstimatorSettings estimator;
    std::optional<BsGeometry> bs;
    std::optional<MusGeometry> mus;
};

// Output of one synthesized trial.
struct SchemeSnapshots
{
    CMat y;                  // cleaned snapshots (receiver x T), or one column per beam for beam training
    double signal_power = 0; // mean noiseless echo power per snapshot [mW]
    double truth = 0.0;      // the angle this scheme estimates [rad]
};

// Per-scheme link chain and estimator. Construction validates the scheme's
// geometry and precomputes everything that does not change across trials.
class SchemeChannel
{
public:
    SchemeChannel(SchemeId id, const SchemeContext &ctx);

    SchemeId id() const { return id_; }
    SchemeSnapshots synthesize(Rng &rng, NoiseMode noise = NoiseMode::on) const;
    DoaEstimate estimate(const SchemeSnapshots &snap) const;

private:
    SchemeSnapshots synth_proposed(Rng &rng, NoiseMode noise, bool random_phase) const;
    SchemeSnapshots synth_mus(Rng &rng, NoiseMode noise) const;
    SchemeSnapshots synth_btb(Rng &rng, NoiseMode noise) const;
    SchemeSnapshots synth_bts(Rng &rng, NoiseMode noise) const;
    SchemeSnapshots synth_bits(Rng &rng, NoiseMode noise) const;
    SchemeSnapshots synth_bitib(Rng &rng, NoiseMode noise) const;

    SchemeId id_;
    SchemeContext ctx_;
    std::optional<BsView> view_;
    CMat dft_schedule_; // full reflection vectors for the proposed scheme
    ManifoldTable table_;
    RVec codebook_;
};

enum class SweepParam
{
    none,
    tx_power_dbm,
    n_sensors,
    n_elements,
    d_it_m,
    d_ui_m
};

std::string_view sweep_name(SweepParam p);
SweepParam parse_sweep(std::string_view name); // throws ConfigError

// Copy of ctx with the sweep parameter set to value.
SchemeContext apply_sweep(const SchemeContext &ctx, SweepParam param, double value);

struct CrbSettings
{
    std::optional<int> c_index; // zero-based
    int fading_draws = 100000; // 0 = nominal unit-fading bound
};

struct ExperimentPlan
{
    SchemeContext base;
    CrbSettings crb;
    SweepParam sweep = SweepParam::none;
    std::vector<double> sweep_values; // a single NaN-free placeholder when sweep == none
    std::vector<SchemeId> schemes;
    int trials = 1000;
    std::uint64_t seed = 1;
    std::optional<std::filesystem::path> output_csv;
    int workers = 0; // 0 = hardware concurrency

    void validate() const;
};

struct ResultRow
{
    std::string scheme;
    std::string sweep_param;
    double sweep_value = 0.0;
    double rmse_deg = 0.0;
    double p_success = 0.0;
    double mean_rx_power_dbm = 0.0;
    double crb_deg2 = 0.0; // NaN when not attached
    int trials = 0;
    std::uint64_t seed = 0;

    bool operator==(const ResultRow &) const;
};

// Side data that the CSV does not carry.
struct RowDiagnostics
{
    double rmse_stderr_deg = 0.0;
    int failed_trials = 0;
    int degenerate_trials = 0;
    std::vector<double> errors_rad; // per successful trial, in trial order
};

struct ExperimentResult
{
    std::vector<ResultRow> rows;
    std::vector<RowDiagnostics> diagnostics; // parallel to rows when produced by run_experiment
};

// Seed of trial `trial` at sweep index `point` for `scheme`.
std::uint64_t experiment_trial_seed(const ExperimentPlan &plan, SchemeId scheme, std::size_t point, int trial);

// One trial in isolation; returns theta_hat - truth [rad].
double run_single_trial(const SchemeChannel &channel, std::uint64_t seed);

// Worker count from IRSSENSE_WORKERS, else hardware concurrency; an explicit
// positive request wins over both.
int resolve_workers(int requested);

ExperimentResult run_experiment(const ExperimentPlan &plan);

// Fading-averaged closed-form CRB for the proposed scheme [rad^2].
double proposed_crb(const ScenarioConfig &cfg, const CrbSettings &crb, std::uint64_t seed);

void write_results(const ExperimentResult &result, std::ostream &out);
void emit_results(const ExperimentResult &result, const std::filesystem::path &path);
ExperimentResult parse_results(std::istream &in);
ExperimentResult parse_results_csv(const std::filesystem::path &path);

} // namespace irssense
