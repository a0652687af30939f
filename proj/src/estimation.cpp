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

#include "irssense/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

namespace irssense
{

CVec UlaManifold::response(double theta) const
{
    return steering_vector(2.0 * spacing_over_wavelength * std::sin(theta), size);
}

CMat sample_covariance(const CMat &y)
{
    if (y.cols() < 1)
        throw ConfigError("sample covariance needs at least one snapshot");
    CMat r = y * y.adjoint() / static_cast<double>(y.cols());
    return 0.5 * (r + r.adjoint());
}

MusicDecomposition decompose(const CMat &r_y)
{
    const Eigen::Index m = r_y.rows();
    if (m < 2 || r_y.cols() != m)
        throw ConfigError(fmt::format("MUSIC needs a square covariance with M >= 2 (got {}x{})", r_y.rows(), r_y.cols()));

    Eigen::SelfAdjointEigenSolver<CMat> es(r_y);
    if (es.info() != Eigen::Success)
        throw ComputationError("Hermitian eigendecomposition did not converge");

    // Eigen returns ascending eigenvalues; reverse to descending.
    MusicDecomposition d;
    d.r_y = r_y;
    d.eigenvalues = es.eigenvalues().reverse();
    const CMat vecs = es.eigenvectors().rowwise().reverse();
    d.signal_basis = vecs.col(0);
    d.noise_basis = vecs.rightCols(m - 1);

    const double scale = std::max(std::abs(d.eigenvalues(0)), std::numeric_limits<double>::min());
    d.degenerate = (d.eigenvalues(0) - d.eigenvalues(1)) <= 1e-12 * scale;
    return d;
}

RVec angle_grid_deg(double lo_deg, double hi_deg, double step_deg)
{
    if (!(step_deg > 0.0) || !(hi_deg >= lo_deg))
        throw ConfigError("angle grid needs hi >= lo and a positive step");
    const auto n = static_cast<Eigen::Index>(std::floor((hi_deg - lo_deg) / step_deg + 1e-9)) + 1;
    RVec g(n);
    for (Eigen::Index i = 0; i < n; ++i)
        g(i) = deg_to_rad(lo_deg + static_cast<double>(i) * step_deg);
    return g;
}

namespace
{
Eigen::Index argmax_lowest(const RVec &v)
{
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < v.size(); ++i)
        if (v(i) > v(best))
            best = i;
    return best;
}

double parabolic_offset(const RVec &s, Eigen::Index k)
{
    if (k == 0 || k + 1 >= s.size())
        return 0.0;
    const double a = s(k - 1), b = s(k), c = s(k + 1);
    const double den = a - 2.0 * b + c;
    return den == 0.0 ? 0.0 : 0.5 * (a - c) / den;
}
} // namespace

ManifoldTable ManifoldTable::build(const UlaManifold &manifold, const RVec &grid)
{
    if (grid.size() < 1)
        throw ConfigError("MUSIC search grid is empty");
    ManifoldTable t;
    t.grid = grid;
    t.responses.resize(manifold.size, grid.size());
    for (Eigen::Index i = 0; i < grid.size(); ++i)
        t.responses.col(i) = manifold.response(grid(i));
    return t;
}

DoaEstimate music_spectrum(const MusicDecomposition &decomp, const ManifoldTable &table, const MusicOptions &opts)
{
    if (table.grid.size() < 1)
        throw ConfigError("MUSIC search grid is empty");
    if (table.responses.rows() != decomp.noise_basis.rows())
        throw ConfigError("manifold size does not match the covariance dimension");

    DoaEstimate est;
    est.grid = table.grid;
    const RVec den = (decomp.noise_basis.adjoint() * table.responses).colwise().squaredNorm().transpose();
    est.spectrum = den.unaryExpr([](double d) { return 1.0 / std::max(d, std::numeric_limits<double>::min()); });
    est.peak_index = argmax_lowest(est.spectrum);
    est.peak_value = est.spectrum(est.peak_index);
    est.theta_hat = table.grid(est.peak_index);
    if (opts.refine_peak && table.grid.size() > 2)
    {
        const double step = table.grid(1) - table.grid(0);
        est.theta_hat += parabolic_offset(est.spectrum, est.peak_index) * step;
    }
    est.degenerate = decomp.degenerate;
    return est;
}

DoaEstimate music_spectrum(const MusicDecomposition &decomp, const UlaManifold &manifold, const RVec &grid,
                           const MusicOptions &opts)
{
    if (manifold.size != decomp.noise_basis.rows())
        throw ConfigError("manifold size does not match the covariance dimension");
    return music_spectrum(decomp, ManifoldTable::build(manifold, grid), opts);
}

DoaEstimate music_estimate(const CMat &y, const UlaManifold &manifold, const RVec &grid, const MusicOptions &opts)
{
    return music_spectrum(decompose(sample_covariance(y)), manifold, grid, opts);
}

CMat beam_training_snapshots(const BeamTrainingScene &scene, const RVec &codebook_grid, Rng &rng, NoiseMode noise)
{
    if (codebook_grid.size() < 1)
        throw ConfigError("beam codebook is empty");
    const double two_s = 2.0 * scene.spacing_over_wavelength;
    const double src = std::sin(scene.theta_source);
    const CVec incident = steering_vector(two_s * (std::sin(scene.theta_target) + src), scene.n_elements);

    CMat sweep(scene.rx_response.size(), codebook_grid.size());
    for (Eigen::Index k = 0; k < codebook_grid.size(); ++k)
    {
        const CVec beam = steering_vector(two_s * (std::sin(codebook_grid(k)) + src), scene.n_elements).conjugate();
        // The beam is applied on the way out and again on the way back.
        const Complex s = incident.transpose() * beam;
        sweep.col(k) = (scene.round_trip_gain * s * s) * scene.rx_response;
        if (noise == NoiseMode::on)
            sweep.col(k) += complex_normal_vector(rng, sweep.rows(), scene.noise_power);
    }
    return sweep;
}

DoaEstimate beam_energy_argmax(const CMat &sweep, const RVec &codebook_grid)
{
    if (codebook_grid.size() < 1 || sweep.cols() != codebook_grid.size())
        throw ConfigError("beam sweep and codebook sizes differ");
    DoaEstimate est;
    est.grid = codebook_grid;
    est.spectrum = sweep.colwise().squaredNorm().transpose();
    est.peak_index = argmax_lowest(est.spectrum);
    est.peak_value = est.spectrum(est.peak_index);
    est.theta_hat = codebook_grid(est.peak_index);
    return est;
}

DoaEstimate beam_training_estimate(const BeamTrainingScene &scene, const RVec &codebook_grid, Rng &rng,
                                   NoiseMode noise)
{
    return beam_energy_argmax(beam_training_snapshots(scene, codebook_grid, rng, noise), codebook_grid);
}

AccuracyMetrics metrics_from_errors(const std::vector<double> &errors, double delta)
{
    if (errors.empty())
        throw ConfigError("metrics need at least one estimate");
    AccuracyMetrics m;
    m.count = errors.size();
    const double n = static_cast<double>(errors.size());
    double sum_sq = 0.0, sum_4 = 0.0;
    std::size_t hits = 0;
    for (double e : errors)
    {
        const double e2 = e * e;
        sum_sq += e2;
        sum_4 += e2 * e2;
        // 1e-12 absorbs the rounding of theta +/- delta at the boundary.
        if (std::abs(e) <= delta + 1e-12)
            ++hits;
    }
    const double mse = sum_sq / n;
    m.rmse = std::sqrt(mse);
    m.p_success = static_cast<double>(hits) / n;
    if (errors.size() > 1 && m.rmse > 0.0)
    {
        const double var_e2 = std::max(0.0, (sum_4 / n - mse * mse) * n / (n - 1.0));
        m.rmse_stderr = std::sqrt(var_e2 / n) / (2.0 * m.rmse);
    }
    return m;
}

AccuracyMetrics success_and_rmse(const std::vector<double> &estimates, double truth, double delta)
{
    std::vector<double> errors;
    errors.reserve(estimates.size());
    for (double e : estimates)
        errors.push_back(e - truth);
    return metrics_from_errors(errors, delta);
}

} // namespace irssense
