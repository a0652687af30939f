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

#include <doctest.h>

#include <random>

#include "irssense/geometry.hpp"
#include "oracles.hpp"

using namespace irssense;

TEST_CASE("steering vector matches the centered-array definition")
{
    for (int n : {1, 2, 3, 8, 63, 64})
        for (double phase : {-1.0, -0.37, 0.0, 0.5, 0.999})
        {
            const CVec u = steering_vector(phase, n);
            const CVec ref = oracle::centered_ula(phase, n);
            CHECK((u - ref).cwiseAbs().maxCoeff() < 1e-13);
            CHECK(std::abs(u.squaredNorm() - n) < 1e-12);
        }
}

TEST_CASE("steering vector rejects empty arrays")
{
    CHECK_THROWS_AS(steering_vector(0.1, 0), ConfigError);
}

TEST_CASE("centered arrays are conjugate symmetric about the centroid")
{
    // u_m * u_{n+1-m} = 1 for every m, which is what makes derivatives orthogonal.
    const int n = 9;
    const CVec u = steering_vector(0.731, n);
    for (int m = 0; m < n; ++m)
        CHECK(std::abs(u(m) * u(n - 1 - m) - 1.0) < 1e-13);
}

TEST_CASE("upa response is the horizontal-major Kronecker product")
{
    ArrayLayout L;
    L.n_h = 4;
    L.n_v = 3;
    const double th = 0.4, tv = 1.1;
    const CVec a = upa_response(th, tv, L);
    const CVec uh = oracle::centered_ula(2.0 * L.d_i / L.wavelength * std::sin(th) * std::sin(tv), L.n_h);
    const CVec uv = oracle::centered_ula(2.0 * L.d_i / L.wavelength * std::cos(tv), L.n_v);
    for (int p = 0; p < L.n_h; ++p)
        for (int v = 0; v < L.n_v; ++v)
            CHECK(std::abs(a(p * L.n_v + v) - uh(p) * uv(v)) < 1e-13);
}

TEST_CASE("combined manifold is the element-wise product of the two ULA responses")
{
    ArrayLayout L;
    AngleSet A;
    A.theta_ci_h = 0.3;
    A.theta_ci_v = 1.2;
    A.theta_it_v = 1.4;
    for (double th : {-1.2, -0.1, 0.5, 1.3})
    {
        A.theta_it_h = th;
        const CVec q = combined_manifold(th, A, L);
        const CVec a_it = upa_response(th, A.theta_it_v, L);
        const CVec a_ci = upa_response(A.theta_ci_h, A.theta_ci_v, L);
        CHECK((q - a_it.cwiseProduct(a_ci)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("manifold derivatives agree with central differences")
{
    ArrayLayout L;
    L.n_h = 16;
    L.m = 6;
    AngleSet A;
    A.theta_ci_h = 0.2;
    A.theta_it_v = 1.3;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ud(-1.4, 1.4);
    for (int k = 0; k < 20; ++k)
    {
        const double th = ud(rng);
        const auto d = manifold_derivatives(th, A, L);
        const CVec b_fd =
            oracle::central_difference([&](double x) -> CVec { return sensor_response(x, L); }, th, 1e-6);
        const CVec q_fd =
            oracle::central_difference([&](double x) -> CVec { return combined_manifold(x, A, L); }, th, 1e-6);
        CHECK((d.b_dot - b_fd).norm() < 1e-7 * std::max(1.0, b_fd.norm()));
        CHECK((d.q_dot - q_fd).norm() < 1e-7 * std::max(1.0, q_fd.norm()));
    }
}

TEST_CASE("derivatives are orthogonal to the response at the array centroid")
{
    ArrayLayout L;
    AngleSet A;
    for (int k = 0; k <= 180; ++k)
    {
        const double th = deg_to_rad(-90.0 + k);
        const auto d = manifold_derivatives(th, A, L);
        CHECK(std::abs(sensor_response(th, L).dot(d.b_dot)) < 1e-10);
        CHECK(std::abs(combined_manifold(th, A, L).dot(d.q_dot)) < 1e-10);
    }
}

TEST_CASE("aligned vertical reflection co-phases the vertical factor")
{
    ArrayLayout L;
    L.n_v = 5;
    AngleSet A;
    A.theta_ci_v = 1.0;
    A.theta_it_v = 1.3;
    const CVec phi_v = aligned_vertical_reflection(A, L);
    const CVec v_it = oracle::centered_ula(2.0 * L.d_i / L.wavelength * std::cos(A.theta_it_v), L.n_v);
    const CVec v_ci = oracle::centered_ula(2.0 * L.d_i / L.wavelength * std::cos(A.theta_ci_v), L.n_v);
    Complex s = 0.0;
    for (int v = 0; v < L.n_v; ++v)
        s += v_it(v) * phi_v(v) * v_ci(v);
    CHECK(std::abs(s - static_cast<double>(L.n_v)) < 1e-12);
}

TEST_CASE("layout and angle validation")
{
    ArrayLayout L;
    L.m = 0;
    CHECK_THROWS_AS(L.validate(), ConfigError);
    L = {};
    L.wavelength = 0.0;
    CHECK_THROWS_AS(L.validate(), ConfigError);
    AngleSet A;
    A.theta_it_h = 2.0;
    CHECK_THROWS_AS(A.validate(), ConfigError);
}
