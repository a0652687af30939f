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
#include <random>

#include "irssense/types.hpp"

namespace irssense
{

using Rng = std::mt19937_64;

// Circularly symmetric complex Gaussian sample, CN(0, variance).
inline Complex complex_normal(Rng &rng, double variance = 1.0)
{
    std::normal_distribution<double> nd(0.0, std::sqrt(variance / 2.0));
    const double re = nd(rng);
    const double im = nd(rng);
    return {re, im};
}

inline CVec complex_normal_vector(Rng &rng, Eigen::Index n, double variance = 1.0)
{
    CVec v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v(i) = complex_normal(rng, variance);
    return v;
}

// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed of one Monte Carlo trial. Every (scheme, sweep point, trial) triple gets
// its own stream so a single trial can be re-run in isolation:
//   seed = mix64(mix64(mix64(master ^ scheme_code) ^ point) ^ trial)
constexpr std::uint64_t trial_seed(std::uint64_t master, std::uint64_t scheme_code, std::uint64_t point,
                                   std::uint64_t trial)
{
    return mix64(mix64(mix64(master ^ scheme_code) ^ point) ^ trial);
}

} // namespace irssense
