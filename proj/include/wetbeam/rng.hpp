// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

namespace wetbeam {

/// splitmix64 finalizer; used to derive independent stream seeds.
inline std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for one (sweep point, realization) cell. Independent of evaluation order.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t sweep_index, std::uint64_t realization)
{
    return mix64(mix64(mix64(master) ^ sweep_index) ^ realization);
}

/// Uniform double in [0, 1) with 53 random bits; platform independent, unlike
/// std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& gen)
{
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

} // namespace wetbeam
