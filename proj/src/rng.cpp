// Copyright 2026 The nhmps Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nhmps/rng.hpp"

namespace nhmps {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t RngPolicy::bits(std::uint64_t j, std::uint64_t x, DrawPurpose purpose) const {
    std::uint64_t h = splitmix64(master_seed);
    h = splitmix64(h ^ trajectory_id);
    h = splitmix64(h ^ j);
    h = splitmix64(h ^ x);
    return splitmix64(h ^ static_cast<std::uint64_t>(purpose));
}

double RngPolicy::uniform(std::uint64_t j, std::uint64_t x, DrawPurpose purpose) const {
    return (static_cast<double>(bits(j, x, purpose) >> 11) + 0.5) * 0x1.0p-53;
}

} // namespace nhmps
