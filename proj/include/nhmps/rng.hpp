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

#pragma once

#include <cstdint>

namespace nhmps {

enum class DrawPurpose : std::uint64_t { Probe = 1, Threshold = 2 }; // p and m draws

// Counter-based stream: every draw is a pure function of its key.
struct RngPolicy {
    std::uint64_t master_seed = 0;
    std::uint64_t trajectory_id = 0;

    std::uint64_t bits(std::uint64_t j, std::uint64_t x, DrawPurpose purpose) const;
    // Uniform in the open interval (0, 1).
    double uniform(std::uint64_t j, std::uint64_t x, DrawPurpose purpose) const;
};

std::uint64_t splitmix64(std::uint64_t x);

} // namespace nhmps
