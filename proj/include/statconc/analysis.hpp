// Copyright 2026 The statconc Authors
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

// Efficiency comparison against other concentration schemes, and a sampling
// check of the exact measurement statistics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "statconc/entropy.hpp"
#include "statconc/protocol.hpp"

namespace statconc {

struct EfficiencyTable {
    double alpha_sq = 0.0;
    /// |alpha beta|^2.
    double protocol = 0.0;
    /// 2 min(|alpha|^2, |beta|^2).
    double procrustean = 0.0;
    /// Binary entropy of |alpha|^2.
    double asymptotic = 0.0;
};

inline EfficiencyTable efficiency_row(double alpha_sq) {
    const double beta_sq = 1.0 - alpha_sq;
    return {alpha_sq, alpha_sq * beta_sq, 2.0 * std::min(alpha_sq, beta_sq), binary_entropy(alpha_sq)};
}

inline std::vector<EfficiencyTable> efficiency_table(const std::vector<double>& alpha_grid) {
    std::vector<EfficiencyTable> rows;
    rows.reserve(alpha_grid.size());
    for (double a : alpha_grid) {
        if (!(a > 0.0 && a < 1.0)) throw ConfigError("efficiency grid values must lie in (0, 1)");
        rows.push_back(efficiency_row(a));
    }
    return rows;
}

struct McReport {
    std::int64_t trials = 0;
    std::int64_t successes = 0;
    double estimate = 0.0;
    double std_error = 0.0;
    std::uint64_t seed = 0;
};

/// Samples the sequential path measurements of `config` and counts runs in
/// which every round lands in the kept class.
///
/// A run stops at its first discarded outcome, so the only conditional
/// distributions ever sampled are those along the all-kept path; these are
/// taken once from the exact engine. Each outcome is drawn by inverse CDF
/// from one mt19937_64 stream seeded with `seed`.
inline McReport monte_carlo(const ProtocolConfig& config, std::int64_t trials, std::uint64_t seed) {
    if (trials < 1) throw ConfigError("trials must be >= 1");
    const ProtocolReport exact = run_protocol(config);

    std::mt19937_64 rng(seed);
    auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

    std::int64_t successes = 0;
    for (std::int64_t t = 0; t < trials; ++t) {
        bool ok = true;
        for (const auto& round : exact.rounds) {
            const double u = uniform();
            const auto& p = round.outcome_probabilities;
            OutcomeKind kind = OutcomeKind::BunchRight;
            if (u < p[0])
                kind = OutcomeKind::Antibunch;
            else if (u < p[0] + p[1])
                kind = OutcomeKind::BunchLeft;
            if (!is_kept(kind, config.statistics)) {
                ok = false;
                break;
            }
        }
        if (ok) ++successes;
    }

    McReport r;
    r.trials = trials;
    r.successes = successes;
    r.estimate = static_cast<double>(successes) / static_cast<double>(trials);
    r.std_error = std::sqrt(r.estimate * (1.0 - r.estimate) / static_cast<double>(trials));
    r.seed = seed;
    return r;
}

}  // namespace statconc
