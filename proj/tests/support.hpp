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

// Hand-rolled generators for randomized property tests.

#include <algorithm>
#include <complex>
#include <random>
#include <vector>

#include "statconc/fock.hpp"

namespace statconc::testing {

inline Complex random_amplitude(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    return {g(rng), g(rng)};
}

/// A small mode universe spanning both parties, both pairs, two slots and all
/// locations, so sign bookkeeping crosses every field of the order.
inline std::vector<Mode> mode_universe() {
    return {Mode::source(Party::A, Pair::L, 1, Spin::Up),    Mode::source(Party::A, Pair::R, 2, Spin::Down),
            Mode::source(Party::B, Pair::L, 1, Spin::Up),    Mode::source(Party::B, Pair::L, 1, Spin::Down),
            Mode::detector(Location::DetectorLeft, 1, Spin::Up), Mode::detector(Location::DetectorRight, 1, Spin::Down),
            Mode::source(Party::B, Pair::L, 2, Spin::Down),  Mode::source(Party::B, Pair::R, 1, Spin::Up),
            Mode::source(Party::B, Pair::R, 2, Spin::Up)};
}

inline Mode random_mode(std::mt19937_64& rng, const std::vector<Mode>& modes) {
    return modes[std::uniform_int_distribution<std::size_t>(0, modes.size() - 1)(rng)];
}

/// Random basis state with `particles` particles drawn from `modes`.
inline BasisState random_basis(std::mt19937_64& rng, Statistics st, int particles, const std::vector<Mode>& modes) {
    std::vector<Occupation> occ;
    if (st == Statistics::Fermion) {
        std::vector<Mode> pool = modes;
        std::shuffle(pool.begin(), pool.end(), rng);
        pool.resize(static_cast<std::size_t>(particles));
        std::sort(pool.begin(), pool.end());
        for (const auto& m : pool) occ.push_back({m, 1});
    } else {
        std::vector<Mode> picks;
        for (int i = 0; i < particles; ++i) picks.push_back(random_mode(rng, modes));
        std::sort(picks.begin(), picks.end());
        for (const auto& m : picks) {
            if (!occ.empty() && occ.back().mode == m)
                ++occ.back().count;
            else
                occ.push_back({m, 1});
        }
    }
    return BasisState(st, std::move(occ));
}

/// Random (unnormalized) superposition of up to `max_terms` basis states.
inline SparseState random_state(std::mt19937_64& rng, Statistics st, int particles,
                                const std::vector<Mode>& modes = mode_universe(), int max_terms = 5) {
    SparseState::TermMap terms;
    const int count = std::uniform_int_distribution<int>(1, max_terms)(rng);
    for (int i = 0; i < count; ++i) terms[random_basis(rng, st, particles, modes)] += random_amplitude(rng);
    return SparseState(st, std::move(terms));
}

inline SparseState random_normalized(std::mt19937_64& rng, Statistics st, int particles,
                                     const std::vector<Mode>& modes = mode_universe(), int max_terms = 5) {
    return normalize(random_state(rng, st, particles, modes, max_terms)).first;
}

/// Random state whose terms each hold exactly one Bob particle in arm l and
/// one in arm r of `slot`, plus `spectators` particles on other modes.
inline SparseState random_two_arm_state(std::mt19937_64& rng, Statistics st, int slot, int spectators = 2,
                                        int max_terms = 5) {
    const std::vector<Mode> others = {Mode::source(Party::A, Pair::L, 1, Spin::Up),
                                      Mode::source(Party::A, Pair::L, 1, Spin::Down),
                                      Mode::source(Party::A, Pair::R, 1, Spin::Up),
                                      Mode::source(Party::B, Pair::L, slot + 1, Spin::Up),
                                      Mode::source(Party::B, Pair::R, slot + 1, Spin::Down)};
    std::bernoulli_distribution coin(0.5);
    SparseState::TermMap terms;
    const int count = std::uniform_int_distribution<int>(1, max_terms)(rng);
    for (int i = 0; i < count; ++i) {
        const BasisState rest = random_basis(rng, st, spectators, others);
        std::vector<Occupation> occ(rest.occupied().begin(), rest.occupied().end());
        occ.push_back({Mode::source(Party::B, Pair::L, slot, coin(rng) ? Spin::Up : Spin::Down), 1});
        occ.push_back({Mode::source(Party::B, Pair::R, slot, coin(rng) ? Spin::Up : Spin::Down), 1});
        std::sort(occ.begin(), occ.end());
        terms[BasisState(st, std::move(occ))] += random_amplitude(rng);
    }
    return normalize(SparseState(st, std::move(terms))).first;
}

/// Max |a_i - b_i| over the union of basis states.
inline double max_difference(const SparseState& a, const SparseState& b) {
    double d = 0.0;
    for (const auto& [basis, amp] : a.terms()) d = std::max(d, std::abs(amp - b.amplitude(basis)));
    for (const auto& [basis, amp] : b.terms()) d = std::max(d, std::abs(amp - a.amplitude(basis)));
    return d;
}

}  // namespace statconc::testing
