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

// The n-round concentration protocol on Bob's side, and the closed-form
// probabilities it is checked against.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "statconc/entropy.hpp"
#include "statconc/fock.hpp"
#include "statconc/optics.hpp"

namespace statconc {

/// Largest supported number of particles per party and pair.
inline constexpr int kMaxSlots = 10;

class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

struct ProtocolConfig {
    Complex alpha{1.0 / std::numbers::sqrt2, 0.0};
    Complex beta{1.0 / std::numbers::sqrt2, 0.0};
    int n = 6;
    Statistics statistics = Statistics::Fermion;
    DetectorModel detector = DetectorModel::NonAbsorbing;
    bool apply_flip = true;

    /// alpha = sqrt(alpha2) e^{i phase}, beta = sqrt(1 - alpha2).
    static ProtocolConfig from_alpha2(double alpha2, int n, double alpha_phase = 0.0) {
        if (!(alpha2 >= 0.0 && alpha2 <= 1.0)) throw ConfigError("alpha2 must lie in [0, 1]");
        ProtocolConfig c;
        c.alpha = std::polar(std::sqrt(alpha2), alpha_phase);
        c.beta = Complex{std::sqrt(1.0 - alpha2), 0.0};
        c.n = n;
        return c;
    }

    void validate() const {
        if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > 1e-12)
            throw ConfigError("|alpha|^2 + |beta|^2 must equal 1");
        if (n < 1 || n > kMaxSlots)
            throw ConfigError("n must lie in [1, " + std::to_string(kMaxSlots) + "]");
    }

    /// Number of measured slots: all n with non-absorbing detectors, n - 1
    /// when the detected particles are absorbed.
    int rounds() const { return detector == DetectorModel::Absorbing ? n - 1 : n; }
};

struct RoundRecord {
    int slot = 0;
    double kept_probability = 0.0;
    double cumulative_probability = 0.0;
    double post_state_norm_check = 0.0;
    /// Conditional probabilities of Antibunch, BunchLeft, BunchRight.
    std::array<double, 3> outcome_probabilities{};
};

struct ProtocolReport {
    ProtocolConfig config;
    std::vector<RoundRecord> rounds;
    SparseState final_state{Statistics::Fermion};
    double cumulative_probability = 1.0;
    double closed_form_cumulative = 1.0;
    double final_entropy_ebits = 0.0;
    /// Asymptotic e-bits per consumed input pair (limit success probability
    /// times limit-state entropy, over two input pairs).
    double efficiency = 0.0;
    /// Finite-n counterpart of the efficiency: cumulative_probability / 2.
    double finite_yield = 0.0;
};

namespace detail {

inline void check_normalized(Complex alpha, Complex beta) {
    if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > 1e-12)
        throw ConfigError("|alpha|^2 + |beta|^2 must equal 1");
}

struct Branch {
    Complex coefficient;
    std::vector<Mode> ops;
};

/// alpha |A up...up>|B down...down> + beta |A down...down>|B up...up> for one
/// pair, as ordered creation strings (Alice string first, slots ascending).
inline std::vector<Branch> pair_branches(Complex alpha, Complex beta, int n, Pair pair) {
    auto string = [&](Spin alice) {
        std::vector<Mode> ops;
        for (int i = 1; i <= n; ++i) ops.push_back(Mode::source(Party::A, pair, i, alice));
        for (int i = 1; i <= n; ++i) ops.push_back(Mode::source(Party::B, pair, i, flipped(alice)));
        return ops;
    };
    return {{alpha, string(Spin::Up)}, {beta, string(Spin::Down)}};
}

}  // namespace detail

inline SparseState build_pair_state(Complex alpha, Complex beta, int n, Pair pair, Statistics statistics) {
    detail::check_normalized(alpha, beta);
    if (n < 1) throw ConfigError("n must be >= 1");
    std::vector<std::pair<Complex, SparseState>> parts;
    for (const auto& b : detail::pair_branches(alpha, beta, n, pair))
        parts.emplace_back(b.coefficient, create_string(vacuum(statistics), b.ops));
    return scale_add(parts);
}

/// |phi>_L (x) |phi>_R as the product of the two pairs' creation strings
/// (L string to the left of the R string) acting on the vacuum.
inline SparseState build_total_state(const ProtocolConfig& config) {
    config.validate();
    std::vector<std::pair<Complex, SparseState>> parts;
    for (const auto& l : detail::pair_branches(config.alpha, config.beta, config.n, Pair::L)) {
        for (const auto& r : detail::pair_branches(config.alpha, config.beta, config.n, Pair::R)) {
            std::vector<Mode> ops = l.ops;
            ops.insert(ops.end(), r.ops.begin(), r.ops.end());
            parts.emplace_back(l.coefficient * r.coefficient, create_string(vacuum(config.statistics), ops));
        }
    }
    return scale_add(parts);
}

inline double closed_form_p1(Complex alpha, Complex beta) {
    const double a2 = std::norm(alpha), b2 = std::norm(beta);
    return a2 * a2 / 2.0 + b2 * b2 / 2.0 + 2.0 * a2 * b2;
}

/// Probability that the first n rounds all succeed, N_n^-2.
inline double closed_form_cumulative(Complex alpha, Complex beta, int n) {
    const double a2 = std::norm(alpha), b2 = std::norm(beta);
    return (a2 * a2 + b2 * b2) / std::ldexp(1.0, n) + 2.0 * a2 * b2;
}

/// Same without the spin flip: equal-spin branches always pass and the two
/// opposite-spin branches pass with probability 1/2 per round.
inline double closed_form_cumulative_without_flip(Complex alpha, Complex beta, int n) {
    const double a2 = std::norm(alpha), b2 = std::norm(beta);
    return a2 * a2 + b2 * b2 + 2.0 * a2 * b2 / std::ldexp(1.0, n);
}

inline double closed_form_round_probability(Complex alpha, Complex beta, int k) {
    return closed_form_cumulative(alpha, beta, k) / closed_form_cumulative(alpha, beta, k - 1);
}

/// |alpha beta|^2: half the limit success probability 2|alpha beta|^2.
inline double closed_form_efficiency(Complex alpha, Complex beta) { return std::norm(alpha) * std::norm(beta); }

/// Entropy of the n -> infinity post-selected state.
inline double closed_form_limit_entropy(Complex alpha, Complex beta, bool apply_flip) {
    const double a2 = std::norm(alpha), b2 = std::norm(beta);
    if (apply_flip) return a2 * b2 > 0.0 ? 1.0 : 0.0;
    return binary_entropy(a2 * a2 / (a2 * a2 + b2 * b2));
}

inline double closed_form_limit_yield(Complex alpha, Complex beta, bool apply_flip) {
    const double a2 = std::norm(alpha), b2 = std::norm(beta);
    const double p_limit = apply_flip ? 2.0 * a2 * b2 : a2 * a2 + b2 * b2;
    return p_limit * closed_form_limit_entropy(alpha, beta, apply_flip) / 2.0;
}

inline std::vector<int> default_slot_order(int count) {
    std::vector<int> order(static_cast<std::size_t>(count));
    std::iota(order.begin(), order.end(), 1);
    return order;
}

/// Runs the protocol measuring slots in `slot_order`, which must be a
/// permutation of 1..n. Under absorbing detectors only the first n - 1 entries
/// are measured.
inline ProtocolReport run_protocol(const ProtocolConfig& config, const std::vector<int>& slot_order) {
    config.validate();
    {
        std::vector<int> sorted = slot_order;
        std::sort(sorted.begin(), sorted.end());
        if (sorted != default_slot_order(config.n)) throw ConfigError("slot order must be a permutation of 1..n");
    }

    ProtocolReport report;
    report.config = config;
    SparseState state = build_total_state(config);
    if (config.apply_flip) {
        const std::set<int> all(slot_order.begin(), slot_order.end());
        state = flip_spins(state, all);
    }

    double cumulative = 1.0;
    for (int r = 0; r < config.rounds(); ++r) {
        const int slot = slot_order[static_cast<std::size_t>(r)];
        state = beam_splitter(state, slot);
        const auto results = measure_path(state, slot, config.detector);
        MeasurementResult kept = post_select(results, config.statistics, config.detector);

        RoundRecord rec;
        rec.slot = slot;
        for (const auto& res : results) rec.outcome_probabilities[static_cast<std::size_t>(res.outcome.kind)] = res.probability;
        rec.kept_probability = kept.probability;
        cumulative *= kept.probability;
        rec.cumulative_probability = cumulative;
        rec.post_state_norm_check = kept.post_state.norm_squared();
        report.rounds.push_back(rec);
        state = std::move(kept.post_state);
    }

    const int rounds = config.rounds();
    report.cumulative_probability = cumulative;
    report.closed_form_cumulative = config.apply_flip
                                        ? closed_form_cumulative(config.alpha, config.beta, rounds)
                                        : closed_form_cumulative_without_flip(config.alpha, config.beta, rounds);
    report.final_entropy_ebits = entanglement_entropy(state, Party::A);
    report.efficiency = closed_form_limit_yield(config.alpha, config.beta, config.apply_flip);
    report.finite_yield = cumulative / 2.0;
    report.final_state = std::move(state);
    return report;
}

inline ProtocolReport run_protocol(const ProtocolConfig& config) {
    config.validate();
    return run_protocol(config, default_slot_order(config.n));
}

/// True when Alice's L and R spin strings agree (the alpha^2 and beta^2
/// branches); false for the two alpha*beta branches.
inline bool is_square_branch(const BasisState& basis) {
    std::optional<Spin> left, right;
    for (const auto& o : basis.occupied()) {
        if (o.mode.party != Party::A) continue;
        (o.mode.pair == Pair::L ? left : right) = o.mode.spin;
    }
    return left && right && *left == *right;
}

/// Weight of the final state that vanishes in the n -> infinity limit state:
/// the alpha^2/beta^2 branches with the flip applied, the alpha*beta branches
/// without it. Decays as 2^-n in both cases.
inline double limit_state_check(const ProtocolReport& report) {
    double residual = 0.0, total = 0.0;
    for (const auto& [basis, amp] : report.final_state.terms()) {
        const double w = std::norm(amp);
        total += w;
        if (is_square_branch(basis) == report.config.apply_flip) residual += w;
    }
    return residual / total;
}

}  // namespace statconc
