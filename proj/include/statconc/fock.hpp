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

// Sparse second-quantized states over a small, fixed set of labelled modes.
//
// A basis state is stored as the canonically sorted list of occupied modes and
// stands for the ordered operator product
//
//     |m1 m2 ... mk> = a+_{m1} a+_{m2} ... a+_{mk} |0>,   m1 < m2 < ... < mk
//
// (bosonic occupations c appear as (a+_m)^c / sqrt(c!)). All fermionic signs
// are relative to the total order on Mode defined below.

#include <algorithm>
#include <cmath>
#include <complex>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace statconc {

using Complex = std::complex<double>;

/// Amplitudes below this magnitude are dropped after every linear combination.
inline constexpr double kPruneThreshold = 1e-14;
/// Tolerance used to decide whether a state counts as normalized.
inline constexpr double kNormTolerance = 1e-12;

enum class Statistics : std::uint8_t { Fermion, Boson };
enum class Party : std::uint8_t { A, B };
enum class Pair : std::uint8_t { L, R };
enum class Location : std::uint8_t { SourceArm, DetectorLeft, DetectorRight, Absorbed };
enum class Spin : std::uint8_t { Up, Down };

inline Spin flipped(Spin s) { return s == Spin::Up ? Spin::Down : Spin::Up; }

inline const char* to_string(Statistics s) { return s == Statistics::Fermion ? "fermion" : "boson"; }
inline const char* to_string(Party p) { return p == Party::A ? "A" : "B"; }
inline const char* to_string(Pair p) { return p == Pair::L ? "L" : "R"; }
inline const char* to_string(Spin s) { return s == Spin::Up ? "up" : "down"; }
inline const char* to_string(Location l) {
    switch (l) {
    case Location::SourceArm: return "src";
    case Location::DetectorLeft: return "detL";
    case Location::DetectorRight: return "detR";
    case Location::Absorbed: return "absorbed";
    }
    return "?";
}

class StateError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Operands carry different statistics or particle numbers.
class IncompatibleStates : public StateError {
  public:
    using StateError::StateError;
};

/// The zero vector was used where a physical (normalizable) state is required.
class ZeroStateError : public StateError {
  public:
    using StateError::StateError;
};

/// Single-particle mode label.
///
/// The defaulted comparison gives the canonical order: lexicographic over
/// (party, pair, slot, location, spin), each enum in declaration order. Every
/// Alice mode therefore precedes every Bob mode.
///
/// For location == SourceArm the pair field also names the beam-splitter input
/// arm (pair L feeds arm l, pair R feeds arm r). Detector outputs are shared by
/// both pairs, so detector modes always carry pair == L; use Mode::detector.
struct Mode {
    Party party = Party::A;
    Pair pair = Pair::L;
    int slot = 1;
    Location location = Location::SourceArm;
    Spin spin = Spin::Up;

    auto operator<=>(const Mode&) const = default;

    static Mode source(Party party, Pair pair, int slot, Spin spin) {
        return Mode{party, pair, slot, Location::SourceArm, spin};
    }
    static Mode detector(Location side, int slot, Spin spin) {
        return Mode{Party::B, Pair::L, slot, side, spin};
    }
};

inline std::string to_string(const Mode& m) {
    return std::string(to_string(m.party)) + to_string(m.pair) + std::to_string(m.slot) + ":" +
           to_string(m.location) + ":" + to_string(m.spin);
}

struct Occupation {
    Mode mode;
    int count = 1;

    auto operator<=>(const Occupation&) const = default;
};

/// Occupation-number basis vector.
class BasisState {
  public:
    explicit BasisState(Statistics statistics) : statistics_(statistics) {}

    /// Validates the canonical form: strictly sorted modes, counts >= 1, and
    /// counts == 1 for fermions.
    BasisState(Statistics statistics, std::vector<Occupation> occupied)
        : statistics_(statistics), occupied_(std::move(occupied)) {
        for (std::size_t i = 0; i < occupied_.size(); ++i) {
            const auto& o = occupied_[i];
            if (o.count < 1) throw StateError("BasisState: occupation count must be >= 1");
            if (statistics_ == Statistics::Fermion && o.count != 1)
                throw StateError("BasisState: fermionic mode occupied more than once");
            if (i > 0 && !(occupied_[i - 1].mode < o.mode))
                throw StateError("BasisState: modes not in strictly increasing canonical order");
        }
    }

    Statistics statistics() const { return statistics_; }
    std::span<const Occupation> occupied() const { return occupied_; }
    bool empty() const { return occupied_.empty(); }

    int count(const Mode& mode) const {
        auto it = find(mode);
        return (it != occupied_.end() && it->mode == mode) ? it->count : 0;
    }

    int particle_number() const {
        int n = 0;
        for (const auto& o : occupied_) n += o.count;
        return n;
    }

    /// Number of occupied modes (not particles) strictly before `mode`.
    int modes_before(const Mode& mode) const { return static_cast<int>(find(mode) - occupied_.begin()); }

    /// a+_mode applied to this basis vector: (factor, result), or nullopt when
    /// Pauli exclusion kills it. Fermion factor is (-1)^k with k the number of
    /// occupied modes before `mode`; boson factor is sqrt(count + 1).
    std::optional<std::pair<double, BasisState>> created(const Mode& mode) const {
        BasisState out = *this;
        auto it = out.find_mut(mode);
        if (it != out.occupied_.end() && it->mode == mode) {
            if (statistics_ == Statistics::Fermion) return std::nullopt;
            ++it->count;
            return std::pair{std::sqrt(static_cast<double>(it->count)), std::move(out)};
        }
        const auto k = it - out.occupied_.begin();
        out.occupied_.insert(it, Occupation{mode, 1});
        const double factor = statistics_ == Statistics::Fermion && (k % 2 == 1) ? -1.0 : 1.0;
        return std::pair{factor, std::move(out)};
    }

    /// a_mode applied to this basis vector; adjoint of created().
    std::optional<std::pair<double, BasisState>> annihilated(const Mode& mode) const {
        BasisState out = *this;
        auto it = out.find_mut(mode);
        if (it == out.occupied_.end() || it->mode != mode) return std::nullopt;
        if (statistics_ == Statistics::Boson) {
            const double factor = std::sqrt(static_cast<double>(it->count));
            if (--it->count == 0) out.occupied_.erase(it);
            return std::pair{factor, std::move(out)};
        }
        const auto k = it - out.occupied_.begin();
        out.occupied_.erase(it);
        return std::pair{(k % 2 == 1) ? -1.0 : 1.0, std::move(out)};
    }

    auto operator<=>(const BasisState&) const = default;
    bool operator==(const BasisState&) const = default;

  private:
    std::vector<Occupation>::const_iterator find(const Mode& mode) const {
        return std::lower_bound(occupied_.begin(), occupied_.end(), mode,
                                [](const Occupation& o, const Mode& m) { return o.mode < m; });
    }
    std::vector<Occupation>::iterator find_mut(const Mode& mode) {
        return std::lower_bound(occupied_.begin(), occupied_.end(), mode,
                                [](const Occupation& o, const Mode& m) { return o.mode < m; });
    }

    Statistics statistics_;
    std::vector<Occupation> occupied_;
};

inline std::string to_string(const BasisState& b) {
    std::string s = "|";
    bool first = true;
    for (const auto& o : b.occupied()) {
        if (!first) s += " ";
        first = false;
        s += to_string(o.mode);
        if (o.count > 1) s += "^" + std::to_string(o.count);
    }
    return s + ">";
}

/// Superposition of basis states sharing one statistics and particle number.
/// The zero vector is the empty term map.
class SparseState {
  public:
    using TermMap = std::map<BasisState, Complex>;

    explicit SparseState(Statistics statistics) : statistics_(statistics) {}

    SparseState(Statistics statistics, TermMap terms) : statistics_(statistics), terms_(std::move(terms)) {
        std::optional<int> number;
        for (auto it = terms_.begin(); it != terms_.end();) {
            if (it->first.statistics() != statistics_)
                throw IncompatibleStates("SparseState: basis state has foreign statistics");
            const int n = it->first.particle_number();
            if (number && *number != n)
                throw IncompatibleStates("SparseState: terms with different particle numbers");
            number = n;
            if (std::abs(it->second) < kPruneThreshold)
                it = terms_.erase(it);
            else
                ++it;
        }
    }

    Statistics statistics() const { return statistics_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    std::optional<int> particle_number() const {
        if (terms_.empty()) return std::nullopt;
        return terms_.begin()->first.particle_number();
    }

    Complex amplitude(const BasisState& b) const {
        auto it = terms_.find(b);
        return it == terms_.end() ? Complex{} : it->second;
    }

    double norm_squared() const {
        double s = 0.0;
        for (const auto& [b, a] : terms_) s += std::norm(a);
        return s;
    }

    bool is_normalized(double tol = kNormTolerance) const { return std::abs(norm_squared() - 1.0) <= tol; }

  private:
    Statistics statistics_;
    TermMap terms_;
};

namespace detail {

/// Accumulates amplitudes per basis state and prunes on completion.
class TermAccumulator {
  public:
    explicit TermAccumulator(Statistics statistics) : statistics_(statistics) {}

    void add(const BasisState& b, Complex amp) {
        auto [it, inserted] = terms_.try_emplace(b, amp);
        if (!inserted) it->second += amp;
    }
    void add(BasisState&& b, Complex amp) {
        auto [it, inserted] = terms_.try_emplace(std::move(b), amp);
        if (!inserted) it->second += amp;
    }

    SparseState finish() && { return SparseState(statistics_, std::move(terms_)); }

  private:
    Statistics statistics_;
    SparseState::TermMap terms_;
};

}  // namespace detail

inline SparseState vacuum(Statistics statistics) {
    SparseState::TermMap terms;
    terms.emplace(BasisState(statistics), Complex{1.0, 0.0});
    return SparseState(statistics, std::move(terms));
}

inline SparseState create(const SparseState& state, const Mode& mode) {
    detail::TermAccumulator acc(state.statistics());
    for (const auto& [b, amp] : state.terms()) {
        if (auto r = b.created(mode)) acc.add(std::move(r->second), amp * r->first);
    }
    return std::move(acc).finish();
}

inline SparseState annihilate(const SparseState& state, const Mode& mode) {
    detail::TermAccumulator acc(state.statistics());
    for (const auto& [b, amp] : state.terms()) {
        if (auto r = b.annihilated(mode)) acc.add(std::move(r->second), amp * r->first);
    }
    return std::move(acc).finish();
}

/// Applies an operator string right to left: ops = {m1, ..., mk} gives
/// a+_{m1} ... a+_{mk} |state>.
inline SparseState create_string(SparseState state, std::span<const Mode> ops) {
    for (auto it = ops.rbegin(); it != ops.rend(); ++it) state = create(state, *it);
    return state;
}

/// <a|b>.
inline Complex inner_product(const SparseState& a, const SparseState& b) {
    if (a.statistics() != b.statistics())
        throw IncompatibleStates("inner_product: states have different statistics");
    const auto& small = a.size() <= b.size() ? a : b;
    const auto& large = a.size() <= b.size() ? b : a;
    Complex sum{};
    for (const auto& [basis, amp] : small.terms()) {
        auto it = large.terms().find(basis);
        if (it == large.terms().end()) continue;
        sum += (&small == &a) ? std::conj(amp) * it->second : std::conj(it->second) * amp;
    }
    return sum;
}

/// Linear combination sum_i c_i |psi_i>. Needs at least one operand to fix the
/// statistics of the result.
inline SparseState scale_add(std::span<const std::pair<Complex, SparseState>> states) {
    if (states.empty()) throw StateError("scale_add: empty combination");
    const Statistics statistics = states.front().second.statistics();
    std::optional<int> number;
    detail::TermAccumulator acc(statistics);
    for (const auto& [c, psi] : states) {
        if (psi.statistics() != statistics) throw IncompatibleStates("scale_add: mixed statistics");
        if (auto n = psi.particle_number()) {
            if (number && *number != *n) throw IncompatibleStates("scale_add: mixed particle numbers");
            number = n;
        }
        for (const auto& [b, amp] : psi.terms()) acc.add(b, c * amp);
    }
    return std::move(acc).finish();
}

inline SparseState scale_add(std::initializer_list<std::pair<Complex, SparseState>> states) {
    return scale_add(std::span<const std::pair<Complex, SparseState>>(states.begin(), states.size()));
}

inline SparseState scaled(const SparseState& state, Complex c) { return scale_add({{c, state}}); }

/// Returns the unit-norm state together with the squared norm of the input.
/// When the input is a projected branch, the squared norm is its probability.
inline std::pair<SparseState, double> normalize(const SparseState& state) {
    const double n2 = state.norm_squared();
    if (state.is_zero() || n2 < kPruneThreshold * kPruneThreshold)
        throw ZeroStateError("normalize: zero state (impossible branch)");
    return {scaled(state, Complex{1.0 / std::sqrt(n2), 0.0}), n2};
}

/// Image of one creation operator under a single-particle linear map:
/// a+_m -> sum_k coeff_k a+_{m_k}. Returning nullopt leaves the mode untouched.
using ModeImage = std::vector<std::pair<Complex, Mode>>;
using ModeMap = std::function<std::optional<ModeImage>(const Mode&)>;

/// Substitutes every creation operator a+_m with its image under `map` and
/// re-expands each term in the canonical basis.
///
/// Untouched operators stay in place: for fermions the transformed operators
/// are first commuted to the front of the canonical product (one sign per
/// crossed untouched mode), then their images are applied right to left to the
/// basis state built from the untouched modes.
inline SparseState transform_modes(const SparseState& state, const ModeMap& map) {
    const Statistics statistics = state.statistics();
    detail::TermAccumulator out(statistics);

    for (const auto& [basis, amp] : state.terms()) {
        std::vector<Occupation> kept;
        std::vector<std::pair<Occupation, ModeImage>> moved;
        int crossings = 0;
        for (const auto& o : basis.occupied()) {
            if (auto image = map(o.mode)) {
                crossings += static_cast<int>(kept.size());
                moved.emplace_back(o, std::move(*image));
            } else {
                kept.push_back(o);
            }
        }
        if (moved.empty()) {
            out.add(basis, amp);
            continue;
        }

        double prefactor = (statistics == Statistics::Fermion && crossings % 2 == 1) ? -1.0 : 1.0;
        SparseState::TermMap partial;
        partial.emplace(BasisState(statistics, std::move(kept)), Complex{prefactor, 0.0});

        for (auto it = moved.rbegin(); it != moved.rend(); ++it) {
            const auto& [occ, image] = *it;
            for (int rep = 0; rep < occ.count; ++rep) {
                SparseState::TermMap next;
                for (const auto& [b, a] : partial) {
                    for (const auto& [coeff, target] : image) {
                        auto r = b.created(target);
                        if (!r) continue;
                        auto [pos, inserted] = next.try_emplace(std::move(r->second), a * coeff * r->first);
                        if (!inserted) pos->second += a * coeff * r->first;
                    }
                }
                partial = std::move(next);
            }
            // (a+)^c / sqrt(c!) normalization of bosonic multiple occupation.
            if (occ.count > 1) {
                double fact = 1.0;
                for (int k = 2; k <= occ.count; ++k) fact *= k;
                const double s = 1.0 / std::sqrt(fact);
                for (auto& [b, a] : partial) a *= s;
            }
        }
        for (auto& [b, a] : partial) out.add(b, amp * a);
    }
    return std::move(out).finish();
}

}  // namespace statconc
