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

// Bob-side linear optics: the spin flip on arm l, the 50/50 beam splitter and
// the spin-blind path measurement with post-selection.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <set>
#include <span>
#include <vector>

#include "statconc/fock.hpp"

namespace statconc {

enum class DetectorModel : std::uint8_t { NonAbsorbing, Absorbing };
enum class OutcomeKind : std::uint8_t { Antibunch, BunchLeft, BunchRight };

/// Phase convention of the 50/50 beam splitter. Real maps
/// l -> (L + R)/sqrt2, r -> (L - R)/sqrt2; Symmetric maps
/// l -> (L + iR)/sqrt2, r -> (iL + R)/sqrt2.
enum class BeamSplitterConvention : std::uint8_t { Real, Symmetric };

inline const char* to_string(DetectorModel d) { return d == DetectorModel::Absorbing ? "absorbing" : "nonabsorbing"; }
inline const char* to_string(OutcomeKind k) {
    switch (k) {
    case OutcomeKind::Antibunch: return "antibunch";
    case OutcomeKind::BunchLeft: return "bunch-left";
    case OutcomeKind::BunchRight: return "bunch-right";
    }
    return "?";
}

/// A beam splitter or path measurement was applied to a slot in the wrong
/// stage (already measured, or not yet passed through the splitter).
class SlotStateError : public StateError {
  public:
    using StateError::StateError;
};

/// The post-selected class of a measurement has probability zero.
class ProtocolFailure : public StateError {
  public:
    using StateError::StateError;
};

struct PathOutcome {
    OutcomeKind kind = OutcomeKind::Antibunch;
    int slot = 1;
};

struct MeasurementResult {
    PathOutcome outcome;
    double probability = 0.0;
    SparseState post_state{Statistics::Fermion};
    /// Set by post_select when the two bunching ports were merged.
    bool both_ports = false;
};

/// Fermions keep anti-bunching, bosons keep bunching in either port.
inline bool is_kept(OutcomeKind kind, Statistics statistics) {
    return statistics == Statistics::Fermion ? kind == OutcomeKind::Antibunch : kind != OutcomeKind::Antibunch;
}

/// U_pi on arm l: toggles the spin of every Bob L-pair source mode at the
/// given slots.
inline SparseState flip_spins(const SparseState& state, const std::set<int>& slots) {
    return transform_modes(state, [&](const Mode& m) -> std::optional<ModeImage> {
        if (m.party != Party::B || m.pair != Pair::L || m.location != Location::SourceArm || !slots.contains(m.slot))
            return std::nullopt;
        Mode target = m;
        target.spin = flipped(m.spin);
        return ModeImage{{Complex{1.0, 0.0}, target}};
    });
}

inline SparseState beam_splitter(const SparseState& state, int slot,
                                 BeamSplitterConvention convention = BeamSplitterConvention::Real) {
    for (const auto& [basis, amp] : state.terms()) {
        for (const auto& o : basis.occupied()) {
            if (o.mode.party == Party::B && o.mode.slot == slot && o.mode.location != Location::SourceArm)
                throw SlotStateError("beam_splitter: slot " + std::to_string(slot) + " already measured");
        }
    }
    const double h = 1.0 / std::numbers::sqrt2;
    const Complex one{h, 0.0};
    const Complex i{0.0, h};
    return transform_modes(state, [&](const Mode& m) -> std::optional<ModeImage> {
        if (m.party != Party::B || m.slot != slot || m.location != Location::SourceArm) return std::nullopt;
        const Mode left = Mode::detector(Location::DetectorLeft, slot, m.spin);
        const Mode right = Mode::detector(Location::DetectorRight, slot, m.spin);
        if (convention == BeamSplitterConvention::Real) {
            if (m.pair == Pair::L) return ModeImage{{one, left}, {one, right}};
            return ModeImage{{one, left}, {-one, right}};
        }
        if (m.pair == Pair::L) return ModeImage{{one, left}, {i, right}};
        return ModeImage{{i, left}, {one, right}};
    });
}

namespace detail {

inline bool is_detector_at(const Mode& m, int slot) {
    return m.party == Party::B && m.slot == slot &&
           (m.location == Location::DetectorLeft || m.location == Location::DetectorRight);
}

/// Adds weighted states, combining amplitudes that land on the same basis
/// state in quadrature. The merged amplitude keeps the phase of the first
/// contribution in canonical order.
inline SparseState merge_in_quadrature(Statistics statistics,
                                       std::span<const std::pair<double, SparseState>> parts) {
    std::map<BasisState, std::pair<double, Complex>> acc;  // weight, phase
    for (const auto& [w, psi] : parts) {
        for (const auto& [b, a] : psi.terms()) {
            const double weight = w * std::norm(a);
            auto [it, inserted] = acc.try_emplace(b, weight, a / std::abs(a));
            if (!inserted) it->second.first += weight;
        }
    }
    SparseState::TermMap terms;
    for (auto& [b, wp] : acc) terms.emplace(b, std::sqrt(wp.first) * wp.second);
    return SparseState(statistics, std::move(terms));
}

/// Spin-blind absorption of both particles detected at `slot`: each term's
/// detector occupation is replaced by the vacuum. Terms that become identical
/// are merged in quadrature, so every branch keeps its weight and the map
/// preserves the norm. The fermionic sign of removing the detected operators
/// is kept in each contribution's phase.
inline SparseState absorb_slot(const SparseState& state, int slot) {
    SparseState::TermMap stripped_terms;
    std::vector<std::pair<double, SparseState>> parts;
    for (const auto& [basis, amp] : state.terms()) {
        BasisState residual = basis;
        double sign = 1.0;
        const auto occ = basis.occupied();
        for (auto it = occ.rbegin(); it != occ.rend(); ++it) {
            if (!is_detector_at(it->mode, slot)) continue;
            for (int k = 0; k < it->count; ++k) {
                auto r = residual.annihilated(it->mode);
                sign *= r->first < 0 ? -1.0 : 1.0;
                residual = std::move(r->second);
            }
        }
        SparseState::TermMap single;
        single.emplace(std::move(residual), amp * sign);
        parts.emplace_back(1.0, SparseState(state.statistics(), std::move(single)));
    }
    return merge_in_quadrature(state.statistics(), parts);
}

}  // namespace detail

/// Path-only measurement of the two particles leaving the splitter at `slot`.
/// Returns one result per outcome class with nonzero weight, in the order
/// Antibunch, BunchLeft, BunchRight. Spins at the detectors are never read.
inline std::vector<MeasurementResult> measure_path(const SparseState& state, int slot, DetectorModel model) {
    const double total = state.norm_squared();
    if (state.is_zero()) throw ZeroStateError("measure_path: zero state");

    std::array<detail::TermAccumulator, 3> classes{detail::TermAccumulator(state.statistics()),
                                                   detail::TermAccumulator(state.statistics()),
                                                   detail::TermAccumulator(state.statistics())};
    for (const auto& [basis, amp] : state.terms()) {
        int left = 0, right = 0;
        for (const auto& o : basis.occupied()) {
            const Mode& m = o.mode;
            if (m.party != Party::B || m.slot != slot) continue;
            if (m.location == Location::SourceArm)
                throw SlotStateError("measure_path: slot " + std::to_string(slot) + " has not passed the beam splitter");
            if (m.location == Location::DetectorLeft) left += o.count;
            if (m.location == Location::DetectorRight) right += o.count;
        }
        if (left + right != 2)
            throw SlotStateError("measure_path: expected two particles at slot " + std::to_string(slot));
        const auto kind = left == 1 ? OutcomeKind::Antibunch : (left == 2 ? OutcomeKind::BunchLeft : OutcomeKind::BunchRight);
        classes[static_cast<std::size_t>(kind)].add(basis, amp);
    }

    std::vector<MeasurementResult> results;
    for (std::size_t k = 0; k < classes.size(); ++k) {
        SparseState projected = std::move(classes[k]).finish();
        if (projected.is_zero()) continue;
        auto [post, weight] = normalize(projected);
        if (model == DetectorModel::Absorbing) post = normalize(detail::absorb_slot(post, slot)).first;
        results.push_back(MeasurementResult{PathOutcome{static_cast<OutcomeKind>(k), slot}, weight / total,
                                            std::move(post)});
    }
    return results;
}

/// Keeps the class selected by the particle statistics. For bosons the two
/// bunching ports are recombined coherently (in quadrature when the detected
/// particles were absorbed, matching absorb_slot).
inline MeasurementResult post_select(std::span<const MeasurementResult> results, Statistics statistics,
                                     DetectorModel model = DetectorModel::NonAbsorbing) {
    std::vector<const MeasurementResult*> kept;
    for (const auto& r : results) {
        if (is_kept(r.outcome.kind, statistics) && r.probability > 0.0) kept.push_back(&r);
    }
    if (kept.empty()) throw ProtocolFailure("post_select: kept branch has probability 0");
    if (kept.size() == 1) return *kept.front();

    double probability = 0.0;
    for (const auto* r : kept) probability += r->probability;
    SparseState merged(statistics);
    if (model == DetectorModel::Absorbing) {
        std::vector<std::pair<double, SparseState>> parts;
        for (const auto* r : kept) parts.emplace_back(r->probability, r->post_state);
        merged = detail::merge_in_quadrature(statistics, parts);
    } else {
        std::vector<std::pair<Complex, SparseState>> parts;
        for (const auto* r : kept) parts.emplace_back(Complex{std::sqrt(r->probability), 0.0}, r->post_state);
        merged = scale_add(parts);
    }
    MeasurementResult out{kept.front()->outcome, probability, normalize(merged).first};
    out.both_ports = true;
    return out;
}

}  // namespace statconc
