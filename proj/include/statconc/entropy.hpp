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

// Entropy of entanglement of a pure state across the split between one
// party's modes and the rest.

#include <cmath>
#include <map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "statconc/fock.hpp"

namespace statconc {

/// Shannon entropy in bits of the distribution (x, 1 - x).
inline double binary_entropy(double x) {
    double h = 0.0;
    if (x > 0.0) h -= x * std::log2(x);
    if (x < 1.0) h -= (1.0 - x) * std::log2(1.0 - x);
    return h;
}

/// Shannon entropy in bits of a list of probabilities (zeros skipped).
inline double shannon_entropy(const std::vector<double>& weights) {
    double h = 0.0;
    for (double w : weights) {
        if (w > 0.0) h -= w * std::log2(w);
    }
    return h;
}

/// Coefficient matrix M[i][j] of |psi> = sum_ij M_ij |party_i>|rest_j>.
///
/// Alice modes precede Bob modes in the canonical order, so every fermionic
/// basis state factorizes as a+(Alice part) a+(Bob part)|0> without a sign and
/// the split is sign-consistent for either choice of party.
inline Eigen::MatrixXcd schmidt_matrix(const SparseState& state, Party party) {
    std::map<BasisState, Eigen::Index> rows, cols;
    struct Entry {
        Eigen::Index row, col;
        Complex amp;
    };
    std::vector<Entry> entries;
    for (const auto& [basis, amp] : state.terms()) {
        std::vector<Occupation> mine, rest;
        for (const auto& o : basis.occupied()) (o.mode.party == party ? mine : rest).push_back(o);
        auto r = rows.try_emplace(BasisState(state.statistics(), std::move(mine)), static_cast<Eigen::Index>(rows.size()));
        auto c = cols.try_emplace(BasisState(state.statistics(), std::move(rest)), static_cast<Eigen::Index>(cols.size()));
        entries.push_back({r.first->second, c.first->second, amp});
    }
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (const auto& e : entries) m(e.row, e.col) = e.amp;
    return m;
}

/// Squared Schmidt coefficients, descending.
inline std::vector<double> schmidt_weights(const SparseState& state, Party party) {
    const Eigen::MatrixXcd m = schmidt_matrix(state, party);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    std::vector<double> w;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) w.push_back(svd.singularValues()(i) * svd.singularValues()(i));
    return w;
}

/// Entropy of entanglement in e-bits. The state must be normalized.
inline double entanglement_entropy(const SparseState& state, Party party = Party::A) {
    if (state.is_zero() || !state.is_normalized(1e-10))
        throw StateError("entanglement_entropy: state is not normalized");
    return shannon_entropy(schmidt_weights(state, party));
}

}  // namespace statconc
