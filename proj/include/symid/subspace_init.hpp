#pragma once

#include "symid/lti_model.hpp"
#include "symid/manifold.hpp"

#include <random>

namespace symid {

using Rng = std::mt19937_64;

// How B is fitted once A and C are known (D = 0 in both cases).
//   Moesp: least squares on the LQ factors, U2^T L21 L11^-1 = U2^T Toeplitz(B).
//   OutputError: least squares of the simulated output against y_1..y_K.
enum class BFit { Moesp, OutputError };

struct SubspaceConfig {
    int order = 0;
    // Hankel depth; 0 selects 2 * order.
    int block_rows = 0;
    BFit b_fit = BFit::Moesp;

    int depth() const { return block_rows > 0 ? block_rows : 2 * order; }
    // Throws std::invalid_argument / DataError when the data cannot support the fit.
    void validate(Eigen::Index samples) const;
};

// Ordinary MOESP with D = 0. A comes from shift invariance of the extended
// observability matrix and is generally not symmetric.
// Throws DataError if the order exceeds the numerical rank of the data.
Realization subspace_estimate(const IODataset& data, const SubspaceConfig& cfg);

// A <- sym(A); eigenvalues <= 0 are replaced by 0.01 * U(0,1), one draw each,
// in ascending eigenvalue order.
SystemTriple repair_spd(const Realization& raw, Rng& rng);

// Same repair, then rotated into the eigenbasis: (diag(lambda), V^T B, C V).
SystemTriple repair_diag(const Realization& raw, Rng& rng);

}  // namespace symid
