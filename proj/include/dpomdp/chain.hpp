#pragma once

#include "dpomdp/types.hpp"

#include <vector>

namespace dpomdp {

/// Recurrent structure of a finite Markov chain.
struct ChainDecomposition {
    std::vector<std::vector<Index>> classes;  ///< bottom strongly connected components, ascending members
    std::vector<Index> transient;
    Matrix stationary;  ///< limiting average matrix P*

    /// Class index of a recurrent state, or -1 for a transient one.
    std::vector<Index> class_of;
};

/// Bottom SCCs of the positive-entry graph, per-class stationary laws and
/// absorption-weighted rows for transient states. Throws SingularSystemError
/// when a linear solve is numerically degenerate.
ChainDecomposition chain_decompose(const Matrix& P);

}  // namespace dpomdp
