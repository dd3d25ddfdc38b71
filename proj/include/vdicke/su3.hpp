#pragma once

#include "vdicke/model.hpp"

namespace vdicke {

// Expectation matrices are stored as L(i, j) = <Lambda_ij> / N, where
// Lambda_ij = sum over atoms of |i><j|. The single-atom density matrix is L^T.

struct Su3Invariants {
    double trace;      // sum of populations
    double quadratic;  // sum L_mm^2 + sum over pairs (3 |L_mn|^2 - L_mm L_nn)
    double cubic;      // cubic Casimir combination, 1 for a pure product state
};

Su3Invariants su3_invariants(const Mat3& lambda_exp);

/// Deviations of the three invariants from their pure-state values (1, 1, 1).
Su3Invariants su3_residuals(const Mat3& lambda_exp);

} // namespace vdicke
