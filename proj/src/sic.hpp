#pragma once

// Symmetric informationally complete POVM for a single qubit: four
// rank-one effects M_k = (I + a_k . sigma)/4 whose Bloch directions a_k
// form a regular tetrahedron.  Born probabilities are affine in the Bloch
// vector, so the map state -> probabilities inverts in closed form.

#include <array>

#include "channel.hpp"

namespace dphc {

// Tetrahedron directions, rows normalised to unit length.
const std::array<std::array<double, 3>, 4>& sic_directions();

// Born probabilities p_k = tr(M_k rho) = (1 + a_k . b)/4.
std::array<double, 4> sic_probabilities(const DensityMatrix& rho);

// Recover the Bloch vector b = 3 sum_k p_k a_k from exact probabilities.
std::array<double, 3> sic_bloch_from_probabilities(
    const std::array<double, 4>& p);

}  // namespace dphc
