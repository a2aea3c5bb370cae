#pragma once

#include "faraday/qreg.hpp"

namespace faraday {

// The two wave plates used by the schemes, defined by their action on the
// (|L>, |R>) basis:
//   QWP1: (|L> + i|R>)/sqrt(2) -> |L>,  (|L> - i|R>)/sqrt(2) -> |R>
//   QWP2: (|L> + |R>)/sqrt(2) -> |L>,  (|L> - |R>)/sqrt(2) -> |R>
enum class WavePlate { QWP1, QWP2 };

Mat2 qwp_matrix(WavePlate kind);

// Hadamard on an atomic (|0>, |1>) subsystem.
Mat2 hadamard_atom();

}  // namespace faraday
