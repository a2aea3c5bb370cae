#include "faraday/optics.hpp"

#include <cmath>

namespace faraday {

namespace {
const double kSqrtHalf = std::sqrt(0.5);
}

Mat2 qwp_matrix(WavePlate kind) {
    if (kind == WavePlate::QWP1) {
        // rows give <L|U and <R|U; columns are the images of |L>, |R>
        return {cx(kSqrtHalf, 0.0), cx(0.0, -kSqrtHalf),
                cx(kSqrtHalf, 0.0), cx(0.0, kSqrtHalf)};
    }
    return {cx(kSqrtHalf, 0.0), cx(kSqrtHalf, 0.0),
            cx(kSqrtHalf, 0.0), cx(-kSqrtHalf, 0.0)};
}

Mat2 hadamard_atom() {
    return {cx(kSqrtHalf, 0.0), cx(kSqrtHalf, 0.0),
            cx(kSqrtHalf, 0.0), cx(-kSqrtHalf, 0.0)};
}

}  // namespace faraday
