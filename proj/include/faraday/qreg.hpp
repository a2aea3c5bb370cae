#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "faraday/cavity.hpp"

namespace faraday {

using Vec = std::vector<cx>;
using Mat2 = std::array<cx, 4>;  // row-major [m00 m01; m10 m11]

struct DuplicateLabel : std::runtime_error { using std::runtime_error::runtime_error; };
struct UnknownLabel : std::runtime_error { using std::runtime_error::runtime_error; };
struct NotNormalized : std::runtime_error { using std::runtime_error::runtime_error; };
struct NotUnitary : std::runtime_error { using std::runtime_error::runtime_error; };
struct KindMismatch : std::runtime_error { using std::runtime_error::runtime_error; };
struct EmptyTargets : std::runtime_error { using std::runtime_error::runtime_error; };
struct NonUnitMagnitude : std::runtime_error { using std::runtime_error::runtime_error; };

enum class Kind { Atom, PhotonPolarization };

struct Subsystem {
    std::string name;
    Kind kind = Kind::Atom;
};

// Preparation of one two-level subsystem. Basis: atoms (|0>, |1>),
// photons (|L>, |R>).
struct SingleState {
    cx a0{1.0, 0.0};
    cx a1{0.0, 0.0};

    static SingleState zero() { return {1.0, 0.0}; }
    static SingleState one() { return {0.0, 1.0}; }
    static SingleState plus();
    static SingleState left() { return zero(); }
    static SingleState right() { return one(); }
    static SingleState linear() { return plus(); }
    static SingleState amplitudes(cx a, cx b) { return {a, b}; }
};

// Register of two-level subsystems with a dense state vector. The first
// subsystem is the most significant bit of the basis index. Atom bits read
// 0 <-> |0>, 1 <-> |1>; photon bits read 0 <-> |L>, 1 <-> |R>.
struct QuantumRegister {
    std::vector<Subsystem> subsystems;
    Vec amplitudes;
    // Product of reflection magnitudes accumulated by renormalizing cavity
    // gates; stays 1 in strict mode.
    double success_weight = 1.0;

    std::size_t count() const { return subsystems.size(); }
    std::size_t index_of(const std::string& label) const;
    Kind kind_of(const std::string& label) const;
    double norm_sq() const;
};

QuantumRegister new_register(
    const std::vector<std::pair<Subsystem, SingleState>>& states);

// Appends two subsystems prepared jointly in the given 4-amplitude state
// (basis order: both bits of the pair, first label most significant).
void append_entangled_pair(QuantumRegister& reg, const Subsystem& first,
                           const Subsystem& second, const std::array<cx, 4>& joint);

void apply_single(QuantumRegister& reg, const std::string& target, const Mat2& u);

enum class GateMode { Strict, Renormalize };

// Diagonal Faraday gate on a (photon, atom) pair: equal bits pick up
// e^{i phi}, unequal bits e^{i phi0}. Strict mode rejects |r| != 1;
// renormalize mode applies the phases and folds the magnitude into
// reg.success_weight.
void apply_controlled_phase_pair(QuantumRegister& reg, const std::string& photon,
                                 const std::string& atom, const FaradayPhases& phases,
                                 GateMode mode = GateMode::Strict);

struct MeasurementBranch {
    std::map<std::string, int> outcome;
    double probability = 0.0;
    QuantumRegister residual;
};

// All nonzero-probability outcomes of measuring `targets`, ordered
// lexicographically over the target bits (in the given target order).
// Branches below probability 1e-14 are dropped.
std::vector<MeasurementBranch> measure_enumerate(
    const QuantumRegister& reg, const std::vector<std::string>& targets);

MeasurementBranch measure_sample(const QuantumRegister& reg,
                                 const std::vector<std::string>& targets,
                                 std::uint64_t seed);

enum class Pauli { I, X, Z, ZX };

struct PauliOp {
    std::vector<Pauli> factors;  // one per target subsystem; ZX = X then Z

    std::string to_string() const;  // e.g. "Z", "X(x)I"
    static PauliOp parse(const std::string& s);
    // Applies the operator to a state on factors.size() qubits.
    Vec apply(const Vec& state) const;
};

// --- state comparison helpers ---

// Canonical global phase: first amplitude of magnitude > 1e-12 made real
// positive.
Vec canonical_phase(const Vec& v);

bool states_equal_up_to_phase(const Vec& u, const Vec& v, double tol = 1e-10);

// Amplitudes of `reg` re-expressed with subsystems in `order` (a permutation
// of the register's labels).
Vec reorder_amplitudes(const QuantumRegister& reg,
                       const std::vector<std::string>& order);

}  // namespace faraday
