#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace faraday {

using cx = std::complex<double>;

// Degenerate parameter set: the reflection denominator vanishes.
struct SingularParameters : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidParameters : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Atom-cavity system parameters. Only ratios matter; presets express
// frequencies relative to kappa.
struct CavityParams {
    double omega_c = 0.0;   // cavity mode frequency
    double omega_0 = 0.0;   // atomic transition frequency
    double omega_p = 0.0;   // pump/photon frequency
    double kappa = 1.0;     // cavity damping rate
    double gamma = 0.0;     // atomic damping rate
    double lambda = 0.0;    // atom-field coupling

    void validate() const;
};

// Phases of the dressed and empty-cavity reflection coefficients, plus their
// magnitudes. mag0 is 1 up to rounding for any valid parameters; mag is 1
// only when gamma = 0.
struct FaradayPhases {
    double phi = 0.0;    // arg of the atom-cavity reflection, in [0, 2*pi)
    double phi0 = 0.0;   // arg of the empty-cavity reflection, in [0, 2*pi)
    double mag = 1.0;    // |reflection|
    double mag0 = 1.0;   // |reflection_empty|

    double theta_minus() const { return (phi0 - phi) / 2.0; }
    double theta_plus() const { return (phi - phi0) / 2.0; }
};

// Reflection coefficient of the atom-cavity system.
cx reflection(const CavityParams& p);

// Reflection coefficient of the empty cavity (unit magnitude).
cx reflection_empty(const CavityParams& p);

FaradayPhases faraday_phases(const CavityParams& p);

// The adjustment that yields (phi, phi0) = (pi, pi/2):
// omega_p = omega_c - kappa/2, omega_0 = omega_c, lambda = kappa/2, gamma = 0.
CavityParams standard_tuning();

// Loads a named preset from a JSON file of {name: {omega_c, ...}} entries.
CavityParams load_cavity_preset(const std::string& file, const std::string& name);

}  // namespace faraday
