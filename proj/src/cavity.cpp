#include "faraday/cavity.hpp"

#include <cmath>
#include <fstream>

#include "json.hpp"

namespace faraday {

void CavityParams::validate() const {
    if (kappa <= 0.0) throw InvalidParameters("kappa must be positive");
    if (gamma < 0.0) throw InvalidParameters("gamma must be non-negative");
    if (lambda < 0.0) throw InvalidParameters("lambda must be non-negative");
}

cx reflection(const CavityParams& p) {
    p.validate();
    const cx i(0.0, 1.0);
    const cx cav_det = i * (p.omega_c - p.omega_p);
    const cx atom = i * (p.omega_0 - p.omega_p) + p.gamma / 2.0;
    const cx num = (cav_det - p.kappa / 2.0) * atom + p.lambda * p.lambda;
    const cx den = (cav_det + p.kappa / 2.0) * atom + p.lambda * p.lambda;
    if (std::abs(den) < 1e-15)
        throw SingularParameters("reflection denominator vanishes for these parameters");
    return num / den;
}

cx reflection_empty(const CavityParams& p) {
    p.validate();
    const cx i(0.0, 1.0);
    const cx cav_det = i * (p.omega_c - p.omega_p);
    return (cav_det - p.kappa / 2.0) / (cav_det + p.kappa / 2.0);
}

namespace {
// arg() mapped into [0, 2*pi); keeps the half-turn phase at +pi regardless
// of the sign of a vanishing imaginary part.
double phase_in_turn(const cx& z) {
    double a = std::arg(z);
    if (a < 0.0) a += 2.0 * M_PI;
    return a;
}
}  // namespace

FaradayPhases faraday_phases(const CavityParams& p) {
    const cx r = reflection(p);
    const cx r0 = reflection_empty(p);
    FaradayPhases out;
    out.phi = phase_in_turn(r);
    out.phi0 = phase_in_turn(r0);
    out.mag = std::abs(r);
    out.mag0 = std::abs(r0);
    return out;
}

CavityParams standard_tuning() {
    CavityParams p;
    p.omega_c = 0.0;
    p.omega_0 = 0.0;
    p.omega_p = -0.5;
    p.kappa = 1.0;
    p.gamma = 0.0;
    p.lambda = 0.5;
    return p;
}

CavityParams load_cavity_preset(const std::string& file, const std::string& name) {
    std::ifstream in(file);
    if (!in) throw InvalidParameters("cannot open preset file: " + file);
    nlohmann::json doc = nlohmann::json::parse(in);
    if (!doc.contains(name))
        throw InvalidParameters("unknown cavity preset: " + name);
    const auto& j = doc.at(name);
    CavityParams p;
    p.omega_c = j.at("omega_c").get<double>();
    p.omega_0 = j.at("omega_0").get<double>();
    p.omega_p = j.at("omega_p").get<double>();
    p.kappa = j.at("kappa").get<double>();
    p.gamma = j.at("gamma").get<double>();
    p.lambda = j.at("lambda").get<double>();
    p.validate();
    return p;
}

}  // namespace faraday
