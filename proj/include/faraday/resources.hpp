#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace faraday {

struct InvalidLossModel : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Per-photon loss/detection budget plus the Bell-measurement success chance.
// Each factor is the probability that one photon survives the corresponding
// stage; a run succeeds only when every photon path survives every stage and
// the Bell measurement succeeds.
struct LossModel {
    double t_fiber = 0.2;       // fiber coupling + transmission
    double t_optics = 0.95;     // transmission through the remaining optics
    double p_pol = 0.5;         // fraction emitted with the right polarization
    double eta_det = 0.15;      // detector quantum efficiency
    double solid_angle = 0.02;  // collection solid-angle fraction
    double p_bell = 0.25;       // Bell-measurement success probability
    double source_rate = 75000.0;  // single-photon source rate, Hz
    int n_photon_paths = 1;

    void validate() const;
};

// p_bell * (t_fiber * t_optics * p_pol * eta_det * solid_angle)^n_photon_paths
double success_probability(const LossModel& model);

// 1 / (source_rate * success_probability); +infinity when the probability
// is zero.
double expected_event_period(const LossModel& model);

struct MonteCarloYield {
    std::uint64_t successes = 0;
    double empirical_rate = 0.0;
};

// Stochastic cross-check of success_probability: every trial draws one
// Bernoulli per loss factor per photon path plus one for the Bell
// measurement; losses are heralded failures (the trial is discarded).
MonteCarloYield monte_carlo_yield(const LossModel& model, std::uint64_t trials,
                                  std::uint64_t seed);

// Loads a named loss model from a JSON preset file
// ({"name": {field: value, ...}, ...}).
LossModel load_loss_preset(const std::string& path, const std::string& name);

}  // namespace faraday
