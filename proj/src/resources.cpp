#include "faraday/resources.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include <json.hpp>

namespace faraday {

void LossModel::validate() const {
    auto check01 = [](double v, const char* name) {
        if (!(v >= 0.0 && v <= 1.0))
            throw InvalidLossModel(std::string(name) + " must lie in [0, 1]");
    };
    check01(t_fiber, "t_fiber");
    check01(t_optics, "t_optics");
    check01(p_pol, "p_pol");
    check01(eta_det, "eta_det");
    check01(solid_angle, "solid_angle");
    check01(p_bell, "p_bell");
    if (!(source_rate > 0.0))
        throw InvalidLossModel("source_rate must be positive");
    if (n_photon_paths < 1)
        throw InvalidLossModel("n_photon_paths must be at least 1");
}

double success_probability(const LossModel& model) {
    model.validate();
    const double per_path =
        model.t_fiber * model.t_optics * model.p_pol * model.eta_det * model.solid_angle;
    return model.p_bell * std::pow(per_path, model.n_photon_paths);
}

double expected_event_period(const LossModel& model) {
    const double p = success_probability(model);
    if (p == 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / (model.source_rate * p);
}

MonteCarloYield monte_carlo_yield(const LossModel& model, std::uint64_t trials,
                                  std::uint64_t seed) {
    model.validate();
    if (trials == 0) throw InvalidLossModel("trials must be at least 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double factors[5] = {model.t_fiber, model.t_optics, model.p_pol,
                               model.eta_det, model.solid_angle};
    MonteCarloYield out;
    for (std::uint64_t t = 0; t < trials; ++t) {
        bool alive = true;
        for (int path = 0; path < model.n_photon_paths && alive; ++path)
            for (double f : factors)
                if (uni(rng) >= f) {
                    alive = false;
                    break;
                }
        if (alive && uni(rng) < model.p_bell) ++out.successes;
    }
    out.empirical_rate = static_cast<double>(out.successes) / static_cast<double>(trials);
    return out;
}

LossModel load_loss_preset(const std::string& path, const std::string& name) {
    std::ifstream in(path);
    if (!in) throw InvalidLossModel("cannot open loss preset file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidLossModel("malformed loss preset file: " + std::string(e.what()));
    }
    if (!j.contains(name))
        throw InvalidLossModel("no loss preset named '" + name + "' in " + path);
    const auto& p = j.at(name);
    LossModel m;
    try {
        m.t_fiber = p.at("t_fiber").get<double>();
        m.t_optics = p.at("t_optics").get<double>();
        m.p_pol = p.at("p_pol").get<double>();
        m.eta_det = p.at("eta_det").get<double>();
        m.solid_angle = p.at("solid_angle").get<double>();
        m.p_bell = p.at("p_bell").get<double>();
        m.source_rate = p.at("source_rate").get<double>();
        m.n_photon_paths = p.at("n_photon_paths").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw InvalidLossModel("incomplete loss preset '" + name + "': " + e.what());
    }
    m.validate();
    return m;
}

}  // namespace faraday
