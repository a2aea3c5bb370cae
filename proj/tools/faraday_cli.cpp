#include <cctype>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <random>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "faraday/cavity.hpp"
#include "faraday/optics.hpp"
#include "faraday/protocol.hpp"
#include "faraday/qreg.hpp"
#include "faraday/resources.hpp"

#ifndef FARADAY_DEFAULT_DATA_DIR
#define FARADAY_DEFAULT_DATA_DIR "data"
#endif

namespace {

using faraday::cx;
using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitVerificationFailure = 1;
constexpr int kExitUsageError = 2;

std::string data_dir(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("FARADAY_DATA_DIR"); env && *env)
        return env;
    return FARADAY_DEFAULT_DATA_DIR;
}

// Accepts "0.6", "-0.25", "0.48+0.64i", "1i", "-i", "0.3-0.4i".
cx parse_complex(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw std::invalid_argument("empty complex literal");
    auto parse_real = [](const std::string& t) {
        std::size_t used = 0;
        double v = std::stod(t, &used);
        if (used != t.size()) throw std::invalid_argument("trailing characters");
        return v;
    };
    if (s.back() != 'i' && s.back() != 'j') return cx(parse_real(s), 0.0);
    s.pop_back();
    // split off the trailing signed imaginary part
    std::size_t split = s.size();
    for (std::size_t k = s.size(); k-- > 1;) {
        if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    std::string im = (split == s.size()) ? s : s.substr(split);
    std::string re = (split == s.size()) ? "" : s.substr(0, split);
    if (im.empty() || im == "+") im = "1";
    else if (im == "-") im = "-1";
    double real = re.empty() ? 0.0 : parse_real(re);
    return cx(real, parse_real(im));
}

json complex_json(const cx& z) {
    return json{{"re", z.real()}, {"im", z.imag()}};
}

void emit(const json& j, const std::string& output) {
    const std::string text = j.dump(2) + "\n";
    if (output.empty() || output == "-") {
        std::cout << text;
    } else {
        std::ofstream out(output);
        if (!out) throw std::runtime_error("cannot open output file: " + output);
        out << text;
    }
}

struct CavityOptions {
    std::string preset;
    std::string dir_flag;
    std::optional<double> omega_c, omega_0, omega_p, kappa, gamma, lambda;

    void attach(CLI::App* cmd) {
        cmd->add_option("--preset", preset, "named cavity preset")
            ->default_val("standard-tuning");
        cmd->add_option("--data-dir", dir_flag,
                        "data directory (default: $FARADAY_DATA_DIR)");
        cmd->add_option("--omega-c", omega_c, "cavity mode frequency");
        cmd->add_option("--omega-0", omega_0, "atomic transition frequency");
        cmd->add_option("--omega-p", omega_p, "photon frequency");
        cmd->add_option("--kappa", kappa, "cavity damping rate");
        cmd->add_option("--gamma", gamma, "atomic damping rate");
        cmd->add_option("--lambda", lambda, "atom-field coupling");
    }

    faraday::CavityParams resolve() const {
        faraday::CavityParams p;
        if (preset == "standard-tuning") {
            p = faraday::standard_tuning();
        } else {
            p = faraday::load_cavity_preset(
                data_dir(dir_flag) + "/presets/cavity.json", preset);
        }
        if (omega_c) p.omega_c = *omega_c;
        if (omega_0) p.omega_0 = *omega_0;
        if (omega_p) p.omega_p = *omega_p;
        if (kappa) p.kappa = *kappa;
        if (gamma) p.gamma = *gamma;
        if (lambda) p.lambda = *lambda;
        return p;
    }
};

int cmd_phases(const CavityOptions& cav, const std::string& output) {
    const faraday::CavityParams params = cav.resolve();
    const faraday::FaradayPhases ph = faraday::faraday_phases(params);
    json j{{"phi", ph.phi},
           {"phi0", ph.phi0},
           {"theta_minus", ph.theta_minus()},
           {"theta_plus", ph.theta_plus()},
           {"reflection_magnitude", ph.mag},
           {"empty_reflection_magnitude", ph.mag0}};
    emit(j, output);
    std::cerr << "phi = " << ph.phi << ", phi0 = " << ph.phi0
              << ", theta_F = " << ph.theta_minus() << "\n";
    if (std::abs(ph.mag - 1.0) > 1e-9)
        std::cerr << "warning: reflection magnitude " << ph.mag
                  << " < 1 (atomic damping); strict-mode gates will reject "
                     "these phases\n";
    return kExitOk;
}

struct PayloadOptions {
    std::string alpha = "0.6";
    std::string beta = "0.8";
    bool random_payload = false;
    std::uint64_t seed = 1;

    void attach(CLI::App* cmd) {
        cmd->add_option("--alpha", alpha, "payload amplitude alpha (complex)");
        cmd->add_option("--beta", beta, "payload amplitude beta (complex)");
        cmd->add_flag("--random-payload", random_payload,
                      "draw a random normalized payload from --seed");
        cmd->add_option("--seed", seed, "random seed")->default_val(1);
    }

    std::pair<cx, cx> resolve() const {
        if (random_payload) {
            std::mt19937_64 rng(seed);
            std::uniform_real_distribution<double> uni(-1.0, 1.0);
            cx a(uni(rng), uni(rng)), b(uni(rng), uni(rng));
            const double n = std::sqrt(std::norm(a) + std::norm(b));
            return {a / n, b / n};
        }
        cx a = parse_complex(alpha);
        cx b = parse_complex(beta);
        const double n = std::sqrt(std::norm(a) + std::norm(b));
        if (n < 1e-12) throw std::invalid_argument("payload has zero norm");
        if (std::abs(n - 1.0) > 1e-9) {
            a /= n;
            b /= n;
            std::cerr << "note: payload renormalized (|alpha|^2 + |beta|^2 = "
                      << n * n << ")\n";
        }
        return {a, b};
    }
};

json branch_json(const faraday::BranchRecord& br,
                 const std::vector<std::string>& targets) {
    json outcome = json::object();
    for (const auto& [label, bit] : br.outcome) {
        const bool photon =
            label == "F" || label == "F1" || label == "F2";
        outcome[label] = photon ? (bit ? "R" : "L") : std::to_string(bit);
    }
    json residual = json::array();
    const faraday::Vec amps =
        faraday::reorder_amplitudes(br.residual, targets);
    for (const cx& a : amps) residual.push_back(complex_json(a));
    return json{{"outcome", outcome},
                {"probability", br.probability},
                {"residual", residual},
                {"correction", br.correction.to_string()},
                {"corrected_fidelity", br.corrected_fidelity}};
}

int cmd_run(const std::string& protocol, int controls, const PayloadOptions& pay,
            const CavityOptions& cav, const std::string& mode, int samples,
            bool extended, const std::string& output) {
    if (mode != "enumerate" && mode != "sample")
        throw CLI::ValidationError("--mode must be 'enumerate' or 'sample'");
    const auto [a, b] = pay.resolve();
    const faraday::FaradayPhases ph = faraday::faraday_phases(cav.resolve());
    faraday::ProtocolSpec spec =
        faraday::build_protocol(protocol, controls, a, b, ph, extended);
    json j{{"protocol", spec.name},
           {"controls", spec.controls},
           {"alpha", complex_json(a)},
           {"beta", complex_json(b)},
           {"teleport_targets", spec.teleport_targets},
           {"mode", mode}};
    if (mode == "enumerate") {
        const faraday::RunResult result = faraday::run(spec);
        json branches = json::array();
        for (const auto& br : result.branches)
            branches.push_back(branch_json(br, spec.teleport_targets));
        j["branches"] = std::move(branches);
        std::cerr << spec.name << ": " << result.branches.size()
                  << " measurement branches\n";
    } else {
        if (samples < 1)
            throw CLI::ValidationError("--samples must be at least 1");
        const faraday::RunResult result = faraday::run(spec);
        std::mt19937_64 rng(pay.seed);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        json trace = json::array();
        for (int s = 0; s < samples; ++s) {
            const double u = uni(rng);
            double acc = 0.0;
            const faraday::BranchRecord* picked = &result.branches.back();
            for (const auto& br : result.branches) {
                acc += br.probability;
                if (u < acc) {
                    picked = &br;
                    break;
                }
            }
            trace.push_back(branch_json(*picked, spec.teleport_targets));
        }
        j["samples"] = std::move(trace);
        std::cerr << spec.name << ": " << samples << " sampled outcomes (seed "
                  << pay.seed << ")\n";
    }
    emit(j, output);
    return kExitOk;
}

const std::vector<std::string> kAllTables = {
    "ct_superposition_1", "ct_superposition_2", "cpt_entangled_1",
    "cpt_entangled_2",    "ct_entangled_1",     "ct_entangled_2"};

int cmd_verify_tables(const std::string& selector, const std::string& dir_flag,
                      const std::string& output) {
    const std::string dir = data_dir(dir_flag);
    std::vector<std::string> names;
    if (selector == "all") names = kAllTables;
    else names.push_back(selector);
    const auto errata = faraday::load_errata(dir + "/errata.json");
    json report = json::array();
    std::size_t total_rows = 0, total_mismatches = 0, unallowlisted = 0;
    for (const std::string& name : names) {
        const faraday::PublishedTable table =
            faraday::load_table(dir + "/tables/" + name + ".json");
        const faraday::TableVerificationReport rep =
            faraday::verify_table(table, errata);
        total_rows += rep.row_count;
        total_mismatches += rep.mismatches;
        unallowlisted += rep.unallowlisted_mismatches;
        json rows = json::array();
        for (const auto& row : rep.rows) {
            if (row.residual_match && row.correction_effect_ok &&
                row.note.empty())
                continue;  // report only rows that need attention
            json outcome = json::object();
            for (const auto& [k, v] : row.outcome) outcome[k] = v;
            rows.push_back(json{{"outcome", outcome},
                                {"printed_residual", row.printed_residual},
                                {"oracle_residual", row.oracle_residual},
                                {"printed_correction", row.printed_correction},
                                {"oracle_correction", row.oracle_correction},
                                {"residual_match", row.residual_match},
                                {"correction_effect_ok", row.correction_effect_ok},
                                {"allowlisted", row.allowlisted},
                                {"note", row.note}});
        }
        report.push_back(json{{"table", rep.table},
                              {"rows", rep.row_count},
                              {"mismatches", rep.mismatches},
                              {"unallowlisted_mismatches",
                               rep.unallowlisted_mismatches},
                              {"flagged_rows", std::move(rows)}});
        std::cerr << rep.table << ": " << rep.row_count - rep.mismatches << "/"
                  << rep.row_count << " rows match";
        if (rep.mismatches)
            std::cerr << " (" << rep.mismatches << " mismatching, "
                      << rep.mismatches - rep.unallowlisted_mismatches
                      << " allowlisted)";
        std::cerr << "\n";
    }
    json j{{"tables", std::move(report)},
           {"total_rows", total_rows},
           {"total_mismatches", total_mismatches},
           {"unallowlisted_mismatches", unallowlisted}};
    emit(j, output);
    return unallowlisted == 0 ? kExitOk : kExitVerificationFailure;
}

int cmd_resources(const std::string& preset, const std::string& model_file,
                  const std::string& dir_flag, std::optional<int> paths,
                  std::optional<std::uint64_t> trials, std::uint64_t seed,
                  const std::string& output) {
    faraday::LossModel model;
    if (!model_file.empty()) {
        std::ifstream in(model_file);
        if (!in)
            throw faraday::InvalidLossModel("cannot open model file: " +
                                            model_file);
        nlohmann::json mj;
        in >> mj;
        model.t_fiber = mj.at("t_fiber").get<double>();
        model.t_optics = mj.at("t_optics").get<double>();
        model.p_pol = mj.at("p_pol").get<double>();
        model.eta_det = mj.at("eta_det").get<double>();
        model.solid_angle = mj.at("solid_angle").get<double>();
        model.p_bell = mj.at("p_bell").get<double>();
        model.source_rate = mj.at("source_rate").get<double>();
        model.n_photon_paths = mj.at("n_photon_paths").get<int>();
    } else {
        model = faraday::load_loss_preset(
            data_dir(dir_flag) + "/presets/loss.json", preset);
    }
    if (paths) model.n_photon_paths = *paths;
    model.validate();
    const double p = faraday::success_probability(model);
    const double period = faraday::expected_event_period(model);
    json j{{"success_probability", p},
           {"expected_event_period_seconds", period},
           {"n_photon_paths", model.n_photon_paths},
           {"source_rate_hz", model.source_rate}};
    if (trials) {
        const faraday::MonteCarloYield mc =
            faraday::monte_carlo_yield(model, *trials, seed);
        j["monte_carlo"] = json{{"trials", *trials},
                                {"seed", seed},
                                {"successes", mc.successes},
                                {"empirical_rate", mc.empirical_rate}};
    }
    emit(j, output);
    std::cerr << "success probability " << p << ", expected period " << period
              << " s\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Simulator for controlled teleportation through photonic Faraday "
        "rotation: cavity phase reports, protocol runs, correction-table "
        "verification, and resource estimates."};
    app.require_subcommand(1);

    // phases
    auto* phases = app.add_subcommand(
        "phases", "reflection phases and Faraday rotation angles");
    CavityOptions phases_cav;
    phases_cav.attach(phases);
    std::string phases_out;
    phases->add_option("--output", phases_out, "write JSON here (default stdout)");

    // run / sample share options
    std::string run_protocol = "ct-superposition";
    int run_controls = 1;
    std::string run_mode = "enumerate";
    int run_samples = 1;
    bool run_extended = false;
    std::string run_out;
    CavityOptions run_cav;
    PayloadOptions run_pay;
    auto attach_run = [&](CLI::App* cmd) {
        cmd->add_option("--protocol", run_protocol,
                        "ct-superposition | cpt-entangled | ct-entangled");
        cmd->add_option("--controls", run_controls, "number of controllers")
            ->default_val(1);
        cmd->add_flag("--extended", run_extended,
                      "allow dual-photon scheme beyond two controllers");
        cmd->add_option("--output", run_out, "write JSON here (default stdout)");
        run_pay.attach(cmd);
        run_cav.attach(cmd);
    };
    auto* run = app.add_subcommand("run", "run a protocol pipeline");
    attach_run(run);
    run->add_option("--mode", run_mode, "enumerate | sample")
        ->default_val("enumerate");
    run->add_option("--samples", run_samples, "samples when --mode sample")
        ->default_val(1);
    auto* sample =
        app.add_subcommand("sample", "sample measurement outcomes of a run");
    attach_run(sample);
    int sample_count = 100;
    sample->add_option("--samples", sample_count, "number of sampled outcomes")
        ->default_val(100);

    // verify-tables
    auto* verify = app.add_subcommand(
        "verify-tables", "check the published correction tables against the "
                         "brute-force pipeline");
    std::string verify_selector = "all";
    std::string verify_dir, verify_out;
    verify->add_option("--table", verify_selector,
                       "table name or 'all'");
    verify->add_option("--data-dir", verify_dir,
                       "data directory (default: $FARADAY_DATA_DIR)");
    verify->add_option("--output", verify_out,
                       "write JSON here (default stdout)");

    // resources
    auto* resources = app.add_subcommand(
        "resources", "success probability and expected event period");
    std::string res_preset = "olmschenk-2009-like";
    std::string res_model, res_dir, res_out;
    std::optional<int> res_paths;
    std::optional<std::uint64_t> res_trials;
    std::uint64_t res_seed = 1;
    resources->add_option("--preset", res_preset, "named loss preset");
    resources->add_option("--model", res_model, "loss model JSON file");
    resources->add_option("--data-dir", res_dir,
                          "data directory (default: $FARADAY_DATA_DIR)");
    resources->add_option("--paths", res_paths,
                          "override number of photon paths");
    resources->add_option("--trials", res_trials,
                          "also run a Monte Carlo cross-check");
    resources->add_option("--seed", res_seed, "Monte Carlo seed")->default_val(1);
    resources->add_option("--output", res_out,
                          "write JSON here (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsageError;
    }

    try {
        if (phases->parsed()) return cmd_phases(phases_cav, phases_out);
        if (run->parsed())
            return cmd_run(run_protocol, run_controls, run_pay, run_cav,
                           run_mode, run_samples, run_extended, run_out);
        if (sample->parsed())
            return cmd_run(run_protocol, run_controls, run_pay, run_cav,
                           "sample", sample_count, run_extended, run_out);
        if (verify->parsed())
            return cmd_verify_tables(verify_selector, verify_dir, verify_out);
        if (resources->parsed())
            return cmd_resources(res_preset, res_model, res_dir, res_paths,
                                 res_trials, res_seed, res_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsageError;
    }
    return kExitUsageError;
}
