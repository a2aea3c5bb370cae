#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "faraday/cavity.hpp"
#include "faraday/optics.hpp"
#include "faraday/protocol.hpp"
#include "faraday/qreg.hpp"

using namespace faraday;

namespace {

const std::string kData = FARADAY_DATA_DIR;

FaradayPhases tuned() { return faraday_phases(standard_tuning()); }

std::pair<cx, cx> random_payload(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    cx a(uni(rng), uni(rng)), b(uni(rng), uni(rng));
    const double n = std::sqrt(std::norm(a) + std::norm(b));
    return {a / n, b / n};
}

const std::vector<std::string> kCheckpointFiles = {
    "ct_superposition_1_after_controls", "ct_superposition_1_after_cavities",
    "ct_superposition_1_final",          "ct_superposition_2_after_controls",
    "ct_superposition_2_final",          "cpt_entangled_1_after_cavities",
    "cpt_entangled_1_final",             "cpt_entangled_2_final",
    "ct_entangled_1_lower_branch",       "ct_entangled_1_after_cavities",
    "ct_entangled_1_final",              "ct_entangled_2_final"};

Vec pipeline_state_for(const ReferenceState& ref, cx a, cx b) {
    ProtocolSpec spec = build_protocol(ref.protocol, ref.controls, a, b, tuned());
    const QuantumRegister reg = run_to_checkpoint(spec, ref.stage);
    return reorder_amplitudes(reg, ref.subsystems);
}

}  // namespace

TEST_CASE("builders expose the documented shapes") {
    const auto ph = tuned();
    const ProtocolSpec s1 = build_ct_superposition(1, cx(0.6, 0.0), cx(0.8, 0.0), ph);
    CHECK(s1.name == "ct-superposition-1");
    CHECK(s1.teleport_targets == std::vector<std::string>{"A"});
    CHECK(s1.control_labels == std::vector<std::string>{"B"});
    CHECK(s1.initial.count() == 4);  // A, B, C, F

    const ProtocolSpec s2 = build_cpt_entangled(2, cx(0.6, 0.0), cx(0.8, 0.0), ph);
    CHECK(s2.teleport_targets == std::vector<std::string>{"A", "D"});
    CHECK(s2.control_labels == std::vector<std::string>{"B", "B1"});
    CHECK(s2.initial.count() == 6);  // A, B, B1, C, D, F

    const ProtocolSpec s3 = build_ct_entangled(1, cx(0.6, 0.0), cx(0.8, 0.0), ph);
    CHECK(s3.teleport_targets == std::vector<std::string>{"A", "D"});
    CHECK(s3.initial.count() == 7);  // A, B, C, D, E, F1, F2

    CHECK(control_names(3) == std::vector<std::string>{"B", "B1", "B2"});
    CHECK_THROWS(build_protocol("no-such-family", 1, cx(1.0, 0.0), cx{}, ph));
    CHECK_THROWS(build_ct_superposition(0, cx(1.0, 0.0), cx{}, ph));
}

TEST_CASE("dual-photon scheme beyond two controllers requires the extended flag") {
    const auto ph = tuned();
    CHECK_THROWS(build_ct_entangled(3, cx(0.6, 0.0), cx(0.8, 0.0), ph));
    const ProtocolSpec s = build_ct_entangled(3, cx(0.6, 0.0), cx(0.8, 0.0), ph, true);
    CHECK(s.controls == 3);
}

TEST_CASE("pipeline states reproduce the transcribed reference states") {
    std::mt19937_64 rng(101);
    for (const std::string& name : kCheckpointFiles) {
        CAPTURE(name);
        const ReferenceState ref =
            load_reference_state(kData + "/checkpoints/" + name + ".json");
        const bool corrected = !ref.corrected_terms.empty();
        for (int rep = 0; rep < 12; ++rep) {
            const auto [a, b] = random_payload(rng);
            const Vec simulated = pipeline_state_for(ref, a, b);
            const Vec expected = reference_vector(ref, corrected, a, b);
            CHECK(states_equal_up_to_phase(simulated, expected, 1e-10));
        }
    }
}

TEST_CASE("annotated reference states disagree with their literal print") {
    std::mt19937_64 rng(103);
    int annotated = 0;
    for (const std::string& name : kCheckpointFiles) {
        const ReferenceState ref =
            load_reference_state(kData + "/checkpoints/" + name + ".json");
        if (ref.corrected_terms.empty()) continue;
        ++annotated;
        CAPTURE(name);
        CHECK_FALSE(ref.printed_deviation.empty());
        const auto [a, b] = random_payload(rng);
        const Vec simulated = pipeline_state_for(ref, a, b);
        CHECK_FALSE(states_equal_up_to_phase(
            simulated, reference_vector(ref, false, a, b), 1e-10));
        CHECK(states_equal_up_to_phase(
            simulated, reference_vector(ref, true, a, b), 1e-10));
    }
    CHECK(annotated == 3);
}

TEST_CASE("all branches are equiprobable at 1/2^m for any payload") {
    std::mt19937_64 rng(107);
    const auto ph = tuned();
    struct Case { std::string family; int controls; bool extended; };
    const std::vector<Case> cases = {
        {"ct-superposition", 1, false}, {"ct-superposition", 2, false},
        {"ct-superposition", 3, false}, {"cpt-entangled", 1, false},
        {"cpt-entangled", 2, false},    {"ct-entangled", 1, false},
        {"ct-entangled", 2, false},     {"ct-entangled", 3, true}};
    for (const Case& c : cases) {
        CAPTURE(c.family);
        CAPTURE(c.controls);
        for (int rep = 0; rep < 3; ++rep) {
            const auto [a, b] = random_payload(rng);
            const RunResult res =
                run(build_protocol(c.family, c.controls, a, b, ph, c.extended));
            const std::size_t m =
                build_protocol(c.family, c.controls, a, b, ph, c.extended)
                    .stages.back().targets.size();
            CHECK(res.branches.size() == (std::size_t{1} << m));
            const double uniform = 1.0 / static_cast<double>(res.branches.size());
            for (const BranchRecord& br : res.branches)
                CHECK(std::abs(br.probability - uniform) < 1e-12);
        }
    }
}

TEST_CASE("every branch reaches fidelity one after its synthesized correction") {
    std::mt19937_64 rng(109);
    const auto ph = tuned();
    for (const std::string& family :
         {"ct-superposition", "cpt-entangled", "ct-entangled"}) {
        for (int controls : {1, 2}) {
            CAPTURE(family);
            CAPTURE(controls);
            for (int rep = 0; rep < 5; ++rep) {
                const auto [a, b] = random_payload(rng);
                const RunResult res =
                    run(build_protocol(family, controls, a, b, ph));
                for (const BranchRecord& br : res.branches)
                    CHECK(std::abs(br.corrected_fidelity - 1.0) < 1e-10);
            }
        }
    }
}

TEST_CASE("corrections depend on the outcome, not the payload") {
    std::mt19937_64 rng(113);
    const auto ph = tuned();
    for (const std::string& family :
         {"ct-superposition", "cpt-entangled", "ct-entangled"}) {
        std::map<std::string, std::string> seen;
        for (int rep = 0; rep < 8; ++rep) {
            const auto [a, b] = random_payload(rng);
            const RunResult res = run(build_protocol(family, 2, a, b, ph));
            for (const BranchRecord& br : res.branches) {
                std::string key;
                for (const auto& [label, bit] : br.outcome)
                    key += label + "=" + std::to_string(bit) + ";";
                const std::string corr = br.correction.to_string();
                auto [it, inserted] = seen.emplace(key, corr);
                if (!inserted) CHECK(it->second == corr);
            }
        }
    }
}

TEST_CASE("trivial payloads come out exactly") {
    const auto ph = tuned();
    const RunResult res =
        run(build_protocol("ct-superposition", 1, cx(1.0, 0.0), cx{}, ph));
    for (const BranchRecord& br : res.branches) {
        const Vec amps = reorder_amplitudes(br.residual, {"A"});
        // correction restores |0> exactly
        const Vec fixed = br.correction.apply(amps);
        CHECK(std::abs(std::abs(fixed[0]) - 1.0) < 1e-10);
        CHECK(std::abs(fixed[1]) < 1e-10);
    }
}

TEST_CASE("partial teleportation re-establishes the entangled pair on (A, D)") {
    std::mt19937_64 rng(127);
    const auto ph = tuned();
    for (int controls : {1, 2}) {
        const auto [a, b] = random_payload(rng);
        const RunResult res = run(build_protocol("cpt-entangled", controls, a, b, ph));
        const Vec intended = intended_payload(2, a, b);
        for (const BranchRecord& br : res.branches) {
            const Vec amps = reorder_amplitudes(br.residual, {"A", "D"});
            const Vec fixed = br.correction.apply(amps);
            CHECK(states_equal_up_to_phase(fixed, intended, 1e-10));
        }
    }
}

TEST_CASE("wave-plate parity rule: the wrong plate breaks at least one branch") {
    std::mt19937_64 rng(131);
    const auto ph = tuned();
    for (const std::string& family :
         {"ct-superposition", "cpt-entangled", "ct-entangled"}) {
        for (int controls : {1, 2}) {
            CAPTURE(family);
            CAPTURE(controls);
            const auto [a, b] = random_payload(rng);
            ProtocolSpec spec = build_protocol(family, controls, a, b, ph);
            spec.enforce_parity = false;
            const std::string plate_photon =
                (family == "ct-entangled") ? "F2" : "F";
            bool swapped = false;
            for (Stage& st : spec.stages) {
                if (st.type == Stage::Type::WavePlateStage &&
                    st.photon == plate_photon) {
                    st.plate = (st.plate == WavePlate::QWP1) ? WavePlate::QWP2
                                                             : WavePlate::QWP1;
                    swapped = true;
                }
            }
            REQUIRE(swapped);
            bool broken = false;
            try {
                const RunResult res = run(spec);
                for (const BranchRecord& br : res.branches)
                    if (br.corrected_fidelity < 1.0 - 1e-6) broken = true;
            } catch (const NoPauliCorrection&) {
                broken = true;
            }
            CHECK(broken);
        }
    }
}

TEST_CASE("the parity guard rejects a mismatched plate up front") {
    const auto ph = tuned();
    ProtocolSpec spec =
        build_protocol("ct-superposition", 1, cx(0.6, 0.0), cx(0.8, 0.0), ph);
    for (Stage& st : spec.stages)
        if (st.type == Stage::Type::WavePlateStage && st.photon == "F")
            st.plate = WavePlate::QWP2;  // one controller needs QWP1
    CHECK_THROWS_AS(run(spec), ParityRuleViolation);
}

TEST_CASE("correction synthesis picks the canonical operator or reports none") {
    const Vec intended = intended_payload(1, cx(0.6, 0.0), cx(0.8, 0.0));
    CHECK(synthesize_correction(intended, intended).to_string() == "I");
    CHECK(synthesize_correction({cx(0.8, 0.0), cx(0.6, 0.0)}, intended)
              .to_string() == "X");
    CHECK(synthesize_correction({cx(0.6, 0.0), cx(-0.8, 0.0)}, intended)
              .to_string() == "Z");
    CHECK(synthesize_correction({cx(0.8, 0.0), cx(-0.6, 0.0)}, intended)
              .to_string() == "ZX");
    CHECK_THROWS_AS(synthesize_correction({cx(0.6, 0.0), cx(0.0, 0.8)}, intended),
                    NoPauliCorrection);
}

TEST_CASE("table verification flags only the allowlisted rows") {
    const auto errata = load_errata(kData + "/errata.json");
    const std::map<std::string, std::size_t> expected_mismatches = {
        {"ct_superposition_1", 0}, {"ct_superposition_2", 4},
        {"cpt_entangled_1", 0},    {"cpt_entangled_2", 0},
        {"ct_entangled_1", 1},     {"ct_entangled_2", 0}};
    for (const auto& [name, mism] : expected_mismatches) {
        CAPTURE(name);
        const PublishedTable table = load_table(kData + "/tables/" + name + ".json");
        const TableVerificationReport rep = verify_table(table, errata);
        CHECK(rep.mismatches == mism);
        CHECK(rep.unallowlisted_mismatches == 0);
        for (const TableRowReport& row : rep.rows)
            if (!row.residual_match || !row.correction_effect_ok) {
                CHECK(row.allowlisted);
                CHECK_FALSE(row.oracle_residual.empty());
                CHECK_FALSE(row.oracle_correction.empty());
            }
    }
}

TEST_CASE("an injected table fault is caught and not allowlisted") {
    const auto errata = load_errata(kData + "/errata.json");
    PublishedTable table = load_table(kData + "/tables/ct_superposition_1.json");
    const TableVerificationReport clean = verify_table(table, errata);
    REQUIRE(clean.unallowlisted_mismatches == 0);
    // flip one residual sign
    table.rows[2].residual[1].first =
        (table.rows[2].residual[1].first[0] == '+')
            ? "-" + table.rows[2].residual[1].first.substr(1)
            : "+" + table.rows[2].residual[1].first.substr(1);
    const TableVerificationReport faulty = verify_table(table, errata);
    CHECK(faulty.mismatches == clean.mismatches + 1);
    CHECK(faulty.unallowlisted_mismatches == 1);
}

TEST_CASE("corrupted data files raise the malformed-file error") {
    const std::string path = "corrupt_table_test.json";
    {
        std::ofstream out(path);
        out << "{ not json";
    }
    CHECK_THROWS_AS(load_table(path), MalformedDataFile);
    CHECK_THROWS_AS(load_reference_state(path), MalformedDataFile);
    CHECK_THROWS_AS(load_errata(path), MalformedDataFile);
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_table("does_not_exist.json"), MalformedDataFile);
}

TEST_CASE("intended payloads") {
    const Vec one = intended_payload(1, cx(0.6, 0.0), cx(0.8, 0.0));
    CHECK(one == Vec{cx(0.6, 0.0), cx(0.8, 0.0)});
    const Vec two = intended_payload(2, cx(0.6, 0.0), cx(0.8, 0.0));
    REQUIRE(two.size() == 4);
    CHECK(two[0b01] == cx(0.6, 0.0));
    CHECK(two[0b10] == cx(0.8, 0.0));
    CHECK(two[0b00] == cx{});
    CHECK(two[0b11] == cx{});
}
