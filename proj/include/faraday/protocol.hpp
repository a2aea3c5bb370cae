#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "faraday/optics.hpp"
#include "faraday/qreg.hpp"

namespace faraday {

struct ParityRuleViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoPauliCorrection : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MalformedDataFile : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One step of a protocol pipeline.
struct Stage {
    enum class Type { CavityInteraction, WavePlateStage, HadamardAtom, Measure };

    Type type = Type::Measure;
    std::string photon;                 // CavityInteraction / WavePlateStage
    std::string atom;                   // CavityInteraction / HadamardAtom
    FaradayPhases phases;               // CavityInteraction
    WavePlate plate = WavePlate::QWP1;  // WavePlateStage
    std::vector<std::string> targets;   // Measure

    static Stage cavity(std::string photon, std::string atom, FaradayPhases ph);
    static Stage wave_plate(std::string photon, WavePlate kind);
    static Stage hadamard(std::string atom);
    static Stage measure(std::vector<std::string> targets);
};

struct ProtocolSpec {
    std::string name;    // e.g. "ct-superposition-1"
    std::string family;  // ct-superposition | cpt-entangled | ct-entangled
    int controls = 1;
    QuantumRegister initial;
    std::vector<Stage> stages;  // final stage is the joint measurement
    std::vector<std::string> teleport_targets;
    std::vector<std::string> control_labels;
    cx alpha{1.0, 0.0};
    cx beta{0.0, 0.0};
    GateMode mode = GateMode::Strict;
    bool enforce_parity = true;
    // Named pipeline checkpoints -> number of leading stages they cover.
    std::map<std::string, std::size_t> checkpoints;
};

struct BranchRecord {
    std::map<std::string, int> outcome;
    double probability = 0.0;
    QuantumRegister residual;
    PauliOp correction;
    double corrected_fidelity = 0.0;
};

struct RunResult {
    QuantumRegister pre_measurement;
    std::vector<BranchRecord> branches;
};

// Control labels are B, B1, B2, ... in order.
std::vector<std::string> control_names(int n_controls);

ProtocolSpec build_ct_superposition(int n_controls, cx alpha, cx beta,
                                    const FaradayPhases& phases);
ProtocolSpec build_cpt_entangled(int n_controls, cx alpha, cx beta,
                                 const FaradayPhases& phases);
// n_controls beyond 2 follows the same parity rule and is permitted only with
// extended = true.
ProtocolSpec build_ct_entangled(int n_controls, cx alpha, cx beta,
                                const FaradayPhases& phases, bool extended = false);

ProtocolSpec build_protocol(const std::string& family, int n_controls, cx alpha,
                            cx beta, const FaradayPhases& phases,
                            bool extended = false);

// Intended payload on the teleport targets: alpha|0> + beta|1> for one
// target, alpha|01> + beta|10> for two.
Vec intended_payload(std::size_t n_targets, cx alpha, cx beta);

RunResult run(const ProtocolSpec& spec);

// State after the leading stages covered by the named checkpoint
// ("after-controls", "after-cavities", "lower-branch", "final").
QuantumRegister run_to_checkpoint(const ProtocolSpec& spec,
                                  const std::string& checkpoint);

// First operator in canonical order (I < X < Z < ZX per target, first target
// most significant) mapping `residual` onto `intended` up to global phase.
PauliOp synthesize_correction(const Vec& residual, const Vec& intended);

// ---- bundled reference data ----

// One symbolic amplitude: coeff in {+1,-1,+i,-i}, sym in {alpha,beta,one},
// ket assigns a basis letter to each subsystem.
struct SymbolicTerm {
    std::string coeff;
    std::string sym;
    std::map<std::string, std::string> ket;
};

// A transcribed pipeline state, kept literal; where the printed source
// deviates from its own pipeline, a corrected term list is bundled too.
struct ReferenceState {
    std::string name;
    std::string protocol;
    int controls = 1;
    std::string stage;
    std::vector<std::string> subsystems;
    std::map<std::string, std::string> factored;  // label -> payload1|plus|linear
    std::vector<SymbolicTerm> terms;
    std::vector<SymbolicTerm> corrected_terms;  // empty when the print is clean
    std::string printed_deviation;
};

ReferenceState load_reference_state(const std::string& path);

// Normalized state vector of a transcription for a concrete payload, in the
// transcription's subsystem order.
Vec reference_vector(const ReferenceState& ref, bool use_corrected, cx alpha,
                     cx beta);

// One row of a transcribed correction table.
struct TableRowData {
    std::map<std::string, std::string> outcome;  // label -> "0"/"1"/"L"/"R"
    std::vector<std::pair<std::string, std::string>>
        residual;  // (signed sym like "+alpha", ket bits over targets)
    std::string correction;
};

struct PublishedTable {
    std::string name;
    std::string protocol;
    int controls = 1;
    std::vector<std::string> outcome_labels;
    std::vector<std::string> target_labels;
    std::vector<TableRowData> rows;
    std::vector<std::string> notes;
};

PublishedTable load_table(const std::string& path);

struct ErrataEntry {
    std::string table;
    std::size_t row = 0;
    std::string reason;
};

std::vector<ErrataEntry> load_errata(const std::string& path);

struct TableRowReport {
    std::map<std::string, std::string> outcome;
    std::string printed_residual;
    std::string oracle_residual;
    std::string printed_correction;
    std::string oracle_correction;
    bool residual_match = false;
    bool correction_effect_ok = false;
    bool allowlisted = false;
    std::string note;
};

struct TableVerificationReport {
    std::string table;
    std::size_t row_count = 0;
    std::size_t mismatches = 0;
    std::size_t unallowlisted_mismatches = 0;
    std::vector<TableRowReport> rows;
};

// Checks every table row against the brute-force pipeline (the pipeline is
// authoritative): stated residual up to global phase, and whether the stated
// correction restores the intended payload. Mismatching rows covered by the
// errata list are marked allowlisted and annotated with the oracle's values.
TableVerificationReport verify_table(const PublishedTable& table,
                                     const std::vector<ErrataEntry>& errata);

}  // namespace faraday
