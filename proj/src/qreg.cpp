#include "faraday/qreg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace faraday {

namespace {
const double kSqrtHalf = std::sqrt(0.5);
}

SingleState SingleState::plus() { return {kSqrtHalf, kSqrtHalf}; }

std::size_t QuantumRegister::index_of(const std::string& label) const {
    for (std::size_t i = 0; i < subsystems.size(); ++i)
        if (subsystems[i].name == label) return i;
    throw UnknownLabel("no subsystem named '" + label + "'");
}

Kind QuantumRegister::kind_of(const std::string& label) const {
    return subsystems[index_of(label)].kind;
}

double QuantumRegister::norm_sq() const {
    double s = 0.0;
    for (const cx& a : amplitudes) s += std::norm(a);
    return s;
}

QuantumRegister new_register(
    const std::vector<std::pair<Subsystem, SingleState>>& states) {
    QuantumRegister reg;
    reg.amplitudes = {cx(1.0, 0.0)};
    for (const auto& [sub, st] : states) {
        const double n = std::norm(st.a0) + std::norm(st.a1);
        if (std::abs(n - 1.0) > 1e-9)
            throw NotNormalized("preparation for '" + sub.name + "' is not normalized");
        for (const Subsystem& existing : reg.subsystems)
            if (existing.name == sub.name)
                throw DuplicateLabel("duplicate subsystem label '" + sub.name + "'");
        Vec next(reg.amplitudes.size() * 2);
        for (std::size_t i = 0; i < reg.amplitudes.size(); ++i) {
            next[2 * i] = reg.amplitudes[i] * st.a0;
            next[2 * i + 1] = reg.amplitudes[i] * st.a1;
        }
        reg.amplitudes = std::move(next);
        reg.subsystems.push_back(sub);
    }
    if (reg.subsystems.empty())
        throw NotNormalized("register needs at least one subsystem");
    return reg;
}

void append_entangled_pair(QuantumRegister& reg, const Subsystem& first,
                           const Subsystem& second, const std::array<cx, 4>& joint) {
    double n = 0.0;
    for (const cx& a : joint) n += std::norm(a);
    if (std::abs(n - 1.0) > 1e-9)
        throw NotNormalized("joint preparation is not normalized");
    for (const Subsystem& sub : {first, second})
        for (const Subsystem& existing : reg.subsystems)
            if (existing.name == sub.name)
                throw DuplicateLabel("duplicate subsystem label '" + sub.name + "'");
    if (first.name == second.name)
        throw DuplicateLabel("duplicate subsystem label '" + first.name + "'");
    Vec next(reg.amplitudes.size() * 4);
    for (std::size_t i = 0; i < reg.amplitudes.size(); ++i)
        for (std::size_t j = 0; j < 4; ++j)
            next[4 * i + j] = reg.amplitudes[i] * joint[j];
    reg.amplitudes = std::move(next);
    reg.subsystems.push_back(first);
    reg.subsystems.push_back(second);
}

void apply_single(QuantumRegister& reg, const std::string& target, const Mat2& u) {
    // unitarity: U U^dag = I within 1e-10
    const cx a = u[0], b = u[1], c = u[2], d = u[3];
    const cx r00 = a * std::conj(a) + b * std::conj(b);
    const cx r01 = a * std::conj(c) + b * std::conj(d);
    const cx r11 = c * std::conj(c) + d * std::conj(d);
    if (std::abs(r00 - 1.0) > 1e-10 || std::abs(r11 - 1.0) > 1e-10 ||
        std::abs(r01) > 1e-10)
        throw NotUnitary("matrix for '" + target + "' is not unitary");
    const std::size_t n = reg.count();
    const std::size_t shift = n - 1 - reg.index_of(target);
    const std::size_t bit = std::size_t{1} << shift;
    for (std::size_t i = 0; i < reg.amplitudes.size(); ++i) {
        if (i & bit) continue;
        const cx lo = reg.amplitudes[i];
        const cx hi = reg.amplitudes[i | bit];
        reg.amplitudes[i] = a * lo + b * hi;
        reg.amplitudes[i | bit] = c * lo + d * hi;
    }
}

void apply_controlled_phase_pair(QuantumRegister& reg, const std::string& photon,
                                 const std::string& atom, const FaradayPhases& phases,
                                 GateMode mode) {
    if (reg.kind_of(photon) != Kind::PhotonPolarization)
        throw KindMismatch("'" + photon + "' is not a photon polarization subsystem");
    if (reg.kind_of(atom) != Kind::Atom)
        throw KindMismatch("'" + atom + "' is not an atom subsystem");
    if (mode == GateMode::Strict && std::abs(phases.mag - 1.0) > 1e-9)
        throw NonUnitMagnitude(
            "reflection magnitude deviates from 1 (lossy atom); use renormalize "
            "mode to apply phases only");
    const std::size_t n = reg.count();
    const std::size_t pshift = n - 1 - reg.index_of(photon);
    const std::size_t ashift = n - 1 - reg.index_of(atom);
    const cx equal = std::polar(1.0, phases.phi);
    const cx unequal = std::polar(1.0, phases.phi0);
    for (std::size_t i = 0; i < reg.amplitudes.size(); ++i) {
        const int pb = static_cast<int>((i >> pshift) & 1);
        const int ab = static_cast<int>((i >> ashift) & 1);
        reg.amplitudes[i] *= (pb == ab) ? equal : unequal;
    }
    if (mode == GateMode::Renormalize) reg.success_weight *= phases.mag;
}

std::vector<MeasurementBranch> measure_enumerate(
    const QuantumRegister& reg, const std::vector<std::string>& targets) {
    if (targets.empty()) throw EmptyTargets("measurement needs at least one target");
    const std::size_t n = reg.count();
    std::vector<std::size_t> tshift;
    tshift.reserve(targets.size());
    for (const std::string& t : targets) tshift.push_back(n - 1 - reg.index_of(t));
    std::vector<std::string> rest;
    std::vector<std::size_t> rshift;
    for (std::size_t q = 0; q < n; ++q) {
        const std::string& name = reg.subsystems[q].name;
        if (std::find(targets.begin(), targets.end(), name) == targets.end()) {
            rest.push_back(name);
            rshift.push_back(n - 1 - q);
        }
    }
    const std::size_t nrest = rest.size();
    std::vector<Vec> partial(std::size_t{1} << targets.size(),
                             Vec(std::size_t{1} << nrest, cx{}));
    for (std::size_t i = 0; i < reg.amplitudes.size(); ++i) {
        if (reg.amplitudes[i] == cx{}) continue;
        std::size_t key = 0;
        for (std::size_t s : tshift) key = (key << 1) | ((i >> s) & 1);
        std::size_t j = 0;
        for (std::size_t s : rshift) j = (j << 1) | ((i >> s) & 1);
        partial[key][j] += reg.amplitudes[i];
    }
    std::vector<MeasurementBranch> out;
    for (std::size_t key = 0; key < partial.size(); ++key) {
        double p = 0.0;
        for (const cx& a : partial[key]) p += std::norm(a);
        if (p < 1e-14) continue;
        MeasurementBranch br;
        for (std::size_t t = 0; t < targets.size(); ++t)
            br.outcome[targets[t]] =
                static_cast<int>((key >> (targets.size() - 1 - t)) & 1);
        br.probability = p;
        br.residual.success_weight = reg.success_weight;
        const double inv = 1.0 / std::sqrt(p);
        br.residual.amplitudes = partial[key];
        for (cx& a : br.residual.amplitudes) a *= inv;
        for (const std::string& name : rest)
            br.residual.subsystems.push_back(reg.subsystems[reg.index_of(name)]);
        if (rest.empty()) br.residual.amplitudes = {cx(1.0, 0.0)};
        out.push_back(std::move(br));
    }
    return out;
}

MeasurementBranch measure_sample(const QuantumRegister& reg,
                                 const std::vector<std::string>& targets,
                                 std::uint64_t seed) {
    const auto branches = measure_enumerate(reg, targets);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double u = uni(rng);
    double acc = 0.0;
    for (const auto& br : branches) {
        acc += br.probability;
        if (u < acc) return br;
    }
    return branches.back();
}

std::string PauliOp::to_string() const {
    static const char* names[] = {"I", "X", "Z", "ZX"};
    std::string s;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        if (i) s += "⊗";
        s += names[static_cast<int>(factors[i])];
    }
    return s;
}

PauliOp PauliOp::parse(const std::string& s) {
    PauliOp op;
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t next = s.find("⊗", pos);
        std::string tok =
            (next == std::string::npos) ? s.substr(pos) : s.substr(pos, next - pos);
        if (tok == "I") op.factors.push_back(Pauli::I);
        else if (tok == "X") op.factors.push_back(Pauli::X);
        else if (tok == "Z") op.factors.push_back(Pauli::Z);
        else if (tok == "ZX") op.factors.push_back(Pauli::ZX);
        else if (tok == "XZ") op.factors.push_back(Pauli::ZX);  // same up to sign
        else throw std::runtime_error("bad Pauli token '" + tok + "'");
        if (next == std::string::npos) break;
        pos = next + std::string("⊗").size();
    }
    if (op.factors.empty()) throw std::runtime_error("empty Pauli string");
    return op;
}

Vec PauliOp::apply(const Vec& state) const {
    const std::size_t k = factors.size();
    Vec out(state.size(), cx{});
    for (std::size_t i = 0; i < state.size(); ++i) {
        if (state[i] == cx{}) continue;
        std::size_t j = i;
        cx coeff = state[i];
        for (std::size_t q = 0; q < k; ++q) {
            const std::size_t bit = std::size_t{1} << (k - 1 - q);
            const int b = (i & bit) ? 1 : 0;
            switch (factors[q]) {
                case Pauli::I:
                    break;
                case Pauli::X:
                    j ^= bit;
                    break;
                case Pauli::Z:
                    if (b) coeff = -coeff;
                    break;
                case Pauli::ZX:
                    // X then Z: bit flips, then sign from the flipped bit
                    j ^= bit;
                    if (!b) coeff = -coeff;
                    break;
            }
        }
        out[j] += coeff;
    }
    return out;
}

Vec canonical_phase(const Vec& v) {
    for (const cx& a : v) {
        if (std::abs(a) > 1e-12) {
            const cx phase = a / std::abs(a);
            Vec out(v.size());
            for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / phase;
            return out;
        }
    }
    return v;
}

bool states_equal_up_to_phase(const Vec& u, const Vec& v, double tol) {
    if (u.size() != v.size()) return false;
    const Vec cu = canonical_phase(u);
    const Vec cv = canonical_phase(v);
    for (std::size_t i = 0; i < cu.size(); ++i)
        if (std::abs(cu[i] - cv[i]) > tol) return false;
    return true;
}

Vec reorder_amplitudes(const QuantumRegister& reg,
                       const std::vector<std::string>& order) {
    const std::size_t n = reg.count();
    if (order.size() != n)
        throw UnknownLabel("reorder list does not cover the register");
    std::vector<std::size_t> shift;
    shift.reserve(n);
    for (const std::string& lab : order) shift.push_back(n - 1 - reg.index_of(lab));
    Vec out(reg.amplitudes.size(), cx{});
    for (std::size_t i = 0; i < reg.amplitudes.size(); ++i) {
        std::size_t j = 0;
        for (std::size_t s : shift) j = (j << 1) | ((i >> s) & 1);
        out[j] = reg.amplitudes[i];
    }
    return out;
}

}  // namespace faraday
