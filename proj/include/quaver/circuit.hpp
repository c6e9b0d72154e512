#ifndef QUAVER_CIRCUIT_HPP
#define QUAVER_CIRCUIT_HPP

#include <cassert>
#include <cstdio>
#include <string>
#include <vector>

namespace quaver {

enum class GateKind { x, ry, cx };

struct Gate {
    GateKind kind = GateKind::x;
    int target = 0;
    int control = -1;    // cx only
    double angle = 0.0;  // ry only, radians

    bool operator==(const Gate&) const = default;
};

// Ordered gate list over the {X, RY, CX} set. Qubit 0 is the least
// significant bit of a measured value.
struct Circuit {
    int num_qubits = 0;
    std::vector<Gate> gates;

    void x(int q) {
        assert(q >= 0 && q < num_qubits);
        gates.push_back({GateKind::x, q, -1, 0.0});
    }

    void ry(double angle, int q) {
        assert(q >= 0 && q < num_qubits);
        gates.push_back({GateKind::ry, q, -1, angle});
    }

    // Appending a CX that mirrors the previous gate cancels both; the
    // multiplexor decomposition relies on this when rotations are elided.
    void cx(int control, int target) {
        assert(control != target);
        assert(control >= 0 && control < num_qubits);
        assert(target >= 0 && target < num_qubits);
        if (!gates.empty() && gates.back().kind == GateKind::cx &&
            gates.back().control == control && gates.back().target == target) {
            gates.pop_back();
            return;
        }
        gates.push_back({GateKind::cx, target, control, 0.0});
    }

    bool operator==(const Circuit&) const = default;
};

struct GateCounts {
    std::size_t x = 0;
    std::size_t ry = 0;
    std::size_t cx = 0;
    bool operator==(const GateCounts&) const = default;
};

inline GateCounts gate_count(const Circuit& circuit) {
    GateCounts counts;
    for (const auto& g : circuit.gates) {
        switch (g.kind) {
            case GateKind::x: ++counts.x; break;
            case GateKind::ry: ++counts.ry; break;
            case GateKind::cx: ++counts.cx; break;
        }
    }
    return counts;
}

// One gate per line: kind, qubits, angle. For debugging and fixtures.
inline std::string dump(const Circuit& circuit) {
    std::string out = "qubits " + std::to_string(circuit.num_qubits) + "\n";
    char line[64];
    for (const auto& g : circuit.gates) {
        switch (g.kind) {
            case GateKind::x:
                std::snprintf(line, sizeof line, "x q%d\n", g.target);
                break;
            case GateKind::ry:
                std::snprintf(line, sizeof line, "ry q%d %.12g\n", g.target, g.angle);
                break;
            case GateKind::cx:
                std::snprintf(line, sizeof line, "cx q%d q%d\n", g.control, g.target);
                break;
        }
        out += line;
    }
    return out;
}

} // namespace quaver

#endif
