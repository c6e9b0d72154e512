#ifndef QUAVER_STATE_PREP_HPP
#define QUAVER_STATE_PREP_HPP

#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "quaver/circuit.hpp"

namespace quaver {

struct NotNormalized : std::runtime_error {
    explicit NotNormalized(const std::string& msg) : std::runtime_error("target not normalized: " + msg) {}
};

struct NegativeAmplitude : std::runtime_error {
    explicit NegativeAmplitude(const std::string& msg)
        : std::runtime_error("negative target amplitude: " + msg) {}
};

namespace detail {

inline constexpr double kAngleEps = 1e-12;

// In-place Walsh-Hadamard transform: v'[m] = sum_j (-1)^popcount(m & j) v[j].
inline void fwht(std::vector<double>& v) {
    for (std::size_t len = 1; len < v.size(); len <<= 1) {
        for (std::size_t i = 0; i < v.size(); i += len << 1) {
            for (std::size_t k = i; k < i + len; ++k) {
                double a = v[k];
                double b = v[k + len];
                v[k] = a + b;
                v[k + len] = a - b;
            }
        }
    }
}

// Emits an RY rotation of angles[j] on `target`, selected by the control
// qubits target+1 .. target+controls holding the bits of j (lowest control
// bit on qubit target+1). Decomposed into plain rotations interleaved with
// CX gates following the Gray-code ordering, with angles mapped through
// the Walsh-Hadamard transform.
inline void emit_multiplexed_ry(Circuit& circuit, int target, int controls,
                                std::vector<double> angles) {
    bool all_zero = true;
    bool all_equal = true;
    for (double a : angles) {
        if (std::abs(a) >= kAngleEps) all_zero = false;
        if (std::abs(a - angles[0]) >= kAngleEps) all_equal = false;
    }
    if (all_zero) return;
    if (controls == 0 || all_equal) {
        circuit.ry(angles[0], target);
        return;
    }

    fwht(angles);
    const std::size_t m = std::size_t{1} << controls;
    const double scale = 1.0 / static_cast<double>(m);
    for (std::size_t i = 1; i <= m; ++i) {
        std::size_t gray_prev = (i - 1) ^ ((i - 1) >> 1);
        double angle = angles[gray_prev] * scale;
        if (std::abs(angle) >= kAngleEps) circuit.ry(angle, target);
        int flipped_bit = (i == m) ? controls - 1
                                   : static_cast<int>(std::countr_zero(i));
        circuit.cx(target + 1 + flipped_bit, target);
    }
}

} // namespace detail

// Synthesizes a circuit preparing the given non-negative real amplitude
// vector from |0...0>. Walks the amplitude tree from the top qubit down:
// at each level the rotation conditioned on the higher-qubit prefix is
// theta = 2*atan2(|1-branch|, |0-branch|); each level's conditional
// rotation is emitted as a multiplexed RY. Targets that are basis states
// reduce to X gates only.
inline Circuit prepare_state(std::span<const double> target, int k) {
    if (k < 1 || target.size() != (std::size_t{1} << k))
        throw std::invalid_argument("target length must be 2^k");

    double norm2 = 0.0;
    std::size_t nonzero = 0;
    std::size_t last_nonzero = 0;
    for (std::size_t i = 0; i < target.size(); ++i) {
        double v = target[i];
        if (v < 0.0) throw NegativeAmplitude("index " + std::to_string(i));
        if (v > 0.0) {
            ++nonzero;
            last_nonzero = i;
        }
        norm2 += v * v;
    }
    if (std::abs(std::sqrt(norm2) - 1.0) > 1e-9)
        throw NotNormalized("L2 norm " + std::to_string(std::sqrt(norm2)));

    Circuit circuit;
    circuit.num_qubits = k;

    if (nonzero == 1) {
        for (int q = 0; q < k; ++q)
            if (last_nonzero & (std::size_t{1} << q)) circuit.x(q);
        return circuit;
    }

    // Squared norms of the prefix subtrees, halved level by level.
    std::vector<std::vector<double>> subtree(static_cast<std::size_t>(k) + 1);
    subtree[static_cast<std::size_t>(k)].resize(target.size());
    for (std::size_t i = 0; i < target.size(); ++i)
        subtree[static_cast<std::size_t>(k)][i] = target[i] * target[i];
    for (int depth = k - 1; depth >= 0; --depth) {
        std::vector<double> up(std::size_t{1} << depth);
        const auto& lo = subtree[static_cast<std::size_t>(depth) + 1];
        for (std::size_t p = 0; p < up.size(); ++p) up[p] = lo[2 * p] + lo[2 * p + 1];
        subtree[static_cast<std::size_t>(depth)] = std::move(up);
    }

    for (int depth = 0; depth < k; ++depth) {
        const auto& children = subtree[static_cast<std::size_t>(depth) + 1];
        std::vector<double> angles(std::size_t{1} << depth);
        for (std::size_t p = 0; p < angles.size(); ++p)
            angles[p] = 2.0 * std::atan2(std::sqrt(children[2 * p + 1]), std::sqrt(children[2 * p]));
        detail::emit_multiplexed_ry(circuit, k - 1 - depth, depth, std::move(angles));
    }
    return circuit;
}

} // namespace quaver

#endif
