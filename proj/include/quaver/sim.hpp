#ifndef QUAVER_SIM_HPP
#define QUAVER_SIM_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <vector>

#include "quaver/circuit.hpp"
#include "quaver/rng.hpp"

namespace quaver {

// Dense statevectors only; 2^20 complex doubles (16 MiB) is the ceiling.
// Lexicons top out at 9 qubits, so this is generous.
inline constexpr int kMaxQubits = 20;

struct StateVector {
    int num_qubits = 0;
    std::vector<std::complex<double>> amp;
};

// Measurement-level noise: each measured bit flips independently with
// probability bit_flip_p. This is the minimal model that produces `wrong'
// events without simulating gate-level channels.
struct NoiseModel {
    double bit_flip_p = 0.0;
};

struct ShotCounts {
    std::map<std::uint32_t, std::uint32_t> counts;
    std::uint32_t shots = 0;
};

// Applies the circuit to |0...0> and returns the final state.
inline StateVector run(const Circuit& circuit) {
    if (circuit.num_qubits < 1 || circuit.num_qubits > kMaxQubits)
        throw std::invalid_argument("qubit count out of range");

    StateVector state;
    state.num_qubits = circuit.num_qubits;
    state.amp.assign(std::size_t{1} << circuit.num_qubits, {0.0, 0.0});
    state.amp[0] = {1.0, 0.0};

    const std::size_t dim = state.amp.size();
    for (const auto& gate : circuit.gates) {
        const std::size_t tbit = std::size_t{1} << gate.target;
        switch (gate.kind) {
            case GateKind::x:
                for (std::size_t i = 0; i < dim; ++i)
                    if (!(i & tbit)) std::swap(state.amp[i], state.amp[i | tbit]);
                break;
            case GateKind::ry: {
                const double c = std::cos(gate.angle / 2.0);
                const double s = std::sin(gate.angle / 2.0);
                for (std::size_t i = 0; i < dim; ++i) {
                    if (i & tbit) continue;
                    auto a0 = state.amp[i];
                    auto a1 = state.amp[i | tbit];
                    state.amp[i] = c * a0 - s * a1;
                    state.amp[i | tbit] = s * a0 + c * a1;
                }
                break;
            }
            case GateKind::cx: {
                const std::size_t cbit = std::size_t{1} << gate.control;
                for (std::size_t i = 0; i < dim; ++i)
                    if ((i & cbit) && !(i & tbit)) std::swap(state.amp[i], state.amp[i | tbit]);
                break;
            }
        }
    }
    return state;
}

// Draws `shots` measurements from |amp|^2, then pushes each result through
// the bit-flip channel. Fully determined by the seed.
inline ShotCounts sample(const StateVector& state, std::uint32_t shots, std::uint64_t seed,
                         NoiseModel noise = {}) {
    if (shots < 1) throw std::invalid_argument("shots must be at least 1");
    if (noise.bit_flip_p < 0.0 || noise.bit_flip_p >= 1.0)
        throw std::invalid_argument("bit flip probability must be in [0, 1)");

    std::vector<double> cdf(state.amp.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < state.amp.size(); ++i) {
        acc += std::norm(state.amp[i]);
        cdf[i] = acc;
    }
    // acc is 1 up to rounding; dividing the draw through it avoids any
    // out-of-range index from drift.
    std::mt19937_64 gen(seed);
    ShotCounts result;
    result.shots = shots;
    const int k = state.num_qubits;
    for (std::uint32_t s = 0; s < shots; ++s) {
        double u = uniform01(gen) * acc;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        auto idx = static_cast<std::uint32_t>(std::min<std::ptrdiff_t>(
            it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1));
        if (noise.bit_flip_p > 0.0)
            for (int b = 0; b < k; ++b)
                if (uniform01(gen) < noise.bit_flip_p) idx ^= (1u << b);
        ++result.counts[idx];
    }
    return result;
}

// The most frequent outcome; ties are broken uniformly with the seed.
inline std::uint32_t majority(const ShotCounts& counts, std::uint64_t seed) {
    if (counts.counts.empty()) throw std::invalid_argument("no shot counts");
    std::uint32_t best = 0;
    std::vector<std::uint32_t> winners;
    for (const auto& [value, count] : counts.counts) {
        if (count > best) {
            best = count;
            winners.clear();
        }
        if (count == best) winners.push_back(value);
    }
    if (winners.size() == 1) return winners.front();
    std::mt19937_64 gen(seed);
    return winners[uniform_below(gen, winners.size())];
}

} // namespace quaver

#endif
