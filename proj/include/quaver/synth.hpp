#ifndef QUAVER_SYNTH_HPP
#define QUAVER_SYNTH_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "quaver/midi.hpp"
#include "quaver/rng.hpp"

namespace quaver {

// One vocal-tract resonance: a two-pole band-pass section in the cascade.
struct Formant {
    double frequency = 0.0;  // Hz
    double bandwidth = 0.0;  // Hz
    double gain = 1.0;       // linear
};

// Typical adult formant targets for the supported vowels.
inline std::vector<Formant> vowel_formants(const std::string& vowel) {
    if (vowel == "a") return {{700.0, 110.0}, {1220.0, 90.0}, {2600.0, 150.0}};
    if (vowel == "e") return {{530.0, 90.0}, {1840.0, 100.0}, {2480.0, 150.0}};
    if (vowel == "i") return {{300.0, 70.0}, {2250.0, 100.0}, {3010.0, 160.0}};
    if (vowel == "o") return {{450.0, 90.0}, {800.0, 90.0}, {2600.0, 150.0}};
    if (vowel == "u") return {{330.0, 70.0}, {700.0, 90.0}, {2530.0, 150.0}};
    throw std::invalid_argument("unknown vowel: " + vowel);
}

struct SynthParams {
    int sample_rate = 44100;
    std::vector<Formant> formants = vowel_formants("a");
    double tempo_bpm = 120.0;
    int ppqn = 960;
    double attack_ms = 15.0;
    double release_ms = 40.0;
    double vibrato_rate_hz = 5.5;
    double vibrato_depth_cents = 0.0;
    double noise_mix = 0.05;             // aspiration noise vs pulse excitation
};

inline std::optional<double> event_frequency(const NoteEvent& ev) {
    if (ev.is_silence()) return std::nullopt;
    if (ev.pitch < 0 || ev.pitch > 127) throw std::invalid_argument("pitch out of range");
    return 440.0 * std::pow(2.0, (ev.pitch - 69) / 12.0);
}

// Second-order resonator y[t] = A x[t] + B y[t-1] + C y[t-2] with unit
// gain at DC (A = 1 - B - C). bw > 0 keeps the poles strictly inside the
// unit circle.
struct ResonatorCoeffs {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
};

inline ResonatorCoeffs resonator_coeffs(double frequency, double bandwidth, double sample_rate) {
    if (frequency <= 0.0 || frequency >= sample_rate / 2.0)
        throw std::invalid_argument("resonator frequency must be below Nyquist");
    if (bandwidth <= 0.0) throw std::invalid_argument("resonator bandwidth must be positive");
    const double pi = std::numbers::pi;
    ResonatorCoeffs rc;
    rc.c = -std::exp(-2.0 * pi * bandwidth / sample_rate);
    rc.b = 2.0 * std::exp(-pi * bandwidth / sample_rate) * std::cos(2.0 * pi * frequency / sample_rate);
    rc.a = 1.0 - rc.b - rc.c;
    return rc;
}

namespace detail {

// Band-limited pulse train via the Dirichlet kernel: the sum of the first
// H harmonics of the phase, normalized to unit peak. H is chosen so no
// harmonic crosses 90% of Nyquist even at the top of the vibrato sweep.
inline double pulse_train(double phase, int harmonics) {
    const double theta = 2.0 * std::numbers::pi * phase;
    const double denom = std::sin(theta / 2.0);
    double dirichlet;
    if (std::abs(denom) < 1e-9)
        dirichlet = 2.0 * harmonics + 1.0;
    else
        dirichlet = std::sin((harmonics + 0.5) * theta) / denom;
    return (dirichlet - 1.0) / (2.0 * harmonics);
}

inline constexpr std::uint64_t kAspirationSeed = 0x5EEDA5D17A710000ull;

} // namespace detail

// Renders the events as sung vowel tones: a pitched pulse train mixed with
// aspiration noise, filtered through the cascaded formant resonators and
// shaped by an attack/release envelope. Rests render as exact zeros. The
// result is peak-normalized to 0.9 full scale.
inline std::vector<double> render(std::span<const NoteEvent> events, const SynthParams& params) {
    if (params.sample_rate <= 0) throw std::invalid_argument("bad sample rate");
    if (params.ppqn <= 0 || params.tempo_bpm <= 0.0) throw std::invalid_argument("bad tempo/ppqn");
    if (params.formants.empty()) throw std::invalid_argument("no formants configured");

    const double sr = params.sample_rate;
    std::vector<double> out;

    std::vector<ResonatorCoeffs> coeffs;
    for (const auto& f : params.formants) {
        ResonatorCoeffs rc = resonator_coeffs(f.frequency, f.bandwidth, sr);
        rc.a *= f.gain;
        coeffs.push_back(rc);
    }

    std::size_t event_index = 0;
    for (const auto& ev : events) {
        const double seconds = static_cast<double>(ev.duration) / params.ppqn * 60.0 / params.tempo_bpm;
        const auto n = static_cast<std::size_t>(std::llround(seconds * sr));
        auto f0 = event_frequency(ev);
        if (!f0) {
            out.insert(out.end(), n, 0.0);
            ++event_index;
            continue;
        }

        const double depth = params.vibrato_depth_cents;
        const double f_max = *f0 * std::pow(2.0, std::abs(depth) / 1200.0);
        const int harmonics = std::max(1, static_cast<int>(0.45 * sr / f_max));

        // Aspiration noise; per-event stream so events render independently.
        std::mt19937_64 noise_gen(derive_seed(detail::kAspirationSeed, event_index));

        const auto attack = std::min<std::size_t>(
            static_cast<std::size_t>(params.attack_ms / 1000.0 * sr), n / 2);
        const auto release = std::min<std::size_t>(
            static_cast<std::size_t>(params.release_ms / 1000.0 * sr), n / 2);

        // Filter memory starts cold for every event.
        std::vector<double> y1(coeffs.size(), 0.0), y2(coeffs.size(), 0.0);
        double phase = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            double f = *f0;
            if (depth != 0.0) {
                double lfo = std::sin(2.0 * std::numbers::pi * params.vibrato_rate_hz * t / sr);
                f = *f0 * std::pow(2.0, depth * lfo / 1200.0);
            }
            phase += f / sr;
            if (phase >= 1.0) phase -= 1.0;

            double noise = 2.0 * uniform01(noise_gen) - 1.0;
            double x = (1.0 - params.noise_mix) * detail::pulse_train(phase, harmonics) +
                       params.noise_mix * noise;

            for (std::size_t r = 0; r < coeffs.size(); ++r) {
                double y = coeffs[r].a * x + coeffs[r].b * y1[r] + coeffs[r].c * y2[r];
                y2[r] = y1[r];
                y1[r] = y;
                x = y;
            }

            double env = 1.0;
            if (attack > 0 && t < attack) env = static_cast<double>(t) / attack;
            if (release > 0 && n - 1 - t < release)
                env = std::min(env, static_cast<double>(n - 1 - t) / release);
            out.push_back(x * env);
        }
        ++event_index;
    }

    double peak = 0.0;
    for (double v : out) peak = std::max(peak, std::abs(v));
    if (peak > 0.0) {
        const double scale = 0.9 / peak;
        for (double& v : out) v *= scale;
    }
    return out;
}

// RIFF/WAVE, PCM 16-bit signed little-endian, mono.
inline std::vector<std::uint8_t> write_wav(std::span<const double> samples, int sample_rate) {
    if (sample_rate <= 0) throw std::invalid_argument("bad sample rate");

    std::vector<std::uint8_t> out;
    auto put_u16 = [&](std::uint16_t v) {
        out.push_back(static_cast<std::uint8_t>(v & 0xFF));
        out.push_back(static_cast<std::uint8_t>(v >> 8));
    };
    auto put_u32 = [&](std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
    };

    const auto data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
    for (char c : {'R', 'I', 'F', 'F'}) out.push_back(static_cast<std::uint8_t>(c));
    put_u32(36 + data_bytes);
    for (char c : {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '}) out.push_back(static_cast<std::uint8_t>(c));
    put_u32(16);
    put_u16(1);  // PCM
    put_u16(1);  // mono
    put_u32(static_cast<std::uint32_t>(sample_rate));
    put_u32(static_cast<std::uint32_t>(sample_rate) * 2);
    put_u16(2);
    put_u16(16);
    for (char c : {'d', 'a', 't', 'a'}) out.push_back(static_cast<std::uint8_t>(c));
    put_u32(data_bytes);
    for (double s : samples) {
        double clamped = std::clamp(s, -1.0, 1.0);
        auto q = static_cast<std::int16_t>(std::lround(clamped * 32767.0));
        put_u16(static_cast<std::uint16_t>(q));
    }
    return out;
}

} // namespace quaver

#endif
