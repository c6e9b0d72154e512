// Shared fixtures and independent oracles for the test suites. Everything
// here deliberately avoids the library's own code paths where it acts as
// an oracle (n-gram counting, spectra, WAV reading), so a bug in the
// implementation cannot hide in its own checker.

#ifndef QUAVER_TESTS_HELPERS_HPP
#define QUAVER_TESTS_HELPERS_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <map>
#include <numbers>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "quaver/codec.hpp"
#include "quaver/midi.hpp"
#include "quaver/rules.hpp"

namespace testing {

// The espionage-show theme extract used as the worked example throughout:
// twelve events, six pitches plus a rest, four durations, PPQN 960.
inline std::vector<quaver::NoteEvent> mission_events() {
    using quaver::kSilence;
    return {
        {70, 480}, {67, 480}, {62, 2880},
        {70, 480}, {67, 480}, {61, 2880},
        {70, 480}, {67, 480}, {60, 2880},
        {58, 480}, {60, 960}, {kSilence, 2400},
    };
}

inline constexpr int kMissionPpqn = 960;

// The compressed training sequence the twelve events reduce to.
inline std::vector<quaver::Code> mission_codes() {
    return {0, 1, 2, 0, 1, 3, 0, 1, 4, 5, 6, 7};
}

// Builds the full model (tables, lexicon, rule orders 1..max_order)
// straight from the fixture events.
inline quaver::Model mission_model(int max_order = 1) {
    auto events = mission_events();
    quaver::Model model;
    model.ppqn = kMissionPpqn;
    auto [pt, dt] = quaver::build_tables(events);
    model.pitches = std::move(pt);
    model.durations = std::move(dt);
    auto raw = quaver::encode(events, model.pitches, model.durations);
    model.lexicon = quaver::build_lexicon(raw);
    auto seq = quaver::compress_all(raw, model.lexicon);
    for (int n = 1; n <= max_order; ++n)
        model.orders.push_back(quaver::extract_rules(seq, n));
    return model;
}

// Brute-force n-gram counter, string-keyed and windowed by hand.
inline std::unordered_map<std::string, std::map<quaver::Code, std::uint32_t>>
ngram_oracle(std::span<const quaver::Code> seq, int n) {
    std::unordered_map<std::string, std::map<quaver::Code, std::uint32_t>> rows;
    for (std::size_t i = 0; i + static_cast<std::size_t>(n) < seq.size(); ++i) {
        std::string key;
        for (int j = 0; j < n; ++j) key += std::to_string(seq[i + static_cast<std::size_t>(j)]) + ",";
        ++rows[key][seq[i + static_cast<std::size_t>(n)]];
    }
    return rows;
}

inline std::string context_key(std::span<const quaver::Code> ctx) {
    std::string key;
    for (quaver::Code c : ctx) key += std::to_string(c) + ",";
    return key;
}

// All (n+1)-grams of a training sequence, as (context key, successor).
inline std::set<std::pair<std::string, quaver::Code>> ngram_set(std::span<const quaver::Code> seq,
                                                                int n) {
    std::set<std::pair<std::string, quaver::Code>> grams;
    for (std::size_t i = 0; i + static_cast<std::size_t>(n) < seq.size(); ++i) {
        grams.insert({context_key(seq.subspan(i, static_cast<std::size_t>(n))),
                      seq[i + static_cast<std::size_t>(n)]});
    }
    return grams;
}

// Radix-2 complex FFT (iterative, in place). Test-only oracle.
inline void fft(std::vector<std::complex<double>>& v) {
    const std::size_t n = v.size();
    if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("fft size must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(v[i], v[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double angle = -2.0 * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wl(std::cos(angle), std::sin(angle));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                auto u = v[i + j];
                auto t = w * v[i + j + len / 2];
                v[i + j] = u + t;
                v[i + j + len / 2] = u - t;
                w *= wl;
            }
        }
    }
}

// Fundamental-frequency estimate by autocorrelation over 50..1000 Hz.
// A periodic tone correlates equally at every multiple of its period, so
// the smallest strong local maximum is the one that marks the period;
// parabolic interpolation refines it below one sample of lag.
inline double estimate_f0(std::span<const double> samples, double sample_rate) {
    const auto min_lag = static_cast<std::size_t>(sample_rate / 1000.0);
    const auto max_lag = static_cast<std::size_t>(sample_rate / 50.0);
    if (samples.size() < 2 * max_lag) throw std::invalid_argument("buffer too short for f0 estimate");

    std::vector<double> corr(max_lag + 2, 0.0);
    for (std::size_t lag = min_lag; lag <= max_lag + 1; ++lag)
        for (std::size_t i = 0; i + lag < samples.size(); ++i)
            corr[lag] += samples[i] * samples[i + lag];

    double global_max = -1e300;
    for (std::size_t lag = min_lag; lag <= max_lag; ++lag) global_max = std::max(global_max, corr[lag]);

    std::size_t best = 0;
    for (std::size_t lag = min_lag + 1; lag <= max_lag; ++lag) {
        if (corr[lag] >= corr[lag - 1] && corr[lag] >= corr[lag + 1] &&
            corr[lag] >= 0.9 * global_max) {
            best = lag;
            break;
        }
    }
    if (best == 0) throw std::invalid_argument("no periodicity found");

    double refined = static_cast<double>(best);
    double y0 = corr[best - 1], y1 = corr[best], y2 = corr[best + 1];
    double denom = y0 - 2.0 * y1 + y2;
    if (std::abs(denom) > 1e-12) refined += 0.5 * (y0 - y2) / denom;
    return sample_rate / refined;
}

// Welch-averaged power spectrum, then the power-weighted mean frequency
// inside a band around the requested center. For a voiced tone the band
// holds a handful of harmonic lines weighted by the filter response, so
// the centroid sits at the resonance even when no harmonic lands on it.
inline double envelope_peak_near(std::span<const double> samples, double sample_rate,
                                 double center_hz) {
    const std::size_t seg = 8192;
    if (samples.size() < seg) throw std::invalid_argument("buffer too short for spectrum");

    std::vector<double> power(seg / 2, 0.0);
    std::size_t segments = 0;
    for (std::size_t start = 0; start + seg <= samples.size(); start += seg / 2) {
        std::vector<std::complex<double>> buf(seg);
        for (std::size_t i = 0; i < seg; ++i) {
            double hann = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / (seg - 1));
            buf[i] = samples[start + i] * hann;
        }
        fft(buf);
        for (std::size_t i = 0; i < seg / 2; ++i) power[i] += std::norm(buf[i]);
        ++segments;
    }
    for (double& p : power) p /= static_cast<double>(segments);

    const double bin_hz = sample_rate / static_cast<double>(seg);
    const auto lo_bin = static_cast<std::size_t>(center_hz * 0.72 / bin_hz);
    const auto hi_bin = std::min(power.size() - 1, static_cast<std::size_t>(center_hz * 1.28 / bin_hz));
    double weight = 0.0, moment = 0.0;
    for (std::size_t i = lo_bin; i <= hi_bin; ++i) {
        weight += power[i];
        moment += power[i] * static_cast<double>(i) * bin_hz;
    }
    if (weight <= 0.0) throw std::invalid_argument("empty band");
    return moment / weight;
}

// Minimal independent WAV reader: RIFF walk, PCM16 mono only.
struct WavData {
    int sample_rate = 0;
    std::vector<double> samples;
};

inline WavData read_wav(std::span<const std::uint8_t> bytes) {
    auto u16 = [&](std::size_t at) {
        return static_cast<std::uint32_t>(bytes[at]) | (static_cast<std::uint32_t>(bytes[at + 1]) << 8);
    };
    auto u32 = [&](std::size_t at) {
        return u16(at) | (u16(at + 2) << 16);
    };
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        throw std::invalid_argument("not a RIFF/WAVE file");

    WavData wav;
    std::size_t pos = 12;
    bool got_fmt = false;
    while (pos + 8 <= bytes.size()) {
        std::uint32_t size = u32(pos + 4);
        if (pos + 8 + size > bytes.size()) throw std::invalid_argument("truncated chunk");
        if (std::memcmp(bytes.data() + pos, "fmt ", 4) == 0) {
            if (u16(pos + 8) != 1 || u16(pos + 10) != 1 || u16(pos + 22) != 16)
                throw std::invalid_argument("not PCM16 mono");
            wav.sample_rate = static_cast<int>(u32(pos + 12));
            got_fmt = true;
        } else if (std::memcmp(bytes.data() + pos, "data", 4) == 0) {
            if (!got_fmt) throw std::invalid_argument("data before fmt");
            for (std::size_t i = 0; i + 1 < size; i += 2) {
                auto raw = static_cast<std::int16_t>(u16(pos + 8 + i));
                wav.samples.push_back(raw / 32767.0);
            }
        }
        pos += 8 + size + (size & 1);
    }
    if (!got_fmt) throw std::invalid_argument("missing fmt chunk");
    return wav;
}

} // namespace testing

#endif
