#ifndef QUAVER_CODEC_HPP
#define QUAVER_CODEC_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "quaver/midi.hpp"

namespace quaver {

// A compressed event label: an index into the lexicon, or (after a noisy
// measurement) any k-bit value, possibly outside the lexicon.
using Code = std::uint32_t;

struct CapacityError : std::runtime_error {
    explicit CapacityError(const std::string& msg) : std::runtime_error("capacity exceeded: " + msg) {}
};

struct UnknownSymbol : std::runtime_error {
    explicit UnknownSymbol(const std::string& msg) : std::runtime_error("unknown symbol: " + msg) {}
};

struct UnknownCode : std::runtime_error {
    explicit UnknownCode(const std::string& msg) : std::runtime_error("unknown code: " + msg) {}
};

// Pitch alphabet: index = 5-bit code. Silence, when the input has rests,
// always sits at index 0; real pitches follow in ascending order.
struct PitchTable {
    std::vector<int> entries;

    std::size_t size() const { return entries.size(); }

    std::optional<std::uint32_t> code_of(int pitch) const {
        auto it = std::find(entries.begin(), entries.end(), pitch);
        if (it == entries.end()) return std::nullopt;
        return static_cast<std::uint32_t>(it - entries.begin());
    }

    int at(std::uint32_t code) const {
        if (code >= entries.size()) throw UnknownCode("pitch code " + std::to_string(code));
        return entries[code];
    }

    bool operator==(const PitchTable&) const = default;
};

// Duration alphabet: index = 4-bit code, entries ascending ticks.
struct DurationTable {
    std::vector<std::uint32_t> entries;

    std::size_t size() const { return entries.size(); }

    std::optional<std::uint32_t> code_of(std::uint32_t ticks) const {
        auto it = std::lower_bound(entries.begin(), entries.end(), ticks);
        if (it == entries.end() || *it != ticks) return std::nullopt;
        return static_cast<std::uint32_t>(it - entries.begin());
    }

    std::uint32_t at(std::uint32_t code) const {
        if (code >= entries.size()) throw UnknownCode("duration code " + std::to_string(code));
        return entries[code];
    }

    bool operator==(const DurationTable&) const = default;
};

// 9-bit event code: 5 pitch bits above 4 duration bits.
struct RawCode {
    std::uint16_t value = 0;

    std::uint32_t pitch_code() const { return value >> 4; }
    std::uint32_t duration_code() const { return value & 0xF; }

    static RawCode from_parts(std::uint32_t pitch_code, std::uint32_t duration_code) {
        return RawCode{static_cast<std::uint16_t>((pitch_code << 4) | duration_code)};
    }

    auto operator<=>(const RawCode&) const = default;
};

inline constexpr std::size_t kMaxPitches = 32;    // 5 bits, one slot for silence
inline constexpr std::size_t kMaxDurations = 16;  // 4 bits

// Scans the input and fixes both alphabets. At most 32 pitches (silence
// included) and 16 durations fit the 9-bit layout.
inline std::pair<PitchTable, DurationTable> build_tables(std::span<const NoteEvent> events) {
    if (events.empty()) throw std::invalid_argument("build_tables: no events");

    std::set<int> pitches;
    std::set<std::uint32_t> durations;
    bool has_silence = false;
    for (const auto& ev : events) {
        if (ev.is_silence())
            has_silence = true;
        else
            pitches.insert(ev.pitch);
        durations.insert(ev.duration);
    }

    if (pitches.size() + (has_silence ? 1 : 0) > kMaxPitches)
        throw CapacityError(std::to_string(pitches.size() + (has_silence ? 1 : 0)) +
                            " pitches, limit " + std::to_string(kMaxPitches));
    if (durations.size() > kMaxDurations)
        throw CapacityError(std::to_string(durations.size()) + " durations, limit " +
                            std::to_string(kMaxDurations));

    PitchTable pt;
    if (has_silence) pt.entries.push_back(kSilence);
    pt.entries.insert(pt.entries.end(), pitches.begin(), pitches.end());
    DurationTable dt;
    dt.entries.assign(durations.begin(), durations.end());
    return {std::move(pt), std::move(dt)};
}

inline RawCode encode_event(const NoteEvent& ev, const PitchTable& pt, const DurationTable& dt) {
    auto pc = pt.code_of(ev.pitch);
    if (!pc) throw UnknownSymbol("pitch " + std::to_string(ev.pitch));
    auto dc = dt.code_of(ev.duration);
    if (!dc) throw UnknownSymbol("duration " + std::to_string(ev.duration));
    return RawCode::from_parts(*pc, *dc);
}

inline std::vector<RawCode> encode(std::span<const NoteEvent> events, const PitchTable& pt,
                                   const DurationTable& dt) {
    std::vector<RawCode> out;
    out.reserve(events.size());
    for (const auto& ev : events) out.push_back(encode_event(ev, pt, dt));
    return out;
}

inline NoteEvent decode(RawCode raw, const PitchTable& pt, const DurationTable& dt) {
    return NoteEvent{pt.at(raw.pitch_code()), dt.at(raw.duration_code())};
}

// Unique raw codes in order of first appearance. The count of entries
// fixes k, the width of the compressed codes and hence the number of
// qubits a generation circuit needs: k = ceil(log2(max(size, 2))).
struct Lexicon {
    std::vector<RawCode> raw_codes;
    int k = 1;

    Code size() const { return static_cast<Code>(raw_codes.size()); }

    std::optional<Code> index_of(RawCode raw) const {
        auto it = std::find(raw_codes.begin(), raw_codes.end(), raw);
        if (it == raw_codes.end()) return std::nullopt;
        return static_cast<Code>(it - raw_codes.begin());
    }

    bool operator==(const Lexicon&) const = default;
};

inline int qubits_for(std::size_t lexicon_size) {
    int k = 1;
    while ((std::size_t{1} << k) < lexicon_size) ++k;
    return k;
}

inline Lexicon build_lexicon(std::span<const RawCode> raw) {
    if (raw.empty()) throw std::invalid_argument("build_lexicon: no codes");
    Lexicon lex;
    std::set<std::uint16_t> seen;
    for (RawCode rc : raw)
        if (seen.insert(rc.value).second) lex.raw_codes.push_back(rc);
    lex.k = qubits_for(lex.raw_codes.size());
    return lex;
}

inline Code compress(RawCode raw, const Lexicon& lex) {
    auto idx = lex.index_of(raw);
    if (!idx) throw UnknownCode("raw code " + std::to_string(raw.value) + " not in lexicon");
    return *idx;
}

inline RawCode decompress(Code code, const Lexicon& lex) {
    if (code >= lex.size())
        throw UnknownCode("compressed code " + std::to_string(code) + " outside lexicon of " +
                          std::to_string(lex.size()));
    return lex.raw_codes[code];
}

inline std::vector<Code> compress_all(std::span<const RawCode> raw, const Lexicon& lex) {
    std::vector<Code> out;
    out.reserve(raw.size());
    for (RawCode rc : raw) out.push_back(compress(rc, lex));
    return out;
}

// k-bit binary rendering, used by rule dumps and the stats CSV.
inline std::string to_bits(std::uint32_t value, int bits) {
    std::string s(static_cast<std::size_t>(bits), '0');
    for (int i = 0; i < bits; ++i)
        if (value & (1u << (bits - 1 - i))) s[static_cast<std::size_t>(i)] = '1';
    return s;
}

} // namespace quaver

#endif
