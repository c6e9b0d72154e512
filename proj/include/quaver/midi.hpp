#ifndef QUAVER_MIDI_HPP
#define QUAVER_MIDI_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace quaver {

// Sentinel pitch for rests. On the wire (Standard MIDI File) rests are
// carried as notes with MIDI pitch 0, which is never used as a real pitch
// in vocal material; gaps between notes are read back as rests too.
inline constexpr int kSilence = -1;

// A note or rest: the atomic unit everything downstream works with.
struct NoteEvent {
    int pitch = kSilence;        // 0..127, or kSilence for a rest
    std::uint32_t duration = 0;  // ticks, always > 0

    bool is_silence() const { return pitch == kSilence; }
    bool operator==(const NoteEvent&) const = default;
};

struct MidiNote {
    int pitch = 0;               // 0..127 as stored in the file
    std::uint32_t start = 0;     // absolute ticks
    std::uint32_t duration = 0;  // ticks, > 0
    bool operator==(const MidiNote&) const = default;
};

// Notes of the first note-bearing track, sorted by start tick.
struct MidiSequence {
    int ppqn = 0;
    std::vector<MidiNote> notes;
};

struct MalformedFile : std::runtime_error {
    explicit MalformedFile(const std::string& msg) : std::runtime_error("malformed MIDI file: " + msg) {}
};

struct UnsupportedFormat : std::runtime_error {
    explicit UnsupportedFormat(const std::string& msg) : std::runtime_error("unsupported MIDI format: " + msg) {}
};

struct PolyphonyError : std::runtime_error {
    explicit PolyphonyError(const std::string& msg) : std::runtime_error("polyphonic input: " + msg) {}
};

namespace detail {

// Bounds-checked big-endian reader. All track parsing goes through a
// sub-reader limited to the declared chunk length, so a lying length
// field can only produce MalformedFile, never an out-of-range read.
class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

    std::size_t remaining() const { return data_.size() - pos_; }
    bool eof() const { return pos_ >= data_.size(); }

    std::uint8_t u8() {
        if (eof()) throw MalformedFile("unexpected end of data");
        return data_[pos_++];
    }

    std::uint8_t peek() const {
        if (eof()) throw MalformedFile("unexpected end of data");
        return data_[pos_];
    }

    std::uint16_t u16be() {
        std::uint16_t hi = u8();
        return static_cast<std::uint16_t>((hi << 8) | u8());
    }

    std::uint32_t u32be() {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v = (v << 8) | u8();
        return v;
    }

    // Variable-length quantity, at most 4 bytes per the SMF spec.
    std::uint32_t vlq() {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            std::uint8_t b = u8();
            v = (v << 7) | (b & 0x7F);
            if (!(b & 0x80)) return v;
        }
        throw MalformedFile("variable-length quantity longer than 4 bytes");
    }

    void skip(std::size_t n) {
        if (n > remaining()) throw MalformedFile("skip past end of chunk");
        pos_ += n;
    }

    std::span<const std::uint8_t> take(std::size_t n) {
        if (n > remaining()) throw MalformedFile("chunk length exceeds file size");
        auto s = data_.subspan(pos_, n);
        pos_ += n;
        return s;
    }

private:
    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

inline std::vector<MidiNote> parse_track(std::span<const std::uint8_t> chunk) {
    ByteReader r(chunk);
    std::vector<MidiNote> notes;
    // Open note-on per pitch, LIFO so retriggered pitches pair sanely.
    std::array<std::vector<std::uint32_t>, 128> open;
    std::uint64_t tick = 0;
    std::uint8_t running = 0;

    auto close_note = [&](int pitch, std::uint64_t at) {
        auto& stack = open[static_cast<std::size_t>(pitch)];
        if (stack.empty()) return;  // stray note-off, ignore
        std::uint32_t start = stack.back();
        stack.pop_back();
        if (at > start)  // zero-length notes are dropped
            notes.push_back({pitch, start, static_cast<std::uint32_t>(at - start)});
    };

    while (!r.eof()) {
        tick += r.vlq();
        if (tick > 0x0FFFFFFFull) throw MalformedFile("tick overflow");

        std::uint8_t status;
        if (r.peek() & 0x80) {
            status = r.u8();
        } else {
            if (running == 0) throw MalformedFile("data byte without running status");
            status = running;
        }

        if (status == 0xFF) {  // meta event
            std::uint8_t type = r.u8();
            std::uint32_t len = r.vlq();
            r.skip(len);
            running = 0;
            if (type == 0x2F) break;  // end of track
            continue;
        }
        if (status == 0xF0 || status == 0xF7) {  // sysex
            r.skip(r.vlq());
            running = 0;
            continue;
        }
        if (status >= 0xF1) throw MalformedFile("unexpected system message in track");

        running = status;
        auto data_byte = [&] {
            std::uint8_t b = r.u8();
            if (b & 0x80) throw MalformedFile("status byte where data byte expected");
            return b;
        };

        switch (status & 0xF0) {
            case 0x90: {  // note on (velocity 0 means note off)
                int pitch = data_byte();
                int vel = data_byte();
                if (vel > 0)
                    open[static_cast<std::size_t>(pitch)].push_back(static_cast<std::uint32_t>(tick));
                else
                    close_note(pitch, tick);
                break;
            }
            case 0x80: {  // note off
                int pitch = data_byte();
                data_byte();  // release velocity
                close_note(pitch, tick);
                break;
            }
            case 0xA0:
            case 0xB0:
            case 0xE0:
                data_byte();
                data_byte();
                break;
            case 0xC0:
            case 0xD0:
                data_byte();
                break;
            default:
                throw MalformedFile("unknown status byte");
        }
    }

    // Notes still open at end of track end there.
    for (int pitch = 0; pitch < 128; ++pitch)
        while (!open[static_cast<std::size_t>(pitch)].empty()) close_note(pitch, tick);

    std::stable_sort(notes.begin(), notes.end(),
                     [](const MidiNote& a, const MidiNote& b) { return a.start < b.start; });
    return notes;
}

inline void put_u16be(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
}

inline void put_u32be(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 3; i >= 0; --i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

inline void put_vlq(std::vector<std::uint8_t>& out, std::uint32_t v) {
    std::uint8_t buf[4];
    int n = 0;
    buf[n++] = v & 0x7F;
    while ((v >>= 7) != 0) buf[n++] = static_cast<std::uint8_t>((v & 0x7F) | 0x80);
    while (n--) out.push_back(buf[n]);
}

} // namespace detail

// Parses an SMF format 0 or 1 file and returns the notes of the first
// track that contains any. Running status, variable-length deltas and
// velocity-0 note-offs are handled; format 2 and SMPTE timing are refused.
inline MidiSequence parse_smf(std::span<const std::uint8_t> bytes) {
    detail::ByteReader r(bytes);

    if (r.remaining() < 4 || r.u8() != 'M' || r.u8() != 'T' || r.u8() != 'h' || r.u8() != 'd')
        throw MalformedFile("missing MThd header");
    std::uint32_t header_len = r.u32be();
    if (header_len < 6) throw MalformedFile("header chunk too short");
    std::uint16_t format = r.u16be();
    std::uint16_t ntrks = r.u16be();
    std::uint16_t division = r.u16be();
    r.skip(header_len - 6);

    if (format > 1) throw UnsupportedFormat("SMF format " + std::to_string(format));
    if (division & 0x8000) throw UnsupportedFormat("SMPTE time division");
    if (division == 0) throw MalformedFile("zero ticks per quarter note");

    MidiSequence seq;
    seq.ppqn = division;

    std::uint16_t tracks_seen = 0;
    while (tracks_seen < ntrks && !r.eof()) {
        if (r.remaining() < 8) throw MalformedFile("truncated chunk header");
        std::uint8_t id[4] = {r.u8(), r.u8(), r.u8(), r.u8()};
        std::uint32_t len = r.u32be();
        auto body = r.take(len);
        if (id[0] != 'M' || id[1] != 'T' || id[2] != 'r' || id[3] != 'k')
            continue;  // alien chunks are skipped and do not count toward ntrks
        ++tracks_seen;
        auto notes = detail::parse_track(body);
        if (!notes.empty()) {
            seq.notes = std::move(notes);
            break;
        }
    }
    return seq;
}

// Flattens a parsed sequence into a monophonic note/rest stream.
// Gaps of at least PPQN/32 ticks become rests; shorter gaps are treated
// as timing jitter and folded into the preceding event. Notes with MIDI
// pitch 0 are rests (matching how write_smf emits them). Overlapping
// notes raise PolyphonyError.
inline std::vector<NoteEvent> extract_monophonic(const MidiSequence& seq) {
    std::vector<NoteEvent> events;
    if (seq.notes.empty()) return events;
    if (seq.ppqn <= 0) throw MalformedFile("sequence has no time resolution");

    auto emit = [&](int pitch, std::uint32_t duration) {
        if (pitch == kSilence && !events.empty() && events.back().is_silence())
            events.back().duration += duration;  // adjacent rests merge
        else
            events.push_back({pitch, duration});
    };

    std::uint64_t prev_end = seq.notes.front().start;
    for (const auto& note : seq.notes) {
        if (note.start < prev_end)
            throw PolyphonyError("note at tick " + std::to_string(note.start) +
                                 " overlaps the previous note");
        std::uint64_t gap = note.start - prev_end;
        if (gap > 0) {
            if (gap * 32 < static_cast<std::uint64_t>(seq.ppqn))
                events.back().duration += static_cast<std::uint32_t>(gap);
            else
                emit(kSilence, static_cast<std::uint32_t>(gap));
        }
        emit(note.pitch == 0 ? kSilence : note.pitch, note.duration);
        prev_end = note.start + note.duration;
    }
    return events;
}

// Serializes events as SMF format 0: one track, a 120 BPM tempo event,
// then note-on/off pairs on channel 0. Rests are written as pitch-0 notes
// so they survive a round trip (a trailing rest has no other encoding).
inline std::vector<std::uint8_t> write_smf(std::span<const NoteEvent> events, int ppqn) {
    if (ppqn <= 0 || ppqn > 0x7FFF) throw std::invalid_argument("ppqn out of range");

    std::vector<std::uint8_t> track;
    // tempo meta: 500000 us per quarter note
    detail::put_vlq(track, 0);
    for (std::uint8_t b : {0xFF, 0x51, 0x03, 0x07, 0xA1, 0x20}) track.push_back(b);

    for (const auto& ev : events) {
        std::uint8_t pitch = ev.is_silence() ? 0 : static_cast<std::uint8_t>(ev.pitch & 0x7F);
        detail::put_vlq(track, 0);
        track.push_back(0x90);
        track.push_back(pitch);
        track.push_back(0x5A);
        detail::put_vlq(track, ev.duration);
        track.push_back(0x80);
        track.push_back(pitch);
        track.push_back(0x40);
    }
    detail::put_vlq(track, 0);
    for (std::uint8_t b : {0xFF, 0x2F, 0x00}) track.push_back(b);

    std::vector<std::uint8_t> out;
    for (char c : {'M', 'T', 'h', 'd'}) out.push_back(static_cast<std::uint8_t>(c));
    detail::put_u32be(out, 6);
    detail::put_u16be(out, 0);  // format 0
    detail::put_u16be(out, 1);
    detail::put_u16be(out, static_cast<std::uint16_t>(ppqn));
    for (char c : {'M', 'T', 'r', 'k'}) out.push_back(static_cast<std::uint8_t>(c));
    detail::put_u32be(out, static_cast<std::uint32_t>(track.size()));
    out.insert(out.end(), track.begin(), track.end());
    return out;
}

} // namespace quaver

#endif
