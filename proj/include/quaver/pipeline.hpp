#ifndef QUAVER_PIPELINE_HPP
#define QUAVER_PIPELINE_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "quaver/codec.hpp"
#include "quaver/generate.hpp"
#include "quaver/midi.hpp"
#include "quaver/rules.hpp"
#include "quaver/synth.hpp"

namespace quaver {

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

inline void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    write_file(path, std::span<const std::uint8_t>(
                         reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

struct LearnConfig {
    std::vector<std::filesystem::path> inputs;
    int max_order = 1;
};

// Learning pass over a corpus: one shared alphabet and lexicon across all
// files, rule sets for orders 1..max_order counted per file so no window
// spans a file boundary.
inline Model learn_model(const LearnConfig& config) {
    if (config.inputs.empty()) throw std::invalid_argument("no input files");
    if (config.max_order < 1) throw std::invalid_argument("order must be at least 1");

    std::vector<std::vector<NoteEvent>> file_events;
    int ppqn = 0;
    for (const auto& path : config.inputs) {
        try {
            MidiSequence seq = parse_smf(read_file(path));
            auto events = extract_monophonic(seq);
            if (events.empty()) throw std::runtime_error("no notes found");
            if (ppqn == 0) ppqn = seq.ppqn;
            file_events.push_back(std::move(events));
        } catch (const std::exception& e) {
            throw std::runtime_error(path.string() + ": " + e.what());
        }
    }

    std::vector<NoteEvent> all_events;
    for (const auto& events : file_events)
        all_events.insert(all_events.end(), events.begin(), events.end());

    Model model;
    model.ppqn = ppqn;
    auto [pt, dt] = build_tables(all_events);
    model.pitches = std::move(pt);
    model.durations = std::move(dt);

    std::vector<std::vector<RawCode>> file_raw;
    std::vector<RawCode> all_raw;
    for (const auto& events : file_events) {
        auto raw = encode(events, model.pitches, model.durations);
        all_raw.insert(all_raw.end(), raw.begin(), raw.end());
        file_raw.push_back(std::move(raw));
    }
    model.lexicon = build_lexicon(all_raw);

    for (int n = 1; n <= config.max_order; ++n) {
        RuleSet merged;
        merged.n = n;
        bool contributed = false;
        for (const auto& raw : file_raw) {
            if (raw.size() < static_cast<std::size_t>(n) + 1) continue;
            auto seq = compress_all(raw, model.lexicon);
            merge_rules(merged, extract_rules(seq, n));
            contributed = true;
        }
        if (!contributed)
            throw SequenceTooShort("no input long enough for order " + std::to_string(n));
        model.orders.push_back(std::move(merged));
    }
    return model;
}

inline void cmd_learn(const LearnConfig& config, const std::filesystem::path& rules_path) {
    write_file(rules_path, serialize(learn_model(config)));
}

inline Model load_model(const std::filesystem::path& rules_path) {
    auto bytes = read_file(rules_path);
    return deserialize(std::string(bytes.begin(), bytes.end()));
}

struct GenerateConfig {
    int order = 1;
    int rounds = 50;
    std::uint32_t shots = 1;
    std::uint64_t seed = 1;
    double noise_p = 0.0;
    bool tolerate = false;
    std::string start = "first";  // "first" or "random"
};

// Bar chart of the per-run classification totals.
inline std::string render_stats_svg(const GenerationStats& stats) {
    struct Bar {
        const char* label;
        std::uint32_t value;
        const char* color;
    };
    const Bar bars[] = {{"good", stats.good, "#4878cf"},
                        {"skipped", stats.skipped, "#6acc65"},
                        {"noisy", stats.noisy_attempts, "#d65f5f"}};
    std::uint32_t max_value = 1;
    for (const auto& b : bars) max_value = std::max(max_value, b.value);

    const int width = 320, height = 240, base = 200, top = 24;
    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                      std::to_string(width) + "\" height=\"" + std::to_string(height) + "\">\n";
    int x = 40;
    for (const auto& b : bars) {
        int h = static_cast<int>(static_cast<double>(b.value) / max_value * (base - top));
        svg += "  <rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(base - h) +
               "\" width=\"56\" height=\"" + std::to_string(h) + "\" fill=\"" + b.color + "\"/>\n";
        svg += "  <text x=\"" + std::to_string(x + 28) + "\" y=\"" + std::to_string(base + 16) +
               "\" text-anchor=\"middle\" font-size=\"12\">" + b.label + "</text>\n";
        svg += "  <text x=\"" + std::to_string(x + 28) + "\" y=\"" + std::to_string(base - h - 6) +
               "\" text-anchor=\"middle\" font-size=\"12\">" + std::to_string(b.value) + "</text>\n";
        x += 92;
    }
    svg += "  <line x1=\"32\" y1=\"" + std::to_string(base) + "\" x2=\"" + std::to_string(width - 16) +
           "\" y2=\"" + std::to_string(base) + "\" stroke=\"#333\"/>\n</svg>\n";
    return svg;
}

inline GenerationResult cmd_generate(const std::filesystem::path& rules_path,
                                     const GenerateConfig& config,
                                     const std::filesystem::path& out_midi,
                                     const std::filesystem::path& out_csv,
                                     const std::filesystem::path& out_svg = {}) {
    Model model = load_model(rules_path);

    GenConfig gen;
    gen.rounds = config.rounds;
    gen.order = config.order;
    gen.shots = config.shots;
    gen.seed = config.seed;
    gen.noise.bit_flip_p = config.noise_p;
    gen.tolerate_wrong = config.tolerate;
    if (config.start == "first")
        gen.start = GenStart::first_of_input();
    else if (config.start == "random")
        gen.start = GenStart::random_context();
    else
        throw std::invalid_argument("start must be 'first' or 'random'");

    GenerationResult result = generate(model, gen);

    std::vector<NoteEvent> events;
    for (Code code : result.sequence)
        events.push_back(decode(decompress(code, model.lexicon), model.pitches, model.durations));

    write_file(out_midi, write_smf(events, model.ppqn));
    write_file(out_csv, stats_csv(result, model.lexicon.k));
    if (!out_svg.empty()) write_file(out_svg, render_stats_svg(result.stats));
    return result;
}

struct SingConfig {
    double tempo_bpm = 120.0;
    std::string vowel = "a";
    double duration_scale = 1.0;
    int sample_rate = 44100;
};

inline void cmd_sing(const std::filesystem::path& midi_path, const SingConfig& config,
                     const std::filesystem::path& out_wav) {
    if (config.duration_scale <= 0.0) throw std::invalid_argument("duration scale must be positive");
    MidiSequence seq = parse_smf(read_file(midi_path));
    auto events = extract_monophonic(seq);
    if (config.duration_scale != 1.0)
        for (auto& ev : events)
            ev.duration = std::max<std::uint32_t>(
                1, static_cast<std::uint32_t>(std::llround(ev.duration * config.duration_scale)));

    SynthParams params;
    params.sample_rate = config.sample_rate;
    params.formants = vowel_formants(config.vowel);
    params.tempo_bpm = config.tempo_bpm;
    params.ppqn = seq.ppqn > 0 ? seq.ppqn : 960;

    write_file(out_wav, write_wav(render(events, params), params.sample_rate));
}

struct RunPaths {
    std::filesystem::path rules;
    std::filesystem::path midi;
    std::filesystem::path csv;
    std::filesystem::path wav;
    std::filesystem::path svg;  // empty unless plotting

    static RunPaths in_dir(const std::filesystem::path& dir, bool plot) {
        RunPaths p;
        p.rules = dir / "rules.json";
        p.midi = dir / "tune.mid";
        p.csv = dir / "stats.csv";
        p.wav = dir / "tune.wav";
        if (plot) p.svg = dir / "stats.svg";
        return p;
    }
};

// End-to-end convenience: learn, generate, sing, all through the same
// files the separate subcommands would use, so the outputs are identical
// byte for byte to running the three stages by hand.
inline void cmd_run(const LearnConfig& learn, const GenerateConfig& gen, const SingConfig& sing,
                    const RunPaths& paths) {
    cmd_learn(learn, paths.rules);
    cmd_generate(paths.rules, gen, paths.midi, paths.csv, paths.svg);
    cmd_sing(paths.midi, sing, paths.wav);
}

} // namespace quaver

#endif
