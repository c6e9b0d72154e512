// quaver command line: learn transition rules from MIDI tunes, generate
// new tunes by simulating and measuring per-rule quantum circuits, and
// render the result as formant-synthesized singing.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "quaver/pipeline.hpp"

namespace {

int fail(const std::string& stage, const std::exception& e) {
    std::cerr << "error [" << stage << "]: " << e.what() << "\n";
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"learn-generate-sing toolkit for monophonic tunes"};
    app.set_config("--config", "", "read options from a config file (flags override it)");
    app.require_subcommand(1);

    std::vector<std::filesystem::path> inputs;
    std::filesystem::path rules_path = "rules.json";
    std::filesystem::path out_dir = ".";
    int order = 1;
    quaver::GenerateConfig gen;
    quaver::SingConfig sing;
    bool plot = false;

    auto add_learn_flags = [&](CLI::App* cmd) {
        cmd->add_option("input", inputs, "input MIDI file(s)")->required()->check(CLI::ExistingFile);
        cmd->add_option("-n,--order", order, "highest rule order to learn")->check(CLI::PositiveNumber);
    };
    auto add_gen_flags = [&](CLI::App* cmd) {
        cmd->add_option("--rounds", gen.rounds, "generative rounds")->check(CLI::NonNegativeNumber);
        cmd->add_option("--shots", gen.shots, "circuit shots per round")->check(CLI::PositiveNumber);
        cmd->add_option("--seed", gen.seed, "random seed");
        cmd->add_option("--noise-p", gen.noise_p, "measurement bit-flip probability")
            ->check(CLI::Range(0.0, 0.999));
        cmd->add_flag("--tolerate", gen.tolerate, "keep wrong events that have a successor rule");
        cmd->add_option("--start", gen.start, "start policy: first or random")
            ->check(CLI::IsMember({"first", "random"}));
        cmd->add_flag("--plot", plot, "also write an SVG bar chart of good/skipped/noisy");
    };
    auto add_sing_flags = [&](CLI::App* cmd) {
        cmd->add_option("--tempo", sing.tempo_bpm, "playback tempo in BPM")->check(CLI::PositiveNumber);
        cmd->add_option("--vowel", sing.vowel, "vowel preset: a e i o u")
            ->check(CLI::IsMember({"a", "e", "i", "o", "u"}));
        cmd->add_option("--duration-scale", sing.duration_scale, "multiply event durations")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--sample-rate", sing.sample_rate, "output sample rate in Hz")
            ->check(CLI::PositiveNumber);
    };

    CLI::App* learn = app.add_subcommand("learn", "extract rules from MIDI into a rules file");
    add_learn_flags(learn);
    learn->add_option("-o,--out", rules_path, "rules file to write");

    CLI::App* generate = app.add_subcommand("generate", "generate a tune from a rules file");
    generate->add_option("rules", rules_path, "rules file from `learn`")
        ->required()
        ->check(CLI::ExistingFile);
    generate->add_option("-n,--order", gen.order, "rule order to generate with")
        ->check(CLI::PositiveNumber);
    add_gen_flags(generate);
    generate->add_option("--out-dir", out_dir, "directory for tune.mid and stats.csv");

    CLI::App* sing_cmd = app.add_subcommand("sing", "render a monophonic MIDI file as singing");
    sing_cmd->add_option("input", inputs, "MIDI file to sing")
        ->required()
        ->check(CLI::ExistingFile);
    add_sing_flags(sing_cmd);
    std::filesystem::path wav_path = "tune.wav";
    sing_cmd->add_option("-o,--out", wav_path, "WAV file to write");

    CLI::App* run = app.add_subcommand("run", "learn, generate, and sing in one go");
    add_learn_flags(run);
    run->add_option("--gen-order", gen.order, "rule order to generate with (defaults to --order)")
        ->check(CLI::PositiveNumber);
    add_gen_flags(run);
    add_sing_flags(run);
    run->add_option("--out-dir", out_dir, "directory for rules.json, tune.mid, stats.csv, tune.wav");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(learn)) {
            quaver::cmd_learn({inputs, order}, rules_path);
            std::cout << "wrote " << rules_path.string() << "\n";
            return 0;
        }
        if (app.got_subcommand(generate)) {
            std::filesystem::create_directories(out_dir);
            auto paths = quaver::RunPaths::in_dir(out_dir, plot);
            auto result = quaver::cmd_generate(rules_path, gen, paths.midi, paths.csv, paths.svg);
            std::cout << "wrote " << paths.midi.string() << " and " << paths.csv.string()
                      << " (good=" << result.stats.good << " skipped=" << result.stats.skipped
                      << " noisy=" << result.stats.noisy_attempts << ")\n";
            return 0;
        }
        if (app.got_subcommand(sing_cmd)) {
            quaver::cmd_sing(inputs.front(), sing, wav_path);
            std::cout << "wrote " << wav_path.string() << "\n";
            return 0;
        }
        if (app.got_subcommand(run)) {
            if (run->count("--gen-order") == 0) gen.order = order;
            std::filesystem::create_directories(out_dir);
            auto paths = quaver::RunPaths::in_dir(out_dir, plot);
            quaver::cmd_run({inputs, order}, gen, sing, paths);
            std::cout << "wrote " << paths.rules.string() << ", " << paths.midi.string() << ", "
                      << paths.csv.string() << ", " << paths.wav.string() << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        const char* stage = app.got_subcommand(learn)      ? "learn"
                            : app.got_subcommand(generate) ? "generate"
                            : app.got_subcommand(sing_cmd) ? "sing"
                                                           : "run";
        return fail(stage, e);
    }
    return 1;
}
