#ifndef QUAVER_GENERATE_HPP
#define QUAVER_GENERATE_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "quaver/rules.hpp"
#include "quaver/rng.hpp"
#include "quaver/sim.hpp"
#include "quaver/state_prep.hpp"

namespace quaver {

struct EmptyRules : std::runtime_error {
    explicit EmptyRules(const std::string& msg) : std::runtime_error("empty rule set: " + msg) {}
};

struct RetriesExhausted : std::runtime_error {
    RetriesExhausted(int round, int retries)
        : std::runtime_error("round " + std::to_string(round) + ": no permissible outcome after " +
                             std::to_string(retries) + " retries"),
          round(round) {}
    int round;
};

struct GenStart {
    enum class Kind {
        first_of_input,  // the training input's first event (lexicon code 0)
        random_context,  // a uniformly random trained context of order n
        codes,           // explicitly given context
    };
    Kind kind = Kind::first_of_input;
    std::vector<Code> codes;

    static GenStart first_of_input() { return {Kind::first_of_input, {}}; }
    static GenStart random_context() { return {Kind::random_context, {}}; }
    static GenStart explicit_codes(std::vector<Code> c) { return {Kind::codes, std::move(c)}; }
};

struct GenConfig {
    int rounds = 50;
    int order = 1;
    std::uint32_t shots = 1;
    GenStart start;
    NoiseModel noise;
    bool tolerate_wrong = false;
    int max_retries = 100;
    std::uint64_t seed = 1;
};

enum class RoundClass { good, skipped, noisy, dead_end };

inline const char* to_string(RoundClass c) {
    switch (c) {
        case RoundClass::good: return "good";
        case RoundClass::skipped: return "skipped";
        case RoundClass::noisy: return "noisy";
        case RoundClass::dead_end: return "dead_end";
    }
    return "?";
}

struct RoundLog {
    int round = 0;        // 1-based
    Context context;      // the context that drove the round (resolved order)
    Code outcome = 0;
    RoundClass cls = RoundClass::skipped;
    int retries = 0;      // discarded attempts before the accepted one
};

// good: circuit built and measured an in-rule event.
// skipped: no circuit built; single-choice rules and dead-end draws.
// noisy_attempts: wrong events measured, whether later accepted or not.
// noisy_accepted: wrong events kept under the tolerance policy.
// dead_end_draws: rounds resolved by a uniform random draw (subset of skipped).
struct GenerationStats {
    std::uint32_t good = 0;
    std::uint32_t skipped = 0;
    std::uint32_t noisy_attempts = 0;
    std::uint32_t noisy_accepted = 0;
    std::uint32_t dead_end_draws = 0;
    std::vector<RoundLog> log;
};

struct GenerationResult {
    std::vector<Code> sequence;  // start context followed by one event per round
    GenerationStats stats;
};

struct ResolvedRule {
    int order = 0;
    Context context;
    const SuccessorCounts* row = nullptr;
};

// Finds the rule governing the next event: the longest suffix of the
// history, starting at length min(n, |history|) and backing off towards
// single events, that has a row in the corresponding rule set. Returns
// nothing when every suffix is unknown (a dead end).
inline std::optional<ResolvedRule> resolve_context(std::span<const Code> history,
                                                   const Model& model, int n) {
    int longest = std::min<int>(n, static_cast<int>(history.size()));
    for (int m = longest; m >= 1; --m) {
        if (m > model.max_order()) continue;
        Context ctx(history.end() - m, history.end());
        if (const SuccessorCounts* row = model.rules(m).row(ctx))
            return ResolvedRule{m, std::move(ctx), row};
    }
    return std::nullopt;
}

enum class WrongEventAction { accept, retry };

// Tolerance policy for a measured event outside the active rule: keep it
// only if the generation can continue from it, i.e. the length-n context
// formed by appending it has a row of its own. Undecodable events (beyond
// the lexicon) are always discarded.
inline WrongEventAction wrong_event_policy(std::span<const Code> history, Code outcome,
                                           const RuleSet& rules, const GenConfig& config,
                                           Code lexicon_size) {
    if (!config.tolerate_wrong) return WrongEventAction::retry;
    if (outcome >= lexicon_size) return WrongEventAction::retry;

    Context ctx;
    int n = rules.n;
    int from_history = std::min<int>(n - 1, static_cast<int>(history.size()));
    ctx.insert(ctx.end(), history.end() - from_history, history.end());
    ctx.push_back(outcome);
    if (ctx.size() != static_cast<std::size_t>(n)) return WrongEventAction::retry;
    return rules.row(ctx) ? WrongEventAction::accept : WrongEventAction::retry;
}

namespace detail {

// Per-round, per-attempt seed streams: 0 = shot sampling, 1 = majority
// tie break, 2 = dead-end draw, 3 = start selection.
inline std::uint64_t round_seed(std::uint64_t master, int round, int attempt, int stream) {
    return derive_seed(master, (static_cast<std::uint64_t>(round) << 20) |
                               (static_cast<std::uint64_t>(attempt) << 4) |
                               static_cast<std::uint64_t>(stream));
}

inline std::vector<Code> resolve_start(const Model& model, const GenConfig& config) {
    switch (config.start.kind) {
        case GenStart::Kind::first_of_input:
            // The lexicon is ordered by first appearance, so the first
            // event of the training input is always code 0.
            return {Code{0}};
        case GenStart::Kind::random_context: {
            const auto& rows = model.rules(config.order).rows;
            if (rows.empty()) throw EmptyRules("no contexts to start from");
            std::mt19937_64 gen(round_seed(config.seed, 0, 0, 3));
            auto idx = uniform_below(gen, rows.size());
            auto it = rows.begin();
            std::advance(it, static_cast<std::ptrdiff_t>(idx));
            return it->first;
        }
        case GenStart::Kind::codes: {
            if (config.start.codes.size() != static_cast<std::size_t>(config.order))
                throw std::invalid_argument("explicit start must have exactly n codes");
            for (Code c : config.start.codes)
                if (c >= model.lexicon.size())
                    throw std::invalid_argument("start code outside lexicon");
            return config.start.codes;
        }
    }
    throw std::invalid_argument("bad start mode");
}

} // namespace detail

// Walks the rules for config.rounds rounds, appending one event each.
// Single-choice rules are taken classically; otherwise the rule's
// distribution is loaded into a state-preparation circuit, simulated,
// sampled for config.shots shots, and the majority outcome is kept if the
// rule allows it. Wrong (noisy) outcomes are retried or, under the
// tolerance policy, accepted. Dead-end contexts draw the next event
// uniformly from the lexicon.
inline GenerationResult generate(const Model& model, const GenConfig& config) {
    if (config.rounds < 0) throw std::invalid_argument("rounds must be non-negative");
    if (config.order < 1 || config.order > model.max_order())
        throw std::invalid_argument("no rules of order " + std::to_string(config.order));
    if (model.lexicon.size() == 0) throw EmptyRules("empty lexicon");
    bool any_row = false;
    for (const auto& rules : model.orders) any_row = any_row || !rules.rows.empty();
    if (!any_row) throw EmptyRules("no rows in any order");

    const int k = model.lexicon.k;
    GenerationResult result;
    result.sequence = detail::resolve_start(model, config);

    for (int round = 1; round <= config.rounds; ++round) {
        RoundLog entry;
        entry.round = round;

        auto resolved = resolve_context(result.sequence, model, config.order);
        if (!resolved) {
            int tail = std::min<int>(config.order, static_cast<int>(result.sequence.size()));
            entry.context.assign(result.sequence.end() - tail, result.sequence.end());
            std::mt19937_64 gen(detail::round_seed(config.seed, round, 0, 2));
            entry.outcome = static_cast<Code>(uniform_below(gen, model.lexicon.size()));
            entry.cls = RoundClass::dead_end;
            ++result.stats.skipped;
            ++result.stats.dead_end_draws;
        } else {
            entry.context = resolved->context;
            Distribution dist = distribution(model.rules(resolved->order), resolved->context);
            if (dist.support.size() == 1) {
                entry.outcome = dist.support.front().code;
                entry.cls = RoundClass::skipped;
                ++result.stats.skipped;
            } else {
                Circuit circuit = prepare_state(to_state_target(dist, k), k);
                StateVector state = run(circuit);
                bool settled = false;
                for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
                    ShotCounts counts = sample(state, config.shots,
                                               detail::round_seed(config.seed, round, attempt, 0),
                                               config.noise);
                    Code outcome = majority(counts,
                                            detail::round_seed(config.seed, round, attempt, 1));
                    bool in_rule = false;
                    for (const auto& s : dist.support) in_rule = in_rule || s.code == outcome;

                    if (in_rule) {
                        entry.outcome = outcome;
                        entry.cls = RoundClass::good;
                        entry.retries = attempt;
                        ++result.stats.good;
                        settled = true;
                        break;
                    }
                    ++result.stats.noisy_attempts;
                    if (wrong_event_policy(result.sequence, outcome, model.rules(config.order),
                                           config, model.lexicon.size()) ==
                        WrongEventAction::accept) {
                        entry.outcome = outcome;
                        entry.cls = RoundClass::noisy;
                        entry.retries = attempt;
                        ++result.stats.noisy_accepted;
                        settled = true;
                        break;
                    }
                }
                if (!settled) throw RetriesExhausted(round, config.max_retries);
            }
        }

        result.sequence.push_back(entry.outcome);
        result.stats.log.push_back(std::move(entry));
    }
    return result;
}

// CSV log: one row per round plus a summary comment line whose good,
// skipped and noisy fields match the per-run bar charts.
inline std::string stats_csv(const GenerationResult& result, int k) {
    std::string out = "round,context,outcome,classification,retries\n";
    for (const auto& entry : result.stats.log) {
        out += std::to_string(entry.round) + ",";
        for (std::size_t i = 0; i < entry.context.size(); ++i) {
            if (i) out += ' ';
            out += to_bits(entry.context[i], k);
        }
        out += "," + to_bits(entry.outcome, k) + "," + to_string(entry.cls) + "," +
               std::to_string(entry.retries) + "\n";
    }
    const auto& s = result.stats;
    out += "# summary good=" + std::to_string(s.good) + " skipped=" + std::to_string(s.skipped) +
           " noisy=" + std::to_string(s.noisy_attempts) +
           " noisy_accepted=" + std::to_string(s.noisy_accepted) +
           " dead_end=" + std::to_string(s.dead_end_draws) + "\n";
    return out;
}

} // namespace quaver

#endif
