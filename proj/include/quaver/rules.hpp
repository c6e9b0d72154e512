#ifndef QUAVER_RULES_HPP
#define QUAVER_RULES_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "quaver/codec.hpp"

namespace quaver {

struct SequenceTooShort : std::runtime_error {
    explicit SequenceTooShort(const std::string& msg) : std::runtime_error("sequence too short: " + msg) {}
};

struct DeadEnd : std::runtime_error {
    explicit DeadEnd(const std::string& msg) : std::runtime_error("dead-end context: " + msg) {}
};

struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& msg) : std::runtime_error("rules file format error: " + msg) {}
};

// The n most recent events, oldest first.
using Context = std::vector<Code>;

using SuccessorCounts = std::map<Code, std::uint32_t>;

// Occurrence counts: how often each successor followed each length-n
// context in the training input. Contexts seen only at the very end of
// a sequence have no row (dead ends).
struct RuleSet {
    int n = 1;
    std::map<Context, SuccessorCounts> rows;

    const SuccessorCounts* row(const Context& ctx) const {
        auto it = rows.find(ctx);
        return it == rows.end() ? nullptr : &it->second;
    }

    std::uint64_t total_count() const {
        std::uint64_t total = 0;
        for (const auto& [ctx, succ] : rows)
            for (const auto& [code, count] : succ) total += count;
        return total;
    }

    bool operator==(const RuleSet&) const = default;
};

// Counts every (context, successor) window of seq into a fresh rule set.
inline RuleSet extract_rules(std::span<const Code> seq, int n) {
    if (n < 1) throw std::invalid_argument("rule order must be at least 1");
    if (seq.size() < static_cast<std::size_t>(n) + 1)
        throw SequenceTooShort(std::to_string(seq.size()) + " events, order " + std::to_string(n) +
                               " needs at least " + std::to_string(n + 1));
    RuleSet rules;
    rules.n = n;
    for (std::size_t i = 0; i + n < seq.size(); ++i) {
        Context ctx(seq.begin() + static_cast<std::ptrdiff_t>(i),
                    seq.begin() + static_cast<std::ptrdiff_t>(i + n));
        ++rules.rows[ctx][seq[i + static_cast<std::size_t>(n)]];
    }
    return rules;
}

// Adds src's counts into dst. Used for corpus training, where each file is
// counted separately so no window bridges a file boundary.
inline void merge_rules(RuleSet& dst, const RuleSet& src) {
    if (dst.n != src.n) throw std::invalid_argument("cannot merge rule sets of different order");
    for (const auto& [ctx, succ] : src.rows)
        for (const auto& [code, count] : succ) dst.rows[ctx][code] += count;
}

// A rule's successor distribution. Counts are the stored truth; the
// floating probability (count/total) and amplitude (sqrt of that) are
// derived views computed when a circuit is about to be built.
struct Distribution {
    struct Entry {
        Code code = 0;
        std::uint32_t count = 0;
        double probability = 0.0;
        double amplitude = 0.0;
    };
    std::vector<Entry> support;
    std::uint64_t total = 0;
};

inline Distribution distribution(const RuleSet& rules, const Context& ctx) {
    const SuccessorCounts* row = rules.row(ctx);
    if (!row) throw DeadEnd("context has no successor rule");
    Distribution dist;
    for (const auto& [code, count] : *row) dist.total += count;
    for (const auto& [code, count] : *row) {
        double p = static_cast<double>(count) / static_cast<double>(dist.total);
        dist.support.push_back({code, count, p, std::sqrt(p)});
    }
    return dist;
}

// Spreads the distribution's amplitudes over a 2^k vector, amplitude of
// each successor at the index equal to its code value.
inline std::vector<double> to_state_target(const Distribution& dist, int k) {
    std::vector<double> target(std::size_t{1} << k, 0.0);
    for (const auto& entry : dist.support) {
        if (entry.code >= target.size())
            throw std::invalid_argument("code " + std::to_string(entry.code) +
                                        " does not fit in " + std::to_string(k) + " qubits");
        target[entry.code] = entry.amplitude;
    }
    return target;
}

// Everything the generative phase needs, bundled for (de)serialization:
// the event alphabets, the lexicon, and rule sets for orders 1..max so a
// high-order run can back off to shorter contexts.
struct Model {
    int ppqn = 960;
    PitchTable pitches;
    DurationTable durations;
    Lexicon lexicon;
    std::vector<RuleSet> orders;  // orders[i] holds n = i+1

    int max_order() const { return static_cast<int>(orders.size()); }

    const RuleSet& rules(int n) const {
        if (n < 1 || n > max_order())
            throw std::invalid_argument("no rules of order " + std::to_string(n));
        return orders[static_cast<std::size_t>(n - 1)];
    }

    bool operator==(const Model&) const = default;
};

inline constexpr int kRulesFormatVersion = 1;
inline constexpr const char* kRulesFormatName = "quaver-rules";

inline std::string serialize(const Model& model) {
    nlohmann::json j;
    j["format"] = kRulesFormatName;
    j["version"] = kRulesFormatVersion;
    j["ppqn"] = model.ppqn;
    j["pitches"] = model.pitches.entries;
    j["durations"] = model.durations.entries;
    nlohmann::json lex = nlohmann::json::array();
    for (RawCode rc : model.lexicon.raw_codes) lex.push_back(rc.value);
    j["lexicon"] = lex;
    nlohmann::json orders = nlohmann::json::array();
    for (const auto& rules : model.orders) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& [ctx, succ] : rules.rows) {
            nlohmann::json next = nlohmann::json::array();
            for (const auto& [code, count] : succ) next.push_back({code, count});
            rows.push_back({{"ctx", ctx}, {"next", next}});
        }
        orders.push_back({{"n", rules.n}, {"rows", rows}});
    }
    j["orders"] = orders;
    return j.dump(2) + "\n";
}

inline Model deserialize(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(e.what());
    }
    try {
        if (j.value("format", "") != kRulesFormatName) throw FormatError("not a rules file");
        if (j.value("version", -1) != kRulesFormatVersion)
            throw FormatError("unsupported version " + j["version"].dump());

        Model model;
        model.ppqn = j.at("ppqn").get<int>();
        if (model.ppqn <= 0) throw FormatError("ppqn must be positive");
        model.pitches.entries = j.at("pitches").get<std::vector<int>>();
        model.durations.entries = j.at("durations").get<std::vector<std::uint32_t>>();
        for (const auto& v : j.at("lexicon"))
            model.lexicon.raw_codes.push_back(RawCode{v.get<std::uint16_t>()});
        if (model.lexicon.raw_codes.empty()) throw FormatError("empty lexicon");
        model.lexicon.k = qubits_for(model.lexicon.raw_codes.size());

        for (const auto& jo : j.at("orders")) {
            RuleSet rules;
            rules.n = jo.at("n").get<int>();
            if (rules.n != static_cast<int>(model.orders.size()) + 1)
                throw FormatError("orders must run 1..max without gaps");
            for (const auto& jr : jo.at("rows")) {
                Context ctx = jr.at("ctx").get<Context>();
                if (ctx.size() != static_cast<std::size_t>(rules.n))
                    throw FormatError("context length does not match order");
                SuccessorCounts succ;
                for (const auto& pair : jr.at("next")) {
                    Code code = pair.at(0).get<Code>();
                    std::uint32_t count = pair.at(1).get<std::uint32_t>();
                    if (count == 0) throw FormatError("zero successor count");
                    succ[code] = count;
                }
                if (succ.empty()) throw FormatError("row without successors");
                rules.rows[std::move(ctx)] = std::move(succ);
            }
            model.orders.push_back(std::move(rules));
        }
        if (model.orders.empty()) throw FormatError("no rule orders");
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(e.what());
    }
}

} // namespace quaver

#endif
