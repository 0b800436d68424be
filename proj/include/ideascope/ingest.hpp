#pragma once
// Session ingestion: idea logs (JSONL), social network topology (JSON), and a
// deterministic synthetic-session generator used as a test/demo harness.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ideascope/common.hpp"
#include "ideascope/rng.hpp"
#include "ideascope/timeutil.hpp"

namespace ideascope {

enum class IdeaKind { daily, final };

inline const char* to_string(IdeaKind k) { return k == IdeaKind::daily ? "daily" : "final"; }

// One posted or final idea.
struct IdeaRecord {
    std::string id;
    int participant = 0;          // 0-based node index
    Millis timestamp = 0;         // UTC
    std::string text;             // non-empty after trimming
    IdeaKind kind = IdeaKind::daily;
    std::optional<double> score;  // expert evaluation, >= 0 when present

    friend bool operator==(const IdeaRecord&, const IdeaRecord&) = default;
};

struct SocialNetwork {
    int n = 0;
    std::vector<std::pair<int, int>> edges;  // normalized a < b, sorted, unique
    std::vector<std::string> labels;         // empty or size n

    bool adjacent(int a, int b) const {
        if (a > b) std::swap(a, b);
        return std::binary_search(edges.begin(), edges.end(), std::make_pair(a, b));
    }

    std::vector<int> neighbors(int node) const {
        std::vector<int> out;
        for (auto [a, b] : edges) {
            if (a == node) out.push_back(b);
            if (b == node) out.push_back(a);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    friend bool operator==(const SocialNetwork&, const SocialNetwork&) = default;
};

struct Session {
    std::vector<IdeaRecord> ideas;   // sorted by (timestamp, id)
    SocialNetwork network;
    std::vector<Millis> day_starts;  // start instant of each day bucket
    Millis day_length = 86400000;

    std::size_t day_count() const { return day_starts.size(); }

    // Day bucket of an instant; valid only when day_starts is non-empty.
    std::size_t day_index(Millis t) const {
        if (day_starts.empty() || t <= day_starts.front()) return 0;
        auto d = static_cast<std::size_t>((t - day_starts.front()) / day_length);
        return std::min(d, day_starts.size() - 1);
    }

    friend bool operator==(const Session&, const Session&) = default;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace detail

// Parse line-delimited idea records. Blank lines are skipped. All defects are
// collected and reported together, each with its line number.
inline std::vector<IdeaRecord> parse_ideas(std::istream& in) {
    std::vector<IdeaRecord> out;
    std::vector<std::string> issues;
    std::map<std::string, std::size_t> first_line_of_id;
    std::string line;
    std::size_t lineno = 0;

    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            issues.push_back("line " + std::to_string(lineno) + ": invalid JSON (" + e.what() +
                             ")");
            continue;
        }
        if (!j.is_object()) {
            issues.push_back("line " + std::to_string(lineno) + ": record is not an object");
            continue;
        }
        auto complain = [&](const std::string& why) {
            issues.push_back("line " + std::to_string(lineno) + ": " + why);
        };
        IdeaRecord rec;
        bool ok = true;
        auto need = [&](const char* field, nlohmann::json::value_t a,
                        nlohmann::json::value_t b = nlohmann::json::value_t::discarded) {
            if (!j.contains(field)) {
                complain(std::string("missing field \"") + field + "\"");
                ok = false;
                return false;
            }
            auto t = j.at(field).type();
            if (t != a && t != b) {
                complain(std::string("field \"") + field + "\" has wrong type");
                ok = false;
                return false;
            }
            return true;
        };
        using vt = nlohmann::json::value_t;
        if (need("id", vt::string)) rec.id = j["id"].get<std::string>();
        if (need("participant", vt::number_integer, vt::number_unsigned))
            rec.participant = j["participant"].get<int>();
        if (need("t", vt::string)) {
            try {
                rec.timestamp = parse_rfc3339(j["t"].get<std::string>());
            } catch (const ValidationError& e) {
                complain(e.what());
                ok = false;
            }
        }
        if (need("text", vt::string)) {
            rec.text = j["text"].get<std::string>();
            if (detail::trim(rec.text).empty()) {
                complain("field \"text\" is empty");
                ok = false;
            }
        }
        if (need("kind", vt::string)) {
            std::string k = j["kind"].get<std::string>();
            if (k == "daily")
                rec.kind = IdeaKind::daily;
            else if (k == "final")
                rec.kind = IdeaKind::final;
            else {
                complain("field \"kind\" must be \"daily\" or \"final\", got \"" + k + "\"");
                ok = false;
            }
        }
        if (j.contains("score")) {
            if (!j["score"].is_number()) {
                complain("field \"score\" must be a number");
                ok = false;
            } else {
                double s = j["score"].get<double>();
                if (!std::isfinite(s) || s < 0.0) {
                    complain("field \"score\" must be finite and >= 0");
                    ok = false;
                } else {
                    rec.score = s;
                }
            }
        }
        if (ok) {
            auto [it, inserted] = first_line_of_id.emplace(rec.id, lineno);
            if (!inserted) {
                complain("duplicate id \"" + rec.id + "\" (first seen at line " +
                         std::to_string(it->second) + ")");
                continue;
            }
            out.push_back(std::move(rec));
        }
    }
    if (!issues.empty()) {
        std::string msg = "ideas stream has " + std::to_string(issues.size()) + " problem(s):";
        for (const auto& s : issues) msg += "\n  " + s;
        throw ValidationError(msg);
    }
    return out;
}

inline std::vector<IdeaRecord> parse_ideas(const std::string& text) {
    std::istringstream in(text);
    return parse_ideas(in);
}

// Ring lattice: node i connected to i±1..i±degree/2 (mod n).
inline SocialNetwork build_ring_lattice(int n, int degree) {
    if (degree < 2 || degree % 2 != 0)
        throw ValidationError("ring degree must be even and >= 2, got " + std::to_string(degree));
    if (n < degree + 1)
        throw ValidationError("ring needs n >= degree + 1, got n=" + std::to_string(n) +
                              ", degree=" + std::to_string(degree));
    SocialNetwork net;
    net.n = n;
    for (int i = 0; i < n; ++i) {
        for (int j = 1; j <= degree / 2; ++j) {
            int a = i, b = (i + j) % n;
            if (a > b) std::swap(a, b);
            net.edges.emplace_back(a, b);
        }
    }
    std::sort(net.edges.begin(), net.edges.end());
    net.edges.erase(std::unique(net.edges.begin(), net.edges.end()), net.edges.end());
    return net;
}

// Either {"type":"ring","n":N,"degree":D} or {"n":N,"edges":[[a,b],...]}.
inline SocialNetwork parse_network(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("network JSON invalid: ") + e.what());
    }
    if (!j.is_object()) throw ValidationError("network JSON must be an object");

    if (j.contains("type")) {
        std::string type = j["type"].get<std::string>();
        if (type != "ring")
            throw ValidationError("unknown network type \"" + type + "\" (expected \"ring\")");
        if (!j.contains("n") || !j.contains("degree"))
            throw ValidationError("ring network requires \"n\" and \"degree\"");
        return build_ring_lattice(j["n"].get<int>(), j["degree"].get<int>());
    }

    if (!j.contains("n") || !j.contains("edges"))
        throw ValidationError("explicit network requires \"n\" and \"edges\"");
    SocialNetwork net;
    net.n = j["n"].get<int>();
    if (net.n < 0) throw ValidationError("network n must be >= 0");
    std::set<std::pair<int, int>> seen;
    for (const auto& e : j["edges"]) {
        if (!e.is_array() || e.size() != 2)
            throw ValidationError("each edge must be a pair [a, b]");
        int a = e[0].get<int>(), b = e[1].get<int>();
        if (a == b) throw ValidationError("self-loop on node " + std::to_string(a));
        if (a < 0 || b < 0 || a >= net.n || b >= net.n)
            throw ValidationError("edge endpoint out of range: [" + std::to_string(a) + ", " +
                                  std::to_string(b) + "] with n=" + std::to_string(net.n));
        if (a > b) std::swap(a, b);
        if (!seen.insert({a, b}).second)
            throw ValidationError("duplicate edge [" + std::to_string(a) + ", " +
                                  std::to_string(b) + "]");
    }
    net.edges.assign(seen.begin(), seen.end());
    if (j.contains("labels")) {
        for (const auto& l : j["labels"]) net.labels.push_back(l.get<std::string>());
        if (static_cast<int>(net.labels.size()) != net.n)
            throw ValidationError("labels must have exactly n entries");
    }
    return net;
}

// Sort ideas, check participant ranges, and bucket the session into
// fixed-length days anchored at the earliest timestamp.
inline Session validate_session(std::vector<IdeaRecord> ideas, SocialNetwork network,
                                Millis day_length = 86400000) {
    if (day_length <= 0) throw ValidationError("day length must be positive");
    for (const auto& idea : ideas) {
        if (idea.participant < 0 || idea.participant >= network.n)
            throw ValidationError("idea \"" + idea.id + "\" references participant " +
                                  std::to_string(idea.participant) + " outside network of size " +
                                  std::to_string(network.n));
    }
    std::stable_sort(ideas.begin(), ideas.end(), [](const IdeaRecord& a, const IdeaRecord& b) {
        if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
        return a.id < b.id;
    });
    Session s;
    s.network = std::move(network);
    s.day_length = day_length;
    if (!ideas.empty()) {
        Millis t0 = ideas.front().timestamp;
        Millis t_last = ideas.back().timestamp;
        auto buckets = static_cast<std::size_t>((t_last - t0) / day_length) + 1;
        for (std::size_t i = 0; i < buckets; ++i)
            s.day_starts.push_back(t0 + static_cast<Millis>(i) * day_length);
    }
    s.ideas = std::move(ideas);
    return s;
}

struct SynthOptions {
    int n_participants = 25;
    int n_days = 4;
    int topics = 3;
    std::uint64_t seed = 7;
    int ideas_per_day = 2;                 // per contributing participant
    double non_contributor_fraction = 0.0; // planted zero-idea participants
    bool include_finals = true;
    int finals_per_participant = 3;
    Millis day_length = 86400000;
};

namespace detail {

inline std::string topic_word(int topic, int word) {
    std::string prefix;
    int t = topic;
    do {
        prefix.insert(prefix.begin(), static_cast<char>('a' + t % 26));
        t = t / 26 - 1;
    } while (t >= 0);
    char buf[8];
    std::snprintf(buf, sizeof(buf), "%02d", word);
    return prefix + buf;
}

}  // namespace detail

// Deterministic synthetic session. Ideas are arrow-joined chains over
// per-topic disjoint vocabularies (participant p draws from topic p % topics),
// so topic structure is recoverable by the embedding stage.
inline Session synth_session(const SynthOptions& opt) {
    if (opt.n_participants < 1 || opt.n_days < 1 || opt.topics < 1 || opt.ideas_per_day < 1)
        throw ValidationError("synth_session requires all counts >= 1");
    if (opt.non_contributor_fraction < 0.0 || opt.non_contributor_fraction >= 1.0)
        throw ValidationError("non-contributor fraction must be in [0, 1)");

    const int n = opt.n_participants;
    const int vocab_size = 12;
    Rng rng(opt.seed);

    // Planted non-contributors: a seeded partial shuffle picks them.
    auto planted = static_cast<int>(std::llround(opt.non_contributor_fraction * n));
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    for (int i = 0; i < planted; ++i) {
        int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
        std::swap(order[i], order[j]);
    }
    std::vector<bool> silent(n, false);
    for (int i = 0; i < planted; ++i) silent[order[i]] = true;

    auto make_text = [&](int topic) {
        int len = 3 + static_cast<int>(rng.below(4));
        std::string text;
        for (int w = 0; w < len; ++w) {
            if (w > 0) text += "→";
            text += detail::topic_word(topic, static_cast<int>(rng.below(vocab_size)));
        }
        return text;
    };

    const Millis base = parse_rfc3339("2020-01-01T00:00:00Z");
    std::vector<IdeaRecord> ideas;
    int seq = 0;
    auto next_id = [&seq] {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "i%05d", seq++);
        return std::string(buf);
    };

    const int slots_per_day = n * opt.ideas_per_day;
    const Millis stride = opt.day_length / (slots_per_day + 1);
    for (int d = 0; d < opt.n_days; ++d) {
        int slot = 0;
        for (int p = 0; p < n; ++p) {
            if (silent[p]) continue;
            for (int k = 0; k < opt.ideas_per_day; ++k, ++slot) {
                IdeaRecord rec;
                rec.id = next_id();
                rec.participant = p;
                Millis jitter_cap = std::min<Millis>(stride, 1000);
                rec.timestamp = base + static_cast<Millis>(d) * opt.day_length +
                                static_cast<Millis>(slot) * stride +
                                (jitter_cap > 1
                                     ? static_cast<Millis>(
                                           rng.below(static_cast<std::uint64_t>(jitter_cap)))
                                     : 0);
                rec.text = make_text(p % opt.topics);
                rec.kind = IdeaKind::daily;
                ideas.push_back(std::move(rec));
            }
        }
    }

    if (opt.include_finals) {
        // Finals land in the last hour of the final day.
        const Millis window = std::min<Millis>(3600000, opt.day_length / 4);
        const Millis t_end = base + static_cast<Millis>(opt.n_days) * opt.day_length;
        const int final_slots = n * opt.finals_per_participant + 1;
        const Millis step = window / final_slots;
        int slot = 0;
        for (int p = 0; p < n; ++p) {
            if (silent[p]) continue;
            for (int k = 0; k < opt.finals_per_participant; ++k, ++slot) {
                IdeaRecord rec;
                rec.id = next_id();
                rec.participant = p;
                rec.timestamp = t_end - window + static_cast<Millis>(slot) * step;
                rec.text = make_text(p % opt.topics);
                rec.kind = IdeaKind::final;
                rec.score = rng.uniform(0.0, 10.0);
                ideas.push_back(std::move(rec));
            }
        }
    }

    SocialNetwork net;
    if (n >= 5)
        net = build_ring_lattice(n, 4);
    else if (n >= 3)
        net = build_ring_lattice(n, 2);
    else
        net.n = n;

    return validate_session(std::move(ideas), std::move(net), opt.day_length);
}

// JSONL serialization of ideas; inverse of parse_ideas.
inline std::string write_ideas_jsonl(const std::vector<IdeaRecord>& ideas) {
    std::string out;
    for (const auto& idea : ideas) {
        nlohmann::ordered_json j;
        j["id"] = idea.id;
        j["participant"] = idea.participant;
        j["t"] = format_rfc3339(idea.timestamp);
        j["text"] = idea.text;
        j["kind"] = to_string(idea.kind);
        if (idea.score) j["score"] = *idea.score;
        out += j.dump();
        out += '\n';
    }
    return out;
}

// Explicit-edge-list serialization; inverse of parse_network.
inline std::string write_network_json(const SocialNetwork& net) {
    nlohmann::ordered_json j;
    j["n"] = net.n;
    auto edges = nlohmann::ordered_json::array();
    for (auto [a, b] : net.edges) edges.push_back({a, b});
    j["edges"] = std::move(edges);
    if (!net.labels.empty()) j["labels"] = net.labels;
    return j.dump(2) + "\n";
}

}  // namespace ideascope
