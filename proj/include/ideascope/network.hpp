#pragma once
// Idea Network scene: participants on a unit ring in the z=0 plane, idea
// nodes floating above their authors at normalized-PC1 height, neighborhood
// idea edges, recency saturation, innovator detection, contribution
// statistics, and animation frames.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "ideascope/common.hpp"
#include "ideascope/dimred.hpp"
#include "ideascope/ingest.hpp"

namespace ideascope {

inline std::vector<Vec3> layout_ring(const SocialNetwork& network) {
    if (network.n <= 0) throw ValidationError("cannot lay out a ring of 0 participants");
    std::vector<Vec3> pos;
    pos.reserve(static_cast<std::size_t>(network.n));
    for (int i = 0; i < network.n; ++i) {
        double angle = 2.0 * std::numbers::pi * static_cast<double>(i) /
                       static_cast<double>(network.n);
        pos.push_back({std::cos(angle), std::sin(angle), 0.0});
    }
    return pos;
}

struct IdeaNode {
    std::string id;
    int author = 0;
    Vec3 position{0.0, 0.0, 0.0};  // (x, y) = author's ring slot, z = normalized PC1
    double raw_pc1 = 0.0;
    Millis birth = 0;
    double saturation = 1.0;  // at the scene's time cursor
    bool innovator = false;
};

struct IdeaEdge {
    std::size_t from = 0;  // later idea, index into the node list
    std::size_t to = 0;    // earlier idea
};

struct NetworkScene {
    SocialNetwork network;
    std::vector<Vec3> humans;
    std::vector<IdeaNode> ideas;     // session idea order
    std::vector<IdeaEdge> idea_edges;
    Millis cursor = 0;               // last idea timestamp
};

// `projections` must align with session.ideas; z comes from the normalized
// PC1, raw PC1 rides along for analytics and the scene file.
inline std::vector<IdeaNode> place_idea_nodes(const Session& session,
                                              const NormalizedPoints& projections) {
    if (projections.normalized.size() < session.ideas.size()) {
        const auto& missing = session.ideas[projections.normalized.size()];
        throw ValidationError("idea " + missing.id + " has no projection");
    }
    if (projections.normalized.size() != session.ideas.size())
        throw ValidationError("more projections than ideas");
    auto ring = layout_ring(session.network);
    std::vector<IdeaNode> nodes;
    nodes.reserve(session.ideas.size());
    for (std::size_t i = 0; i < session.ideas.size(); ++i) {
        const auto& idea = session.ideas[i];
        IdeaNode n;
        n.id = idea.id;
        n.author = idea.participant;
        const auto& slot = ring[static_cast<std::size_t>(idea.participant)];
        n.position = {slot.x, slot.y, projections.normalized[i].x};
        n.raw_pc1 = projections.raw[i].x;
        n.birth = idea.timestamp;
        nodes.push_back(std::move(n));
    }
    return nodes;
}

enum class LinkPolicy : std::uint8_t { most_recent = 0, all_pairs = 1 };

// Default policy: each idea links back to the most recent earlier idea of
// each socially adjacent author and of its own author ("earlier" = preceding
// in scene order, which is (timestamp, id) order). The all-pairs policy links
// every in-neighborhood idea pair.
inline std::vector<IdeaEdge> link_idea_nodes(const std::vector<IdeaNode>& nodes,
                                             const SocialNetwork& network,
                                             LinkPolicy policy = LinkPolicy::most_recent) {
    std::vector<IdeaEdge> edges;
    auto in_neighborhood = [&](int a, int b) { return a == b || network.adjacent(a, b); };
    if (policy == LinkPolicy::all_pairs) {
        for (std::size_t j = 1; j < nodes.size(); ++j)
            for (std::size_t i = 0; i < j; ++i)
                if (in_neighborhood(nodes[j].author, nodes[i].author)) edges.push_back({j, i});
        return edges;
    }
    // latest[a] = index of author a's most recent idea seen so far
    std::vector<std::ptrdiff_t> latest(static_cast<std::size_t>(network.n), -1);
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        auto link_to = [&](int author) {
            auto l = latest[static_cast<std::size_t>(author)];
            if (l >= 0) edges.push_back({j, static_cast<std::size_t>(l)});
        };
        link_to(nodes[j].author);
        for (int nb : network.neighbors(nodes[j].author)) link_to(nb);
        latest[static_cast<std::size_t>(nodes[j].author)] = static_cast<std::ptrdiff_t>(j);
    }
    return edges;
}

// s = s_min + (1 - s_min) * exp(-age / tau); 1 when fresh, -> s_min with age.
inline double recency_saturation(double age_ms, double tau_ms, double s_min = 0.2) {
    if (age_ms < 0.0) throw ValidationError("idea age cannot be negative");
    if (!(tau_ms > 0.0)) throw ValidationError("saturation time constant must be positive");
    if (s_min < 0.0 || s_min >= 1.0) throw ValidationError("s_min must be in [0, 1)");
    return s_min + (1.0 - s_min) * std::exp(-age_ms / tau_ms);
}

struct InnovatorReport {
    std::vector<std::size_t> flagged;  // indices into the idea-node list
    double median = 0.0;
    double scale = 0.0;      // 1.4826 * MAD, or the SD fallback
    double threshold = 3.0;
    bool used_sd_fallback = false;
};

// Robust z on raw PC1: |x - median| / (1.4826 * MAD); MAD = 0 falls back to
// the sample standard deviation; both zero means no spread and no flags.
inline InnovatorReport detect_innovator(const std::vector<IdeaNode>& nodes,
                                        double z_threshold = 3.0) {
    if (nodes.size() < 3)
        throw ValidationError("innovator detection needs at least 3 ideas");
    InnovatorReport r;
    r.threshold = z_threshold;

    std::vector<double> xs;
    xs.reserve(nodes.size());
    for (const auto& n : nodes) xs.push_back(n.raw_pc1);
    auto median_of = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        auto m = v.size() / 2;
        return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
    };
    r.median = median_of(xs);

    std::vector<double> dev;
    dev.reserve(xs.size());
    for (double x : xs) dev.push_back(std::fabs(x - r.median));
    double mad = median_of(dev);
    if (mad > 0.0) {
        r.scale = 1.4826 * mad;
    } else {
        double mean = 0.0;
        for (double x : xs) mean += x;
        mean /= static_cast<double>(xs.size());
        double var = 0.0;
        for (double x : xs) var += (x - mean) * (x - mean);
        var /= static_cast<double>(xs.size() - 1);
        r.scale = std::sqrt(var);
        r.used_sd_fallback = true;
    }
    if (r.scale <= 0.0) return r;  // zero spread, nothing to flag

    for (std::size_t i = 0; i < xs.size(); ++i)
        if (std::fabs(xs[i] - r.median) / r.scale > z_threshold) r.flagged.push_back(i);
    return r;
}

struct Pc1Range {
    int participant = -1;
    std::size_t idea_count = 0;
    double min = 0.0;
    double max = 0.0;
    double range = 0.0;
};

struct Pc1RangeReport {
    Pc1Range self;
    std::vector<Pc1Range> neighbors;  // social neighbors, ascending id
};

inline Pc1RangeReport participant_pc1_range(const std::vector<IdeaNode>& nodes,
                                            const SocialNetwork& network, int participant) {
    if (participant < 0 || participant >= network.n)
        throw ValidationError("participant " + std::to_string(participant) + " out of range");
    auto range_of = [&](int who) {
        Pc1Range r;
        r.participant = who;
        for (const auto& n : nodes) {
            if (n.author != who) continue;
            if (r.idea_count == 0) {
                r.min = r.max = n.raw_pc1;
            } else {
                r.min = std::min(r.min, n.raw_pc1);
                r.max = std::max(r.max, n.raw_pc1);
            }
            ++r.idea_count;
        }
        r.range = r.idea_count > 0 ? r.max - r.min : 0.0;
        return r;
    };
    Pc1RangeReport report;
    report.self = range_of(participant);
    if (report.self.idea_count == 0)
        throw ValidationError("participant " + std::to_string(participant) +
                              " posted no ideas");
    for (int nb : network.neighbors(participant)) report.neighbors.push_back(range_of(nb));
    return report;
}

struct ContributionReport {
    std::vector<int> counts;            // per participant, zeros included
    std::vector<int> non_contributors;  // participants with count <= threshold
    int threshold = 0;
    int total = 0;
    double gini = 0.0;  // concentration of the count distribution
};

inline ContributionReport contribution_counts(const Session& session, int threshold = 0) {
    ContributionReport r;
    r.threshold = threshold;
    r.counts.assign(static_cast<std::size_t>(session.network.n), 0);
    for (const auto& idea : session.ideas)
        ++r.counts[static_cast<std::size_t>(idea.participant)];
    for (int p = 0; p < session.network.n; ++p) {
        r.total += r.counts[static_cast<std::size_t>(p)];
        if (r.counts[static_cast<std::size_t>(p)] <= threshold) r.non_contributors.push_back(p);
    }
    const auto n = static_cast<double>(r.counts.size());
    double mean = n > 0.0 ? static_cast<double>(r.total) / n : 0.0;
    if (mean > 0.0) {
        double abs_diff_sum = 0.0;
        for (int a : r.counts)
            for (int b : r.counts) abs_diff_sum += std::fabs(static_cast<double>(a - b));
        r.gini = abs_diff_sum / (2.0 * n * n * mean);
    }
    return r;
}

inline NetworkScene build_scene(const Session& session, const NormalizedPoints& projections,
                                LinkPolicy policy = LinkPolicy::most_recent,
                                double tau_ms = 86400000.0, double s_min = 0.2,
                                double innovator_z = 3.0) {
    NetworkScene scene;
    scene.network = session.network;
    scene.humans = layout_ring(session.network);
    scene.ideas = place_idea_nodes(session, projections);
    scene.idea_edges = link_idea_nodes(scene.ideas, session.network, policy);
    if (!scene.ideas.empty()) {
        scene.cursor = scene.ideas.back().birth;
        for (auto& n : scene.ideas)
            n.saturation = recency_saturation(static_cast<double>(scene.cursor - n.birth),
                                              tau_ms, s_min);
        if (scene.ideas.size() >= 3) {
            auto inno = detect_innovator(scene.ideas, innovator_z);
            for (auto i : inno.flagged) scene.ideas[i].innovator = true;
        }
    }
    return scene;
}

struct FrameSpec {
    int index = 0;
    Millis cursor = 0;
    std::vector<std::size_t> visible;     // idea indices with birth <= cursor
    std::vector<double> saturation;       // aligned with `visible`
};

struct AnimationResult {
    std::vector<FrameSpec> frames;
    std::string warning;  // set when a zero-duration session collapses to 1 frame
};

inline AnimationResult animate(const std::vector<IdeaNode>& nodes, int frame_count,
                               double tau_ms = 86400000.0, double s_min = 0.2) {
    if (frame_count < 1) throw ValidationError("frame count must be >= 1");
    if (nodes.empty()) throw ValidationError("cannot animate an empty scene");
    Millis first = nodes.front().birth, last = nodes.front().birth;
    for (const auto& n : nodes) {
        first = std::min(first, n.birth);
        last = std::max(last, n.birth);
    }

    AnimationResult result;
    Millis span = last - first;
    if (frame_count > 1 && span == 0) {
        result.warning = "session spans zero duration; emitting a single frame";
        frame_count = 1;
    }

    for (int f = 0; f < frame_count; ++f) {
        FrameSpec frame;
        frame.index = f;
        frame.cursor = frame_count == 1
                           ? last
                           : first + span * static_cast<Millis>(f) /
                                 static_cast<Millis>(frame_count - 1);
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (nodes[i].birth > frame.cursor) continue;
            frame.visible.push_back(i);
            frame.saturation.push_back(recency_saturation(
                static_cast<double>(frame.cursor - nodes[i].birth), tau_ms, s_min));
        }
        result.frames.push_back(std::move(frame));
    }
    return result;
}

}  // namespace ideascope
