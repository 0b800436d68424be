#pragma once
// Utility terrains over the unit square: Gaussian-kernel Nadaraya-Watson
// regression from idea positions and elevations, peak detection with
// flood-based prominence, and per-participant final-idea overlays.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "ideascope/common.hpp"
#include "ideascope/embed.hpp"
#include "ideascope/ingest.hpp"

namespace ideascope {

enum class TerrainMetric : std::uint8_t { utility = 0, idea_length = 1, custom = 2 };

inline const char* to_string(TerrainMetric m) {
    switch (m) {
        case TerrainMetric::utility: return "utility";
        case TerrainMetric::idea_length: return "idea_length";
        default: return "custom";
    }
}

// G x G grid nodes spanning [0,1]^2 inclusive; node (r, c) sits at
// (x = c/(G-1), y = r/(G-1)) and row-major index r*G + c.
struct TerrainGrid {
    int resolution = 0;
    double bandwidth = 0.0;
    TerrainMetric metric = TerrainMetric::utility;
    std::vector<double> elevation;  // row-major; unsupported cells hold base level
    std::vector<double> support;    // raw kernel mass per cell
    double base = 0.0;              // minimum input elevation
    double support_threshold = 1e-12;

    std::size_t index(int r, int c) const {
        return static_cast<std::size_t>(r) * static_cast<std::size_t>(resolution) +
               static_cast<std::size_t>(c);
    }
    bool supported(int r, int c) const { return support[index(r, c)] >= support_threshold; }
    Vec2 node(int r, int c) const {
        double denom = static_cast<double>(resolution - 1);
        return {static_cast<double>(c) / denom, static_cast<double>(r) / denom};
    }
    // Nearest grid node; exact midpoints resolve to the lower index.
    std::pair<int, int> cell_of(Vec2 p) const {
        double denom = static_cast<double>(resolution - 1);
        auto snap = [&](double v) {
            int i = static_cast<int>(std::ceil(v * denom - 0.5));
            return std::clamp(i, 0, resolution - 1);
        };
        return {snap(p.y), snap(p.x)};
    }
};

inline TerrainGrid build_terrain(const std::vector<Vec2>& points,
                                 const std::vector<double>& elevations, int resolution = 100,
                                 double bandwidth = 0.05,
                                 TerrainMetric metric = TerrainMetric::utility) {
    if (points.size() != elevations.size())
        throw ValidationError("terrain points and elevations differ in length");
    if (points.empty()) throw ValidationError("terrain needs at least one scored point");
    if (resolution < 2) throw ValidationError("terrain resolution must be >= 2");
    if (!(bandwidth > 0.0)) throw ValidationError("terrain bandwidth must be positive");
    if (!all_finite(elevations)) throw ValidationError("terrain elevations must be finite");

    TerrainGrid g;
    g.resolution = resolution;
    g.bandwidth = bandwidth;
    g.metric = metric;
    g.base = *std::min_element(elevations.begin(), elevations.end());
    g.elevation.assign(static_cast<std::size_t>(resolution) * resolution, g.base);
    g.support.assign(g.elevation.size(), 0.0);

    const double inv_h2 = 1.0 / (bandwidth * bandwidth);
    for (int r = 0; r < resolution; ++r) {
        for (int c = 0; c < resolution; ++c) {
            Vec2 cell = g.node(r, c);
            double mass = 0.0, weighted = 0.0;
            for (std::size_t i = 0; i < points.size(); ++i) {
                double dx = cell.x - points[i].x, dy = cell.y - points[i].y;
                double w = std::exp(-0.5 * (dx * dx + dy * dy) * inv_h2);
                mass += w;
                weighted += w * elevations[i];
            }
            auto idx = g.index(r, c);
            g.support[idx] = mass;
            if (mass >= g.support_threshold) g.elevation[idx] = weighted / mass;
        }
    }
    return g;
}

struct Peak {
    int row = 0;
    int col = 0;
    Vec2 position{0.0, 0.0};
    double elevation = 0.0;
    double prominence = 0.0;  // drop to the highest saddle leading to higher ground
};

// Local maxima over 8-neighborhoods of supported cells. A constant plateau
// collapses to one representative: the plateau cell with the largest kernel
// support (ties to the lowest row-major index), so a single idea's peak lands
// on the idea itself rather than an arbitrary plateau corner. Prominence via
// union-find flooding in descending elevation order; a peak that never meets
// higher ground gets elevation minus its component's minimum.
inline std::vector<Peak> find_peaks(const TerrainGrid& g, double min_prominence = 0.0) {
    const int G = g.resolution;
    const auto total = static_cast<std::size_t>(G) * static_cast<std::size_t>(G);

    auto neighbors = [&](int r, int c, auto&& fn) {
        for (int dr = -1; dr <= 1; ++dr)
            for (int dc = -1; dc <= 1; ++dc) {
                if (dr == 0 && dc == 0) continue;
                int nr = r + dr, nc = c + dc;
                if (nr < 0 || nr >= G || nc < 0 || nc >= G) continue;
                fn(nr, nc);
            }
    };

    // 1. Cells that are >= all supported 8-neighbors (unsupported neighbors
    //    never veto a maximum).
    std::vector<char> is_max(total, 0);
    for (int r = 0; r < G; ++r)
        for (int c = 0; c < G; ++c) {
            if (!g.supported(r, c)) continue;
            double z = g.elevation[g.index(r, c)];
            bool ok = true;
            neighbors(r, c, [&](int nr, int nc) {
                if (g.supported(nr, nc) && g.elevation[g.index(nr, nc)] > z) ok = false;
            });
            is_max[g.index(r, c)] = ok ? 1 : 0;
        }

    // 2. Collapse equal-elevation connected plateaus of maxima to one
    //    representative each.
    std::vector<char> seen(total, 0);
    struct Candidate {
        int row, col;
        std::size_t index;
        double elevation;
    };
    std::vector<Candidate> candidates;
    std::vector<std::size_t> stack;
    for (std::size_t start = 0; start < total; ++start) {
        if (!is_max[start] || seen[start]) continue;
        double z = g.elevation[start];
        stack.assign(1, start);
        seen[start] = 1;
        Candidate best{static_cast<int>(start) / G, static_cast<int>(start) % G, start,
                       z};
        while (!stack.empty()) {
            auto cur = stack.back();
            stack.pop_back();
            if (g.support[cur] > g.support[best.index] ||
                (g.support[cur] == g.support[best.index] && cur < best.index)) {
                best = {static_cast<int>(cur) / G, static_cast<int>(cur) % G, cur, z};
            }
            neighbors(static_cast<int>(cur) / G, static_cast<int>(cur) % G,
                      [&](int nr, int nc) {
                          auto ni = g.index(nr, nc);
                          if (seen[ni] || !is_max[ni]) return;
                          if (g.elevation[ni] != z) return;
                          seen[ni] = 1;
                          stack.push_back(ni);
                      });
        }
        candidates.push_back(best);
    }

    // 3. Flood supported cells from high to low; merging components records
    //    the saddle level for the lower component's peak.
    std::vector<std::size_t> order;
    order.reserve(total);
    for (std::size_t i = 0; i < total; ++i)
        if (g.support[i] >= g.support_threshold) order.push_back(i);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return g.elevation[a] > g.elevation[b];
    });

    std::vector<std::size_t> parent(total);
    std::vector<char> active(total, 0);
    // Component payload: its highest elevation, the candidate slot of that
    // summit (once known), and the running minimum elevation.
    std::vector<double> comp_peak(total, 0.0), comp_min(total, 0.0);
    std::vector<int> comp_slot(total, -1);
    std::vector<double> prominence(candidates.size(), -1.0);
    std::vector<int> slot_of(total, -1);
    for (std::size_t s = 0; s < candidates.size(); ++s)
        slot_of[candidates[s].index] = static_cast<int>(s);

    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };

    for (auto idx : order) {
        parent[idx] = idx;
        active[idx] = 1;
        comp_peak[idx] = g.elevation[idx];
        comp_min[idx] = g.elevation[idx];
        comp_slot[idx] = slot_of[idx];
        int r = static_cast<int>(idx) / G, c = static_cast<int>(idx) % G;
        neighbors(r, c, [&](int nr, int nc) {
            auto ni = g.index(nr, nc);
            if (!active[ni]) return;
            auto ra = find(idx), rb = find(ni);
            if (ra == rb) return;
            // The saddle between the two components is the current level.
            double level = g.elevation[idx];
            std::size_t win = ra, lose = rb;
            bool swap_sides;
            if (comp_peak[rb] != comp_peak[ra]) {
                swap_sides = comp_peak[rb] > comp_peak[ra];
            } else {
                int sa = comp_slot[ra], sb = comp_slot[rb];
                if (sa < 0 || sb < 0) {
                    swap_sides = sa < 0 && sb >= 0;  // side with a summit survives
                } else {
                    swap_sides = candidates[static_cast<std::size_t>(sb)].index <
                                 candidates[static_cast<std::size_t>(sa)].index;
                }
            }
            if (swap_sides) {
                win = rb;
                lose = ra;
            }
            int slot = comp_slot[lose];
            if (slot >= 0) {
                if (comp_peak[lose] < comp_peak[win] || comp_slot[win] >= 0) {
                    // A strictly lower peak, or the younger of equal twins,
                    // ends here: drop from summit to the saddle.
                    if (prominence[static_cast<std::size_t>(slot)] < 0.0)
                        prominence[static_cast<std::size_t>(slot)] = comp_peak[lose] - level;
                } else {
                    // Same summit reached from another side; carry its slot.
                    comp_slot[win] = slot;
                }
            }
            parent[lose] = win;
            comp_min[win] = std::min(comp_min[win], comp_min[lose]);
            comp_peak[win] = std::max(comp_peak[win], comp_peak[lose]);
        });
    }

    // Peaks that never met higher ground: prominence above their component's
    // lowest point.
    std::vector<Peak> peaks;
    for (std::size_t s = 0; s < candidates.size(); ++s) {
        const auto& cand = candidates[s];
        double prom = prominence[s];
        if (prom < 0.0) {
            auto root = find(cand.index);
            prom = cand.elevation - comp_min[root];
        }
        if (prom < min_prominence) continue;
        Peak p;
        p.row = cand.row;
        p.col = cand.col;
        p.position = g.node(cand.row, cand.col);
        p.elevation = cand.elevation;
        p.prominence = prom;
        peaks.push_back(p);
    }
    std::stable_sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
        if (a.elevation != b.elevation) return a.elevation > b.elevation;
        return a.row * 1000000 + a.col < b.row * 1000000 + b.col;
    });
    return peaks;
}

// --- elevation sources ---------------------------------------------------

struct ScoredElevations {
    std::vector<std::size_t> indices;  // scored ideas, positions in the input list
    std::vector<double> values;        // mean score per scored idea
    std::vector<std::string> unscored; // excluded idea ids, input order
};

// Mean of each idea's scores: the record's own score plus any extra score
// records keyed by idea id (repeated ids = repeated expert scores).
inline ScoredElevations elevation_from_scores(
    const std::vector<IdeaRecord>& ideas,
    const std::multimap<std::string, double>& extra_scores = {}) {
    ScoredElevations out;
    for (std::size_t i = 0; i < ideas.size(); ++i) {
        double sum = 0.0;
        int n = 0;
        if (ideas[i].score) {
            sum += *ideas[i].score;
            n = 1;
        }
        auto [lo, hi] = extra_scores.equal_range(ideas[i].id);
        for (auto it = lo; it != hi; ++it) {
            if (!std::isfinite(it->second) || it->second < 0.0)
                throw ValidationError("invalid extra score for idea " + ideas[i].id);
            sum += it->second;
            ++n;
        }
        if (n == 0) {
            out.unscored.push_back(ideas[i].id);
        } else {
            out.indices.push_back(i);
            out.values.push_back(sum / n);
        }
    }
    if (out.indices.empty()) throw ValidationError("no scored ideas; cannot build a terrain");
    return out;
}

// Stage count of the transition chain: arrow tokens + 1. `token_count` mode
// uses the raw token count instead.
inline std::vector<double> elevation_from_length(const std::vector<IdeaRecord>& ideas,
                                                 bool token_count = false) {
    std::vector<double> out;
    out.reserve(ideas.size());
    for (const auto& idea : ideas) {
        auto toks = tokenize(idea.text);
        if (token_count) {
            out.push_back(static_cast<double>(toks.size()));
        } else {
            auto arrows = std::count(toks.begin(), toks.end(), kArrowToken);
            out.push_back(static_cast<double>(arrows) + 1.0);
        }
    }
    return out;
}

// --- participant overlay ---------------------------------------------------

struct OverlayMarker {
    std::string idea_id;
    Vec2 position{0.0, 0.0};  // the idea's projected coordinates, pass-through
    double score = 0.0;       // the idea's own score, never the terrain value
};

struct ParticipantOverlay {
    int participant = -1;
    std::vector<OverlayMarker> markers;
    double score_mean = 0.0;
    double score_min = 0.0;
};

inline ParticipantOverlay participant_overlay(const Session& session, int participant,
                                              const std::vector<Vec2>& projections) {
    if (projections.size() != session.ideas.size())
        throw ValidationError("projection count does not match idea count");
    if (participant < 0 || participant >= session.network.n)
        throw ValidationError("participant " + std::to_string(participant) + " out of range");
    ParticipantOverlay o;
    o.participant = participant;
    bool any_final = false;
    for (std::size_t i = 0; i < session.ideas.size(); ++i) {
        const auto& idea = session.ideas[i];
        if (idea.participant != participant || idea.kind != IdeaKind::final) continue;
        any_final = true;
        if (!idea.score) continue;
        o.markers.push_back({idea.id, projections[i], *idea.score});
    }
    if (!any_final)
        throw ValidationError("participant " + std::to_string(participant) +
                              " has no final ideas");
    if (o.markers.empty())
        throw ValidationError("participant " + std::to_string(participant) +
                              " has no scored final ideas");
    double sum = 0.0;
    o.score_min = o.markers.front().score;
    for (const auto& m : o.markers) {
        sum += m.score;
        o.score_min = std::min(o.score_min, m.score);
    }
    o.score_mean = sum / static_cast<double>(o.markers.size());
    return o;
}

// Spearman rank correlation with average ranks for ties. Emitted so users can
// judge the length-vs-score relationship themselves; never asserted.
inline double spearman_rank_correlation(const std::vector<double>& a,
                                        const std::vector<double>& b) {
    if (a.size() != b.size()) throw ValidationError("rank correlation needs equal lengths");
    const auto n = a.size();
    if (n < 2) return 0.0;

    auto ranks = [](const std::vector<double>& xs) {
        std::vector<std::size_t> order(xs.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t i, std::size_t j) { return xs[i] < xs[j]; });
        std::vector<double> r(xs.size());
        std::size_t i = 0;
        while (i < order.size()) {
            std::size_t j = i;
            while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
            double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
            for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
            i = j + 1;
        }
        return r;
    };

    auto ra = ranks(a), rb = ranks(b);
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += ra[i];
        mb += rb[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double da = ra[i] - ma, db = rb[i] - mb;
        cov += da * db;
        va += da * da;
        vb += db * db;
    }
    if (va <= 0.0 || vb <= 0.0) return 0.0;
    return cov / std::sqrt(va * vb);
}

// --- exports ---------------------------------------------------------------

// ESRI-style ASCII grid; rows run north (y = 1) to south (y = 0).
inline std::string terrain_to_asc(const TerrainGrid& g, double nodata = -9999.0) {
    std::string s;
    s += "ncols " + std::to_string(g.resolution) + "\n";
    s += "nrows " + std::to_string(g.resolution) + "\n";
    s += "xllcorner 0\n";
    s += "yllcorner 0\n";
    s += "cellsize " + format_full(1.0 / (g.resolution - 1)) + "\n";
    s += "NODATA_value " + format_fixed(nodata, 0) + "\n";
    for (int r = g.resolution - 1; r >= 0; --r) {
        for (int c = 0; c < g.resolution; ++c) {
            if (c > 0) s += ' ';
            s += g.supported(r, c) ? format_fixed(g.elevation[g.index(r, c)], 6)
                                   : format_fixed(nodata, 0);
        }
        s += '\n';
    }
    return s;
}

}  // namespace ideascope
