#pragma once
// Idea Cloud analytics over normalized [0,1]^2 coordinates: k-means with
// elbow selection, mean pairwise diversity, per-participant trajectories,
// novelty against prior days, and per-day dispersion slices.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "ideascope/common.hpp"
#include "ideascope/ingest.hpp"
#include "ideascope/rng.hpp"

namespace ideascope {

struct ClusterAssignment {
    int k = 0;
    std::vector<int> labels;     // per-point cluster index in [0, k)
    std::vector<Vec2> centroids;
    double inertia = 0.0;        // sum of squared distances to assigned centroid
};

namespace detail {

inline double sq_dist(Vec2 a, Vec2 b) {
    double dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
}

// Ties break toward the lower centroid index.
inline int nearest_centroid(Vec2 p, const std::vector<Vec2>& centroids) {
    int best = 0;
    double best_d = sq_dist(p, centroids[0]);
    for (std::size_t c = 1; c < centroids.size(); ++c) {
        double d = sq_dist(p, centroids[c]);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(c);
        }
    }
    return best;
}

inline std::vector<Vec2> kmeanspp_init(const std::vector<Vec2>& pts, int k, Rng& rng) {
    std::vector<Vec2> centroids;
    centroids.push_back(pts[rng.below(pts.size())]);
    std::vector<double> d2(pts.size());
    while (static_cast<int>(centroids.size()) < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            double best = sq_dist(pts[i], centroids[0]);
            for (std::size_t c = 1; c < centroids.size(); ++c)
                best = std::min(best, sq_dist(pts[i], centroids[c]));
            d2[i] = best;
            total += best;
        }
        if (total <= 0.0) {
            // All remaining mass at existing centroids; duplicate any point.
            centroids.push_back(pts[rng.below(pts.size())]);
            continue;
        }
        double u = rng.uniform() * total;
        std::size_t pick = 0;
        double acc = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            acc += d2[i];
            if (u <= acc) {
                pick = i;
                break;
            }
            pick = i;
        }
        centroids.push_back(pts[pick]);
    }
    return centroids;
}

}  // namespace detail

inline ClusterAssignment kmeans(const std::vector<Vec2>& pts, int k, std::uint64_t seed,
                                int max_iter = 100) {
    const auto n = pts.size();
    if (k < 1) throw ValidationError("k must be >= 1");
    if (static_cast<std::size_t>(k) > n)
        throw ValidationError("k = " + std::to_string(k) + " exceeds point count " +
                              std::to_string(n));
    if (max_iter < 1) throw ValidationError("max_iter must be >= 1");

    Rng rng(seed);
    ClusterAssignment a;
    a.k = k;
    a.centroids = detail::kmeanspp_init(pts, k, rng);
    a.labels.assign(n, -1);

    double prev_inertia = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < max_iter; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            int c = detail::nearest_centroid(pts[i], a.centroids);
            if (c != a.labels[i]) {
                a.labels[i] = c;
                changed = true;
            }
        }

        // Empty-cluster repair: reseed at the point farthest from its centroid.
        std::vector<int> counts(static_cast<std::size_t>(k), 0);
        for (int l : a.labels) ++counts[static_cast<std::size_t>(l)];
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) continue;
            std::size_t far = 0;
            double far_d = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (counts[static_cast<std::size_t>(a.labels[i])] <= 1) continue;
                double d = detail::sq_dist(pts[i], a.centroids[static_cast<std::size_t>(a.labels[i])]);
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            if (far_d < 0.0) continue;  // every cluster is a singleton already
            --counts[static_cast<std::size_t>(a.labels[far])];
            a.labels[far] = c;
            ++counts[static_cast<std::size_t>(c)];
            a.centroids[static_cast<std::size_t>(c)] = pts[far];
            changed = true;
        }

        std::vector<Vec2> sums(static_cast<std::size_t>(k));
        for (std::size_t i = 0; i < n; ++i) {
            sums[static_cast<std::size_t>(a.labels[i])] =
                sums[static_cast<std::size_t>(a.labels[i])] + pts[i];
        }
        for (int c = 0; c < k; ++c)
            if (counts[static_cast<std::size_t>(c)] > 0)
                a.centroids[static_cast<std::size_t>(c)] =
                    (1.0 / counts[static_cast<std::size_t>(c)]) * sums[static_cast<std::size_t>(c)];

        double inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            inertia += detail::sq_dist(pts[i], a.centroids[static_cast<std::size_t>(a.labels[i])]);
        if (inertia > prev_inertia + 1e-9)
            throw NumericError("k-means inertia increased across an iteration");
        a.inertia = inertia;
        prev_inertia = inertia;
        if (!changed) break;
    }
    return a;
}

struct ElbowResult {
    int k_best = 1;
    std::vector<double> inertia_curve;  // index 0 -> k=1
    bool degenerate = false;
    std::string warning;
};

// Inertia(k) for k = 1..k_max (best of `restarts` seeded runs each); the knee
// is the k in (1, k_max) farthest from the chord joining the curve's
// endpoints after min-max normalizing both axes. Ties pick the smaller k.
inline ElbowResult select_k_elbow(const std::vector<Vec2>& pts, int k_max, std::uint64_t seed,
                                  int restarts = 5) {
    if (k_max < 2) throw ValidationError("k_max must be >= 2");
    if (static_cast<std::size_t>(k_max) > pts.size())
        throw ValidationError("k_max exceeds point count");
    ElbowResult r;
    for (int k = 1; k <= k_max; ++k) {
        double best = std::numeric_limits<double>::infinity();
        for (int s = 0; s < restarts; ++s) {
            auto a = kmeans(pts, k, seed + static_cast<std::uint64_t>(s));
            best = std::min(best, a.inertia);
        }
        r.inertia_curve.push_back(best);
    }

    double i_first = r.inertia_curve.front(), i_last = r.inertia_curve.back();
    if (std::fabs(i_first - i_last) < 1e-15) {
        r.degenerate = true;
        r.k_best = 1;
        r.warning = "inertia curve is flat; no elbow — defaulting to k=1";
        return r;
    }

    // Normalize k to [0,1] and inertia to [0,1]; the chord then joins (0,1)
    // to (1,0) and the distance to it is |x + y - 1| / sqrt(2).
    double best_dist = -1.0;
    for (int k = 2; k < k_max; ++k) {
        double x = static_cast<double>(k - 1) / static_cast<double>(k_max - 1);
        double y = (r.inertia_curve[static_cast<std::size_t>(k - 1)] - i_last) / (i_first - i_last);
        double dist = std::fabs(x + y - 1.0) / std::sqrt(2.0);
        if (dist > best_dist + 1e-12) {
            best_dist = dist;
            r.k_best = k;
        }
    }
    if (r.k_best == 1) r.k_best = 2;  // k_max == 2: no interior point, take the only candidate
    return r;
}

struct DiversityReport {
    double avg_dis = 0.0;  // mean pairwise Euclidean distance
    std::size_t count = 0;
};

inline DiversityReport avg_pairwise_distance(const std::vector<Vec2>& pts) {
    DiversityReport r;
    r.count = pts.size();
    if (pts.size() < 2) return r;
    double sum = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) sum += distance(pts[i], pts[j]);
    r.avg_dis = sum / (static_cast<double>(pts.size()) * (static_cast<double>(pts.size()) - 1.0) / 2.0);
    return r;
}

struct Trajectory {
    int participant = -1;
    std::vector<std::string> idea_ids;  // timestamp order
    std::vector<Vec2> waypoints;
    double total_distance = 0.0;
};

// `projections[i]` is the 2D position of `session.ideas[i]`.
inline Trajectory trajectory(const Session& session, int participant,
                             const std::vector<Vec2>& projections) {
    if (projections.size() != session.ideas.size())
        throw ValidationError("projection count does not match idea count");
    if (participant < 0 || participant >= session.network.n)
        throw ValidationError("participant " + std::to_string(participant) + " out of range");
    Trajectory t;
    t.participant = participant;
    for (std::size_t i = 0; i < session.ideas.size(); ++i) {
        if (session.ideas[i].participant != participant) continue;
        t.idea_ids.push_back(session.ideas[i].id);
        t.waypoints.push_back(projections[i]);
    }
    for (std::size_t i = 1; i < t.waypoints.size(); ++i)
        t.total_distance += distance(t.waypoints[i - 1], t.waypoints[i]);
    return t;
}

struct NoveltyFlag {
    double nn_distance = 0.0;  // distance to the closest prior point
    bool novel = false;
};

struct NoveltyReport {
    std::vector<NoveltyFlag> flags;  // one per day point, input order
    double threshold = 0.0;          // quantile of prior leave-one-out NN distances
};

namespace detail {

// Nearest-rank quantile: the ceil(q*N)-th smallest value. Monotone in q.
inline double quantile_nearest_rank(std::vector<double> xs, double q) {
    std::sort(xs.begin(), xs.end());
    auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(xs.size())));
    if (rank < 1) rank = 1;
    if (rank > xs.size()) rank = xs.size();
    return xs[rank - 1];
}

}  // namespace detail

inline NoveltyReport detect_novel(const std::vector<Vec2>& day_points,
                                  const std::vector<Vec2>& prior_points,
                                  double threshold_quantile = 0.95) {
    if (prior_points.empty())
        throw ValidationError("novelty detection needs a non-empty prior day");
    if (threshold_quantile <= 0.0 || threshold_quantile > 1.0)
        throw ValidationError("novelty quantile must be in (0, 1]");

    // Reference distribution: each prior point's leave-one-out NN distance.
    // A single prior point has no neighbor; its threshold is 0.
    NoveltyReport r;
    if (prior_points.size() >= 2) {
        std::vector<double> loo;
        loo.reserve(prior_points.size());
        for (std::size_t i = 0; i < prior_points.size(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < prior_points.size(); ++j) {
                if (j == i) continue;
                best = std::min(best, distance(prior_points[i], prior_points[j]));
            }
            loo.push_back(best);
        }
        r.threshold = detail::quantile_nearest_rank(std::move(loo), threshold_quantile);
    }

    r.flags.reserve(day_points.size());
    for (const auto& p : day_points) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& q : prior_points) best = std::min(best, distance(p, q));
        r.flags.push_back({best, best > r.threshold});
    }
    return r;
}

struct DailySlice {
    int day = 0;
    std::vector<std::size_t> members;  // indices into session.ideas
    Vec2 centroid{0.0, 0.0};
    double dispersion = 0.0;           // mean distance of members to centroid
};

inline std::vector<DailySlice> daily_slices(const Session& session,
                                            const std::vector<Vec2>& projections) {
    if (projections.size() != session.ideas.size())
        throw ValidationError("projection count does not match idea count");
    std::vector<DailySlice> slices(session.day_count());
    for (std::size_t d = 0; d < slices.size(); ++d) slices[d].day = static_cast<int>(d);
    for (std::size_t i = 0; i < session.ideas.size(); ++i) {
        auto d = static_cast<std::size_t>(session.day_index(session.ideas[i].timestamp));
        slices[d].members.push_back(i);
    }
    for (auto& s : slices) {
        if (s.members.empty()) continue;
        Vec2 c{0.0, 0.0};
        for (auto i : s.members) c = c + projections[i];
        s.centroid = (1.0 / static_cast<double>(s.members.size())) * c;
        double sum = 0.0;
        for (auto i : s.members) sum += distance(projections[i], s.centroid);
        s.dispersion = sum / static_cast<double>(s.members.size());
    }
    return slices;
}

}  // namespace ideascope
