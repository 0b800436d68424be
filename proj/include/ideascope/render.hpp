#pragma once
// Deterministic SVG emission for the three views: scatter clouds, terrain
// contours (marching squares), and the orthographically projected 3D network.
// Every render is a pure function of (data, options, camera); all numeric
// attributes are emitted at fixed precision so identical inputs yield
// byte-identical documents.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ideascope/analytics.hpp"
#include "ideascope/common.hpp"
#include "ideascope/geography.hpp"
#include "ideascope/io.hpp"
#include "ideascope/network.hpp"
#include "ideascope/timeutil.hpp"

namespace ideascope {

struct CanvasSpec {
    int width = 720;
    int height = 720;
    int margin = 40;
    // Colorblind-safe categorical palette (cycled when k exceeds its length).
    std::vector<std::string> palette = {"#0072b2", "#e69f00", "#009e73", "#cc79a7",
                                        "#56b4e9", "#d55e00", "#f0e442", "#999999"};
    std::string highlight = "#d62728";   // novelty / innovator marks
    std::string neutral = "#4878a8";     // unclustered idea dots
    std::string human_color = "#333333";
    std::string x_label = "PC1";
    std::string y_label = "PC2";
};

struct Camera {
    double azimuth = 0.6;    // radians about the z axis
    double elevation = 0.5;  // radians above the xy plane, in (-pi/2, pi/2)
    double scale = 220.0;    // orthographic pixels per world unit
};

namespace detail {

inline std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

inline std::string num(double v) { return format_fixed(v, 2); }

inline std::string svg_open(const CanvasSpec& canvas) {
    std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(canvas.width) +
         "\" height=\"" + std::to_string(canvas.height) + "\" viewBox=\"0 0 " +
         std::to_string(canvas.width) + " " + std::to_string(canvas.height) + "\">\n";
    return s;
}

// Linear interpolation between two #rrggbb colors.
inline std::string lerp_color(const std::string& a, const std::string& b, double t) {
    auto channel = [&](int off) {
        int ca = std::stoi(a.substr(static_cast<std::size_t>(off), 2), nullptr, 16);
        int cb = std::stoi(b.substr(static_cast<std::size_t>(off), 2), nullptr, 16);
        int v = static_cast<int>(std::lround(ca + (cb - ca) * t));
        return std::clamp(v, 0, 255);
    };
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", channel(1), channel(3), channel(5));
    return buf;
}

}  // namespace detail

// --- Idea Cloud --------------------------------------------------------

struct CloudOptions {
    const ClusterAssignment* clusters = nullptr;  // coloring by cluster label
    const std::vector<std::string>* labels = nullptr;
    std::optional<Trajectory> trajectory;         // one participant's path
    const NoveltyReport* novelty = nullptr;       // aligned flags; novel = highlight
    const std::vector<std::size_t>* novelty_indices = nullptr;  // point index per flag
    const DiversityReport* diversity = nullptr;   // prints Avg_dis
    const std::vector<DailySlice>* panels = nullptr;  // per-day tiling
    double point_radius = 4.0;
};

// Points are unit-square coordinates; y grows upward and is flipped for SVG.
inline std::string render_cloud_svg(const std::vector<Vec2>& points, const CanvasSpec& canvas,
                                    const CloudOptions& options = {}) {
    if (options.trajectory && options.trajectory->participant < 0)
        throw ValidationError("trajectory rendering requires a participant");
    if (options.labels && options.labels->size() != points.size())
        throw ValidationError("label count does not match point count");
    if (options.clusters && options.clusters->labels.size() != points.size())
        throw ValidationError("cluster assignment does not match point count");

    // Panel layout: day panels tile left to right, otherwise one panel.
    const std::size_t panel_count = options.panels ? options.panels->size() : 1;
    const double inner_w =
        (static_cast<double>(canvas.width) - 2.0 * canvas.margin) / static_cast<double>(panel_count);
    const double inner_h = static_cast<double>(canvas.height) - 2.0 * canvas.margin;
    auto place = [&](Vec2 p, std::size_t panel) {
        double px = canvas.margin + static_cast<double>(panel) * inner_w +
                    p.x * (inner_w - (panel_count > 1 ? 8.0 : 0.0));
        double py = canvas.margin + (1.0 - p.y) * inner_h;
        return Vec2{px, py};
    };

    std::vector<char> novel(points.size(), 0);
    if (options.novelty) {
        const auto& flags = options.novelty->flags;
        if (options.novelty_indices) {
            if (options.novelty_indices->size() != flags.size())
                throw ValidationError("novelty flags and indices differ in length");
            for (std::size_t f = 0; f < flags.size(); ++f)
                if (flags[f].novel) novel.at((*options.novelty_indices)[f]) = 1;
        } else {
            if (flags.size() != points.size())
                throw ValidationError("novelty flags do not match point count");
            for (std::size_t f = 0; f < flags.size(); ++f)
                if (flags[f].novel) novel[f] = 1;
        }
    }
    std::vector<std::size_t> panel_of(points.size(), 0);
    if (options.panels)
        for (std::size_t d = 0; d < options.panels->size(); ++d)
            for (auto idx : (*options.panels)[d].members) panel_of.at(idx) = d;

    std::string s = detail::svg_open(canvas);
    s += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(canvas.width) + "\" height=\"" +
         std::to_string(canvas.height) + "\" fill=\"#ffffff\"/>\n";

    // Panel frames and day captions.
    if (options.panels) {
        for (std::size_t d = 0; d < panel_count; ++d) {
            double x0 = canvas.margin + static_cast<double>(d) * inner_w;
            s += "<rect class=\"panel\" x=\"" + detail::num(x0) + "\" y=\"" +
                 detail::num(canvas.margin) + "\" width=\"" + detail::num(inner_w - 8.0) +
                 "\" height=\"" + detail::num(inner_h) +
                 "\" fill=\"none\" stroke=\"#cccccc\"/>\n";
            s += "<text class=\"panel-label\" x=\"" + detail::num(x0 + 4.0) + "\" y=\"" +
                 detail::num(canvas.margin - 8.0) + "\" font-size=\"12\">day " +
                 std::to_string((*options.panels)[d].day + 1) + "</text>\n";
        }
    }

    if (options.trajectory && options.trajectory->waypoints.size() >= 2) {
        s += "<polyline class=\"trajectory\" fill=\"none\" stroke=\"" + canvas.highlight +
             "\" stroke-width=\"1.5\" points=\"";
        bool first = true;
        for (const auto& w : options.trajectory->waypoints) {
            auto p = place(w, 0);
            if (!first) s += ' ';
            s += detail::num(p.x) + "," + detail::num(p.y);
            first = false;
        }
        s += "\"/>\n";
    }

    for (std::size_t i = 0; i < points.size(); ++i) {
        auto p = place(points[i], panel_of[i]);
        std::string fill = canvas.neutral;
        if (options.clusters) {
            auto label = static_cast<std::size_t>(options.clusters->labels[i]);
            fill = canvas.palette[label % canvas.palette.size()];
        }
        if (novel[i]) fill = canvas.highlight;
        s += "<circle class=\"idea\" cx=\"" + detail::num(p.x) + "\" cy=\"" + detail::num(p.y) +
             "\" r=\"" + detail::num(options.point_radius) + "\" fill=\"" + fill + "\"/>\n";
        if (options.labels) {
            s += "<text class=\"idea-label\" x=\"" + detail::num(p.x + 5.0) + "\" y=\"" +
                 detail::num(p.y - 5.0) + "\" font-size=\"10\">" +
                 detail::xml_escape((*options.labels)[i]) + "</text>\n";
        }
    }

    double caption_y = canvas.height - 12.0;
    if (options.trajectory) {
        s += "<text class=\"total-label\" x=\"" + detail::num(canvas.margin) + "\" y=\"" +
             detail::num(caption_y) + "\" font-size=\"13\">total = " +
             format_fixed(options.trajectory->total_distance, 2) + "</text>\n";
        caption_y -= 16.0;
    }
    if (options.diversity) {
        s += "<text class=\"avgdis-label\" x=\"" + detail::num(canvas.margin) + "\" y=\"" +
             detail::num(caption_y) + "\" font-size=\"13\">Avg_dis = " +
             format_fixed(options.diversity->avg_dis, 4) + "</text>\n";
    }
    s += "<text class=\"axis-label\" x=\"" + detail::num(canvas.width / 2.0) + "\" y=\"" +
         detail::num(canvas.height - 2.0) + "\" font-size=\"11\" text-anchor=\"middle\">" +
         detail::xml_escape(canvas.x_label) + "</text>\n";
    s += "<text class=\"axis-label\" x=\"12\" y=\"" + detail::num(canvas.height / 2.0) +
         "\" font-size=\"11\" text-anchor=\"middle\" transform=\"rotate(-90 12 " +
         detail::num(canvas.height / 2.0) + ")\">" + detail::xml_escape(canvas.y_label) +
         "</text>\n";
    s += "</svg>\n";
    return s;
}

// --- marching squares ----------------------------------------------------

// Iso-lines of a scalar field sampled on the terrain's node lattice. Edge
// crossings are computed once per lattice edge so shared endpoints match
// exactly and segments chain into polylines / closed loops.
struct ContourLine {
    std::vector<Vec2> points;
    bool closed = false;
};

namespace detail {

struct EdgeCrossings {
    // Crossing parameter per horizontal/vertical lattice edge; <0 = none.
    std::vector<double> horiz, vert;
    int G = 0;

    std::size_t hidx(int r, int c) const {
        return static_cast<std::size_t>(r) * static_cast<std::size_t>(G - 1) +
               static_cast<std::size_t>(c);
    }
    std::size_t vidx(int r, int c) const {
        return static_cast<std::size_t>(r) * static_cast<std::size_t>(G) +
               static_cast<std::size_t>(c);
    }
};

}  // namespace detail

inline std::vector<ContourLine> contour_lines(const std::vector<double>& values, int G,
                                              double level) {
    auto at = [&](int r, int c) {
        return values[static_cast<std::size_t>(r) * static_cast<std::size_t>(G) +
                      static_cast<std::size_t>(c)];
    };
    auto node = [&](int r, int c) {
        double d = static_cast<double>(G - 1);
        return Vec2{static_cast<double>(c) / d, static_cast<double>(r) / d};
    };

    // Unique edge ids: horizontal edges first, then vertical.
    detail::EdgeCrossings ec;
    ec.G = G;
    ec.horiz.assign(static_cast<std::size_t>(G) * (G - 1), -1.0);
    ec.vert.assign(static_cast<std::size_t>(G - 1) * G, -1.0);
    auto above = [&](int r, int c) { return at(r, c) >= level; };
    auto cross_t = [&](double va, double vb) { return (level - va) / (vb - va); };

    for (int r = 0; r < G; ++r)
        for (int c = 0; c + 1 < G; ++c)
            if (above(r, c) != above(r, c + 1))
                ec.horiz[ec.hidx(r, c)] = cross_t(at(r, c), at(r, c + 1));
    for (int r = 0; r + 1 < G; ++r)
        for (int c = 0; c < G; ++c)
            if (above(r, c) != above(r + 1, c))
                ec.vert[ec.vidx(r, c)] = cross_t(at(r, c), at(r + 1, c));

    const std::size_t horiz_count = ec.horiz.size();
    auto edge_point = [&](std::size_t id) {
        if (id < horiz_count) {
            int r = static_cast<int>(id) / (G - 1), c = static_cast<int>(id) % (G - 1);
            double t = ec.horiz[id];
            Vec2 a = node(r, c), b = node(r, c + 1);
            return Vec2{a.x + t * (b.x - a.x), a.y};
        }
        std::size_t vid = id - horiz_count;
        int r = static_cast<int>(vid) / G, c = static_cast<int>(vid) % G;
        double t = ec.vert[vid];
        Vec2 a = node(r, c), b = node(r + 1, c);
        return Vec2{a.x, a.y + t * (b.y - a.y)};
    };

    // Segments per cell, as pairs of edge ids. Saddles disambiguated by the
    // cell-center average.
    std::vector<std::pair<std::size_t, std::size_t>> segments;
    for (int r = 0; r + 1 < G; ++r) {
        for (int c = 0; c + 1 < G; ++c) {
            int code = (above(r, c) ? 1 : 0) | (above(r, c + 1) ? 2 : 0) |
                       (above(r + 1, c + 1) ? 4 : 0) | (above(r + 1, c) ? 8 : 0);
            if (code == 0 || code == 15) continue;
            std::size_t bottom = ec.hidx(r, c);                     // (r,c)-(r,c+1)
            std::size_t top = ec.hidx(r + 1, c);                    // (r+1,c)-(r+1,c+1)
            std::size_t left = horiz_count + ec.vidx(r, c);         // (r,c)-(r+1,c)
            std::size_t right = horiz_count + ec.vidx(r, c + 1);    // (r,c+1)-(r+1,c+1)
            switch (code) {
                case 1: case 14: segments.emplace_back(bottom, left); break;
                case 2: case 13: segments.emplace_back(bottom, right); break;
                case 3: case 12: segments.emplace_back(left, right); break;
                case 4: case 11: segments.emplace_back(top, right); break;
                case 6: case 9: segments.emplace_back(bottom, top); break;
                case 7: case 8: segments.emplace_back(top, left); break;
                case 5: case 10: {
                    double center = 0.25 * (at(r, c) + at(r, c + 1) + at(r + 1, c) +
                                            at(r + 1, c + 1));
                    bool center_above = center >= level;
                    bool corners_above = code == 5;  // bl and tr above
                    if (center_above == corners_above) {
                        segments.emplace_back(bottom, right);
                        segments.emplace_back(top, left);
                    } else {
                        segments.emplace_back(bottom, left);
                        segments.emplace_back(top, right);
                    }
                    break;
                }
                default: break;
            }
        }
    }

    // Chain segments into polylines by shared edge ids.
    std::map<std::size_t, std::vector<std::size_t>> adjacency;  // edge id -> segment indices
    for (std::size_t s = 0; s < segments.size(); ++s) {
        adjacency[segments[s].first].push_back(s);
        adjacency[segments[s].second].push_back(s);
    }
    std::vector<char> used(segments.size(), 0);
    std::vector<ContourLine> lines;

    auto walk = [&](std::size_t start_edge) {
        std::vector<std::size_t> chain{start_edge};
        std::size_t cur = start_edge;
        while (true) {
            std::size_t next_seg = segments.size();
            for (auto s : adjacency[cur])
                if (!used[s]) {
                    next_seg = s;
                    break;
                }
            if (next_seg == segments.size()) break;
            used[next_seg] = 1;
            cur = segments[next_seg].first == cur ? segments[next_seg].second
                                                  : segments[next_seg].first;
            chain.push_back(cur);
            if (cur == start_edge) break;
        }
        return chain;
    };

    // Open polylines first (endpoints of odd degree), then remaining loops.
    for (const auto& [edge, segs] : adjacency) {
        std::size_t unused = 0;
        for (auto s : segs)
            if (!used[s]) ++unused;
        if (unused != 1) continue;
        auto chain = walk(edge);
        if (chain.size() < 2) continue;
        ContourLine line;
        for (auto id : chain) line.points.push_back(edge_point(id));
        lines.push_back(std::move(line));
    }
    for (std::size_t s = 0; s < segments.size(); ++s) {
        if (used[s]) continue;
        used[s] = 1;
        auto chain = walk(segments[s].second);
        chain.insert(chain.begin(), segments[s].first);
        ContourLine line;
        line.closed = chain.size() >= 2 && chain.front() == chain.back();
        for (auto id : chain) line.points.push_back(edge_point(id));
        lines.push_back(std::move(line));
    }
    return lines;
}

// Filled iso-band polygons for elevation in [lo, hi]: each lattice cell is
// split into four triangles around its center and clipped in scalar space, so
// consecutive bands tile the square exactly.
inline std::vector<std::vector<Vec2>> band_polygons(const std::vector<double>& values, int G,
                                                    double lo, double hi) {
    auto at = [&](int r, int c) {
        return values[static_cast<std::size_t>(r) * static_cast<std::size_t>(G) +
                      static_cast<std::size_t>(c)];
    };
    auto node = [&](int r, int c) {
        double d = static_cast<double>(G - 1);
        return Vec2{static_cast<double>(c) / d, static_cast<double>(r) / d};
    };

    struct PV {
        Vec2 p;
        double v;
    };
    auto clip = [](std::vector<PV> poly, double bound, bool keep_ge) {
        std::vector<PV> out;
        const auto n = poly.size();
        for (std::size_t i = 0; i < n; ++i) {
            const PV& a = poly[i];
            const PV& b = poly[(i + 1) % n];
            bool ina = keep_ge ? a.v >= bound : a.v <= bound;
            bool inb = keep_ge ? b.v >= bound : b.v <= bound;
            if (ina) out.push_back(a);
            if (ina != inb) {
                double t = (bound - a.v) / (b.v - a.v);
                out.push_back({{a.p.x + t * (b.p.x - a.p.x), a.p.y + t * (b.p.y - a.p.y)},
                               bound});
            }
        }
        return out;
    };

    std::vector<std::vector<Vec2>> polys;
    for (int r = 0; r + 1 < G; ++r) {
        for (int c = 0; c + 1 < G; ++c) {
            PV bl{node(r, c), at(r, c)}, br{node(r, c + 1), at(r, c + 1)};
            PV tr{node(r + 1, c + 1), at(r + 1, c + 1)}, tl{node(r + 1, c), at(r + 1, c)};
            PV center{{0.5 * (bl.p.x + tr.p.x), 0.5 * (bl.p.y + tr.p.y)},
                      0.25 * (bl.v + br.v + tr.v + tl.v)};
            const PV tris[4][3] = {
                {bl, br, center}, {br, tr, center}, {tr, tl, center}, {tl, bl, center}};
            for (const auto& tri : tris) {
                std::vector<PV> poly(tri, tri + 3);
                poly = clip(std::move(poly), lo, /*keep_ge=*/true);
                if (poly.empty()) continue;
                poly = clip(std::move(poly), hi, /*keep_ge=*/false);
                if (poly.size() < 3) continue;
                std::vector<Vec2> shape;
                shape.reserve(poly.size());
                for (const auto& pv : poly) shape.push_back(pv.p);
                polys.push_back(std::move(shape));
            }
        }
    }
    return polys;
}

// --- Idea Geography -------------------------------------------------------

struct TerrainRenderOptions {
    int band_levels = 10;
    bool peak_labels = true;
    double min_prominence = 0.0;
    const std::vector<ParticipantOverlay>* overlays = nullptr;
    std::string low_color = "#f3efe4";   // base / lowest band
    std::string high_color = "#6b4f2a";  // highest band
    std::string contour_color = "#8a7a5c";
};

inline std::string render_terrain_svg(const TerrainGrid& grid, const CanvasSpec& canvas,
                                      const TerrainRenderOptions& options = {}) {
    if (options.band_levels < 1) throw ValidationError("band level count must be >= 1");
    const double inner_w = static_cast<double>(canvas.width) - 2.0 * canvas.margin;
    const double inner_h = static_cast<double>(canvas.height) - 2.0 * canvas.margin;
    auto place = [&](Vec2 p) {
        return Vec2{canvas.margin + p.x * inner_w, canvas.margin + (1.0 - p.y) * inner_h};
    };

    double zmin = grid.elevation[0], zmax = grid.elevation[0];
    for (double v : grid.elevation) {
        zmin = std::min(zmin, v);
        zmax = std::max(zmax, v);
    }
    double span = zmax - zmin;

    std::string s = detail::svg_open(canvas);
    s += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(canvas.width) + "\" height=\"" +
         std::to_string(canvas.height) + "\" fill=\"#ffffff\"/>\n";

    // Iso-bands low to high; unsupported cells sit at base level and land in
    // the lowest band, i.e. the base color.
    const int levels = span > 0.0 ? options.band_levels : 1;
    for (int band = 0; band < levels; ++band) {
        double lo = zmin + span * static_cast<double>(band) / levels;
        double hi = zmin + span * static_cast<double>(band + 1) / levels;
        auto polys = band_polygons(grid.elevation, grid.resolution, lo, hi);
        if (polys.empty()) continue;
        double t = levels == 1 ? 0.0 : static_cast<double>(band) / (levels - 1);
        std::string d;
        for (const auto& poly : polys) {
            d += "M";
            for (std::size_t i = 0; i < poly.size(); ++i) {
                auto p = place(poly[i]);
                if (i > 0) d += "L";
                d += detail::num(p.x) + " " + detail::num(p.y);
            }
            d += "Z";
        }
        s += "<path class=\"band\" fill=\"" +
             detail::lerp_color(options.low_color, options.high_color, t) + "\" d=\"" + d +
             "\"/>\n";
    }

    // Contour lines at interior band boundaries.
    for (int b = 1; b < levels; ++b) {
        double level = zmin + span * static_cast<double>(b) / levels;
        for (const auto& line : contour_lines(grid.elevation, grid.resolution, level)) {
            if (line.points.size() < 2) continue;
            std::string pts;
            for (const auto& p : line.points) {
                auto q = place(p);
                if (!pts.empty()) pts += ' ';
                pts += detail::num(q.x) + "," + detail::num(q.y);
            }
            s += "<polyline class=\"contour\" fill=\"none\" stroke=\"" + options.contour_color +
                 "\" stroke-width=\"0.6\" points=\"" + pts + "\"/>\n";
        }
    }

    if (options.peak_labels) {
        auto peaks = find_peaks(grid, options.min_prominence);
        for (std::size_t i = 0; i < peaks.size() && i < 26; ++i) {
            auto p = place(peaks[i].position);
            char letter = static_cast<char>('a' + static_cast<int>(i));
            s += "<circle class=\"peak\" cx=\"" + detail::num(p.x) + "\" cy=\"" +
                 detail::num(p.y) + "\" r=\"3\" fill=\"#000000\"/>\n";
            s += "<text class=\"peak-label\" x=\"" + detail::num(p.x + 6.0) + "\" y=\"" +
                 detail::num(p.y - 6.0) + "\" font-size=\"14\" font-weight=\"bold\">";
            s += letter;
            s += "</text>\n";
        }
    }

    if (options.overlays) {
        for (const auto& overlay : *options.overlays) {
            for (const auto& m : overlay.markers) {
                auto p = place(m.position);
                s += "<circle class=\"overlay\" cx=\"" + detail::num(p.x) + "\" cy=\"" +
                     detail::num(p.y) + "\" r=\"5\" fill=\"" + canvas.highlight +
                     "\" stroke=\"#ffffff\" stroke-width=\"1\"/>\n";
                s += "<text class=\"overlay-label\" x=\"" + detail::num(p.x + 7.0) + "\" y=\"" +
                     detail::num(p.y + 4.0) + "\" font-size=\"10\">" +
                     detail::xml_escape(m.idea_id) + " (" + format_fixed(m.score, 1) +
                     ")</text>\n";
            }
        }
    }
    s += "</svg>\n";
    return s;
}

// --- Idea Network -----------------------------------------------------

struct Projected {
    Vec2 screen{0.0, 0.0};
    double depth = 0.0;  // larger = nearer the viewer
};

inline void validate_camera(const Camera& camera) {
    if (!(camera.scale > 0.0)) throw ValidationError("camera scale must be positive");
    if (std::fabs(camera.elevation) >= std::numbers::pi / 2.0)
        throw ValidationError("camera elevation must lie strictly between -pi/2 and pi/2");
}

// Orthographic projection: rotate about z by azimuth, tilt by elevation about
// the screen-x axis, drop depth (kept only for painter's ordering).
inline Projected project_point(Vec3 p, const Camera& camera) {
    double ca = std::cos(camera.azimuth), sa = std::sin(camera.azimuth);
    double ce = std::cos(camera.elevation), se = std::sin(camera.elevation);
    double x1 = p.x * ca + p.y * sa;
    double y1 = -p.x * sa + p.y * ca;
    Projected out;
    out.screen = {x1, p.z * ce - y1 * se};
    out.depth = y1 * ce + p.z * se;
    return out;
}

// Saturation in [0,1] -> an hsl() fill of fixed hue and lightness.
inline std::string saturation_fill(double saturation) {
    auto pct = static_cast<int>(std::lround(std::clamp(saturation, 0.0, 1.0) * 100.0));
    return "hsl(210," + std::to_string(pct) + "%,50%)";
}

// When `frame` is given, only its visible ideas (with the frame's saturation
// snapshot) are drawn; otherwise the whole scene at its final cursor.
inline std::string render_network_svg(const NetworkScene& scene, const Camera& camera,
                                      const CanvasSpec& canvas,
                                      const FrameSpec* frame = nullptr) {
    validate_camera(camera);
    const double cx0 = canvas.width / 2.0, cy0 = canvas.height / 2.0;
    auto to_canvas = [&](const Projected& pr) {
        return Vec2{cx0 + camera.scale * pr.screen.x, cy0 - camera.scale * pr.screen.y};
    };

    std::vector<Projected> humans;
    humans.reserve(scene.humans.size());
    for (const auto& h : scene.humans) humans.push_back(project_point(h, camera));
    std::vector<Projected> ideas;
    ideas.reserve(scene.ideas.size());
    for (const auto& n : scene.ideas) ideas.push_back(project_point(n.position, camera));

    std::vector<char> visible(scene.ideas.size(), 1);
    std::vector<double> saturation(scene.ideas.size());
    for (std::size_t i = 0; i < scene.ideas.size(); ++i)
        saturation[i] = scene.ideas[i].saturation;
    if (frame) {
        std::fill(visible.begin(), visible.end(), 0);
        for (std::size_t f = 0; f < frame->visible.size(); ++f) {
            visible.at(frame->visible[f]) = 1;
            saturation.at(frame->visible[f]) = frame->saturation[f];
        }
    }

    // Painter's order over every primitive: farthest first, stable tie-break
    // on (kind, index).
    struct Item {
        double depth;
        int kind;  // 0 social edge, 1 human, 2 idea edge, 3 idea
        std::size_t index;
    };
    std::vector<Item> items;
    for (std::size_t e = 0; e < scene.network.edges.size(); ++e) {
        const auto& [a, b] = scene.network.edges[e];
        items.push_back({0.5 * (humans[static_cast<std::size_t>(a)].depth +
                                humans[static_cast<std::size_t>(b)].depth),
                         0, e});
    }
    for (std::size_t h = 0; h < humans.size(); ++h) items.push_back({humans[h].depth, 1, h});
    for (std::size_t e = 0; e < scene.idea_edges.size(); ++e) {
        const auto& edge = scene.idea_edges[e];
        if (!visible[edge.from] || !visible[edge.to]) continue;
        items.push_back({0.5 * (ideas[edge.from].depth + ideas[edge.to].depth), 2, e});
    }
    for (std::size_t i = 0; i < ideas.size(); ++i)
        if (visible[i]) items.push_back({ideas[i].depth, 3, i});
    std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
        if (a.depth != b.depth) return a.depth < b.depth;
        if (a.kind != b.kind) return a.kind < b.kind;
        return a.index < b.index;
    });

    std::string s = detail::svg_open(canvas);
    s += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(canvas.width) + "\" height=\"" +
         std::to_string(canvas.height) + "\" fill=\"#ffffff\"/>\n";
    for (const auto& item : items) {
        switch (item.kind) {
            case 0: {
                const auto& [a, b] = scene.network.edges[item.index];
                auto p = to_canvas(humans[static_cast<std::size_t>(a)]);
                auto q = to_canvas(humans[static_cast<std::size_t>(b)]);
                s += "<line class=\"social\" x1=\"" + detail::num(p.x) + "\" y1=\"" +
                     detail::num(p.y) + "\" x2=\"" + detail::num(q.x) + "\" y2=\"" +
                     detail::num(q.y) + "\" stroke=\"#bbbbbb\" stroke-width=\"1\"/>\n";
                break;
            }
            case 1: {
                auto p = to_canvas(humans[item.index]);
                s += "<circle class=\"human\" cx=\"" + detail::num(p.x) + "\" cy=\"" +
                     detail::num(p.y) + "\" r=\"6\" fill=\"" + canvas.human_color + "\"/>\n";
                break;
            }
            case 2: {
                const auto& edge = scene.idea_edges[item.index];
                auto p = to_canvas(ideas[edge.from]);
                auto q = to_canvas(ideas[edge.to]);
                s += "<line class=\"idea-edge\" x1=\"" + detail::num(p.x) + "\" y1=\"" +
                     detail::num(p.y) + "\" x2=\"" + detail::num(q.x) + "\" y2=\"" +
                     detail::num(q.y) + "\" stroke=\"#888888\" stroke-width=\"0.8\"/>\n";
                break;
            }
            default: {
                const auto& node = scene.ideas[item.index];
                auto p = to_canvas(ideas[item.index]);
                std::string fill = node.innovator ? canvas.highlight
                                                  : saturation_fill(saturation[item.index]);
                s += "<circle class=\"idea\" cx=\"" + detail::num(p.x) + "\" cy=\"" +
                     detail::num(p.y) + "\" r=\"4\" fill=\"" + fill + "\"/>\n";
                break;
            }
        }
    }
    s += "</svg>\n";
    return s;
}

// --- scene / frame files ---------------------------------------------------

inline constexpr int kSceneSchemaVersion = 1;

// Stable key order and RFC 3339 instants so identical scenes export to
// identical bytes.
inline nlohmann::ordered_json scene_to_json(const NetworkScene& scene) {
    nlohmann::ordered_json j;
    j["version"] = kSceneSchemaVersion;
    j["kind"] = "idea-network-scene";
    j["participants"] = scene.network.n;
    j["cursor"] = format_rfc3339(scene.cursor);
    auto humans = nlohmann::ordered_json::array();
    for (const auto& h : scene.humans) humans.push_back({h.x, h.y, h.z});
    j["humans"] = std::move(humans);
    auto social = nlohmann::ordered_json::array();
    for (const auto& [a, b] : scene.network.edges) social.push_back({a, b});
    j["social_edges"] = std::move(social);
    if (!scene.network.labels.empty()) j["labels"] = scene.network.labels;
    auto ideas = nlohmann::ordered_json::array();
    for (const auto& n : scene.ideas) {
        nlohmann::ordered_json node;
        node["id"] = n.id;
        node["author"] = n.author;
        node["x"] = n.position.x;
        node["y"] = n.position.y;
        node["z"] = n.position.z;
        node["raw_pc1"] = n.raw_pc1;
        node["birth"] = format_rfc3339(n.birth);
        node["saturation"] = n.saturation;
        node["innovator"] = n.innovator;
        ideas.push_back(std::move(node));
    }
    j["ideas"] = std::move(ideas);
    auto edges = nlohmann::ordered_json::array();
    for (const auto& e : scene.idea_edges) edges.push_back({e.from, e.to});
    j["idea_edges"] = std::move(edges);
    return j;
}

inline std::string export_scene_json(const NetworkScene& scene) {
    return scene_to_json(scene).dump(2) + "\n";
}

inline NetworkScene parse_scene_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("scene file is not valid JSON: ") + e.what());
    }
    try {
        NetworkScene scene;
        scene.network.n = j.at("participants").get<int>();
        for (const auto& e : j.at("social_edges"))
            scene.network.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
        if (j.contains("labels")) scene.network.labels = j["labels"].get<std::vector<std::string>>();
        scene.cursor = parse_rfc3339(j.at("cursor").get<std::string>());
        for (const auto& h : j.at("humans"))
            scene.humans.push_back({h.at(0).get<double>(), h.at(1).get<double>(),
                                    h.at(2).get<double>()});
        for (const auto& n : j.at("ideas")) {
            IdeaNode node;
            node.id = n.at("id").get<std::string>();
            node.author = n.at("author").get<int>();
            node.position = {n.at("x").get<double>(), n.at("y").get<double>(),
                             n.at("z").get<double>()};
            node.raw_pc1 = n.at("raw_pc1").get<double>();
            node.birth = parse_rfc3339(n.at("birth").get<std::string>());
            node.saturation = n.at("saturation").get<double>();
            node.innovator = n.at("innovator").get<bool>();
            scene.ideas.push_back(std::move(node));
        }
        for (const auto& e : j.at("idea_edges"))
            scene.idea_edges.push_back(
                {e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>()});
        return scene;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("scene file does not match the schema: ") + e.what());
    }
}

inline nlohmann::ordered_json frame_to_json(const FrameSpec& frame) {
    nlohmann::ordered_json j;
    j["index"] = frame.index;
    j["cursor"] = format_rfc3339(frame.cursor);
    j["visible"] = frame.visible;
    j["saturation"] = frame.saturation;
    return j;
}

// One SVG + one JSON per frame, zero-padded names, plus an index document.
// Returns the files written, relative to `out_dir`.
inline std::vector<std::string> render_frames(const NetworkScene& scene,
                                              const std::vector<FrameSpec>& frames,
                                              const Camera& camera, const CanvasSpec& canvas,
                                              const std::string& out_dir) {
    if (frames.empty()) throw ValidationError("frame list is empty");
    ensure_directory(out_dir);
    std::vector<std::string> written;
    auto index = nlohmann::ordered_json::array();
    for (const auto& frame : frames) {
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%04d", frame.index);
        std::string svg_name = std::string(name) + ".svg";
        std::string json_name = std::string(name) + ".json";
        write_text_file(out_dir + "/" + svg_name,
                        render_network_svg(scene, camera, canvas, &frame));
        write_text_file(out_dir + "/" + json_name, frame_to_json(frame).dump(2) + "\n");
        written.push_back(svg_name);
        written.push_back(json_name);
        nlohmann::ordered_json entry;
        entry["index"] = frame.index;
        entry["cursor"] = format_rfc3339(frame.cursor);
        entry["svg"] = svg_name;
        entry["data"] = json_name;
        entry["visible_count"] = frame.visible.size();
        index.push_back(std::move(entry));
    }
    nlohmann::ordered_json top;
    top["version"] = kSceneSchemaVersion;
    top["frames"] = std::move(index);
    write_text_file(out_dir + "/index.json", top.dump(2) + "\n");
    written.push_back("index.json");
    return written;
}

}  // namespace ideascope
