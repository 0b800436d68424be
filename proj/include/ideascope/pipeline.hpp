#pragma once
// Staged pipeline with on-disk artifacts: embed -> reduce -> cloud /
// geography / network -> report. Every stage writes a manifest (content
// hashes of inputs, config subset, seed, outputs) and is skipped on re-run
// when nothing changed. All artifacts are deterministic byte-for-byte for
// fixed (inputs, config, seed) in single-worker mode.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ideascope/analytics.hpp"
#include "ideascope/common.hpp"
#include "ideascope/dimred.hpp"
#include "ideascope/embed.hpp"
#include "ideascope/geography.hpp"
#include "ideascope/ingest.hpp"
#include "ideascope/io.hpp"
#include "ideascope/network.hpp"
#include "ideascope/render.hpp"
#include "ideascope/timeutil.hpp"
#include "ideascope/toml.hpp"

namespace ideascope {

struct PipelineConfig {
    // [input]
    std::string ideas_path;
    std::string network_path;
    // [embed]
    std::string embed_mode = "pv-dbow";  // pv-dbow | pv-dm
    int dim = 400;
    int window = 5;
    int negative = 5;
    int epochs = 100;
    double alpha = 0.025;
    double min_alpha = 0.0001;
    int min_count = 1;
    int workers = 1;
    // [reduce]
    std::string reducer = "pca";  // pca | tsne
    double perplexity = 30.0;
    int tsne_iterations = 1000;
    double variance_floor = 0.5;
    std::string pool;  // comma-separated extra vector CSVs pooled into the fit
    // [analytics]
    int k_max = 8;
    double novelty_quantile = 0.95;
    double day_length_hours = 24.0;
    int trajectory_participant = -1;  // <0 = no trajectory overlay
    // [geography]
    std::string metric = "utility";  // utility | idea_length
    int resolution = 100;
    double bandwidth = 0.05;
    double min_prominence = 0.0;
    int band_levels = 10;
    std::string scores_csv;  // optional extra "id,score" records
    bool overlays = true;
    bool length_token_count = false;
    // [network]
    double tau_hours = 24.0;
    double s_min = 0.2;
    std::string link_policy = "most-recent";  // most-recent | all-pairs
    double z_threshold = 3.0;
    int frames = 0;
    // [render]
    int width = 720;
    int height = 720;
    int margin = 40;
    double azimuth = 0.6;
    double elevation = 0.5;
    double render_scale = 220.0;
    // top level
    std::uint64_t seed = 1;
    std::string out = "out";

    void apply(const std::string& key, const TomlValue& v);
    void validate() const;
    std::string stage_config_string(const std::string& stage) const;

    CanvasSpec canvas() const {
        CanvasSpec c;
        c.width = width;
        c.height = height;
        c.margin = margin;
        return c;
    }
    Camera camera() const { return {azimuth, elevation, render_scale}; }
    Millis day_length_ms() const {
        return static_cast<Millis>(std::llround(day_length_hours * 3600.0 * 1000.0));
    }
    double tau_ms() const { return tau_hours * 3600.0 * 1000.0; }
};

namespace detail {

inline int toml_int(const std::string& key, const TomlValue& v) {
    if (!v.is_int()) throw ValidationError("config key '" + key + "' must be an integer");
    return static_cast<int>(v.as_int());
}
inline double toml_num(const std::string& key, const TomlValue& v) {
    if (!v.is_int() && !v.is_float())
        throw ValidationError("config key '" + key + "' must be a number");
    return v.as_number();
}
inline std::string toml_str(const std::string& key, const TomlValue& v) {
    if (!v.is_string()) throw ValidationError("config key '" + key + "' must be a string");
    return v.as_string();
}
inline bool toml_bool(const std::string& key, const TomlValue& v) {
    if (!v.is_bool()) throw ValidationError("config key '" + key + "' must be a boolean");
    return v.as_bool();
}

}  // namespace detail

inline void PipelineConfig::apply(const std::string& key, const TomlValue& v) {
    using detail::toml_bool;
    using detail::toml_int;
    using detail::toml_num;
    using detail::toml_str;
    if (key == "input.ideas") ideas_path = toml_str(key, v);
    else if (key == "input.network") network_path = toml_str(key, v);
    else if (key == "embed.mode") embed_mode = toml_str(key, v);
    else if (key == "embed.dim") dim = toml_int(key, v);
    else if (key == "embed.window") window = toml_int(key, v);
    else if (key == "embed.negative") negative = toml_int(key, v);
    else if (key == "embed.epochs") epochs = toml_int(key, v);
    else if (key == "embed.alpha") alpha = toml_num(key, v);
    else if (key == "embed.min_alpha") min_alpha = toml_num(key, v);
    else if (key == "embed.min_count") min_count = toml_int(key, v);
    else if (key == "embed.workers") workers = toml_int(key, v);
    else if (key == "reduce.reducer") reducer = toml_str(key, v);
    else if (key == "reduce.perplexity") perplexity = toml_num(key, v);
    else if (key == "reduce.iterations") tsne_iterations = toml_int(key, v);
    else if (key == "reduce.variance_floor") variance_floor = toml_num(key, v);
    else if (key == "reduce.pool") pool = toml_str(key, v);
    else if (key == "analytics.k_max") k_max = toml_int(key, v);
    else if (key == "analytics.novelty_quantile") novelty_quantile = toml_num(key, v);
    else if (key == "analytics.day_length_hours") day_length_hours = toml_num(key, v);
    else if (key == "analytics.trajectory_participant") trajectory_participant = toml_int(key, v);
    else if (key == "geography.metric") metric = toml_str(key, v);
    else if (key == "geography.resolution") resolution = toml_int(key, v);
    else if (key == "geography.bandwidth") bandwidth = toml_num(key, v);
    else if (key == "geography.min_prominence") min_prominence = toml_num(key, v);
    else if (key == "geography.band_levels") band_levels = toml_int(key, v);
    else if (key == "geography.scores") scores_csv = toml_str(key, v);
    else if (key == "geography.overlays") overlays = toml_bool(key, v);
    else if (key == "geography.length_token_count") length_token_count = toml_bool(key, v);
    else if (key == "network.tau_hours") tau_hours = toml_num(key, v);
    else if (key == "network.s_min") s_min = toml_num(key, v);
    else if (key == "network.link_policy") link_policy = toml_str(key, v);
    else if (key == "network.z_threshold") z_threshold = toml_num(key, v);
    else if (key == "network.frames") frames = toml_int(key, v);
    else if (key == "render.width") width = toml_int(key, v);
    else if (key == "render.height") height = toml_int(key, v);
    else if (key == "render.margin") margin = toml_int(key, v);
    else if (key == "render.azimuth") azimuth = toml_num(key, v);
    else if (key == "render.elevation") elevation = toml_num(key, v);
    else if (key == "render.scale") render_scale = toml_num(key, v);
    else if (key == "seed") {
        if (!v.is_int() || v.as_int() < 0)
            throw ValidationError("config key 'seed' must be a non-negative integer");
        seed = static_cast<std::uint64_t>(v.as_int());
    } else if (key == "out") {
        out = toml_str(key, v);
    } else {
        throw ValidationError("unknown config key '" + key + "'");
    }
}

inline void PipelineConfig::validate() const {
    if (embed_mode != "pv-dbow" && embed_mode != "pv-dm")
        throw ValidationError("embed.mode must be 'pv-dbow' or 'pv-dm'");
    if (reducer != "pca" && reducer != "tsne")
        throw ValidationError("reduce.reducer must be 'pca' or 'tsne'");
    if (metric != "utility" && metric != "idea_length")
        throw ValidationError("geography.metric must be 'utility' or 'idea_length'");
    if (link_policy != "most-recent" && link_policy != "all-pairs")
        throw ValidationError("network.link_policy must be 'most-recent' or 'all-pairs'");
    if (dim < 1) throw ValidationError("embed.dim must be >= 1");
    if (epochs < 1) throw ValidationError("embed.epochs must be >= 1");
    if (workers < 1) throw ValidationError("embed.workers must be >= 1");
    if (k_max < 2) throw ValidationError("analytics.k_max must be >= 2");
    if (novelty_quantile <= 0.0 || novelty_quantile > 1.0)
        throw ValidationError("analytics.novelty_quantile must be in (0, 1]");
    if (day_length_hours <= 0.0) throw ValidationError("analytics.day_length_hours must be > 0");
    if (resolution < 2) throw ValidationError("geography.resolution must be >= 2");
    if (!(bandwidth > 0.0)) throw ValidationError("geography.bandwidth must be > 0");
    if (band_levels < 1) throw ValidationError("geography.band_levels must be >= 1");
    if (tau_hours <= 0.0) throw ValidationError("network.tau_hours must be > 0");
    if (s_min < 0.0 || s_min >= 1.0) throw ValidationError("network.s_min must be in [0, 1)");
    if (frames < 0) throw ValidationError("network.frames must be >= 0");
    if (width < 1 || height < 1 || margin < 0)
        throw ValidationError("render canvas dimensions must be positive");
    if (out.empty()) throw ValidationError("output directory must not be empty");
}

inline PipelineConfig load_config(const std::string& config_path,
                                  const std::vector<std::pair<std::string, TomlValue>>& overrides) {
    PipelineConfig cfg;
    if (!config_path.empty()) {
        auto values = parse_toml(read_text_file(config_path));
        for (const auto& [key, value] : values) cfg.apply(key, value);
    }
    for (const auto& [key, value] : overrides) cfg.apply(key, value);
    cfg.validate();
    return cfg;
}

// Canonical key=value block of only the settings a stage depends on, so e.g.
// changing analytics knobs never invalidates the embedding cache.
inline std::string PipelineConfig::stage_config_string(const std::string& stage) const {
    std::string s = "stage=" + stage + "\n";
    auto add = [&](const std::string& k, const std::string& v) { s += k + "=" + v + "\n"; };
    if (stage == "embed") {
        add("mode", embed_mode);
        add("dim", std::to_string(dim));
        add("window", std::to_string(window));
        add("negative", std::to_string(negative));
        add("epochs", std::to_string(epochs));
        add("alpha", format_full(alpha));
        add("min_alpha", format_full(min_alpha));
        add("min_count", std::to_string(min_count));
        add("workers", std::to_string(workers));
    } else if (stage == "reduce") {
        add("reducer", reducer);
        add("perplexity", format_full(perplexity));
        add("iterations", std::to_string(tsne_iterations));
        add("variance_floor", format_full(variance_floor));
        add("pool", pool);
    } else if (stage == "cloud") {
        add("k_max", std::to_string(k_max));
        add("novelty_quantile", format_full(novelty_quantile));
        add("day_length_hours", format_full(day_length_hours));
        add("trajectory_participant", std::to_string(trajectory_participant));
        add("canvas", std::to_string(width) + "x" + std::to_string(height) + "+" +
                          std::to_string(margin));
    } else if (stage == "geography") {
        add("metric", metric);
        add("resolution", std::to_string(resolution));
        add("bandwidth", format_full(bandwidth));
        add("min_prominence", format_full(min_prominence));
        add("band_levels", std::to_string(band_levels));
        add("scores", scores_csv);
        add("overlays", overlays ? "true" : "false");
        add("length_token_count", length_token_count ? "true" : "false");
        add("canvas", std::to_string(width) + "x" + std::to_string(height) + "+" +
                          std::to_string(margin));
    } else if (stage == "network") {
        add("tau_hours", format_full(tau_hours));
        add("s_min", format_full(s_min));
        add("link_policy", link_policy);
        add("z_threshold", format_full(z_threshold));
        add("frames", std::to_string(frames));
        add("day_length_hours", format_full(day_length_hours));
        add("canvas", std::to_string(width) + "x" + std::to_string(height) + "+" +
                          std::to_string(margin));
        add("camera", format_full(azimuth) + "/" + format_full(elevation) + "/" +
                          format_full(render_scale));
    } else if (stage == "report") {
        add("day_length_hours", format_full(day_length_hours));
    }
    return s;
}

// Per-stage seeds: hash the stage name, then the global seed bytes.
inline std::uint64_t stage_seed(std::uint64_t global_seed, const std::string& stage) {
    std::uint64_t h = fnv1a(stage);
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i)
        bytes[i] = static_cast<unsigned char>((global_seed >> (8 * i)) & 0xFF);
    return fnv1a(bytes, 8, h);
}

// --- CSV helpers -------------------------------------------------------

namespace detail {

inline std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

inline std::vector<std::string> csv_split(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

inline std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            if (!cur.empty() && cur.back() == '\r') cur.pop_back();
            lines.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) lines.push_back(std::move(cur));
    return lines;
}

inline double parse_double(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ValidationError("malformed number in " + what + ": '" + s + "'");
    }
}

}  // namespace detail

// --- manifests and caching -------------------------------------------------

struct StageManifest {
    std::string stage;
    int version = 1;
    std::string seed_hex;
    std::string config_hash;
    std::vector<std::pair<std::string, std::string>> inputs;   // name -> content hash
    std::vector<std::pair<std::string, std::string>> outputs;  // rel path -> content hash
};

inline std::string manifest_to_json(const StageManifest& m) {
    nlohmann::ordered_json j;
    j["stage"] = m.stage;
    j["version"] = m.version;
    j["seed"] = m.seed_hex;
    j["config"] = m.config_hash;
    auto in = nlohmann::ordered_json::object();
    for (const auto& [k, v] : m.inputs) in[k] = v;
    j["inputs"] = std::move(in);
    auto outj = nlohmann::ordered_json::object();
    for (const auto& [k, v] : m.outputs) outj[k] = v;
    j["outputs"] = std::move(outj);
    return j.dump(2) + "\n";
}

inline std::optional<StageManifest> try_parse_manifest(const std::string& path) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const IoError&) {
        return std::nullopt;
    }
    try {
        auto j = nlohmann::json::parse(text);
        StageManifest m;
        m.stage = j.at("stage").get<std::string>();
        m.version = j.at("version").get<int>();
        m.seed_hex = j.at("seed").get<std::string>();
        m.config_hash = j.at("config").get<std::string>();
        for (const auto& [k, v] : j.at("inputs").items()) m.inputs.emplace_back(k, v);
        for (const auto& [k, v] : j.at("outputs").items()) m.outputs.emplace_back(k, v);
        return m;
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;  // treat unreadable manifests as cache misses
    }
}

struct StageResult {
    bool cache_hit = false;
    std::vector<std::string> outputs;   // relative to the output directory
    std::vector<std::string> messages;  // warnings for the CLI to echo
};

// Collects outputs as (relative path, content), writes them all, then the
// manifest. Cache check = same seed/config/input hashes and every recorded
// output still present with its recorded hash.
class StageRunner {
public:
    StageRunner(const PipelineConfig& cfg, std::string stage)
        : cfg_(cfg), stage_(std::move(stage)) {
        manifest_.stage = stage_;
        manifest_.seed_hex = hash_hex(stage_seed(cfg.seed, stage_));
        manifest_.config_hash = hash_hex(fnv1a(cfg.stage_config_string(stage_)));
    }

    std::uint64_t seed() const { return stage_seed(cfg_.seed, stage_); }

    void add_input(const std::string& name, const std::string& content) {
        manifest_.inputs.emplace_back(name, hash_hex(fnv1a(content)));
    }

    bool cache_valid() const {
        auto prior = try_parse_manifest(manifest_path());
        if (!prior) return false;
        if (prior->stage != manifest_.stage || prior->version != manifest_.version ||
            prior->seed_hex != manifest_.seed_hex ||
            prior->config_hash != manifest_.config_hash || prior->inputs != manifest_.inputs)
            return false;
        for (const auto& [rel, hash] : prior->outputs) {
            std::string content;
            try {
                content = read_text_file(cfg_.out + "/" + rel);
            } catch (const IoError&) {
                return false;
            }
            if (hash_hex(fnv1a(content)) != hash) return false;
        }
        return true;
    }

    StageResult cached_result() const {
        StageResult r;
        r.cache_hit = true;
        auto prior = try_parse_manifest(manifest_path());
        if (prior)
            for (const auto& [rel, hash] : prior->outputs) r.outputs.push_back(rel);
        return r;
    }

    void stage_output(const std::string& rel_path, const std::string& content) {
        pending_.emplace_back(rel_path, content);
    }

    StageResult commit(std::vector<std::string> messages = {}) {
        ensure_directory(cfg_.out);
        StageResult r;
        r.messages = std::move(messages);
        for (const auto& [rel, content] : pending_) {
            auto slash = rel.rfind('/');
            if (slash != std::string::npos)
                ensure_directory(cfg_.out + "/" + rel.substr(0, slash));
            write_text_file(cfg_.out + "/" + rel, content);
            manifest_.outputs.emplace_back(rel, hash_hex(fnv1a(content)));
            r.outputs.push_back(rel);
        }
        write_text_file(manifest_path(), manifest_to_json(manifest_));
        r.outputs.push_back(stage_ + ".manifest.json");
        return r;
    }

private:
    std::string manifest_path() const { return cfg_.out + "/" + stage_ + ".manifest.json"; }

    const PipelineConfig& cfg_;
    std::string stage_;
    StageManifest manifest_;
    std::vector<std::pair<std::string, std::string>> pending_;
};

// --- artifact formats --------------------------------------------------

inline std::string vectors_to_csv(const std::vector<std::string>& ids, const Matrix& vectors) {
    std::string s = "id";
    for (std::size_t j = 0; j < vectors.cols(); ++j) s += ",v" + std::to_string(j);
    s += "\n";
    for (std::size_t i = 0; i < vectors.rows(); ++i) {
        s += detail::csv_escape(ids[i]);
        for (std::size_t j = 0; j < vectors.cols(); ++j) s += "," + format_full(vectors(i, j));
        s += "\n";
    }
    return s;
}

struct VectorsFile {
    std::vector<std::string> ids;
    Matrix vectors;
};

inline VectorsFile parse_vectors_csv(const std::string& text, const std::string& what) {
    auto lines = detail::split_lines(text);
    if (lines.empty()) throw ValidationError(what + " is empty");
    auto header = detail::csv_split(lines[0]);
    if (header.empty() || header[0] != "id")
        throw ValidationError(what + " has an unexpected header");
    const std::size_t dim = header.size() - 1;
    VectorsFile f;
    f.vectors = Matrix(lines.size() - 1, dim);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto fields = detail::csv_split(lines[i]);
        if (fields.size() != header.size())
            throw ValidationError(what + " line " + std::to_string(i + 1) +
                                  ": wrong field count");
        f.ids.push_back(fields[0]);
        for (std::size_t j = 0; j < dim; ++j)
            f.vectors(i - 1, j) = detail::parse_double(fields[j + 1], what);
    }
    return f;
}

struct ProjectionsFile {
    std::vector<std::string> ids;
    NormalizedPoints points;
};

inline std::string projections_to_csv(const std::vector<std::string>& ids,
                                      const NormalizedPoints& pts) {
    std::string s = "id,pc1_raw,pc2_raw,pc1,pc2\n";
    for (std::size_t i = 0; i < ids.size(); ++i) {
        s += detail::csv_escape(ids[i]) + "," + format_full(pts.raw[i].x) + "," +
             format_full(pts.raw[i].y) + "," + format_full(pts.normalized[i].x) + "," +
             format_full(pts.normalized[i].y) + "\n";
    }
    return s;
}

inline ProjectionsFile parse_projections_csv(const std::string& text) {
    auto lines = detail::split_lines(text);
    if (lines.empty() || lines[0] != "id,pc1_raw,pc2_raw,pc1,pc2")
        throw ValidationError("projections.csv has an unexpected header");
    ProjectionsFile f;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto fields = detail::csv_split(lines[i]);
        if (fields.size() != 5)
            throw ValidationError("projections.csv line " + std::to_string(i + 1) +
                                  ": wrong field count");
        f.ids.push_back(fields[0]);
        f.points.raw.push_back({detail::parse_double(fields[1], "projections.csv"),
                                detail::parse_double(fields[2], "projections.csv")});
        f.points.normalized.push_back({detail::parse_double(fields[3], "projections.csv"),
                                       detail::parse_double(fields[4], "projections.csv")});
    }
    return f;
}

// --- session loading ---------------------------------------------------

inline std::string require_input(const PipelineConfig& cfg, const std::string& path,
                                 const std::string& what) {
    if (path.empty()) throw ValidationError("config is missing the " + what + " path");
    (void)cfg;
    return read_text_file(path);
}

inline std::string require_artifact(const PipelineConfig& cfg, const std::string& rel,
                                    const std::string& prior_command) {
    try {
        return read_text_file(cfg.out + "/" + rel);
    } catch (const IoError&) {
        throw IoError(rel + " not found in " + cfg.out + "; run `ideascope " + prior_command +
                      "` first");
    }
}

struct LoadedSession {
    Session session;
    std::string ideas_text;    // raw bytes, for input hashing
    std::string network_text;
};

inline LoadedSession load_session(const PipelineConfig& cfg) {
    LoadedSession ls;
    ls.ideas_text = require_input(cfg, cfg.ideas_path, "input.ideas");
    ls.network_text = require_input(cfg, cfg.network_path, "input.network");
    auto ideas = parse_ideas(ls.ideas_text);
    auto network = parse_network(ls.network_text);
    ls.session = validate_session(std::move(ideas), std::move(network), cfg.day_length_ms());
    return ls;
}

inline std::multimap<std::string, double> parse_scores_csv(const std::string& text) {
    std::multimap<std::string, double> scores;
    auto lines = detail::split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        if (i == 0 && lines[i] == "id,score") continue;  // optional header
        auto fields = detail::csv_split(lines[i]);
        if (fields.size() != 2)
            throw ValidationError("scores file line " + std::to_string(i + 1) +
                                  ": expected 'id,score'");
        scores.emplace(fields[0], detail::parse_double(fields[1], "scores file"));
    }
    return scores;
}

// --- stage commands ----------------------------------------------------

inline StageResult cmd_embed(const PipelineConfig& cfg) {
    StageRunner runner(cfg, "embed");
    std::string ideas_text = require_input(cfg, cfg.ideas_path, "input.ideas");
    runner.add_input("ideas", ideas_text);
    if (runner.cache_valid()) return runner.cached_result();

    auto ideas = parse_ideas(ideas_text);
    std::vector<std::vector<std::string>> docs;
    std::vector<std::string> ids;
    docs.reserve(ideas.size());
    for (const auto& idea : ideas) {
        auto toks = tokenize(idea.text);
        if (toks.empty())
            throw ValidationError("idea " + idea.id + " has no extractable tokens");
        docs.push_back(std::move(toks));
        ids.push_back(idea.id);
    }

    Doc2VecParams params;
    params.mode = cfg.embed_mode == "pv-dm" ? EmbeddingMode::pv_dm : EmbeddingMode::pv_dbow;
    params.dim = cfg.dim;
    params.window = cfg.window;
    params.negative = cfg.negative;
    params.epochs = cfg.epochs;
    params.alpha = cfg.alpha;
    params.min_alpha = cfg.min_alpha;
    params.min_count = cfg.min_count;
    params.workers = cfg.workers;
    params.seed = runner.seed();
    auto model = train_doc2vec(docs, params);

    runner.stage_output("model.bin", serialize_model(model));
    nlohmann::ordered_json doc_map;
    doc_map["version"] = 1;
    doc_map["rows"] = ids;
    runner.stage_output("model.doc_map.json", doc_map.dump(2) + "\n");
    runner.stage_output("vectors.csv", vectors_to_csv(ids, model.docs));

    nlohmann::ordered_json losses;
    losses["version"] = 1;
    losses["epoch_loss"] = model.epoch_loss;
    runner.stage_output("training_loss.json", losses.dump(2) + "\n");
    return runner.commit();
}

inline StageResult cmd_reduce(const PipelineConfig& cfg) {
    StageRunner runner(cfg, "reduce");
    std::string vectors_text = require_artifact(cfg, "vectors.csv", "embed");
    runner.add_input("vectors.csv", vectors_text);
    std::vector<std::string> pool_texts;
    if (!cfg.pool.empty()) {
        std::size_t start = 0;
        while (start <= cfg.pool.size()) {
            auto comma = cfg.pool.find(',', start);
            auto path = cfg.pool.substr(
                start, comma == std::string::npos ? std::string::npos : comma - start);
            if (!path.empty()) {
                pool_texts.push_back(read_text_file(path));
                runner.add_input("pool:" + path, pool_texts.back());
            }
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
    }
    if (runner.cache_valid()) return runner.cached_result();

    auto own = parse_vectors_csv(vectors_text, "vectors.csv");
    std::vector<std::string> messages;

    NormalizedPoints pts;
    if (cfg.reducer == "pca") {
        // Pooled vectors join the fit; projections are emitted only for the
        // session's own ideas.
        Matrix fit = own.vectors;
        for (std::size_t p = 0; p < pool_texts.size(); ++p) {
            auto extra = parse_vectors_csv(pool_texts[p], "pooled vectors");
            if (extra.vectors.cols() != own.vectors.cols())
                throw ValidationError("pooled vector dimension mismatch");
            Matrix merged(fit.rows() + extra.vectors.rows(), fit.cols());
            std::copy(fit.data().begin(), fit.data().end(), merged.data().begin());
            std::copy(extra.vectors.data().begin(), extra.vectors.data().end(),
                      merged.data().begin() + static_cast<std::ptrdiff_t>(fit.data().size()));
            fit = std::move(merged);
        }
        auto model = fit_pca(fit);
        auto raw = project(model, own.vectors);
        pts = normalize_unit_square(raw);

        auto report = explained_variance_report(model, cfg.variance_floor);
        if (report.low_variance_warning) messages.push_back("warning: " + report.warning);

        nlohmann::ordered_json mj;
        mj["version"] = 1;
        mj["mean"] = model.mean;
        mj["components"] = {std::vector<double>(model.components.row(0),
                                                model.components.row(0) + model.dim()),
                            std::vector<double>(model.components.row(1),
                                                model.components.row(1) + model.dim())};
        mj["eigenvalues"] = model.eigenvalues;
        mj["explained_ratio"] = {model.explained_ratio[0], model.explained_ratio[1]};
        runner.stage_output("pca_model.json", mj.dump(2) + "\n");

        nlohmann::ordered_json vj;
        vj["version"] = 1;
        vj["reducer"] = "pca";
        vj["ratios"] = report.ratios;
        vj["cumulative"] = report.cumulative;
        vj["two_component"] = report.two_component;
        vj["floor"] = cfg.variance_floor;
        vj["warning"] = report.warning;
        runner.stage_output("variance.json", vj.dump(2) + "\n");
    } else {
        TsneParams tp;
        tp.perplexity = cfg.perplexity;
        tp.iterations = cfg.tsne_iterations;
        tp.seed = runner.seed();
        auto result = fit_tsne(own.vectors, tp);
        pts = normalize_unit_square(result.points);

        nlohmann::ordered_json tj;
        tj["version"] = 1;
        tj["reducer"] = "tsne";
        tj["perplexity"] = cfg.perplexity;
        tj["iterations"] = cfg.tsne_iterations;
        tj["kl_curve"] = result.kl_curve;
        runner.stage_output("tsne.json", tj.dump(2) + "\n");
    }

    runner.stage_output("projections.csv", projections_to_csv(own.ids, pts));
    return runner.commit(std::move(messages));
}

namespace detail {

// Projections re-keyed to the session's idea order; the ids must agree.
inline NormalizedPoints align_projections(const Session& session, const ProjectionsFile& pf) {
    if (pf.ids.size() != session.ideas.size())
        throw ValidationError("projections.csv does not match the ideas file; re-run reduce");
    std::map<std::string, std::size_t> by_id;
    for (std::size_t i = 0; i < pf.ids.size(); ++i) by_id.emplace(pf.ids[i], i);
    NormalizedPoints out;
    for (const auto& idea : session.ideas) {
        auto it = by_id.find(idea.id);
        if (it == by_id.end())
            throw ValidationError("idea " + idea.id +
                                  " missing from projections.csv; re-run reduce");
        out.raw.push_back(pf.points.raw[it->second]);
        out.normalized.push_back(pf.points.normalized[it->second]);
    }
    return out;
}

}  // namespace detail

inline StageResult cmd_cloud(const PipelineConfig& cfg) {
    StageRunner runner(cfg, "cloud");
    auto loaded = load_session(cfg);
    std::string proj_text = require_artifact(cfg, "projections.csv", "reduce");
    runner.add_input("ideas", loaded.ideas_text);
    runner.add_input("network", loaded.network_text);
    runner.add_input("projections.csv", proj_text);
    if (runner.cache_valid()) return runner.cached_result();

    const auto& session = loaded.session;
    auto projections = detail::align_projections(session, parse_projections_csv(proj_text));
    const auto& pts = projections.normalized;
    std::vector<std::string> messages;

    // Clustering with elbow-selected k.
    ElbowResult elbow;
    ClusterAssignment clusters;
    if (pts.size() >= 2) {
        int k_max = std::min<int>(cfg.k_max, static_cast<int>(pts.size()));
        if (k_max >= 2) {
            elbow = select_k_elbow(pts, k_max, runner.seed());
            if (!elbow.warning.empty()) messages.push_back("warning: " + elbow.warning);
        } else {
            elbow.k_best = 1;
        }
        clusters = kmeans(pts, elbow.k_best, runner.seed());
    } else {
        elbow.k_best = static_cast<int>(pts.size());
        clusters.k = elbow.k_best;
        clusters.labels.assign(pts.size(), 0);
        if (!pts.empty()) clusters.centroids = {pts[0]};
    }

    auto diversity = avg_pairwise_distance(pts);
    auto slices = daily_slices(session, pts);

    std::vector<Trajectory> trajectories;
    for (int p = 0; p < session.network.n; ++p)
        trajectories.push_back(trajectory(session, p, pts));

    // Novelty: each day from the second onward against all earlier days.
    struct DayNovelty {
        int day;
        NoveltyReport report;
        std::vector<std::size_t> indices;  // idea indices checked
    };
    std::vector<DayNovelty> novelty;
    {
        std::vector<Vec2> prior;
        std::vector<std::size_t> prior_members;
        for (const auto& slice : slices) {
            if (!prior.empty() && !slice.members.empty()) {
                std::vector<Vec2> day_pts;
                for (auto i : slice.members) day_pts.push_back(pts[i]);
                DayNovelty dn;
                dn.day = slice.day;
                dn.report = detect_novel(day_pts, prior, cfg.novelty_quantile);
                dn.indices = slice.members;
                novelty.push_back(std::move(dn));
            }
            for (auto i : slice.members) prior.push_back(pts[i]);
        }
    }

    // analytics.json
    nlohmann::ordered_json aj;
    aj["version"] = 1;
    {
        nlohmann::ordered_json cj;
        cj["k_best"] = elbow.k_best;
        cj["inertia_curve"] = elbow.inertia_curve;
        cj["degenerate"] = elbow.degenerate;
        cj["k"] = clusters.k;
        cj["labels"] = clusters.labels;
        auto cents = nlohmann::ordered_json::array();
        for (const auto& c : clusters.centroids) cents.push_back({c.x, c.y});
        cj["centroids"] = std::move(cents);
        cj["inertia"] = clusters.inertia;
        aj["clusters"] = std::move(cj);
    }
    aj["diversity"] = {{"avg_dis", diversity.avg_dis}, {"count", diversity.count}};
    {
        auto tj = nlohmann::ordered_json::array();
        for (const auto& t : trajectories) {
            nlohmann::ordered_json one;
            one["participant"] = t.participant;
            one["idea_count"] = t.idea_ids.size();
            one["total_distance"] = t.total_distance;
            tj.push_back(std::move(one));
        }
        aj["trajectories"] = std::move(tj);
    }
    {
        auto sj = nlohmann::ordered_json::array();
        std::vector<double> series;
        for (const auto& s : slices) {
            nlohmann::ordered_json one;
            one["day"] = s.day;
            one["count"] = s.members.size();
            one["dispersion"] = s.dispersion;
            sj.push_back(std::move(one));
            series.push_back(s.dispersion);
        }
        aj["slices"] = std::move(sj);
        aj["dispersion_series"] = series;
    }
    {
        auto nj = nlohmann::ordered_json::array();
        for (const auto& dn : novelty) {
            nlohmann::ordered_json one;
            one["day"] = dn.day;
            one["threshold"] = dn.report.threshold;
            auto flags = nlohmann::ordered_json::array();
            for (std::size_t f = 0; f < dn.report.flags.size(); ++f) {
                nlohmann::ordered_json fj;
                fj["id"] = session.ideas[dn.indices[f]].id;
                fj["nn_distance"] = dn.report.flags[f].nn_distance;
                fj["novel"] = dn.report.flags[f].novel;
                flags.push_back(std::move(fj));
            }
            one["flags"] = std::move(flags);
            nj.push_back(std::move(one));
        }
        aj["novelty"] = std::move(nj);
    }
    runner.stage_output("analytics.json", aj.dump(2) + "\n");

    // CSV mirrors.
    {
        std::string s = "id,label,pc1,pc2\n";
        for (std::size_t i = 0; i < session.ideas.size(); ++i)
            s += detail::csv_escape(session.ideas[i].id) + "," +
                 std::to_string(clusters.labels.empty() ? 0 : clusters.labels[i]) + "," +
                 format_full(pts[i].x) + "," + format_full(pts[i].y) + "\n";
        runner.stage_output("clusters.csv", s);
    }
    {
        std::string s = "participant,idea_count,total_distance\n";
        for (const auto& t : trajectories)
            s += std::to_string(t.participant) + "," + std::to_string(t.idea_ids.size()) + "," +
                 format_full(t.total_distance) + "\n";
        runner.stage_output("trajectories.csv", s);
    }
    {
        std::string s = "day,count,dispersion\n";
        for (const auto& sl : slices)
            s += std::to_string(sl.day) + "," + std::to_string(sl.members.size()) + "," +
                 format_full(sl.dispersion) + "\n";
        runner.stage_output("slices.csv", s);
    }
    {
        std::string s = "day,id,nn_distance,threshold,novel\n";
        for (const auto& dn : novelty)
            for (std::size_t f = 0; f < dn.report.flags.size(); ++f)
                s += std::to_string(dn.day) + "," +
                     detail::csv_escape(session.ideas[dn.indices[f]].id) + "," +
                     format_full(dn.report.flags[f].nn_distance) + "," +
                     format_full(dn.report.threshold) + "," +
                     (dn.report.flags[f].novel ? "true" : "false") + "\n";
        runner.stage_output("novelty.csv", s);
    }

    // SVGs: clustered cloud with Avg_dis, and per-day panels with novelty
    // highlights.
    auto canvas = cfg.canvas();
    {
        CloudOptions opt;
        opt.clusters = pts.empty() ? nullptr : &clusters;
        opt.diversity = &diversity;
        std::optional<Trajectory> traj;
        if (cfg.trajectory_participant >= 0) {
            traj = trajectory(session, cfg.trajectory_participant, pts);
            opt.trajectory = traj;
        }
        runner.stage_output("cloud.svg", render_cloud_svg(pts, canvas, opt));
    }
    {
        CloudOptions opt;
        opt.panels = &slices;
        // Flatten per-day novelty into point-indexed highlights.
        NoveltyReport flat;
        std::vector<std::size_t> flat_indices;
        for (const auto& dn : novelty)
            for (std::size_t f = 0; f < dn.report.flags.size(); ++f) {
                flat.flags.push_back(dn.report.flags[f]);
                flat_indices.push_back(dn.indices[f]);
            }
        opt.novelty = &flat;
        opt.novelty_indices = &flat_indices;
        runner.stage_output("slices.svg", render_cloud_svg(pts, canvas, opt));
    }
    return runner.commit(std::move(messages));
}

inline StageResult cmd_geography(const PipelineConfig& cfg) {
    StageRunner runner(cfg, "geography");
    auto loaded = load_session(cfg);
    std::string proj_text = require_artifact(cfg, "projections.csv", "reduce");
    runner.add_input("ideas", loaded.ideas_text);
    runner.add_input("network", loaded.network_text);
    runner.add_input("projections.csv", proj_text);
    std::string scores_text;
    if (!cfg.scores_csv.empty()) {
        scores_text = read_text_file(cfg.scores_csv);
        runner.add_input("scores", scores_text);
    }
    if (runner.cache_valid()) return runner.cached_result();

    const auto& session = loaded.session;
    auto projections = detail::align_projections(session, parse_projections_csv(proj_text));
    const auto& pts = projections.normalized;

    std::vector<Vec2> terrain_points;
    std::vector<double> elevations;
    std::vector<std::string> excluded;
    TerrainMetric metric_kind;
    if (cfg.metric == "utility") {
        metric_kind = TerrainMetric::utility;
        std::multimap<std::string, double> extra;
        if (!scores_text.empty()) extra = parse_scores_csv(scores_text);
        ScoredElevations scored;
        try {
            scored = elevation_from_scores(session.ideas, extra);
        } catch (const ValidationError&) {
            throw ValidationError(
                "no scored ideas; utility terrain needs evaluation scores - set "
                "geography.metric = \"idea_length\" for unscored corpora");
        }
        for (std::size_t k = 0; k < scored.indices.size(); ++k) {
            terrain_points.push_back(pts[scored.indices[k]]);
            elevations.push_back(scored.values[k]);
        }
        excluded = scored.unscored;
    } else {
        metric_kind = TerrainMetric::idea_length;
        terrain_points = pts;
        elevations = elevation_from_length(session.ideas, cfg.length_token_count);
    }

    auto grid = build_terrain(terrain_points, elevations, cfg.resolution, cfg.bandwidth,
                              metric_kind);
    auto peaks = find_peaks(grid, cfg.min_prominence);

    // Rank correlation between chain length and mean score at scored ideas,
    // emitted for the user to read (never asserted).
    nlohmann::ordered_json corr = nullptr;
    {
        std::vector<double> lens, scores;
        auto all_lengths = elevation_from_length(session.ideas, cfg.length_token_count);
        std::multimap<std::string, double> extra;
        if (!scores_text.empty()) extra = parse_scores_csv(scores_text);
        try {
            auto scored = elevation_from_scores(session.ideas, extra);
            for (std::size_t k = 0; k < scored.indices.size(); ++k) {
                lens.push_back(all_lengths[scored.indices[k]]);
                scores.push_back(scored.values[k]);
            }
            if (lens.size() >= 2) corr = spearman_rank_correlation(lens, scores);
        } catch (const ValidationError&) {
            // no scores at all: correlation stays null
        }
    }

    nlohmann::ordered_json tj;
    tj["version"] = 1;
    tj["metric"] = to_string(grid.metric);
    tj["resolution"] = grid.resolution;
    tj["bandwidth"] = grid.bandwidth;
    tj["base"] = grid.base;
    tj["support_threshold"] = grid.support_threshold;
    tj["elevation"] = grid.elevation;
    tj["support"] = grid.support;
    tj["excluded_unscored"] = excluded;
    tj["length_score_rank_correlation"] = corr;
    runner.stage_output("terrain.json", tj.dump(2) + "\n");
    runner.stage_output("terrain.asc", terrain_to_asc(grid));

    {
        std::string s = "rank,x,y,elevation,prominence\n";
        for (std::size_t i = 0; i < peaks.size(); ++i)
            s += std::to_string(i + 1) + "," + format_full(peaks[i].position.x) + "," +
                 format_full(peaks[i].position.y) + "," + format_full(peaks[i].elevation) +
                 "," + format_full(peaks[i].prominence) + "\n";
        runner.stage_output("peaks.csv", s);
    }

    TerrainRenderOptions ropt;
    ropt.band_levels = cfg.band_levels;
    ropt.min_prominence = cfg.min_prominence;
    std::vector<ParticipantOverlay> overlays;
    if (cfg.overlays && cfg.metric == "utility") {
        for (int p = 0; p < session.network.n; ++p) {
            try {
                overlays.push_back(participant_overlay(session, p, pts));
            } catch (const ValidationError&) {
                // participants without scored finals simply have no marker
            }
        }
        if (!overlays.empty()) ropt.overlays = &overlays;
    }
    runner.stage_output("terrain.svg", render_terrain_svg(grid, cfg.canvas(), ropt));
    return runner.commit();
}

inline StageResult cmd_network(const PipelineConfig& cfg) {
    StageRunner runner(cfg, "network");
    auto loaded = load_session(cfg);
    std::string proj_text = require_artifact(cfg, "projections.csv", "reduce");
    runner.add_input("ideas", loaded.ideas_text);
    runner.add_input("network", loaded.network_text);
    runner.add_input("projections.csv", proj_text);
    if (runner.cache_valid()) return runner.cached_result();

    const auto& session = loaded.session;
    auto projections = detail::align_projections(session, parse_projections_csv(proj_text));
    std::vector<std::string> messages;

    auto policy =
        cfg.link_policy == "all-pairs" ? LinkPolicy::all_pairs : LinkPolicy::most_recent;
    auto scene = build_scene(session, projections, policy, cfg.tau_ms(), cfg.s_min,
                             cfg.z_threshold);
    runner.stage_output("scene.json", export_scene_json(scene));
    runner.stage_output("network.svg",
                        render_network_svg(scene, cfg.camera(), cfg.canvas()));

    if (cfg.frames > 0) {
        auto animation = animate(scene.ideas, cfg.frames, cfg.tau_ms(), cfg.s_min);
        if (!animation.warning.empty()) messages.push_back("warning: " + animation.warning);
        auto canvas = cfg.canvas();
        auto camera = cfg.camera();
        auto index = nlohmann::ordered_json::array();
        for (const auto& frame : animation.frames) {
            char name[32];
            std::snprintf(name, sizeof(name), "frame_%04d", frame.index);
            runner.stage_output(std::string("frames/") + name + ".svg",
                                render_network_svg(scene, camera, canvas, &frame));
            runner.stage_output(std::string("frames/") + name + ".json",
                                frame_to_json(frame).dump(2) + "\n");
            nlohmann::ordered_json entry;
            entry["index"] = frame.index;
            entry["cursor"] = format_rfc3339(frame.cursor);
            entry["svg"] = std::string(name) + ".svg";
            entry["data"] = std::string(name) + ".json";
            entry["visible_count"] = frame.visible.size();
            index.push_back(std::move(entry));
        }
        nlohmann::ordered_json top;
        top["version"] = kSceneSchemaVersion;
        top["frames"] = std::move(index);
        runner.stage_output("frames/index.json", top.dump(2) + "\n");
    }
    return runner.commit(std::move(messages));
}

inline StageResult cmd_report(const PipelineConfig& cfg) {
    StageRunner runner(cfg, "report");
    auto loaded = load_session(cfg);
    std::string analytics_text = require_artifact(cfg, "analytics.json", "cloud");
    std::string scene_text = require_artifact(cfg, "scene.json", "network");
    runner.add_input("ideas", loaded.ideas_text);
    runner.add_input("network", loaded.network_text);
    runner.add_input("analytics.json", analytics_text);
    runner.add_input("scene.json", scene_text);
    if (runner.cache_valid()) return runner.cached_result();

    const auto& session = loaded.session;
    nlohmann::json analytics;
    try {
        analytics = nlohmann::json::parse(analytics_text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("analytics.json is corrupt: ") + e.what());
    }
    auto scene = parse_scene_json(scene_text);
    auto contribution = contribution_counts(session);

    // Trajectories ranked by distance, descending; ties by participant id.
    struct Ranked {
        int participant;
        double distance;
        std::size_t ideas;
    };
    std::vector<Ranked> ranked;
    for (const auto& t : analytics.at("trajectories"))
        ranked.push_back({t.at("participant").get<int>(), t.at("total_distance").get<double>(),
                          t.at("idea_count").get<std::size_t>()});
    std::stable_sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
        if (a.distance != b.distance) return a.distance > b.distance;
        return a.participant < b.participant;
    });

    std::vector<double> dispersion =
        analytics.at("dispersion_series").get<std::vector<double>>();
    std::string trend = "flat";
    if (dispersion.size() >= 2) {
        bool dec = true, inc = true;
        for (std::size_t i = 1; i < dispersion.size(); ++i) {
            if (dispersion[i] > dispersion[i - 1]) dec = false;
            if (dispersion[i] < dispersion[i - 1]) inc = false;
        }
        trend = dec && inc ? "flat" : dec ? "decreasing" : inc ? "increasing" : "mixed";
    }

    nlohmann::ordered_json rj;
    rj["version"] = 1;
    rj["ideas"] = session.ideas.size();
    rj["days"] = session.day_count();
    rj["participants"] = session.network.n;
    rj["diversity"] = analytics.at("diversity");
    rj["k_best"] = analytics.at("clusters").at("k_best");
    rj["dispersion_series"] = dispersion;
    rj["dispersion_trend"] = trend;
    {
        auto tj = nlohmann::ordered_json::array();
        for (const auto& r : ranked) {
            nlohmann::ordered_json one;
            one["participant"] = r.participant;
            one["total_distance"] = r.distance;
            one["idea_count"] = r.ideas;
            tj.push_back(std::move(one));
        }
        rj["trajectories"] = std::move(tj);
    }
    {
        auto ij = nlohmann::ordered_json::array();
        for (const auto& n : scene.ideas) {
            if (!n.innovator) continue;
            nlohmann::ordered_json one;
            one["id"] = n.id;
            one["author"] = n.author;
            ij.push_back(std::move(one));
        }
        rj["innovators"] = std::move(ij);
    }
    {
        nlohmann::ordered_json cj;
        cj["counts"] = contribution.counts;
        cj["non_contributors"] = contribution.non_contributors;
        cj["threshold"] = contribution.threshold;
        cj["total"] = contribution.total;
        cj["gini"] = contribution.gini;
        rj["contribution"] = std::move(cj);
    }
    runner.stage_output("report.json", rj.dump(2) + "\n");

    // Human-readable summary.
    std::string txt;
    txt += "session report\n";
    txt += "==============\n";
    txt += "ideas: " + std::to_string(session.ideas.size()) + " across " +
           std::to_string(session.day_count()) + " day(s), " +
           std::to_string(session.network.n) + " participants\n";
    txt += "diversity: Avg_dis = " +
           format_fixed(analytics.at("diversity").at("avg_dis").get<double>(), 4) + " over " +
           std::to_string(analytics.at("diversity").at("count").get<std::size_t>()) +
           " ideas\n";
    txt += "clusters: k_best = " +
           std::to_string(analytics.at("clusters").at("k_best").get<int>()) + "\n";
    txt += "dispersion trend: " + trend + " (";
    for (std::size_t i = 0; i < dispersion.size(); ++i) {
        if (i) txt += " -> ";
        txt += format_fixed(dispersion[i], 4);
    }
    txt += ")\n";
    txt += "top trajectories:\n";
    for (std::size_t i = 0; i < ranked.size() && i < 3; ++i)
        txt += "  " + std::to_string(i + 1) + ". participant " +
               std::to_string(ranked[i].participant) + ": " +
               format_fixed(ranked[i].distance, 4) + " (" + std::to_string(ranked[i].ideas) +
               " ideas)\n";
    txt += "innovators: ";
    {
        bool any = false;
        for (const auto& n : scene.ideas) {
            if (!n.innovator) continue;
            if (any) txt += ", ";
            txt += n.id + " (participant " + std::to_string(n.author) + ")";
            any = true;
        }
        if (!any) txt += "none";
        txt += "\n";
    }
    txt += "non-contributors: ";
    if (contribution.non_contributors.empty()) {
        txt += "none";
    } else {
        for (std::size_t i = 0; i < contribution.non_contributors.size(); ++i) {
            if (i) txt += ", ";
            txt += std::to_string(contribution.non_contributors[i]);
        }
    }
    txt += "\n";
    txt += "contribution gini = " + format_fixed(contribution.gini, 4) + "\n";
    runner.stage_output("report.txt", txt);
    return runner.commit();
}

}  // namespace ideascope
