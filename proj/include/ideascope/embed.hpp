#pragma once
// Idea text -> vectors. From-scratch Paragraph Vector trainer (PV-DBOW by
// default, PV-DM behind a flag) with negative sampling, plus a deterministic
// TF-IDF baseline. Single-worker training is a pure function of
// (corpus, hyperparameters, seed); workers > 1 is opt-in hogwild and
// explicitly nondeterministic.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "ideascope/common.hpp"
#include "ideascope/rng.hpp"

namespace ideascope {

inline const std::string kArrowToken = "<ARROW>";

// Lowercases, maps the transition arrow ("→", "->", "-->") to a standalone
// <ARROW> token, keeps ASCII alphanumeric runs, drops other punctuation.
inline std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    };
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        // UTF-8 arrow U+2192
        if (c == 0xE2 && i + 2 < n && static_cast<unsigned char>(text[i + 1]) == 0x86 &&
            static_cast<unsigned char>(text[i + 2]) == 0x92) {
            flush();
            out.push_back(kArrowToken);
            i += 3;
            continue;
        }
        if (c == '-') {
            if (text.compare(i, 3, "-->") == 0) {
                flush();
                out.push_back(kArrowToken);
                i += 3;
                continue;
            }
            if (text.compare(i, 2, "->") == 0) {
                flush();
                out.push_back(kArrowToken);
                i += 2;
                continue;
            }
        }
        if (std::isalnum(c)) {
            cur += static_cast<char>(std::tolower(c));
        } else {
            flush();
        }
        ++i;
    }
    flush();
    return out;
}

struct Vocabulary {
    std::vector<std::string> tokens;            // index -> token
    std::vector<std::int64_t> counts;           // index -> corpus frequency
    std::unordered_map<std::string, int> index; // token -> index
    int min_count = 1;
    std::int64_t total_tokens = 0;              // sum of retained counts

    int size() const { return static_cast<int>(tokens.size()); }

    int lookup(const std::string& tok) const {
        auto it = index.find(tok);
        return it == index.end() ? -1 : it->second;
    }
};

// Indices assigned by (frequency desc, token lexicographic asc).
inline Vocabulary build_vocab(const std::vector<std::vector<std::string>>& docs, int min_count) {
    if (min_count < 1) throw ValidationError("min_count must be >= 1");
    std::unordered_map<std::string, std::int64_t> freq;
    for (const auto& doc : docs)
        for (const auto& tok : doc) ++freq[tok];

    std::vector<std::pair<std::string, std::int64_t>> kept;
    for (const auto& [tok, c] : freq)
        if (c >= min_count) kept.emplace_back(tok, c);
    if (kept.empty()) throw ValidationError("vocabulary empty after min_count filtering");

    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    Vocabulary v;
    v.min_count = min_count;
    for (const auto& [tok, c] : kept) {
        v.index.emplace(tok, v.size());
        v.tokens.push_back(tok);
        v.counts.push_back(c);
        v.total_tokens += c;
    }
    return v;
}

enum class EmbeddingMode : std::uint8_t { pv_dbow = 0, pv_dm = 1 };

inline const char* to_string(EmbeddingMode m) {
    return m == EmbeddingMode::pv_dbow ? "pv-dbow" : "pv-dm";
}

struct Doc2VecParams {
    EmbeddingMode mode = EmbeddingMode::pv_dbow;
    int dim = 400;
    int window = 5;        // PV-DM context radius (fixed width, no random shrink)
    int negative = 5;      // negative samples per positive
    int epochs = 100;
    double alpha = 0.025;  // initial learning rate, linear decay to min_alpha
    double min_alpha = 0.0001;
    int min_count = 1;
    std::uint64_t seed = 1;
    int workers = 1;       // >1: hogwild, nondeterministic, never the default
};

struct EmbeddingModel {
    Doc2VecParams params;
    Vocabulary vocab;
    Matrix word_in;   // PV-DM input word vectors (V x dim); unused for PV-DBOW
    Matrix word_out;  // output/context vectors (V x dim)
    Matrix docs;      // one trained vector per training document (D x dim)
    std::vector<double> epoch_loss;  // mean negative-sampling loss per epoch

    // Word representation for this mode: PV-DBOW learns words only through
    // the output matrix; PV-DM trains dedicated input vectors.
    const Matrix& word_vectors() const {
        return params.mode == EmbeddingMode::pv_dm ? word_in : word_out;
    }
};

namespace detail {

inline double sigmoid(double x) {
    if (x >= 0.0) {
        double e = std::exp(-x);
        return 1.0 / (1.0 + e);
    }
    double e = std::exp(x);
    return e / (1.0 + e);
}

inline double log_sigmoid(double x) {
    if (x >= 0.0) return -std::log1p(std::exp(-x));
    return x - std::log1p(std::exp(x));
}

// Cumulative unigram^0.75 mass for negative-sample draws.
inline std::vector<double> negative_table(const Vocabulary& v) {
    std::vector<double> cum(v.counts.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < v.counts.size(); ++i) {
        acc += std::pow(static_cast<double>(v.counts[i]), 0.75);
        cum[i] = acc;
    }
    return cum;
}

inline int sample_token(const std::vector<double>& cum, Rng& rng) {
    double u = rng.uniform() * cum.back();
    auto it = std::upper_bound(cum.begin(), cum.end(), u);
    if (it == cum.end()) --it;
    return static_cast<int>(it - cum.begin());
}

inline void init_uniform(Matrix& m, double half_range, Rng& rng) {
    for (double& x : m.data()) x = rng.uniform(-half_range, half_range);
}

// One negative-sampling step against an explicit input activation `h`:
// maximize log s(h.u_target) + sum_k log s(-h.u_k). Returns the loss of the
// step and accumulates the gradient wrt h into `h_err` (as the *ascent*
// direction times lr). Output vectors are updated in place.
inline double sgns_update(double* h, double* h_err, Matrix& word_out, int target,
                          const std::vector<double>& neg_cum, int negative, double lr, int dim,
                          Rng& rng) {
    double loss = 0.0;
    for (int k = 0; k <= negative; ++k) {
        int sample;
        double label;
        if (k == 0) {
            sample = target;
            label = 1.0;
        } else {
            sample = sample_token(neg_cum, rng);
            if (sample == target) continue;  // skip, as in the reference SGNS loop
            label = 0.0;
        }
        double* u = word_out.row(static_cast<std::size_t>(sample));
        double x = dot(h, u, static_cast<std::size_t>(dim));
        double f = sigmoid(x);
        loss -= label == 1.0 ? log_sigmoid(x) : log_sigmoid(-x);
        double g = (label - f) * lr;
        for (int i = 0; i < dim; ++i) {
            h_err[i] += g * u[i];
            u[i] += g * h[i];
        }
    }
    return loss;
}

struct EpochStats {
    double loss_sum = 0.0;
    std::int64_t updates = 0;
};

// Train documents [begin, end) for one epoch. PV-DBOW predicts each token
// from the doc vector alone; PV-DM predicts each token from the mean of the
// doc vector and the fixed-width context window's input word vectors.
inline EpochStats train_range(EmbeddingModel& m, const std::vector<std::vector<int>>& corpus,
                              std::size_t begin, std::size_t end, double lr, Rng& rng) {
    const int dim = m.params.dim;
    const auto neg_cum = negative_table(m.vocab);
    std::vector<double> h_err(static_cast<std::size_t>(dim));
    std::vector<double> h(static_cast<std::size_t>(dim));
    EpochStats stats;

    for (std::size_t d = begin; d < end; ++d) {
        const auto& toks = corpus[d];
        double* dv = m.docs.row(d);
        const int len = static_cast<int>(toks.size());
        for (int pos = 0; pos < len; ++pos) {
            int target = toks[static_cast<std::size_t>(pos)];
            std::fill(h_err.begin(), h_err.end(), 0.0);
            if (m.params.mode == EmbeddingMode::pv_dbow) {
                stats.loss_sum += sgns_update(dv, h_err.data(), m.word_out, target, neg_cum,
                                              m.params.negative, lr, dim, rng);
                for (int i = 0; i < dim; ++i) dv[i] += h_err[i];
            } else {
                int lo = std::max(0, pos - m.params.window);
                int hi = std::min(len - 1, pos + m.params.window);
                std::copy(dv, dv + dim, h.begin());
                int contributors = 1;
                for (int c = lo; c <= hi; ++c) {
                    if (c == pos) continue;
                    const double* wv = m.word_in.row(static_cast<std::size_t>(toks[c]));
                    for (int i = 0; i < dim; ++i) h[i] += wv[i];
                    ++contributors;
                }
                double inv = 1.0 / contributors;
                for (int i = 0; i < dim; ++i) h[i] *= inv;
                stats.loss_sum += sgns_update(h.data(), h_err.data(), m.word_out, target, neg_cum,
                                              m.params.negative, lr, dim, rng);
                for (int i = 0; i < dim; ++i) h_err[i] *= inv;
                for (int i = 0; i < dim; ++i) dv[i] += h_err[i];
                for (int c = lo; c <= hi; ++c) {
                    if (c == pos) continue;
                    double* wv = m.word_in.row(static_cast<std::size_t>(toks[c]));
                    for (int i = 0; i < dim; ++i) wv[i] += h_err[i];
                }
            }
            ++stats.updates;
        }
    }
    return stats;
}

inline std::vector<std::vector<int>> index_corpus(const std::vector<std::vector<std::string>>& docs,
                                                  const Vocabulary& vocab, bool require_nonempty) {
    std::vector<std::vector<int>> corpus(docs.size());
    for (std::size_t d = 0; d < docs.size(); ++d) {
        for (const auto& tok : docs[d]) {
            int idx = vocab.lookup(tok);
            if (idx >= 0) corpus[d].push_back(idx);
        }
        if (require_nonempty && corpus[d].empty())
            throw ValidationError("document " + std::to_string(d) +
                                  " has no in-vocabulary tokens after filtering");
    }
    return corpus;
}

}  // namespace detail

// Learning rate for a given epoch: linear from alpha down to min_alpha.
inline double epoch_learning_rate(const Doc2VecParams& p, int epoch) {
    if (p.epochs <= 1) return p.alpha;
    double t = static_cast<double>(epoch) / static_cast<double>(p.epochs - 1);
    return p.alpha - (p.alpha - p.min_alpha) * t;
}

inline EmbeddingModel train_doc2vec(const std::vector<std::vector<std::string>>& docs,
                                    const Doc2VecParams& params) {
    if (docs.size() < 2) throw ValidationError("doc2vec needs at least 2 documents");
    if (params.dim < 1 || params.epochs < 1 || params.negative < 0)
        throw ValidationError("invalid doc2vec hyperparameters");

    EmbeddingModel m;
    m.params = params;
    m.vocab = build_vocab(docs, params.min_count);
    auto corpus = detail::index_corpus(docs, m.vocab, /*require_nonempty=*/true);

    const auto V = static_cast<std::size_t>(m.vocab.size());
    const auto D = docs.size();
    const auto dim = static_cast<std::size_t>(params.dim);
    Rng rng(params.seed);
    double half = 0.5 / params.dim;
    if (params.mode == EmbeddingMode::pv_dm) {
        m.word_in = Matrix(V, dim);
        detail::init_uniform(m.word_in, half, rng);
    }
    m.word_out = Matrix(V, dim);
    detail::init_uniform(m.word_out, half, rng);
    m.docs = Matrix(D, dim);
    detail::init_uniform(m.docs, half, rng);

    for (int e = 0; e < params.epochs; ++e) {
        double lr = epoch_learning_rate(params, e);
        detail::EpochStats stats;
        if (params.workers <= 1) {
            stats = detail::train_range(m, corpus, 0, D, lr, rng);
        } else {
            // Hogwild: contiguous chunks, unsynchronized updates.
            int w = std::min<int>(params.workers, static_cast<int>(D));
            std::vector<detail::EpochStats> parts(static_cast<std::size_t>(w));
            std::vector<std::thread> threads;
            std::size_t chunk = (D + static_cast<std::size_t>(w) - 1) / static_cast<std::size_t>(w);
            for (int t = 0; t < w; ++t) {
                threads.emplace_back([&, t] {
                    std::size_t b = static_cast<std::size_t>(t) * chunk;
                    std::size_t en = std::min(D, b + chunk);
                    Rng worker_rng(params.seed ^ (0x9E3779B9ULL * static_cast<std::uint64_t>(
                                                                      t + 1 + e * (w + 1))));
                    parts[static_cast<std::size_t>(t)] =
                        detail::train_range(m, corpus, b, en, lr, worker_rng);
                });
            }
            for (auto& th : threads) th.join();
            for (const auto& p : parts) {
                stats.loss_sum += p.loss_sum;
                stats.updates += p.updates;
            }
        }
        double mean_loss = stats.updates > 0 ? stats.loss_sum / stats.updates : 0.0;
        if (!std::isfinite(mean_loss))
            throw NumericError("doc2vec loss diverged at epoch " + std::to_string(e) +
                               "; lower the learning rate");
        m.epoch_loss.push_back(mean_loss);
    }
    return m;
}

// Freezes the trained word matrices and optimizes a fresh document vector by
// the same objective. `label` is used in error messages.
inline std::vector<double> infer_vector(const EmbeddingModel& model,
                                        const std::vector<std::string>& tokens, int epochs,
                                        std::uint64_t seed,
                                        const std::string& label = "document") {
    std::vector<int> idx;
    for (const auto& tok : tokens) {
        int i = model.vocab.lookup(tok);
        if (i >= 0) idx.push_back(i);
    }
    if (idx.empty())
        throw ValidationError("cannot infer vector for " + label +
                              ": no in-vocabulary tokens");
    if (epochs < 1) throw ValidationError("inference epochs must be >= 1");

    const int dim = model.params.dim;
    Rng rng(seed);
    std::vector<double> v(static_cast<std::size_t>(dim));
    for (double& x : v) x = rng.uniform(-0.5 / dim, 0.5 / dim);

    // Output vectors are copied so inference never mutates the model.
    Matrix word_out = model.word_out;
    Matrix word_in = model.word_in;
    const auto neg_cum = detail::negative_table(model.vocab);
    std::vector<double> h_err(static_cast<std::size_t>(dim));
    std::vector<double> h(static_cast<std::size_t>(dim));

    Doc2VecParams sched = model.params;
    sched.epochs = epochs;
    const int len = static_cast<int>(idx.size());
    for (int e = 0; e < epochs; ++e) {
        double lr = epoch_learning_rate(sched, e);
        for (int pos = 0; pos < len; ++pos) {
            int target = idx[static_cast<std::size_t>(pos)];
            std::fill(h_err.begin(), h_err.end(), 0.0);
            if (model.params.mode == EmbeddingMode::pv_dbow) {
                detail::sgns_update(v.data(), h_err.data(), word_out, target, neg_cum,
                                    model.params.negative, lr, dim, rng);
                for (int i = 0; i < dim; ++i) v[i] += h_err[i];
            } else {
                int lo = std::max(0, pos - model.params.window);
                int hi = std::min(len - 1, pos + model.params.window);
                std::copy(v.begin(), v.end(), h.begin());
                int contributors = 1;
                for (int c = lo; c <= hi; ++c) {
                    if (c == pos) continue;
                    const double* wv = word_in.row(static_cast<std::size_t>(idx[c]));
                    for (int i = 0; i < dim; ++i) h[i] += wv[i];
                    ++contributors;
                }
                double inv = 1.0 / contributors;
                for (int i = 0; i < dim; ++i) h[i] *= inv;
                detail::sgns_update(h.data(), h_err.data(), word_out, target, neg_cum,
                                    model.params.negative, lr, dim, rng);
                // Only the document vector is trainable during inference.
                for (int i = 0; i < dim; ++i) v[i] += h_err[i] * inv;
            }
        }
    }
    if (!all_finite(v))
        throw NumericError("inference diverged for " + label);
    return v;
}

// Loss and analytic gradient of a single negative-sampling step, exposed so
// tests can check the training gradient against finite differences.
struct SgnsGradient {
    double loss = 0.0;
    std::vector<double> d_doc;
    std::vector<double> d_target;
    std::vector<std::vector<double>> d_negatives;
};

inline SgnsGradient sgns_loss_gradient(const std::vector<double>& doc,
                                       const std::vector<double>& target,
                                       const std::vector<std::vector<double>>& negatives) {
    const std::size_t dim = doc.size();
    SgnsGradient g;
    g.d_doc.assign(dim, 0.0);
    g.d_target.assign(dim, 0.0);
    double st = dot(doc.data(), target.data(), dim);
    double ft = detail::sigmoid(st);
    g.loss -= detail::log_sigmoid(st);
    for (std::size_t i = 0; i < dim; ++i) {
        g.d_doc[i] += (ft - 1.0) * target[i];
        g.d_target[i] += (ft - 1.0) * doc[i];
    }
    for (const auto& u : negatives) {
        double sk = dot(doc.data(), u.data(), dim);
        double fk = detail::sigmoid(sk);
        g.loss -= detail::log_sigmoid(-sk);
        std::vector<double> du(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            g.d_doc[i] += fk * u[i];
            du[i] = fk * doc[i];
        }
        g.d_negatives.push_back(std::move(du));
    }
    return g;
}

// Plain TF-IDF baseline: tf = raw count, idf = ln((1+D)/(1+df)) + 1, rows
// L2-normalized. The trailing +1 keeps idf positive so rows stay normalizable
// even for tokens present in every document.
struct TfidfResult {
    Matrix rows;  // D x V
    Vocabulary vocab;
};

inline TfidfResult embed_tfidf(const std::vector<std::vector<std::string>>& docs) {
    if (docs.empty()) throw ValidationError("tf-idf needs at least 1 document");
    TfidfResult r;
    r.vocab = build_vocab(docs, 1);
    const auto corpus = detail::index_corpus(docs, r.vocab, /*require_nonempty=*/false);
    const auto D = docs.size();
    const auto V = static_cast<std::size_t>(r.vocab.size());

    std::vector<std::int64_t> df(V, 0);
    for (const auto& doc : corpus) {
        std::vector<int> uniq(doc);
        std::sort(uniq.begin(), uniq.end());
        uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
        for (int t : uniq) ++df[static_cast<std::size_t>(t)];
    }
    std::vector<double> idf(V);
    for (std::size_t t = 0; t < V; ++t)
        idf[t] = std::log((1.0 + static_cast<double>(D)) / (1.0 + static_cast<double>(df[t]))) +
                 1.0;

    r.rows = Matrix(D, V);
    for (std::size_t d = 0; d < D; ++d) {
        for (int t : corpus[d]) r.rows(d, static_cast<std::size_t>(t)) += 1.0;
        double norm2 = 0.0;
        for (std::size_t t = 0; t < V; ++t) {
            double w = r.rows(d, t) * idf[t];
            r.rows(d, t) = w;
            norm2 += w * w;
        }
        if (norm2 > 0.0) {
            double inv = 1.0 / std::sqrt(norm2);
            for (std::size_t t = 0; t < V; ++t) r.rows(d, t) *= inv;
        }
    }
    return r;
}

// --- model persistence -------------------------------------------------
// Single binary file: magic/version header, hyperparameters, vocabulary
// table, then row-major little-endian float32 matrices.

namespace detail {

inline void put_u32(std::string& s, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
inline void put_u64(std::string& s, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
inline void put_f64(std::string& s, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(s, bits);
}
inline void put_matrix_f32(std::string& s, const Matrix& m) {
    for (double x : m.data()) {
        float f = static_cast<float>(x);
        std::uint32_t bits;
        std::memcpy(&bits, &f, 4);
        put_u32(s, bits);
    }
}

struct Reader {
    const std::string& buf;
    std::size_t pos = 0;

    void need(std::size_t n) const {
        if (pos + n > buf.size()) throw IoError("model file truncated");
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
        pos += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
        pos += 8;
        return v;
    }
    double f64() {
        std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
    std::string bytes(std::size_t n) {
        need(n);
        std::string s = buf.substr(pos, n);
        pos += n;
        return s;
    }
    Matrix matrix_f32(std::size_t rows, std::size_t cols) {
        Matrix m(rows, cols);
        need(rows * cols * 4);
        for (double& x : m.data()) {
            std::uint32_t bits = u32();
            float f;
            std::memcpy(&f, &bits, 4);
            x = static_cast<double>(f);
        }
        return m;
    }
};

}  // namespace detail

inline constexpr char kModelMagic[9] = "IDSCEMB1";

inline std::string serialize_model(const EmbeddingModel& m) {
    std::string s;
    s.append(kModelMagic, 8);
    detail::put_u32(s, 1);  // format version
    s.push_back(static_cast<char>(m.params.mode));
    detail::put_u32(s, static_cast<std::uint32_t>(m.params.dim));
    detail::put_u32(s, static_cast<std::uint32_t>(m.params.window));
    detail::put_u32(s, static_cast<std::uint32_t>(m.params.negative));
    detail::put_u32(s, static_cast<std::uint32_t>(m.params.epochs));
    detail::put_u32(s, static_cast<std::uint32_t>(m.params.min_count));
    detail::put_f64(s, m.params.alpha);
    detail::put_f64(s, m.params.min_alpha);
    detail::put_u64(s, m.params.seed);
    detail::put_u32(s, static_cast<std::uint32_t>(m.vocab.size()));
    detail::put_u32(s, static_cast<std::uint32_t>(m.docs.rows()));
    for (int i = 0; i < m.vocab.size(); ++i) {
        const auto& tok = m.vocab.tokens[static_cast<std::size_t>(i)];
        detail::put_u32(s, static_cast<std::uint32_t>(tok.size()));
        s += tok;
        detail::put_u64(s, static_cast<std::uint64_t>(m.vocab.counts[static_cast<std::size_t>(i)]));
    }
    s.push_back(m.params.mode == EmbeddingMode::pv_dm ? 1 : 0);
    if (m.params.mode == EmbeddingMode::pv_dm) detail::put_matrix_f32(s, m.word_in);
    detail::put_matrix_f32(s, m.word_out);
    detail::put_matrix_f32(s, m.docs);
    return s;
}

inline EmbeddingModel deserialize_model(const std::string& buf) {
    if (buf.size() < 8 || buf.compare(0, 8, kModelMagic, 8) != 0)
        throw IoError("not an embedding model file (bad magic)");
    detail::Reader r{buf, 8};
    std::uint32_t version = r.u32();
    if (version != 1) throw IoError("unsupported model format version " + std::to_string(version));
    EmbeddingModel m;
    r.need(1);
    m.params.mode = static_cast<EmbeddingMode>(static_cast<unsigned char>(buf[r.pos++]));
    m.params.dim = static_cast<int>(r.u32());
    m.params.window = static_cast<int>(r.u32());
    m.params.negative = static_cast<int>(r.u32());
    m.params.epochs = static_cast<int>(r.u32());
    m.params.min_count = static_cast<int>(r.u32());
    m.params.alpha = r.f64();
    m.params.min_alpha = r.f64();
    m.params.seed = r.u64();
    auto V = r.u32();
    auto D = r.u32();
    m.vocab.min_count = m.params.min_count;
    for (std::uint32_t i = 0; i < V; ++i) {
        auto len = r.u32();
        std::string tok = r.bytes(len);
        auto count = static_cast<std::int64_t>(r.u64());
        m.vocab.index.emplace(tok, m.vocab.size());
        m.vocab.tokens.push_back(std::move(tok));
        m.vocab.counts.push_back(count);
        m.vocab.total_tokens += count;
    }
    r.need(1);
    bool has_word_in = buf[r.pos++] != 0;
    auto dim = static_cast<std::size_t>(m.params.dim);
    if (has_word_in) m.word_in = r.matrix_f32(V, dim);
    m.word_out = r.matrix_f32(V, dim);
    m.docs = r.matrix_f32(D, dim);
    return m;
}

inline void save_model(const EmbeddingModel& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open model file for writing: " + path);
    auto s = serialize_model(m);
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
    if (!out) throw IoError("failed writing model file: " + path);
}

inline EmbeddingModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file: " + path);
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize_model(buf);
}

}  // namespace ideascope
