#pragma once
// 2D reduction of embedding vectors: PCA (primary path) and t-SNE
// (alternate), plus unit-square display normalization. Everything here is
// deterministic; the only randomness is the seeded t-SNE init.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "ideascope/common.hpp"
#include "ideascope/rng.hpp"

namespace ideascope {

namespace detail {

// Symmetric eigendecomposition: Householder reduction to tridiagonal form
// followed by implicit-shift QL. `a` holds the symmetric input on entry and
// the column eigenvectors on exit; eigenvalues land in `d`.
inline void tridiagonalize(Matrix& a, std::vector<double>& d, std::vector<double>& e) {
    const std::size_t n = a.rows();
    d.assign(n, 0.0);
    e.assign(n, 0.0);
    for (std::size_t i = n - 1; i >= 1; --i) {
        std::size_t l = i - 1;
        double h = 0.0, scale = 0.0;
        if (l > 0) {
            for (std::size_t k = 0; k <= l; ++k) scale += std::fabs(a(i, k));
            if (scale == 0.0) {
                e[i] = a(i, l);
            } else {
                for (std::size_t k = 0; k <= l; ++k) {
                    a(i, k) /= scale;
                    h += a(i, k) * a(i, k);
                }
                double f = a(i, l);
                double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                a(i, l) = f - g;
                f = 0.0;
                for (std::size_t j = 0; j <= l; ++j) {
                    a(j, i) = a(i, j) / h;
                    g = 0.0;
                    for (std::size_t k = 0; k <= j; ++k) g += a(j, k) * a(i, k);
                    for (std::size_t k = j + 1; k <= l; ++k) g += a(k, j) * a(i, k);
                    e[j] = g / h;
                    f += e[j] * a(i, j);
                }
                double hh = f / (h + h);
                for (std::size_t j = 0; j <= l; ++j) {
                    f = a(i, j);
                    e[j] = g = e[j] - hh * f;
                    for (std::size_t k = 0; k <= j; ++k)
                        a(j, k) -= f * e[k] + g * a(i, k);
                }
            }
        } else {
            e[i] = a(i, l);
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (d[i] != 0.0) {
            for (std::size_t j = 0; j < i; ++j) {
                double g = 0.0;
                for (std::size_t k = 0; k < i; ++k) g += a(i, k) * a(k, j);
                for (std::size_t k = 0; k < i; ++k) a(k, j) -= g * a(k, i);
            }
        }
        d[i] = a(i, i);
        a(i, i) = 1.0;
        for (std::size_t j = 0; j < i; ++j) a(j, i) = a(i, j) = 0.0;
    }
}

inline double hypot2(double a, double b) { return std::sqrt(a * a + b * b); }

// Implicit-shift QL on the tridiagonal (d, e); accumulates rotations into the
// eigenvector columns of z.
inline void ql_implicit(std::vector<double>& d, std::vector<double>& e, Matrix& z) {
    const std::size_t n = d.size();
    if (n == 0) return;
    for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        std::size_t m;
        do {
            for (m = l; m + 1 < n; ++m) {
                double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
                if (std::fabs(e[m]) <= 1e-300 + std::numeric_limits<double>::epsilon() * dd)
                    break;
            }
            if (m != l) {
                if (++iter > 50) throw NumericError("eigensolver failed to converge");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = hypot2(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? std::fabs(r) : -std::fabs(r)));
                double s = 1.0, c = 1.0, p = 0.0;
                for (std::size_t i = m; i-- > l;) {
                    double f = s * e[i];
                    double b = c * e[i];
                    r = hypot2(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    for (std::size_t k = 0; k < n; ++k) {
                        f = z(k, i + 1);
                        z(k, i + 1) = s * z(k, i) + c * f;
                        z(k, i) = c * z(k, i) - s * f;
                    }
                }
                if (r == 0.0 && m > l + 1) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

struct EigenResult {
    std::vector<double> values;  // descending
    Matrix vectors;              // row i = eigenvector of values[i]
};

inline EigenResult eigen_symmetric(Matrix a) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw NumericError("eigensolver requires a square matrix");
    std::vector<double> d, e;
    if (n == 1) {
        EigenResult r;
        r.values = {a(0, 0)};
        r.vectors = Matrix(1, 1);
        r.vectors(0, 0) = 1.0;
        return r;
    }
    tridiagonalize(a, d, e);
    ql_implicit(d, e, a);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return d[x] > d[y]; });
    EigenResult r;
    r.values.resize(n);
    r.vectors = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        r.values[i] = d[order[i]];
        for (std::size_t k = 0; k < n; ++k) r.vectors(i, k) = a(k, order[i]);
    }
    return r;
}

// Largest-|entry| coefficient made positive; first index wins ties.
inline void fix_sign(double* v, std::size_t n) {
    std::size_t best = 0;
    double best_abs = std::fabs(v[0]);
    for (std::size_t i = 1; i < n; ++i) {
        double a = std::fabs(v[i]);
        if (a > best_abs) {
            best_abs = a;
            best = i;
        }
    }
    if (v[best] < 0.0)
        for (std::size_t i = 0; i < n; ++i) v[i] = -v[i];
}

}  // namespace detail

struct PcaModel {
    std::vector<double> mean;
    Matrix components;                // 2 x dim, orthonormal rows
    std::vector<double> eigenvalues;  // full spectrum, descending
    double explained_ratio[2] = {0.0, 0.0};

    std::size_t dim() const { return mean.size(); }
};

inline PcaModel fit_pca(const Matrix& x) {
    const std::size_t d = x.rows(), n = x.cols();
    if (d < 2) throw ValidationError("PCA needs at least 2 points");
    for (double v : x.data())
        if (!std::isfinite(v)) throw ValidationError("PCA input contains non-finite values");

    PcaModel m;
    m.mean.assign(n, 0.0);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < n; ++j) m.mean[j] += x(i, j);
    for (double& v : m.mean) v /= static_cast<double>(d);

    Matrix cov(n, n);
    Matrix centered(d, n);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < n; ++j) centered(i, j) = x(i, j) - m.mean[j];
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a; b < n; ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < d; ++i) s += centered(i, a) * centered(i, b);
            s /= static_cast<double>(d - 1);
            cov(a, b) = s;
            cov(b, a) = s;
        }

    auto eig = detail::eigen_symmetric(cov);
    double total = 0.0;
    for (double& v : eig.values) {
        if (v < 0.0 && v > -1e-10) v = 0.0;  // clip eigensolver noise
        total += v;
    }
    if (total <= 0.0) throw ValidationError("PCA input has zero total variance");

    m.eigenvalues = eig.values;
    m.components = Matrix(2, n);
    for (std::size_t c = 0; c < 2 && c < n; ++c) {
        for (std::size_t j = 0; j < n; ++j) m.components(c, j) = eig.vectors(c, j);
        detail::fix_sign(m.components.row(c), n);
        m.explained_ratio[c] = eig.values[c] / total;
    }
    return m;
}

// Raw 2D coordinates: components . (v - mean).
inline Vec2 project_one(const PcaModel& m, const double* v) {
    Vec2 p{0.0, 0.0};
    for (std::size_t j = 0; j < m.dim(); ++j) {
        double c = v[j] - m.mean[j];
        p.x += m.components(0, j) * c;
        p.y += m.components(1, j) * c;
    }
    return p;
}

inline std::vector<Vec2> project(const PcaModel& m, const Matrix& x) {
    if (x.cols() != m.dim()) throw ValidationError("projection dimension mismatch");
    std::vector<Vec2> out(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) out[i] = project_one(m, x.row(i));
    return out;
}

inline std::vector<double> reconstruct(const PcaModel& m, const Vec2& p) {
    std::vector<double> v(m.mean);
    for (std::size_t j = 0; j < m.dim(); ++j)
        v[j] += p.x * m.components(0, j) + p.y * m.components(1, j);
    return v;
}

struct VarianceReport {
    std::vector<double> ratios;      // full spectrum, descending
    std::vector<double> cumulative;  // running sums
    double two_component = 0.0;      // cumulative after PC1+PC2
    bool low_variance_warning = false;
    std::string warning;
};

inline VarianceReport explained_variance_report(const PcaModel& m, double floor = 0.5) {
    VarianceReport r;
    double total = 0.0;
    for (double v : m.eigenvalues) total += v;
    double acc = 0.0;
    for (double v : m.eigenvalues) {
        double ratio = total > 0.0 ? v / total : 0.0;
        acc += ratio;
        r.ratios.push_back(ratio);
        r.cumulative.push_back(acc);
    }
    r.two_component = r.cumulative.size() >= 2 ? r.cumulative[1]
                      : r.cumulative.empty()   ? 0.0
                                               : r.cumulative[0];
    if (r.two_component < floor) {
        r.low_variance_warning = true;
        r.warning = "PC1+PC2 capture only " + format_fixed(100.0 * r.two_component, 2) +
                    "% of variance (floor " + format_fixed(100.0 * floor, 2) +
                    "%); 2D views may hide structure";
    }
    return r;
}

struct NormalizedPoints {
    std::vector<Vec2> raw;
    std::vector<Vec2> normalized;  // per-axis min-max into [0,1]
    Vec2 min{0.0, 0.0};
    Vec2 max{0.0, 0.0};
};

// Display-layer min-max scaling; a degenerate axis (max == min) maps to 0.5.
inline NormalizedPoints normalize_unit_square(const std::vector<Vec2>& pts) {
    if (pts.empty()) throw ValidationError("cannot normalize an empty point set");
    for (const auto& p : pts)
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw ValidationError("cannot normalize non-finite coordinates");
    NormalizedPoints r;
    r.raw = pts;
    r.min = r.max = pts[0];
    for (const auto& p : pts) {
        r.min.x = std::min(r.min.x, p.x);
        r.min.y = std::min(r.min.y, p.y);
        r.max.x = std::max(r.max.x, p.x);
        r.max.y = std::max(r.max.y, p.y);
    }
    double sx = r.max.x - r.min.x;
    double sy = r.max.y - r.min.y;
    r.normalized.reserve(pts.size());
    for (const auto& p : pts)
        r.normalized.push_back({sx > 0.0 ? (p.x - r.min.x) / sx : 0.5,
                                sy > 0.0 ? (p.y - r.min.y) / sy : 0.5});
    return r;
}

// --- t-SNE ---------------------------------------------------------------

namespace detail {

inline Matrix pairwise_sq_dist(const Matrix& x) {
    const std::size_t n = x.rows();
    Matrix d(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < x.cols(); ++k) {
                double diff = x(i, k) - x(j, k);
                s += diff * diff;
            }
            d(i, j) = s;
            d(j, i) = s;
        }
    return d;
}

}  // namespace detail

// Symmetric input affinities with per-point bandwidth binary-searched so each
// row's entropy hits log(perplexity) within 1e-5 (at most 50 steps).
inline Matrix tsne_input_affinities(const Matrix& x, double perplexity) {
    const std::size_t n = x.rows();
    if (n < 4) throw ValidationError("t-SNE needs at least 4 points");
    if (perplexity < 1.0 || perplexity >= static_cast<double>(n))
        throw ValidationError("perplexity must be in [1, point count)");

    Matrix d2 = detail::pairwise_sq_dist(x);
    Matrix p(n, n);
    const double log_perp = std::log(perplexity);
    std::vector<double> row(n);

    for (std::size_t i = 0; i < n; ++i) {
        double beta = 1.0, beta_lo = -std::numeric_limits<double>::infinity(),
               beta_hi = std::numeric_limits<double>::infinity();
        for (int step = 0; step < 50; ++step) {
            double sum = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                row[j] = j == i ? 0.0 : std::exp(-d2(i, j) * beta);
                sum += row[j];
            }
            double entropy;
            if (sum <= 0.0) {
                entropy = 0.0;
            } else {
                // H = log(sum) + beta * E[d2]
                double wd = 0.0;
                for (std::size_t j = 0; j < n; ++j) wd += row[j] * d2(i, j);
                entropy = std::log(sum) + beta * wd / sum;
            }
            double diff = entropy - log_perp;
            if (std::fabs(diff) < 1e-5) break;
            if (diff > 0.0) {
                beta_lo = beta;
                beta = std::isinf(beta_hi) ? beta * 2.0 : (beta + beta_hi) / 2.0;
            } else {
                beta_hi = beta;
                beta = std::isinf(beta_lo) ? beta / 2.0 : (beta + beta_lo) / 2.0;
            }
        }
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            row[j] = j == i ? 0.0 : std::exp(-d2(i, j) * beta);
            sum += row[j];
        }
        for (std::size_t j = 0; j < n; ++j) p(i, j) = sum > 0.0 ? row[j] / sum : 0.0;
    }

    // Symmetrize and normalize over all pairs.
    Matrix sym(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            sym(i, j) = std::max((p(i, j) + p(j, i)) / (2.0 * static_cast<double>(n)), 1e-12);
    for (std::size_t i = 0; i < n; ++i) sym(i, i) = 1e-12;
    return sym;
}

struct TsneObjective {
    double kl = 0.0;
    Matrix grad;  // same shape as Y
};

// KL(P || Q) and its gradient wrt Y under Student-t low-dimensional
// affinities. Exposed so tests can check the gradient by finite differences.
inline TsneObjective tsne_kl_and_grad(const Matrix& p, const Matrix& y) {
    const std::size_t n = y.rows();
    Matrix num(n, n);
    double denom = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < y.cols(); ++k) {
                double diff = y(i, k) - y(j, k);
                s += diff * diff;
            }
            double q = 1.0 / (1.0 + s);
            num(i, j) = q;
            num(j, i) = q;
            denom += 2.0 * q;
        }

    TsneObjective obj;
    obj.grad = Matrix(n, y.cols());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            double q = std::max(num(i, j) / denom, 1e-12);
            obj.kl += p(i, j) * std::log(p(i, j) / q);
            double mult = 4.0 * (p(i, j) - q) * num(i, j);
            for (std::size_t k = 0; k < y.cols(); ++k)
                obj.grad(i, k) += mult * (y(i, k) - y(j, k));
        }
    return obj;
}

struct TsneResult {
    std::vector<Vec2> points;
    std::vector<double> kl_curve;  // true (non-exaggerated) KL each iteration
};

struct TsneParams {
    double perplexity = 30.0;
    int iterations = 1000;
    std::uint64_t seed = 1;
    double learning_rate = 200.0;
    int exaggeration_end = 250;     // early exaggeration factor 12 until here
    double exaggeration = 12.0;
    int momentum_switch = 250;      // momentum 0.5 before, 0.8 after
};

inline TsneResult fit_tsne(const Matrix& x, const TsneParams& params) {
    if (params.iterations < 1) throw ValidationError("t-SNE iterations must be >= 1");
    const std::size_t n = x.rows();
    Matrix p = tsne_input_affinities(x, params.perplexity);

    Rng rng(params.seed);
    Matrix y(n, 2);
    for (double& v : y.data()) v = rng.normal() * 1e-4;
    Matrix velocity(n, 2);
    Matrix p_ex = p;
    for (double& v : p_ex.data()) v *= params.exaggeration;

    TsneResult result;
    for (int it = 0; it < params.iterations; ++it) {
        bool exaggerated = it < params.exaggeration_end;
        auto obj = tsne_kl_and_grad(exaggerated ? p_ex : p, y);
        double momentum = it < params.momentum_switch ? 0.5 : 0.8;
        for (std::size_t i = 0; i < y.data().size(); ++i) {
            velocity.data()[i] =
                momentum * velocity.data()[i] - params.learning_rate * obj.grad.data()[i];
            y.data()[i] += velocity.data()[i];
        }
        // Keep the embedding centered.
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mx += y(i, 0);
            my += y(i, 1);
        }
        mx /= static_cast<double>(n);
        my /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            y(i, 0) -= mx;
            y(i, 1) -= my;
        }
        double kl = exaggerated ? tsne_kl_and_grad(p, y).kl : obj.kl;
        if (!std::isfinite(kl)) throw NumericError("t-SNE KL divergence became non-finite");
        result.kl_curve.push_back(kl);
    }
    result.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) result.points.push_back({y(i, 0), y(i, 1)});
    return result;
}

inline TsneResult fit_tsne(const Matrix& x, double perplexity, int iterations,
                           std::uint64_t seed) {
    TsneParams p;
    p.perplexity = perplexity;
    p.iterations = iterations;
    p.seed = seed;
    return fit_tsne(x, p);
}

}  // namespace ideascope
