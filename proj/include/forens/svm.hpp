#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <deque>
#include <string>
#include <unordered_map>
#include <vector>

#include "forens/errors.hpp"
#include "forens/rng.hpp"

namespace forens {

enum class KernelKind { RBF, POLY };

inline const char* kernel_kind_name(KernelKind k) { return k == KernelKind::RBF ? "RBF" : "POLY"; }

inline KernelKind parse_kernel_kind(const std::string& s) {
    if (s == "RBF" || s == "rbf") return KernelKind::RBF;
    if (s == "POLY" || s == "poly") return KernelKind::POLY;
    throw ParseError("unknown kernel kind '" + s + "' (RBF or POLY)");
}

struct KernelSpec {
    KernelKind kind = KernelKind::RBF;
    double gamma = 1.0;
    int degree = 3;    // POLY only
    double coef0 = 0.0; // POLY only
};

// RBF: exp(-gamma * ||a-b||^2); POLY: (gamma * <a,b> + coef0)^degree
inline double kernel_eval(const KernelSpec& k, const std::vector<double>& a,
                          const std::vector<double>& b) {
    if (a.size() != b.size()) throw DimensionMismatch("kernel_eval: dimension mismatch");
    if (k.kind == KernelKind::RBF) {
        double d2 = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double d = a[i] - b[i];
            d2 += d * d;
        }
        return std::exp(-k.gamma * d2);
    }
    double dot = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
    return std::pow(k.gamma * dot + k.coef0, k.degree);
}

// Per-dimension z-score parameters. Dimensions with vanishing spread get
// scale 1 so the feature passes through centered.
struct ScalerParams {
    std::vector<double> mean;
    std::vector<double> scale;

    std::vector<double> apply(const std::vector<double>& x) const {
        if (x.size() != mean.size()) throw DimensionMismatch("scaler: dimension mismatch");
        std::vector<double> out(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - mean[i]) / scale[i];
        return out;
    }
};

inline ScalerParams fit_scaler(const std::vector<std::vector<double>>& samples) {
    if (samples.size() < 2) throw TooFewSamples("fit_scaler: need at least 2 samples");
    const std::size_t d = samples[0].size();
    for (const auto& s : samples)
        if (s.size() != d) throw DimensionMismatch("fit_scaler: ragged sample dimensions");
    ScalerParams p;
    p.mean.assign(d, 0.0);
    p.scale.assign(d, 1.0);
    const double n = static_cast<double>(samples.size());
    for (const auto& s : samples)
        for (std::size_t i = 0; i < d; ++i) p.mean[i] += s[i];
    for (std::size_t i = 0; i < d; ++i) p.mean[i] /= n;
    for (std::size_t i = 0; i < d; ++i) {
        double acc = 0.0;
        for (const auto& s : samples) {
            const double dd = s[i] - p.mean[i];
            acc += dd * dd;
        }
        const double sd = std::sqrt(acc / n); // population std
        p.scale[i] = (sd < 1e-12) ? 1.0 : sd;
    }
    return p;
}

// Binary labels: pristine = -1, tampered = +1.
inline constexpr int kPristineLabel = -1;
inline constexpr int kTamperedLabel = +1;

struct SvmModel {
    std::string method_id; // extracting method, or "RAW" for plain vectors
    KernelSpec kernel;
    double c = 1.0;
    std::uint64_t seed = 0;
    ScalerParams scaler;
    std::vector<std::vector<double>> support_vectors; // stored in scaled space
    std::vector<double> dual_coeffs;                  // alpha_i * y_i
    double bias = 0.0;

    std::size_t dims() const { return scaler.mean.size(); }

    double decision_value(const std::vector<double>& x) const {
        const std::vector<double> xs = scaler.apply(x);
        double f = bias;
        for (std::size_t i = 0; i < support_vectors.size(); ++i)
            f += dual_coeffs[i] * kernel_eval(kernel, support_vectors[i], xs);
        return f;
    }

    // 0 <= alpha <= C and sum(alpha_i y_i) = 0 within tolerance.
    bool dual_feasible(double box_slack = 1e-9, double eq_tol = 1e-6) const {
        double sum = 0.0;
        for (double dc : dual_coeffs) {
            if (std::abs(dc) > c + box_slack) return false;
            sum += dc;
        }
        return std::abs(sum) <= eq_tol;
    }
};

struct Prediction {
    int label;            // -1 pristine, +1 tampered
    double decision_value;
};

// label = tampered iff decision value > 0; a tie resolves to pristine.
inline Prediction predict(const SvmModel& model, const std::vector<double>& x) {
    const double f = model.decision_value(x);
    return Prediction{f > 0.0 ? kTamperedLabel : kPristineLabel, f};
}

struct TrainOptions {
    double tol = 1e-3;      // KKT tolerance
    int max_epochs = 10000; // full passes over the data before NonConvergence
    std::uint64_t seed = 0; // working-pair selection
};

namespace detail {

// Kernel values between training rows. Small problems get the full matrix;
// large ones fall back to an on-demand row cache with FIFO eviction.
class KernelCache {
public:
    KernelCache(const std::vector<std::vector<double>>& x, const KernelSpec& k,
                std::size_t full_matrix_limit = 2048, std::size_t max_cached_rows = 1024)
        : x_(x), k_(k), n_(x.size()), full_(n_ <= full_matrix_limit),
          max_rows_(std::max<std::size_t>(8, max_cached_rows)) {
        diag_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) diag_[i] = kernel_eval(k_, x_[i], x_[i]);
        if (full_) {
            matrix_.resize(n_ * n_);
            for (std::size_t i = 0; i < n_; ++i) {
                matrix_[i * n_ + i] = diag_[i];
                for (std::size_t j = i + 1; j < n_; ++j) {
                    const double v = kernel_eval(k_, x_[i], x_[j]);
                    matrix_[i * n_ + j] = v;
                    matrix_[j * n_ + i] = v;
                }
            }
        }
    }

    double diag(std::size_t i) const { return diag_[i]; }

    // Returns a row pointer valid until the next row() call that is not one of
    // the two most recently requested rows.
    const double* row(std::size_t i) {
        if (full_) return &matrix_[i * n_];
        auto it = rows_.find(i);
        if (it == rows_.end()) {
            std::vector<double> r(n_);
            for (std::size_t j = 0; j < n_; ++j) r[j] = kernel_eval(k_, x_[i], x_[j]);
            it = rows_.emplace(i, std::move(r)).first;
            fifo_.push_back(i);
            while (rows_.size() > max_rows_) {
                const std::size_t victim = fifo_.front();
                fifo_.pop_front();
                if (victim == i || victim == last_) continue; // keep the working pair
                rows_.erase(victim);
            }
        }
        last_ = i;
        return it->second.data();
    }

private:
    const std::vector<std::vector<double>>& x_;
    KernelSpec k_;
    std::size_t n_;
    bool full_;
    std::vector<double> matrix_;
    std::vector<double> diag_;
    std::unordered_map<std::size_t, std::vector<double>> rows_;
    std::deque<std::size_t> fifo_;
    std::size_t max_rows_;
    std::size_t last_ = static_cast<std::size_t>(-1);
};

// Platt-style SMO over the scaled training set.
class SmoSolver {
public:
    SmoSolver(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
              const KernelSpec& kernel, double c, const TrainOptions& opt)
        : x_(x), y_(y), c_(c), tol_(opt.tol), max_epochs_(opt.max_epochs),
          rng_(derive_seed(opt.seed, 0x534d4fu)), cache_(x, kernel) {
        n_ = x.size();
        alpha_.assign(n_, 0.0);
        errors_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) errors_[i] = -static_cast<double>(y_[i]);
        bias_ = 0.0;
    }

    void solve() {
        bool examine_all = true;
        int num_changed = 0;
        int epochs = 0;
        while (num_changed > 0 || examine_all) {
            num_changed = 0;
            if (examine_all) {
                for (std::size_t i = 0; i < n_; ++i) num_changed += examine(i);
            } else {
                for (std::size_t i = 0; i < n_; ++i)
                    if (alpha_[i] > 0.0 && alpha_[i] < c_) num_changed += examine(i);
            }
            if (++epochs > max_epochs_) {
                char buf[64];
                std::snprintf(buf, sizeof(buf), "%.6g", max_kkt_violation());
                throw NonConvergence("SMO hit the epoch cap; max KKT violation " +
                                     std::string(buf));
            }
            if (examine_all)
                examine_all = false;
            else if (num_changed == 0)
                examine_all = true;
        }
        finalize_bias();
    }

    // Platt's incremental b can drift when every alpha ends up at a bound;
    // recompute it from the KKT conditions on the final alphas.
    void finalize_bias() {
        const double eps = 1e-12;
        double unbounded_sum = 0.0, lower = -1e300, upper = 1e300;
        std::size_t unbounded = 0;
        for (std::size_t i = 0; i < n_; ++i) {
            const double u = errors_[i] + y_[i] - bias_; // expansion without bias
            const double target = y_[i] - u;
            if (alpha_[i] > eps && alpha_[i] < c_ - eps) {
                unbounded_sum += target;
                ++unbounded;
            } else if (alpha_[i] <= eps) {
                // y_i f(x_i) >= 1
                if (y_[i] > 0) lower = std::max(lower, target);
                else upper = std::min(upper, target);
            } else {
                // y_i f(x_i) <= 1
                if (y_[i] > 0) upper = std::min(upper, target);
                else lower = std::max(lower, target);
            }
        }
        double b_new = bias_;
        if (unbounded > 0)
            b_new = unbounded_sum / static_cast<double>(unbounded);
        else if (lower > -1e299 && upper < 1e299)
            b_new = 0.5 * (lower + upper);
        else if (lower > -1e299)
            b_new = lower;
        else if (upper < 1e299)
            b_new = upper;
        const double db = b_new - bias_;
        for (std::size_t i = 0; i < n_; ++i) errors_[i] += db;
        bias_ = b_new;
    }

    double max_kkt_violation() const {
        double worst = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            const double r = errors_[i] * y_[i];
            if (alpha_[i] < c_) worst = std::max(worst, -r);
            if (alpha_[i] > 0.0) worst = std::max(worst, r);
        }
        return worst;
    }

    const std::vector<double>& alphas() const { return alpha_; }
    double bias() const { return bias_; }

private:
    int examine(std::size_t i2) {
        const double y2 = y_[i2];
        const double a2 = alpha_[i2];
        const double e2 = errors_[i2];
        const double r2 = e2 * y2;
        const bool violates = (r2 < -tol_ && a2 < c_) || (r2 > tol_ && a2 > 0.0);
        if (!violates) return 0;

        // heuristic 1: maximize |E1 - E2| over the non-bound set
        std::size_t best = n_;
        double best_gap = -1.0;
        for (std::size_t i = 0; i < n_; ++i) {
            if (alpha_[i] <= 0.0 || alpha_[i] >= c_) continue;
            const double gap = std::abs(errors_[i] - e2);
            if (gap > best_gap) {
                best_gap = gap;
                best = i;
            }
        }
        if (best < n_ && take_step(best, i2)) return 1;

        // heuristic 2: sweep the non-bound set from a random start
        std::size_t start = static_cast<std::size_t>(rng_.below(n_));
        for (std::size_t k = 0; k < n_; ++k) {
            const std::size_t i1 = (start + k) % n_;
            if (alpha_[i1] > 0.0 && alpha_[i1] < c_ && take_step(i1, i2)) return 1;
        }
        // heuristic 3: sweep everything from a random start
        start = static_cast<std::size_t>(rng_.below(n_));
        for (std::size_t k = 0; k < n_; ++k) {
            const std::size_t i1 = (start + k) % n_;
            if (take_step(i1, i2)) return 1;
        }
        return 0;
    }

    bool take_step(std::size_t i1, std::size_t i2) {
        if (i1 == i2) return false;
        const double a1 = alpha_[i1], a2 = alpha_[i2];
        const double y1 = y_[i1], y2 = y_[i2];
        const double e1 = errors_[i1], e2 = errors_[i2];
        const double s = y1 * y2;

        double lo, hi;
        if (y1 != y2) {
            lo = std::max(0.0, a2 - a1);
            hi = std::min(c_, c_ + a2 - a1);
        } else {
            lo = std::max(0.0, a1 + a2 - c_);
            hi = std::min(c_, a1 + a2);
        }
        if (lo >= hi) return false;

        const double k11 = cache_.diag(i1);
        const double k22 = cache_.diag(i2);
        const double k12 = cache_.row(i1)[i2];
        const double eta = k11 + k22 - 2.0 * k12;

        double a2_new;
        if (eta > 0.0) {
            a2_new = a2 + y2 * (e1 - e2) / eta;
            a2_new = std::min(hi, std::max(lo, a2_new));
        } else {
            // flat or concave direction: evaluate the dual objective at both ends
            const double u1 = e1 + y1 - bias_; // kernel expansion at i1
            const double u2 = e2 + y2 - bias_;
            const double v1 = u1 - a1 * y1 * k11 - a2 * y2 * k12;
            const double v2 = u2 - a1 * y1 * k12 - a2 * y2 * k22;
            auto objective = [&](double a2v) {
                const double a1v = a1 + s * (a2 - a2v);
                return 0.5 * k11 * a1v * a1v + 0.5 * k22 * a2v * a2v + s * k12 * a1v * a2v +
                       y1 * a1v * v1 + y2 * a2v * v2 - a1v - a2v;
            };
            const double lo_obj = objective(lo);
            const double hi_obj = objective(hi);
            if (lo_obj < hi_obj - 1e-12)
                a2_new = lo;
            else if (lo_obj > hi_obj + 1e-12)
                a2_new = hi;
            else
                return false;
        }
        if (std::abs(a2_new - a2) < 1e-10 * (a2_new + a2 + 1e-10)) return false;

        double a1_new = a1 + s * (a2 - a2_new);
        if (a1_new < 0.0) {
            a2_new += s * a1_new;
            a1_new = 0.0;
        } else if (a1_new > c_) {
            a2_new += s * (a1_new - c_);
            a1_new = c_;
        }

        const double d1 = y1 * (a1_new - a1);
        const double d2 = y2 * (a2_new - a2);
        const double b1 = bias_ - e1 - d1 * k11 - d2 * k12;
        const double b2 = bias_ - e2 - d1 * k12 - d2 * k22;
        double b_new;
        if (a1_new > 0.0 && a1_new < c_)
            b_new = b1;
        else if (a2_new > 0.0 && a2_new < c_)
            b_new = b2;
        else
            b_new = 0.5 * (b1 + b2);

        const double* row1 = cache_.row(i1);
        const double* row2 = cache_.row(i2);
        const double db = b_new - bias_;
        for (std::size_t k = 0; k < n_; ++k) errors_[k] += d1 * row1[k] + d2 * row2[k] + db;

        alpha_[i1] = a1_new;
        alpha_[i2] = a2_new;
        bias_ = b_new;
        return true;
    }

    const std::vector<std::vector<double>>& x_;
    const std::vector<int>& y_;
    double c_;
    double tol_;
    int max_epochs_;
    Rng rng_;
    KernelCache cache_;
    std::size_t n_ = 0;
    std::vector<double> alpha_;
    std::vector<double> errors_; // E_i = f(x_i) - y_i
    double bias_ = 0.0;
};

} // namespace detail

// Soft-margin SMO training. The z-score scaler is fitted on the training set
// and embedded in the returned model; labels are -1 (pristine) / +1 (tampered).
inline SvmModel train_svm(const std::vector<std::vector<double>>& samples,
                          const std::vector<int>& labels, const KernelSpec& kernel, double c,
                          const TrainOptions& opt = {}) {
    if (samples.size() != labels.size())
        throw DimensionMismatch("train_svm: samples/labels length mismatch");
    if (samples.empty()) throw TooFewSamples("train_svm: empty training set");
    bool has_pos = false, has_neg = false;
    for (int y : labels) {
        if (y == kTamperedLabel) has_pos = true;
        else if (y == kPristineLabel) has_neg = true;
        else throw Error("train_svm: labels must be -1 or +1");
    }
    if (!has_pos || !has_neg)
        throw SingleClassTrainingSet("train_svm: need at least one sample of each class");

    SvmModel model;
    model.kernel = kernel;
    model.c = c;
    model.seed = opt.seed;
    model.scaler = fit_scaler(samples);
    std::vector<std::vector<double>> scaled;
    scaled.reserve(samples.size());
    for (const auto& s : samples) scaled.push_back(model.scaler.apply(s));

    detail::SmoSolver solver(scaled, labels, kernel, c, opt);
    solver.solve();

    const std::vector<double>& alpha = solver.alphas();
    for (std::size_t i = 0; i < scaled.size(); ++i) {
        if (alpha[i] > 1e-12) {
            model.support_vectors.push_back(scaled[i]);
            model.dual_coeffs.push_back(alpha[i] * labels[i]);
        }
    }
    model.bias = solver.bias();
    return model;
}

} // namespace forens
