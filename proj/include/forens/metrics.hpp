#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "forens/errors.hpp"
#include "forens/svm.hpp"

namespace forens {

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// §-style conventions: a precision or recall with zero denominator is 0, an F1
// with zero precision+recall is 0, and a run is degenerate when some class has
// precision = 0 and recall = 0 (the tables' asterisk).
struct MetricsCore {
    double accuracy_pct = 0.0;
    double macro_f1 = 0.0;
    ClassMetrics pristine;
    ClassMetrics tampered;
    bool degenerate = false;
};

inline MetricsCore compute_metrics(const std::vector<int>& predictions,
                                   const std::vector<int>& labels) {
    if (predictions.size() != labels.size())
        throw LengthMismatch("compute_metrics: predictions/labels length mismatch");
    if (predictions.empty()) throw EmptyInput("compute_metrics: empty input");

    std::size_t correct = 0;
    // confusion counts per class c: tp = predicted c and true c
    std::size_t tp[2] = {0, 0}, fp[2] = {0, 0}, fn[2] = {0, 0};
    auto cls_index = [](int label) { return label == kPristineLabel ? 0 : 1; };
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const int p = cls_index(predictions[i]);
        const int t = cls_index(labels[i]);
        if (p == t) {
            ++correct;
            ++tp[p];
        } else {
            ++fp[p];
            ++fn[t];
        }
    }

    MetricsCore out;
    out.accuracy_pct = 100.0 * static_cast<double>(correct) /
                       static_cast<double>(predictions.size());
    ClassMetrics* per_class[2] = {&out.pristine, &out.tampered};
    for (int c = 0; c < 2; ++c) {
        ClassMetrics& m = *per_class[c];
        const double denom_p = static_cast<double>(tp[c] + fp[c]);
        const double denom_r = static_cast<double>(tp[c] + fn[c]);
        m.precision = denom_p > 0.0 ? static_cast<double>(tp[c]) / denom_p : 0.0;
        m.recall = denom_r > 0.0 ? static_cast<double>(tp[c]) / denom_r : 0.0;
        m.f1 = (m.precision + m.recall > 0.0)
                   ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                   : 0.0;
        if (m.precision == 0.0 && m.recall == 0.0) out.degenerate = true;
    }
    out.macro_f1 = 0.5 * (out.pristine.f1 + out.tampered.f1);
    return out;
}

// One evaluation run, with enough provenance to replay it.
struct EvaluationReport {
    std::string set_id;
    std::string method;
    std::string train_id;
    std::string test_id;
    MetricsCore metrics;
    KernelSpec kernel;
    double c = 0.0;
    std::uint64_t seed = 0;
    double split_fraction = 0.0;
    int folds = 0;
    std::string note; // "mean of 3", nonconvergence flags, ...
};

} // namespace forens
