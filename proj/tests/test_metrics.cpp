#include <catch2/catch_amalgamated.hpp>

#include "forens/metrics.hpp"
#include "forens/rng.hpp"

using namespace forens;

namespace {

// brute-force confusion-matrix oracle, written separately from the library
struct OracleResult {
    double accuracy_pct;
    double prec[2], rec[2], f1[2];
    double macro_f1;
    bool degenerate;
};

OracleResult metrics_oracle(const std::vector<int>& pred, const std::vector<int>& truth) {
    OracleResult r{};
    std::size_t correct = 0;
    for (std::size_t i = 0; i < pred.size(); ++i)
        if (pred[i] == truth[i]) ++correct;
    r.accuracy_pct = 100.0 * static_cast<double>(correct) / static_cast<double>(pred.size());
    const int classes[2] = {kPristineLabel, kTamperedLabel};
    for (int c = 0; c < 2; ++c) {
        std::size_t tp = 0, predicted = 0, actual = 0;
        for (std::size_t i = 0; i < pred.size(); ++i) {
            if (pred[i] == classes[c]) ++predicted;
            if (truth[i] == classes[c]) ++actual;
            if (pred[i] == classes[c] && truth[i] == classes[c]) ++tp;
        }
        r.prec[c] = predicted ? static_cast<double>(tp) / predicted : 0.0;
        r.rec[c] = actual ? static_cast<double>(tp) / actual : 0.0;
        r.f1[c] = (r.prec[c] + r.rec[c]) > 0 ? 2 * r.prec[c] * r.rec[c] / (r.prec[c] + r.rec[c])
                                             : 0.0;
        if (r.prec[c] == 0.0 && r.rec[c] == 0.0) r.degenerate = true;
    }
    r.macro_f1 = (r.f1[0] + r.f1[1]) / 2.0;
    return r;
}

} // namespace

TEST_CASE("all correct on a balanced set") {
    std::vector<int> truth, pred;
    for (int i = 0; i < 50; ++i) {
        truth.push_back(kPristineLabel);
        truth.push_back(kTamperedLabel);
    }
    pred = truth;
    const MetricsCore m = compute_metrics(pred, truth);
    CHECK(m.accuracy_pct == 100.0);
    CHECK(m.macro_f1 == 1.0);
    CHECK_FALSE(m.degenerate);
}

TEST_CASE("all predicted pristine on a balanced set: the asterisk case") {
    std::vector<int> truth, pred;
    for (int i = 0; i < 50; ++i) {
        truth.push_back(kPristineLabel);
        truth.push_back(kTamperedLabel);
    }
    pred.assign(100, kPristineLabel);
    const MetricsCore m = compute_metrics(pred, truth);
    CHECK(m.accuracy_pct == 50.0);
    CHECK(m.pristine.f1 == Catch::Approx(2.0 / 3.0));
    CHECK(m.tampered.f1 == 0.0);
    CHECK(m.macro_f1 == Catch::Approx(1.0 / 3.0));
    CHECK(m.degenerate);
}

TEST_CASE("exactly inverted predictions on a balanced set") {
    std::vector<int> truth, pred;
    for (int i = 0; i < 50; ++i) {
        truth.push_back(kPristineLabel);
        truth.push_back(kTamperedLabel);
    }
    for (int t : truth) pred.push_back(-t);
    const MetricsCore m = compute_metrics(pred, truth);
    CHECK(m.accuracy_pct == 0.0);
    CHECK(m.macro_f1 == 0.0);
}

TEST_CASE("macro F1 is the unweighted mean of the class F1 scores") {
    Rng rng(1);
    for (int t = 0; t < 50; ++t) {
        std::vector<int> truth, pred;
        const std::size_t n = 2 + rng.below(50);
        for (std::size_t i = 0; i < n; ++i) {
            truth.push_back(rng.unit() < 0.5 ? kPristineLabel : kTamperedLabel);
            pred.push_back(rng.unit() < 0.5 ? kPristineLabel : kTamperedLabel);
        }
        const MetricsCore m = compute_metrics(pred, truth);
        REQUIRE(m.macro_f1 ==
                Catch::Approx(0.5 * (m.pristine.f1 + m.tampered.f1)).margin(1e-12));
    }
}

TEST_CASE("compute_metrics matches the brute-force oracle on 1000 random vectors") {
    Rng rng(77);
    for (int t = 0; t < 1000; ++t) {
        const std::size_t n = 1 + rng.below(40);
        std::vector<int> truth, pred;
        for (std::size_t i = 0; i < n; ++i) {
            truth.push_back(rng.unit() < 0.5 ? kPristineLabel : kTamperedLabel);
            pred.push_back(rng.unit() < 0.5 ? kPristineLabel : kTamperedLabel);
        }
        const MetricsCore m = compute_metrics(pred, truth);
        const OracleResult o = metrics_oracle(pred, truth);
        REQUIRE(m.accuracy_pct == o.accuracy_pct);
        REQUIRE(m.pristine.precision == o.prec[0]);
        REQUIRE(m.pristine.recall == o.rec[0]);
        REQUIRE(m.tampered.precision == o.prec[1]);
        REQUIRE(m.tampered.recall == o.rec[1]);
        REQUIRE(m.macro_f1 == o.macro_f1);
        REQUIRE(m.degenerate == o.degenerate);
    }
}

TEST_CASE("degenerate flag fires when a class is never predicted") {
    Rng rng(88);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 2 + rng.below(30);
        std::vector<int> truth;
        truth.push_back(kPristineLabel); // both classes present
        truth.push_back(kTamperedLabel);
        for (std::size_t i = 2; i < n; ++i)
            truth.push_back(rng.unit() < 0.5 ? kPristineLabel : kTamperedLabel);
        const int only = rng.unit() < 0.5 ? kPristineLabel : kTamperedLabel;
        const std::vector<int> pred(truth.size(), only);
        REQUIRE(compute_metrics(pred, truth).degenerate);
    }
}

TEST_CASE("metrics input validation") {
    REQUIRE_THROWS_AS(compute_metrics({1, -1}, {1}), LengthMismatch);
    REQUIRE_THROWS_AS(compute_metrics({}, {}), EmptyInput);
}
