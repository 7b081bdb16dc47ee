#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "forens/rng.hpp"
#include "forens/svm.hpp"
#include "forens/svm_io.hpp"
#include "support/qp_oracle.hpp"

using namespace forens;

namespace {

struct Dataset {
    std::vector<std::vector<double>> x;
    std::vector<int> y;
};

Dataset random_dataset(Rng& rng, std::size_t n, std::size_t dims, double separation) {
    Dataset d;
    for (std::size_t i = 0; i < n; ++i) {
        const int label = (i % 2 == 0) ? kPristineLabel : kTamperedLabel;
        std::vector<double> x(dims);
        for (auto& v : x) v = rng.normal() + (label > 0 ? separation : -separation);
        d.x.push_back(std::move(x));
        d.y.push_back(label);
    }
    return d;
}

qporacle::KernelParams oracle_params(const KernelSpec& k) {
    qporacle::KernelParams p;
    p.rbf = k.kind == KernelKind::RBF;
    p.gamma = k.gamma;
    p.degree = k.degree;
    p.coef0 = k.coef0;
    return p;
}

} // namespace

TEST_CASE("fit_scaler hand-checked cases") {
    SECTION("{(0,), (2,)} -> mean 1, scale 1") {
        const ScalerParams p = fit_scaler({{0.0}, {2.0}});
        CHECK(p.mean[0] == Catch::Approx(1.0));
        CHECK(p.scale[0] == Catch::Approx(1.0));
    }
    SECTION("identical samples get unit scale") {
        const ScalerParams p = fit_scaler({{5.0, -3.0}, {5.0, -3.0}, {5.0, -3.0}});
        CHECK(p.scale[0] == 1.0);
        CHECK(p.scale[1] == 1.0);
        CHECK(p.mean[0] == Catch::Approx(5.0));
    }
    SECTION("{(1,10),(3,10),(5,10)} -> mean (3,10), scale (1.633,1)") {
        const ScalerParams p = fit_scaler({{1.0, 10.0}, {3.0, 10.0}, {5.0, 10.0}});
        CHECK(p.mean[0] == Catch::Approx(3.0));
        CHECK(p.mean[1] == Catch::Approx(10.0));
        CHECK(p.scale[0] == Catch::Approx(1.632993).margin(1e-5));
        CHECK(p.scale[1] == 1.0);
    }
    SECTION("errors") {
        REQUIRE_THROWS_AS(fit_scaler({{1.0}}), TooFewSamples);
        REQUIRE_THROWS_AS(fit_scaler({{1.0}, {1.0, 2.0}}), DimensionMismatch);
    }
}

TEST_CASE("kernel_eval hand-checked cases") {
    KernelSpec rbf{KernelKind::RBF, 0.5, 3, 0.0};
    SECTION("RBF at identical points is 1") {
        CHECK(kernel_eval(rbf, {1.0, 2.0}, {1.0, 2.0}) == 1.0);
    }
    SECTION("RBF gamma 0.5 at distance 2 is exp(-2)") {
        CHECK(kernel_eval(rbf, {0.0, 0.0}, {2.0, 0.0}) ==
              Catch::Approx(0.1353352832).margin(1e-9));
    }
    SECTION("POLY degree 1 is the dot product") {
        KernelSpec poly{KernelKind::POLY, 1.0, 1, 0.0};
        CHECK(kernel_eval(poly, {1.0, 2.0}, {3.0, 4.0}) == Catch::Approx(11.0));
    }
    SECTION("kernel symmetry and RBF bounds") {
        Rng rng(31);
        KernelSpec k{KernelKind::RBF, 0.7, 3, 0.0};
        for (int t = 0; t < 100; ++t) {
            std::vector<double> a(4), b(4);
            for (auto& v : a) v = rng.normal();
            for (auto& v : b) v = rng.normal();
            const double kab = kernel_eval(k, a, b);
            REQUIRE(kab == kernel_eval(k, b, a));
            REQUIRE(kab > 0.0);
            REQUIRE(kab <= 1.0);
        }
    }
    SECTION("dimension mismatch") {
        REQUIRE_THROWS_AS(kernel_eval(rbf, {1.0}, {1.0, 2.0}), DimensionMismatch);
    }
}

TEST_CASE("symmetric pair: boundary at 0, both points classified correctly") {
    KernelSpec poly{KernelKind::POLY, 1.0, 1, 0.0};
    const SvmModel model =
        train_svm({{-1.0}, {1.0}}, {kPristineLabel, kTamperedLabel}, poly, 10.0);
    CHECK(predict(model, {-1.0}).label == kPristineLabel);
    CHECK(predict(model, {1.0}).label == kTamperedLabel);
    // exact midpoint: decision 0 resolves to pristine
    const Prediction mid = predict(model, {0.0});
    CHECK(std::abs(mid.decision_value) < 1e-9);
    CHECK(mid.label == kPristineLabel);
    CHECK(model.dual_feasible());
}

TEST_CASE("XOR with RBF gamma 1, C 10: perfect training accuracy, matches QP oracle") {
    const std::vector<std::vector<double>> x = {{0, 0}, {1, 1}, {0, 1}, {1, 0}};
    const std::vector<int> y = {kPristineLabel, kPristineLabel, kTamperedLabel, kTamperedLabel};
    KernelSpec rbf{KernelKind::RBF, 1.0, 3, 0.0};
    TrainOptions opt;
    opt.tol = 1e-5;
    const SvmModel model = train_svm(x, y, rbf, 10.0, opt);
    for (std::size_t i = 0; i < x.size(); ++i) REQUIRE(predict(model, x[i]).label == y[i]);
    CHECK(model.dual_feasible());

    // oracle on the same scaled inputs
    const ScalerParams scaler = fit_scaler(x);
    std::vector<std::vector<double>> xs;
    for (const auto& v : x) xs.push_back(scaler.apply(v));
    const auto sol = qporacle::solve(xs, y, oracle_params(rbf), 10.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double oracle_f = qporacle::decision(sol, xs, y, oracle_params(rbf), xs[i]);
        REQUIRE(predict(model, x[i]).decision_value == Catch::Approx(oracle_f).margin(1e-3));
    }
}

TEST_CASE("SMO matches the projected-gradient QP oracle on random sets") {
    Rng rng(12345);
    for (int trial = 0; trial < 12; ++trial) {
        const std::size_t n = 6 + rng.below(24);
        Dataset d = random_dataset(rng, n, 3, trial % 2 == 0 ? 1.0 : 0.2);
        KernelSpec k;
        double c = (trial % 3 == 0) ? 1.0 : 10.0;
        if (trial % 2 == 0) {
            k.kind = KernelKind::RBF;
            k.gamma = 0.5;
        } else {
            k.kind = KernelKind::POLY;
            k.gamma = 0.1;
            k.degree = 2;
            k.coef0 = 1.0;
        }
        TrainOptions opt;
        opt.tol = 1e-5;
        const SvmModel model = train_svm(d.x, d.y, k, c, opt);
        REQUIRE(model.dual_feasible());

        const ScalerParams scaler = fit_scaler(d.x);
        std::vector<std::vector<double>> xs;
        for (const auto& v : d.x) xs.push_back(scaler.apply(v));
        const auto sol = qporacle::solve(xs, d.y, oracle_params(k), c);
        for (std::size_t i = 0; i < d.x.size(); ++i) {
            const double oracle_f = qporacle::decision(sol, xs, d.y, oracle_params(k), xs[i]);
            REQUIRE(predict(model, d.x[i]).decision_value ==
                    Catch::Approx(oracle_f).margin(1e-3));
        }
    }
}

TEST_CASE("training errors") {
    KernelSpec k;
    SECTION("single-class set") {
        REQUIRE_THROWS_AS(
            train_svm({{0.0}, {1.0}}, {kPristineLabel, kPristineLabel}, k, 1.0),
            SingleClassTrainingSet);
    }
    SECTION("ragged dimensions") {
        REQUIRE_THROWS_AS(
            train_svm({{0.0}, {1.0, 2.0}}, {kPristineLabel, kTamperedLabel}, k, 1.0),
            DimensionMismatch);
    }
    SECTION("epoch cap reports NonConvergence") {
        Rng rng(77);
        Dataset d = random_dataset(rng, 40, 2, 0.05); // heavily overlapped
        TrainOptions opt;
        opt.max_epochs = 1;
        opt.tol = 1e-9;
        KernelSpec rbf{KernelKind::RBF, 10.0, 3, 0.0};
        REQUIRE_THROWS_AS(train_svm(d.x, d.y, rbf, 1000.0, opt), NonConvergence);
    }
}

TEST_CASE("prediction is invariant under a uniform positive feature rescaling") {
    Rng rng(55);
    Dataset d = random_dataset(rng, 30, 4, 0.8);
    KernelSpec k{KernelKind::RBF, 0.3, 3, 0.0};
    const SvmModel base = train_svm(d.x, d.y, k, 10.0);

    const double factor = 37.5;
    Dataset scaled = d;
    for (auto& row : scaled.x)
        for (auto& v : row) v *= factor;
    const SvmModel rescaled = train_svm(scaled.x, scaled.y, k, 10.0);

    for (int t = 0; t < 50; ++t) {
        std::vector<double> q(4);
        for (auto& v : q) v = rng.normal();
        std::vector<double> qs = q;
        for (auto& v : qs) v *= factor;
        REQUIRE(predict(base, q).label == predict(rescaled, qs).label);
    }
}

TEST_CASE("training is deterministic given the seed") {
    Rng rng(66);
    Dataset d = random_dataset(rng, 26, 3, 0.4);
    KernelSpec k{KernelKind::RBF, 0.5, 3, 0.0};
    TrainOptions opt;
    opt.seed = 9;
    const SvmModel a = train_svm(d.x, d.y, k, 5.0, opt);
    const SvmModel b = train_svm(d.x, d.y, k, 5.0, opt);
    REQUIRE(a.dual_coeffs == b.dual_coeffs);
    REQUIRE(a.bias == b.bias);
    REQUIRE(a.support_vectors == b.support_vectors);
}

TEST_CASE("model files round-trip bit-exactly, text export mirrors them") {
    Rng rng(88);
    Dataset d = random_dataset(rng, 20, 3, 0.7);
    KernelSpec k{KernelKind::POLY, 0.2, 2, 1.0};
    SvmModel model = train_svm(d.x, d.y, k, 2.0);
    model.method_id = "DUA";

    const std::string bytes = serialize_model(model);
    const SvmModel back =
        deserialize_model(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size());
    CHECK(back.method_id == "DUA");
    CHECK(back.kernel.kind == KernelKind::POLY);
    CHECK(back.kernel.gamma == model.kernel.gamma);
    CHECK(back.kernel.degree == model.kernel.degree);
    CHECK(back.c == model.c);
    REQUIRE(back.support_vectors == model.support_vectors);
    REQUIRE(back.dual_coeffs == model.dual_coeffs);
    REQUIRE(back.bias == model.bias);
    REQUIRE(back.scaler.mean == model.scaler.mean);
    REQUIRE(back.scaler.scale == model.scaler.scale);

    const std::string text = model_text_export(model);
    CHECK(text.find("kernel: POLY") != std::string::npos);
    CHECK(text.find("method: DUA") != std::string::npos);

    REQUIRE_THROWS_AS(deserialize_model(reinterpret_cast<const std::uint8_t*>("JUNKJUNK"), 8),
                      CorruptStream);
}
