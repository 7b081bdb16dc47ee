// Acceptance suite: one criterion per section, one PASS/FAIL line each.
//
//   1. numeric kernels (DCT round trip/Parseval, Haar energy, LBP invariance)
//   2. SMO vs projected-gradient QP oracle
//   3. metrics vs brute-force confusion-matrix oracle
//   4. extractor golden vectors and constant-image analytics
//   5. end-to-end same-corpus runs on the frozen easy-forgery corpus
//   6. end-to-end cross-corpus degradation ordering
//   7. plan cardinality and report cell format
//   8. dataset-gated CASIA v1.0 reproduction (skips without data)
//
// --calibrate regenerates the frozen corpora and prints the measured
// same-corpus accuracies that the criterion-5 thresholds were derived from.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "forens/forens.hpp"
#include "support/qp_oracle.hpp"
#include "support/reference_extractors.hpp"
#include "support/test_images.hpp"

using namespace forens;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;
int g_jobs = 1;

void report(int criterion, const std::string& name, bool pass, const std::string& detail = "") {
    std::printf("[%s] criterion %d: %s%s%s\n", pass ? "PASS" : "FAIL", criterion, name.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

void report_skip(int criterion, const std::string& name, const std::string& why) {
    std::printf("[SKIP] criterion %d: %s -- %s\n", criterion, name.c_str(), why.c_str());
    std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------- 1
bool criterion1_numeric_kernels(std::string& detail) {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(1001);
    for (int t = 0; t < 1000; ++t) {
        std::vector<double> block(64);
        for (double& v : block) v = rng.uniform(-128.0, 128.0);
        const DctBlock d = dct2(block, 8);
        double energy = 0.0;
        for (double v : block) energy += v * v;
        if (std::abs(d.energy() - energy) > 1e-9 * std::max(1.0, energy)) {
            detail = "Parseval violation";
            return false;
        }
        const auto back = idct2(d);
        for (std::size_t i = 0; i < 64; ++i)
            if (std::abs(back[i] - block[i]) > 1e-9) {
                detail = "round-trip violation";
                return false;
            }
    }
    for (int t = 0; t < 1000; ++t) {
        const std::size_t w = 2 + rng.below(40), h = 2 + rng.below(40);
        ImagePlane p(w, h);
        for (double& s : p.samples) s = rng.uniform(-100.0, 100.0);
        const DwtBands bands = haar_dwt1(p);
        double truncated = 0.0;
        for (std::size_t y = 0; y < (h / 2) * 2; ++y)
            for (std::size_t x = 0; x < (w / 2) * 2; ++x) truncated += p.at(x, y) * p.at(x, y);
        const double total =
            bands.ll.energy() + bands.lh.energy() + bands.hl.energy() + bands.hh.energy();
        if (std::abs(total - truncated) > 1e-9 * std::max(1.0, truncated)) {
            detail = "Haar band energy violation";
            return false;
        }
    }
    for (int t = 0; t < 200; ++t) {
        const std::size_t w = 3 + rng.below(20), h = 3 + rng.below(20);
        ImagePlane p(w, h);
        for (double& s : p.samples) s = static_cast<double>(rng.below(256));
        const ImagePlane base = lbp_map(p);
        ImagePlane shifted = p, scaled = p;
        const double shift = rng.uniform(-40.0, 40.0);
        const double factor = rng.uniform(0.2, 4.0);
        for (double& s : shifted.samples) s += shift;
        for (double& s : scaled.samples) s *= factor;
        if (lbp_map(shifted).samples != base.samples ||
            lbp_map(scaled).samples != base.samples) {
            detail = "LBP invariance violation";
            return false;
        }
    }
    const double dt = seconds_since(t0);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.1fs (budget 10s)", dt);
    detail = buf;
    return dt < 10.0;
}

// ---------------------------------------------------------------------- 2
bool criterion2_smo_oracle(std::string& detail) {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(2002);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 6 + rng.below(25); // <= 30
        std::vector<std::vector<double>> x;
        std::vector<int> y;
        const double sep = rng.uniform(0.1, 1.2);
        for (std::size_t i = 0; i < n; ++i) {
            const int label = (i % 2 == 0) ? kPristineLabel : kTamperedLabel;
            std::vector<double> row(3);
            for (double& v : row) v = rng.normal() + (label > 0 ? sep : -sep);
            x.push_back(std::move(row));
            y.push_back(label);
        }
        KernelSpec k;
        if (trial % 2 == 0) {
            k.kind = KernelKind::RBF;
            k.gamma = rng.uniform(0.05, 1.0);
        } else {
            k.kind = KernelKind::POLY;
            k.gamma = rng.uniform(0.05, 0.5);
            k.degree = 2 + static_cast<int>(rng.below(2));
            k.coef0 = 1.0;
        }
        const double c = (trial % 3 == 0) ? 1.0 : 10.0;
        TrainOptions opt;
        opt.tol = 1e-5;
        opt.seed = derive_seed(2002, trial);
        const SvmModel model = train_svm(x, y, k, c, opt);
        if (!model.dual_feasible(1e-9, 1e-6)) {
            detail = "dual feasibility violated on trial " + std::to_string(trial);
            return false;
        }
        const ScalerParams scaler = fit_scaler(x);
        std::vector<std::vector<double>> xs;
        for (const auto& v : x) xs.push_back(scaler.apply(v));
        qporacle::KernelParams kp;
        kp.rbf = k.kind == KernelKind::RBF;
        kp.gamma = k.gamma;
        kp.degree = k.degree;
        kp.coef0 = k.coef0;
        const auto sol = qporacle::solve(xs, y, kp, c);
        for (std::size_t i = 0; i < n; ++i) {
            const double oracle_f = qporacle::decision(sol, xs, y, kp, xs[i]);
            const Prediction p = predict(model, x[i]);
            if (std::abs(p.decision_value - oracle_f) > 1e-3) {
                detail = "decision mismatch on trial " + std::to_string(trial);
                return false;
            }
            const int oracle_label = oracle_f > 0.0 ? kTamperedLabel : kPristineLabel;
            if (p.label != oracle_label) {
                detail = "label mismatch on trial " + std::to_string(trial);
                return false;
            }
        }
    }
    const double dt = seconds_since(t0);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "100 datasets, %.1fs (budget 60s)", dt);
    detail = buf;
    return dt < 60.0;
}

// ---------------------------------------------------------------------- 3
bool criterion3_metrics_oracle(std::string& detail) {
    Rng rng(3003);
    for (int t = 0; t < 1000; ++t) {
        const std::size_t n = 1 + rng.below(60);
        std::vector<int> truth, pred;
        for (std::size_t i = 0; i < n; ++i) {
            truth.push_back(rng.unit() < 0.5 ? kPristineLabel : kTamperedLabel);
            pred.push_back(rng.unit() < 0.5 ? kPristineLabel : kTamperedLabel);
        }
        const MetricsCore m = compute_metrics(pred, truth);

        // brute-force confusion matrix, independent path
        double prec[2], rec[2], f1[2];
        bool degenerate = false;
        std::size_t correct = 0;
        const int classes[2] = {kPristineLabel, kTamperedLabel};
        for (int c = 0; c < 2; ++c) {
            std::size_t tp = 0, predicted = 0, actual = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (pred[i] == truth[i] && c == 0) ++correct;
                if (pred[i] == classes[c]) ++predicted;
                if (truth[i] == classes[c]) ++actual;
                if (pred[i] == classes[c] && truth[i] == classes[c]) ++tp;
            }
            prec[c] = predicted ? static_cast<double>(tp) / predicted : 0.0;
            rec[c] = actual ? static_cast<double>(tp) / actual : 0.0;
            f1[c] = (prec[c] + rec[c]) > 0 ? 2 * prec[c] * rec[c] / (prec[c] + rec[c]) : 0.0;
            if (prec[c] == 0.0 && rec[c] == 0.0) degenerate = true;
        }
        const double acc = 100.0 * static_cast<double>(correct) / static_cast<double>(n);
        if (m.accuracy_pct != acc || m.pristine.precision != prec[0] ||
            m.pristine.recall != rec[0] || m.tampered.precision != prec[1] ||
            m.tampered.recall != rec[1] || m.macro_f1 != (f1[0] + f1[1]) / 2.0 ||
            m.degenerate != degenerate) {
            detail = "oracle mismatch at vector " + std::to_string(t);
            return false;
        }
    }
    detail = "1000 random vectors, exact agreement";
    return true;
}

// ---------------------------------------------------------------------- 4
bool criterion4_extractor_goldens(std::string& detail) {
    const YCbCrImage img = testsupport::noise_fixture();
    struct Case {
        const char* name;
        std::vector<double> got;
        std::vector<double> want;
    };
    const std::vector<Case> cases = {
        {"ALAHMADI", extract_alahmadi(img).values, reference::alahmadi(img)},
        {"DUA", extract_dua(img).values, reference::dua(img)},
        {"ARMAN", extract_arman(img).values, reference::arman(img)},
        {"MANDEEP", extract_mandeep(img).values, reference::mandeep(img)},
        {"MOHAMMED", extract_mohammed(img).values, reference::mohammed(img)},
    };
    for (const Case& c : cases) {
        if (c.got.size() != c.want.size()) {
            detail = std::string(c.name) + ": dimensionality mismatch";
            return false;
        }
        for (std::size_t i = 0; i < c.got.size(); ++i)
            if (std::abs(c.got[i] - c.want[i]) > 1e-6) {
                detail = std::string(c.name) + ": element " + std::to_string(i) + " off";
                return false;
            }
    }

    // constant-image analytics
    const YCbCrImage flat = testsupport::constant_image(64, 64, 120.0, 64.0, 190.0);
    for (double v : extract_alahmadi(flat).values)
        if (std::abs(v) > 1e-12) {
            detail = "ALAHMADI constant image not all-zero";
            return false;
        }
    const auto mohammed = extract_mohammed(flat).values;
    for (int plane = 0; plane < 2; ++plane) {
        if (std::abs(mohammed[plane * 64] - 2040.0) > 1e-9) {
            detail = "MOHAMMED constant image DC != 2040";
            return false;
        }
        for (int k = 1; k < 64; ++k)
            if (std::abs(mohammed[plane * 64 + k]) > 1e-9) {
                detail = "MOHAMMED constant image AC != 0";
                return false;
            }
    }
    try {
        extract_arman(flat);
        detail = "ARMAN constant image should raise NoNonzeroCoefficients";
        return false;
    } catch (const NoNonzeroCoefficients&) {
    }
    detail = "five golden vectors within 1e-6, constant-image analytics hold";
    return true;
}

// ------------------------------------------------------------------- 5 & 6
// Frozen corpora: configs fixed here; thresholds recorded at corpus-freeze
// time from the --calibrate oracle run, each set 5 accuracy points under the
// measured value.
synth::CorpusConfig corpus_a_config() {
    synth::CorpusConfig cfg;
    cfg.id = "synthA";
    cfg.n_pristine = 200;
    cfg.n_tampered = 200;
    cfg.width = 160;
    cfg.height = 160;
    cfg.copy_move_fraction = 0.5;
    cfg.seed = 4242;
    cfg.matched_quality = false;
    return cfg;
}

synth::CorpusConfig corpus_b_config() {
    synth::CorpusConfig cfg = corpus_a_config();
    cfg.id = "synthB";
    cfg.seed = 9393;
    cfg.matched_quality = true; // no requantization cue
    return cfg;
}

struct MethodThreshold {
    Method method;
    double min_accuracy_pct; // measured-at-freeze minus 5 points
};

// calibration run (seed 4242 corpus, seed 42 protocol) measured:
//   ALAHMADI 83.75, DUA 96.25, ARMAN 75.00, MANDEEP 100.00, MOHAMMED 73.75
const MethodThreshold kSet1Thresholds[] = {
    {Method::ALAHMADI, 78.75}, {Method::DUA, 91.25},     {Method::ARMAN, 70.00},
    {Method::MANDEEP, 95.00},  {Method::MOHAMMED, 68.75},
};

ExperimentConfig protocol_config() {
    ExperimentConfig cfg;
    cfg.kernel_kind = KernelKind::RBF;
    cfg.seed = 42;
    cfg.split_fraction = 0.8;
    cfg.jobs = g_jobs;
    cfg.grid.folds = 10;
    cfg.grid.seed = 42;
    return cfg; // default C and gamma grids
}

bool criterion5_e2e_set1(const DatasetManifest& corpus_a, std::vector<EvaluationReport>& set1_out,
                         std::string& detail) {
    const auto t0 = std::chrono::steady_clock::now();
    const ExperimentConfig cfg = protocol_config();

    std::vector<EvaluationReport> first, second;
    for (const MethodThreshold& mt : kSet1Thresholds)
        first.push_back(run_same_dataset(corpus_a, mt.method, cfg));
    for (const MethodThreshold& mt : kSet1Thresholds)
        second.push_back(run_same_dataset(corpus_a, mt.method, cfg));

    std::ostringstream os;
    bool ok = true;
    for (std::size_t i = 0; i < first.size(); ++i) {
        const double acc = first[i].metrics.accuracy_pct;
        os << first[i].method << " " << acc << "%";
        if (acc < kSet1Thresholds[i].min_accuracy_pct) {
            os << " (< " << kSet1Thresholds[i].min_accuracy_pct << " FAIL)";
            ok = false;
        }
        os << "; ";
    }
    if (render_csv(first) != render_csv(second)) {
        os << "rerun not byte-identical; ";
        ok = false;
    }
    const double dt = seconds_since(t0);
    os << "runtime " << static_cast<int>(dt) << "s (budget 900s)";
    if (dt >= 900.0) ok = false;
    detail = os.str();
    set1_out = first;
    return ok;
}

bool criterion6_e2e_set2(const DatasetManifest& corpus_a, const DatasetManifest& corpus_b,
                         const std::vector<EvaluationReport>& set1, std::string& detail) {
    const ExperimentConfig cfg = protocol_config();
    std::ostringstream os;
    bool ok = true;
    for (std::size_t i = 0; i < set1.size(); ++i) {
        const Method method = kSet1Thresholds[i].method;
        const auto cross = run_cross(corpus_a, method, {&corpus_b}, cfg);
        const double cross_acc = cross[0].metrics.accuracy_pct;
        const double same_acc = set1[i].metrics.accuracy_pct;
        os << method_name(method) << " " << same_acc << "% -> " << cross_acc << "%";
        if (!(cross_acc < same_acc)) {
            os << " (no degradation FAIL)";
            ok = false;
        }
        os << "; ";
    }
    detail = os.str();
    return ok;
}

// ---------------------------------------------------------------------- 7
bool criterion7_plan_and_format(std::string& detail) {
    const fs::path dir = fs::path("acceptance_scratch") / "registry7";
    fs::remove_all(dir);
    fs::create_directories(dir);
    for (int i = 0; i < 6; ++i) {
        const std::string id = "corpus" + std::to_string(i);
        std::ofstream out(dir / (id + ".manifest"));
        out << "id: " << id << "\nrelease_year: 2012\nin_the_wild: false\n";
        out << "pristine," << id << "/p.jpg\ntampered," << id << "/t.jpg\n";
    }
    const Registry reg = Registry::discover(dir);
    std::istringstream plan_text(
        "set: SET2_CROSS\nmethods: DUA\ntrain: corpus0,corpus1,corpus2\n");
    const ExperimentPlan plan = parse_plan(plan_text, "inline");
    const auto jobs = expand_jobs(plan, reg);
    if (jobs.size() != 15) {
        detail = "expected 15 jobs per method, got " + std::to_string(jobs.size());
        return false;
    }

    EvaluationReport r;
    r.set_id = "SET1_SAME";
    r.method = "ALAHMADI";
    r.train_id = r.test_id = "COVERAGE";
    r.metrics.accuracy_pct = 47.5;
    r.metrics.macro_f1 = 0.32;
    r.metrics.degenerate = true;
    if (format_report_cell(r) != "47.50% (0.32)*") {
        detail = "degenerate cell rendered as '" + format_report_cell(r) + "'";
        return false;
    }
    detail = "15 jobs per method; degenerate cell renders as 47.50% (0.32)*";
    return true;
}

// ---------------------------------------------------------------------- 8
void criterion8_casia(const char* env_name = "FORENS_CASIA1_MANIFEST") {
    const char* manifest_path = std::getenv(env_name);
    if (manifest_path == nullptr || std::string(manifest_path).empty()) {
        report_skip(8, "CASIA v1.0 reproduction", std::string(env_name) + " not set");
        return;
    }
    try {
        const DatasetManifest casia = load_manifest(manifest_path);
        const ExperimentConfig cfg = protocol_config();
        const struct {
            Method method;
            double reproduced;
        } targets[] = {{Method::ALAHMADI, 96.80}, {Method::DUA, 96.81}};
        bool ok = true;
        std::ostringstream os;
        for (const auto& t : targets) {
            const EvaluationReport rep = run_same_dataset(casia, t.method, cfg);
            os << method_name(t.method) << " " << rep.metrics.accuracy_pct << "% (target "
               << t.reproduced << " +- 4); ";
            if (std::abs(rep.metrics.accuracy_pct - t.reproduced) > 4.0) ok = false;
        }
        report(8, "CASIA v1.0 reproduction", ok, os.str());
    } catch (const Error& e) {
        report(8, "CASIA v1.0 reproduction", false, e.what());
    }
}

} // namespace

int main(int argc, char** argv) {
    const bool calibrate = argc > 1 && std::string(argv[1]) == "--calibrate";
    g_jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

    const fs::path corpus_dir = fs::path("acceptance_scratch") / "corpora";
    fs::create_directories(corpus_dir);

    if (calibrate) {
        std::puts("calibration: building frozen corpora and measuring same-corpus accuracy");
        const DatasetManifest a = synth::build_corpus(corpus_a_config(), corpus_dir);
        const ExperimentConfig cfg = protocol_config();
        for (Method m : kAllMethods) {
            const EvaluationReport rep = run_same_dataset(a, m, cfg);
            std::printf("  %-9s accuracy %.2f%% macro-F1 %.4f (kernel %s C %g gamma %g)\n",
                        method_name(m), rep.metrics.accuracy_pct, rep.metrics.macro_f1,
                        kernel_kind_name(rep.kernel.kind), rep.c, rep.kernel.gamma);
        }
        return 0;
    }

    std::string detail;

    const bool c1 = criterion1_numeric_kernels(detail);
    report(1, "numeric kernel suite", c1, detail);

    const bool c2 = criterion2_smo_oracle(detail);
    report(2, "SMO vs QP oracle", c2, detail);

    const bool c3 = criterion3_metrics_oracle(detail);
    report(3, "metrics oracle", c3, detail);

    const bool c4 = criterion4_extractor_goldens(detail);
    report(4, "extractor golden vectors", c4, detail);

    try {
        const DatasetManifest corpus_a = synth::build_corpus(corpus_a_config(), corpus_dir);
        const DatasetManifest corpus_b = synth::build_corpus(corpus_b_config(), corpus_dir);

        std::vector<EvaluationReport> set1;
        const bool c5 = criterion5_e2e_set1(corpus_a, set1, detail);
        report(5, "end-to-end synthetic SET 1", c5, detail);

        const bool c6 = criterion6_e2e_set2(corpus_a, corpus_b, set1, detail);
        report(6, "end-to-end synthetic SET 2", c6, detail);
    } catch (const Error& e) {
        report(5, "end-to-end synthetic SET 1", false, e.what());
        report(6, "end-to-end synthetic SET 2", false, "SET 1 failed");
    }

    const bool c7 = criterion7_plan_and_format(detail);
    report(7, "plan cardinality and report format", c7, detail);

    criterion8_casia();

    if (g_failures == 0)
        std::puts("acceptance: all criteria passed");
    else
        std::printf("acceptance: %d criterion(s) failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
