#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "forens/extractors.hpp"
#include "forens/grid_search.hpp"
#include "forens/imgio.hpp"
#include "forens/manifest.hpp"
#include "forens/metrics.hpp"
#include "forens/parallel.hpp"
#include "forens/svm.hpp"

namespace forens {

struct ExperimentConfig {
    KernelKind kernel_kind = KernelKind::RBF;
    GridSearchConfig grid;
    double split_fraction = 0.8;
    std::uint64_t seed = 42;
    int jobs = 1;
};

// Features for every readable entry of a manifest. Entries whose image cannot
// be decoded or whose extractor rejects the content are skipped and listed.
struct ExtractedSet {
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    std::vector<std::string> ids;
    std::vector<std::pair<std::string, std::string>> failures; // (path, reason)
};

inline ExtractedSet extract_dataset(const DatasetManifest& m, Method method, int jobs) {
    struct Slot {
        bool ok = false;
        std::vector<double> values;
        std::string error;
    };
    std::vector<Slot> slots(m.entries.size());
    parallel_for(m.entries.size(), jobs, [&](std::size_t i) {
        try {
            const YCbCrImage img = load_image(m.resolve(m.entries[i]));
            slots[i].values = extract_features(method, img).values;
            slots[i].ok = true;
        } catch (const Error& e) {
            slots[i].error = e.what();
        }
    });
    ExtractedSet out;
    for (std::size_t i = 0; i < m.entries.size(); ++i) {
        if (slots[i].ok) {
            out.x.push_back(std::move(slots[i].values));
            out.y.push_back(m.entries[i].label == Label::TAMPERED ? kTamperedLabel
                                                                  : kPristineLabel);
            out.ids.push_back(m.entries[i].path);
        } else {
            out.failures.emplace_back(m.entries[i].path, slots[i].error);
        }
    }
    return out;
}

namespace detail {

struct TunedModel {
    SvmModel model;
    KernelSpec kernel;
    double c = 0.0;
    std::size_t nonconverged_cells = 0;
};

// Grid search on the given rows, then a final fit with the winning cell.
inline TunedModel tune_and_train(const std::vector<std::vector<double>>& x,
                                 const std::vector<int>& y, const ExperimentConfig& cfg,
                                 std::uint64_t seed) {
    GridSearchConfig grid = cfg.grid;
    grid.seed = seed;
    grid.jobs = cfg.jobs;
    const GridSearchResult gs = kfold_grid_search(x, y, cfg.kernel_kind, grid);
    TrainOptions opt;
    opt.tol = grid.tol;
    opt.max_epochs = grid.max_epochs;
    opt.seed = derive_seed(seed, 0xF17);
    TunedModel out;
    out.model = train_svm(x, y, gs.best_kernel, gs.best_c, opt);
    out.kernel = gs.best_kernel;
    out.c = gs.best_c;
    out.nonconverged_cells = gs.nonconverged_cells;
    return out;
}

inline MetricsCore evaluate(const SvmModel& model, const std::vector<std::vector<double>>& x,
                            const std::vector<int>& y, int jobs) {
    std::vector<int> predictions(x.size());
    parallel_for(x.size(), jobs, [&](std::size_t i) {
        predictions[i] = predict(model, x[i]).label;
    });
    return compute_metrics(predictions, y);
}

inline std::string nonconvergence_note(std::size_t cells) {
    return cells == 0 ? std::string()
                      : "nonconvergent grid cells: " + std::to_string(cells);
}

} // namespace detail

// SET 1 mechanics: stratified split, tune on the training portion only, final
// train on the full training split, evaluate on the held-out split.
inline EvaluationReport run_same_dataset(const DatasetManifest& m, Method method,
                                         const ExperimentConfig& cfg) {
    ExtractedSet set = extract_dataset(m, method, cfg.jobs);

    DatasetManifest usable = m;
    usable.entries.clear();
    for (const auto& id : set.ids) {
        for (const auto& e : m.entries)
            if (e.path == id) {
                usable.entries.push_back(e);
                break;
            }
    }
    std::map<std::string, std::size_t> row_of;
    for (std::size_t i = 0; i < set.ids.size(); ++i) row_of[set.ids[i]] = i;

    const SplitPlan plan = stratified_split(usable, cfg.split_fraction, cfg.seed);
    std::vector<std::vector<double>> train_x, test_x;
    std::vector<int> train_y, test_y;
    for (const auto& e : plan.train) {
        train_x.push_back(set.x[row_of.at(e.path)]);
        train_y.push_back(set.y[row_of.at(e.path)]);
    }
    for (const auto& e : plan.test) {
        test_x.push_back(set.x[row_of.at(e.path)]);
        test_y.push_back(set.y[row_of.at(e.path)]);
    }

    EvaluationReport report;
    report.set_id = "SET1_SAME";
    report.method = method_name(method);
    report.train_id = m.id;
    report.test_id = m.id;
    report.seed = cfg.seed;
    report.split_fraction = cfg.split_fraction;
    report.folds = cfg.grid.folds;
    try {
        const detail::TunedModel tuned = detail::tune_and_train(train_x, train_y, cfg, cfg.seed);
        report.kernel = tuned.kernel;
        report.c = tuned.c;
        report.metrics = detail::evaluate(tuned.model, test_x, test_y, cfg.jobs);
        report.note = detail::nonconvergence_note(tuned.nonconverged_cells);
    } catch (const NonConvergence& e) {
        report.note = std::string("NONCONVERGENT: ") + e.what();
    }
    return report;
}

// SET 2 mechanics: one model per train dataset (tuned on it, scaler embedded),
// evaluated unchanged on each test dataset's full entry list.
inline std::vector<EvaluationReport> run_cross(const DatasetManifest& train, Method method,
                                               const std::vector<const DatasetManifest*>& tests,
                                               const ExperimentConfig& cfg,
                                               const std::string& set_id = "SET2_CROSS") {
    for (const auto* t : tests)
        if (t->id == train.id)
            throw PlanInvariantViolation("cross evaluation with train == test: " + train.id);

    ExtractedSet train_set = extract_dataset(train, method, cfg.jobs);
    std::vector<EvaluationReport> reports;
    detail::TunedModel tuned;
    std::string failure_note;
    try {
        tuned = detail::tune_and_train(train_set.x, train_set.y, cfg, cfg.seed);
    } catch (const NonConvergence& e) {
        failure_note = std::string("NONCONVERGENT: ") + e.what();
    }
    for (const auto* t : tests) {
        EvaluationReport report;
        report.set_id = set_id;
        report.method = method_name(method);
        report.train_id = train.id;
        report.test_id = t->id;
        report.seed = cfg.seed;
        report.split_fraction = 0.0; // full test set, no split
        report.folds = cfg.grid.folds;
        if (failure_note.empty()) {
            ExtractedSet test_set = extract_dataset(*t, method, cfg.jobs);
            report.kernel = tuned.kernel;
            report.c = tuned.c;
            report.metrics = detail::evaluate(tuned.model, test_set.x, test_set.y, cfg.jobs);
            report.note = detail::nonconvergence_note(tuned.nonconverged_cells);
        } else {
            report.note = failure_note;
        }
        reports.push_back(std::move(report));
    }
    return reports;
}

// SET 3 mechanics: identical to run_cross but the train source must be a
// controlled-environment dataset and every test target an in-the-wild one.
inline std::vector<EvaluationReport> run_wild(const DatasetManifest& train, Method method,
                                              const std::vector<const DatasetManifest*>& tests,
                                              const ExperimentConfig& cfg) {
    if (train.in_the_wild)
        throw WildFlagViolation("run_wild: train dataset '" + train.id + "' is in-the-wild");
    for (const auto* t : tests)
        if (!t->in_the_wild)
            throw WildFlagViolation("run_wild: test dataset '" + t->id + "' is not in-the-wild");
    return run_cross(train, method, tests, cfg, "SET3_WILD");
}

// Amalgamation runs: `repeats` seeded selections (seed, seed+1, ...), each
// evaluated like SET 1, plus a mean report.
inline std::vector<EvaluationReport> run_amalgam(
    const std::vector<const DatasetManifest*>& sources, Method method, std::size_t per_source_p,
    std::size_t per_source_t, int repeats, const ExperimentConfig& cfg,
    const std::string& set_id = "SET1_AMALGAM") {
    if (sources.empty()) throw EmptyInput("run_amalgam: no sources");
    std::vector<EvaluationReport> reports;
    for (int r = 0; r < repeats; ++r) {
        const std::uint64_t repeat_seed = cfg.seed + static_cast<std::uint64_t>(r);
        DatasetManifest mix = amalgamate(sources, per_source_p, per_source_t, repeat_seed);
        ExperimentConfig repeat_cfg = cfg;
        repeat_cfg.seed = repeat_seed;
        EvaluationReport report = run_same_dataset(mix, method, repeat_cfg);
        report.set_id = set_id;
        report.train_id = mix.id;
        report.test_id = "sample" + std::to_string(r + 1);
        reports.push_back(std::move(report));
    }
    EvaluationReport mean;
    mean.set_id = set_id;
    mean.method = method_name(method);
    mean.train_id = reports.front().train_id;
    mean.test_id = "mean";
    mean.seed = cfg.seed;
    mean.split_fraction = cfg.split_fraction;
    mean.folds = cfg.grid.folds;
    mean.kernel = reports.front().kernel;
    mean.c = reports.front().c;
    const double n = static_cast<double>(repeats);
    for (const auto& rep : reports) {
        mean.metrics.accuracy_pct += rep.metrics.accuracy_pct / n;
        mean.metrics.macro_f1 += rep.metrics.macro_f1 / n;
        mean.metrics.pristine.precision += rep.metrics.pristine.precision / n;
        mean.metrics.pristine.recall += rep.metrics.pristine.recall / n;
        mean.metrics.pristine.f1 += rep.metrics.pristine.f1 / n;
        mean.metrics.tampered.precision += rep.metrics.tampered.precision / n;
        mean.metrics.tampered.recall += rep.metrics.tampered.recall / n;
        mean.metrics.tampered.f1 += rep.metrics.tampered.f1 / n;
    }
    mean.note = "mean of " + std::to_string(repeats);
    reports.push_back(std::move(mean));
    return reports;
}

// Post-processing summary: mean drop from same-dataset accuracy to cross
// accuracy, over every cross report whose train dataset has a same-dataset
// report in `same`.
inline double average_cross_drop(const std::vector<EvaluationReport>& same,
                                 const std::vector<EvaluationReport>& cross) {
    double total = 0.0;
    std::size_t count = 0;
    for (const auto& c : cross) {
        for (const auto& s : same) {
            if (s.method == c.method && s.train_id == c.train_id && s.train_id == s.test_id) {
                total += s.metrics.accuracy_pct - c.metrics.accuracy_pct;
                ++count;
                break;
            }
        }
    }
    if (count == 0) throw EmptyInput("average_cross_drop: no matching report pairs");
    return total / static_cast<double>(count);
}

} // namespace forens
