#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "forens/errors.hpp"
#include "forens/parallel.hpp"
#include "forens/rng.hpp"
#include "forens/svm.hpp"

namespace forens {

struct GridSearchConfig {
    std::vector<double> c_grid = {0.1, 1.0, 10.0, 100.0, 1000.0};
    std::vector<double> gamma_grid; // empty -> default_gamma_grid(dims)
    std::vector<int> degree_grid = {2, 3};
    double coef0 = 0.0;
    int folds = 10;
    std::uint64_t seed = 42;
    double tol = 1e-3;
    int max_epochs = 10000;
    int jobs = 1;
};

// {1e-4, 1e-3, 1e-2, 1e-1, 1, 1/d}
inline std::vector<double> default_gamma_grid(std::size_t dims) {
    return {1e-4, 1e-3, 1e-2, 1e-1, 1.0, 1.0 / static_cast<double>(std::max<std::size_t>(1, dims))};
}

struct CvCell {
    KernelSpec kernel;
    double c = 0.0;
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;
    bool converged = true;
};

struct GridSearchResult {
    KernelSpec best_kernel;
    double best_c = 0.0;
    std::vector<CvCell> table;
    std::size_t nonconverged_cells = 0;
};

// Deterministic stratified folds: per-class seeded shuffle, round-robin
// assignment. Returns fold id per sample.
inline std::vector<int> stratified_fold_ids(const std::vector<int>& labels, int folds,
                                            std::uint64_t seed) {
    std::vector<int> ids(labels.size(), -1);
    for (int cls : {kPristineLabel, kTamperedLabel}) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == cls) idx.push_back(i);
        if (idx.size() < static_cast<std::size_t>(folds))
            throw TooFewSamplesPerClass("stratified k-fold: a class has fewer samples than folds");
        Rng rng(derive_seed(seed, cls == kPristineLabel ? 1 : 2));
        rng.shuffle(idx);
        for (std::size_t j = 0; j < idx.size(); ++j)
            ids[idx[j]] = static_cast<int>(j % static_cast<std::size_t>(folds));
    }
    return ids;
}

// Tuning protocol: stratified k-fold cross-validation over the
// grid, scored by mean fold accuracy. Ties break toward smaller C, then
// smaller gamma, then smaller degree. A NonConvergence in any fold
// disqualifies that cell only.
inline GridSearchResult kfold_grid_search(const std::vector<std::vector<double>>& samples,
                                          const std::vector<int>& labels, KernelKind kind,
                                          const GridSearchConfig& cfg) {
    if (samples.size() != labels.size())
        throw DimensionMismatch("kfold_grid_search: samples/labels length mismatch");
    if (cfg.folds < 2) throw Error("kfold_grid_search: folds must be >= 2");
    if (cfg.c_grid.empty()) throw Error("kfold_grid_search: empty C grid");
    const std::vector<int> fold_of = stratified_fold_ids(labels, cfg.folds, cfg.seed);

    const std::size_t dims = samples.empty() ? 0 : samples[0].size();
    const std::vector<double> gammas =
        cfg.gamma_grid.empty() ? default_gamma_grid(dims) : cfg.gamma_grid;
    const std::vector<int> degrees =
        (kind == KernelKind::POLY) ? cfg.degree_grid : std::vector<int>{0};
    if (kind == KernelKind::POLY && cfg.degree_grid.empty())
        throw Error("kfold_grid_search: empty degree grid");

    std::vector<CvCell> cells;
    for (double c : cfg.c_grid)
        for (double gamma : gammas)
            for (int degree : degrees) {
                CvCell cell;
                cell.kernel.kind = kind;
                cell.kernel.gamma = gamma;
                cell.kernel.degree = (kind == KernelKind::POLY) ? degree : 3;
                cell.kernel.coef0 = cfg.coef0;
                cell.c = c;
                cells.push_back(cell);
            }

    parallel_for(cells.size(), cfg.jobs, [&](std::size_t ci) {
        CvCell& cell = cells[ci];
        std::vector<double> fold_acc(static_cast<std::size_t>(cfg.folds), 0.0);
        for (int f = 0; f < cfg.folds; ++f) {
            std::vector<std::vector<double>> train_x;
            std::vector<int> train_y;
            std::vector<std::size_t> test_idx;
            for (std::size_t i = 0; i < samples.size(); ++i) {
                if (fold_of[i] == f) {
                    test_idx.push_back(i);
                } else {
                    train_x.push_back(samples[i]);
                    train_y.push_back(labels[i]);
                }
            }
            TrainOptions opt;
            opt.tol = cfg.tol;
            opt.max_epochs = cfg.max_epochs;
            opt.seed = derive_seed(cfg.seed, ci * static_cast<std::size_t>(cfg.folds) +
                                                 static_cast<std::size_t>(f));
            try {
                SvmModel model = train_svm(train_x, train_y, cell.kernel, cell.c, opt);
                std::size_t correct = 0;
                for (std::size_t i : test_idx)
                    if (predict(model, samples[i]).label == labels[i]) ++correct;
                fold_acc[static_cast<std::size_t>(f)] =
                    static_cast<double>(correct) / static_cast<double>(test_idx.size());
            } catch (const NonConvergence&) {
                cell.converged = false;
                return;
            }
        }
        double mean = 0.0;
        for (double a : fold_acc) mean += a;
        mean /= static_cast<double>(cfg.folds);
        double var = 0.0;
        for (double a : fold_acc) var += (a - mean) * (a - mean);
        cell.mean_accuracy = mean;
        cell.std_accuracy = std::sqrt(var / static_cast<double>(cfg.folds));
    });

    GridSearchResult result;
    result.table = cells;
    const CvCell* best = nullptr;
    for (const CvCell& cell : cells) {
        if (!cell.converged) {
            ++result.nonconverged_cells;
            continue;
        }
        if (best == nullptr) {
            best = &cell;
            continue;
        }
        if (cell.mean_accuracy > best->mean_accuracy ||
            (cell.mean_accuracy == best->mean_accuracy &&
             (cell.c < best->c ||
              (cell.c == best->c &&
               (cell.kernel.gamma < best->kernel.gamma ||
                (cell.kernel.gamma == best->kernel.gamma &&
                 cell.kernel.degree < best->kernel.degree)))))) {
            best = &cell;
        }
    }
    if (best == nullptr)
        throw NonConvergence("kfold_grid_search: every grid cell failed to converge");
    result.best_kernel = best->kernel;
    result.best_c = best->c;
    return result;
}

} // namespace forens
