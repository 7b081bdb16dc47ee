#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "forens/experiments.hpp"
#include "forens/manifest.hpp"
#include "forens/report.hpp"

namespace forens {

enum class SetId { SET1_SAME, SET1_AMALGAM, SET2_CROSS, SET3_WILD, SET3_AMALGAM };

inline const char* set_id_name(SetId s) {
    switch (s) {
        case SetId::SET1_SAME: return "SET1_SAME";
        case SetId::SET1_AMALGAM: return "SET1_AMALGAM";
        case SetId::SET2_CROSS: return "SET2_CROSS";
        case SetId::SET3_WILD: return "SET3_WILD";
        case SetId::SET3_AMALGAM: return "SET3_AMALGAM";
    }
    return "?";
}

// Archival description of a run: every knob a job needs, in key: value form.
struct ExperimentPlan {
    SetId set = SetId::SET1_SAME;
    std::vector<Method> methods = {Method::ALAHMADI, Method::DUA, Method::ARMAN, Method::MANDEEP,
                                   Method::MOHAMMED};
    std::vector<std::string> train_ids;
    std::vector<std::string> test_ids;   // SET2/SET3 universe; empty = registry default
    std::vector<std::string> source_ids; // amalgam sets
    std::size_t per_source_pristine = 100;
    std::size_t per_source_tampered = 100;
    int repeats = 3;
    std::uint64_t seed = 42;
    double split_fraction = 0.8;
    KernelKind kernel = KernelKind::RBF;
    std::vector<double> c_grid = {0.1, 1.0, 10.0, 100.0, 1000.0};
    std::vector<std::string> gamma_tokens; // numbers or "auto" (= 1/dims); empty = default grid
    std::vector<int> degree_grid = {2, 3};
    double coef0 = 0.0;
    int folds = 10;
    double tol = 1e-3;
    int max_epochs = 10000;
};

inline ExperimentPlan parse_plan(std::istream& in, const std::string& origin) {
    ExperimentPlan plan;
    bool saw_set = false;
    std::string line;
    int line_no = 0;
    auto fail = [&](const std::string& msg) {
        throw PlanParseError(origin + ":" + std::to_string(line_no) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        const std::size_t colon = t.find(':');
        if (colon == std::string::npos) fail("expected 'key: value'");
        const std::string key = detail::trim(t.substr(0, colon));
        const std::string value = detail::trim(t.substr(colon + 1));
        auto comma_list = [&]() {
            std::vector<std::string> out;
            for (const auto& piece : detail::split_commas(value)) {
                const std::string p = detail::trim(piece);
                if (!p.empty()) out.push_back(p);
            }
            return out;
        };
        try {
            if (key == "set") {
                saw_set = true;
                if (value == "SET1_SAME") plan.set = SetId::SET1_SAME;
                else if (value == "SET1_AMALGAM") plan.set = SetId::SET1_AMALGAM;
                else if (value == "SET2_CROSS") plan.set = SetId::SET2_CROSS;
                else if (value == "SET3_WILD") plan.set = SetId::SET3_WILD;
                else if (value == "SET3_AMALGAM") plan.set = SetId::SET3_AMALGAM;
                else fail("unknown set id '" + value + "'");
            } else if (key == "methods") {
                if (value != "all") {
                    plan.methods.clear();
                    for (const auto& name : comma_list()) plan.methods.push_back(parse_method(name));
                }
            } else if (key == "train") {
                plan.train_ids = comma_list();
            } else if (key == "test") {
                plan.test_ids = comma_list();
            } else if (key == "sources") {
                plan.source_ids = comma_list();
            } else if (key == "per_source") {
                const auto parts = comma_list();
                if (parts.size() != 2) fail("per_source must be 'n_pristine,n_tampered'");
                plan.per_source_pristine = std::stoul(parts[0]);
                plan.per_source_tampered = std::stoul(parts[1]);
            } else if (key == "repeats") {
                plan.repeats = std::stoi(value);
                if (plan.repeats < 1) fail("repeats must be >= 1");
            } else if (key == "seed") {
                plan.seed = std::stoull(value);
            } else if (key == "split_fraction") {
                plan.split_fraction = std::stod(value);
                if (!(plan.split_fraction > 0.0 && plan.split_fraction < 1.0))
                    fail("split_fraction must lie in (0, 1)");
            } else if (key == "kernel") {
                plan.kernel = parse_kernel_kind(value);
            } else if (key == "c_grid") {
                plan.c_grid.clear();
                for (const auto& v : comma_list()) plan.c_grid.push_back(std::stod(v));
                if (plan.c_grid.empty()) fail("c_grid must not be empty");
            } else if (key == "gamma_grid") {
                plan.gamma_tokens = comma_list();
            } else if (key == "degree_grid") {
                plan.degree_grid.clear();
                for (const auto& v : comma_list()) plan.degree_grid.push_back(std::stoi(v));
                if (plan.degree_grid.empty()) fail("degree_grid must not be empty");
            } else if (key == "coef0") {
                plan.coef0 = std::stod(value);
            } else if (key == "folds") {
                plan.folds = std::stoi(value);
                if (plan.folds < 2) fail("folds must be >= 2");
            } else if (key == "tol") {
                plan.tol = std::stod(value);
            } else if (key == "max_epochs") {
                plan.max_epochs = std::stoi(value);
            } else {
                fail("unknown plan key '" + key + "'");
            }
        } catch (const PlanParseError&) {
            throw;
        } catch (const Error&) {
            throw;
        } catch (const std::exception& e) {
            fail(std::string("bad value: ") + e.what());
        }
    }
    if (!saw_set) throw PlanParseError(origin + ": plan is missing the 'set' key");
    return plan;
}

inline ExperimentPlan load_plan(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FileNotFound("plan file not found: " + path.string());
    return parse_plan(in, path.string());
}

// One expandable unit of work: (method, train, test) for the matrix sets, or
// (method, repeat) for amalgamations.
struct PlanJob {
    Method method;
    std::string train_id;
    std::string test_id;
    int repeat = 0; // amalgam sets only, 1-based
};

inline std::vector<PlanJob> expand_jobs(const ExperimentPlan& plan, const Registry& registry) {
    std::vector<PlanJob> jobs;
    auto check_registered = [&](const std::vector<std::string>& ids) {
        for (const auto& id : ids) registry.get(id);
    };

    switch (plan.set) {
        case SetId::SET1_SAME: {
            if (plan.train_ids.empty())
                throw PlanInvariantViolation("SET1_SAME plan needs a 'train' dataset list");
            check_registered(plan.train_ids);
            for (Method m : plan.methods)
                for (const auto& id : plan.train_ids) jobs.push_back({m, id, id, 0});
            break;
        }
        case SetId::SET2_CROSS: {
            if (plan.train_ids.empty())
                throw PlanInvariantViolation("SET2_CROSS plan needs a 'train' dataset list");
            check_registered(plan.train_ids);
            std::vector<std::string> universe =
                plan.test_ids.empty() ? registry.ids(false, true) : plan.test_ids;
            check_registered(universe);
            for (Method m : plan.methods)
                for (const auto& train : plan.train_ids)
                    for (const auto& test : universe)
                        if (test != train) jobs.push_back({m, train, test, 0});
            break;
        }
        case SetId::SET3_WILD: {
            if (plan.train_ids.empty())
                throw PlanInvariantViolation("SET3_WILD plan needs a 'train' dataset list");
            check_registered(plan.train_ids);
            std::vector<std::string> targets =
                plan.test_ids.empty() ? registry.ids(true, false) : plan.test_ids;
            check_registered(targets);
            for (const auto& id : plan.train_ids)
                if (registry.get(id).in_the_wild)
                    throw WildFlagViolation("SET3_WILD train dataset '" + id + "' is in-the-wild");
            for (const auto& id : targets)
                if (!registry.get(id).in_the_wild)
                    throw WildFlagViolation("SET3_WILD test dataset '" + id +
                                            "' is not in-the-wild");
            for (Method m : plan.methods)
                for (const auto& train : plan.train_ids)
                    for (const auto& test : targets)
                        if (test != train) jobs.push_back({m, train, test, 0});
            break;
        }
        case SetId::SET1_AMALGAM:
        case SetId::SET3_AMALGAM: {
            if (plan.source_ids.empty())
                throw PlanInvariantViolation("amalgam plan needs a 'sources' dataset list");
            check_registered(plan.source_ids);
            if (plan.set == SetId::SET3_AMALGAM)
                for (const auto& id : plan.source_ids)
                    if (!registry.get(id).in_the_wild)
                        throw WildFlagViolation("SET3_AMALGAM source '" + id +
                                                "' is not in-the-wild");
            std::string mix = "amalgam(";
            for (std::size_t i = 0; i < plan.source_ids.size(); ++i)
                mix += (i ? "+" : "") + plan.source_ids[i];
            mix += ")";
            for (Method m : plan.methods)
                for (int r = 1; r <= plan.repeats; ++r)
                    jobs.push_back({m, mix, "sample" + std::to_string(r), r});
            break;
        }
    }
    return jobs;
}

inline ExperimentConfig plan_config(const ExperimentPlan& plan, Method method, int jobs) {
    ExperimentConfig cfg;
    cfg.kernel_kind = plan.kernel;
    cfg.split_fraction = plan.split_fraction;
    cfg.seed = plan.seed;
    cfg.jobs = jobs;
    cfg.grid.c_grid = plan.c_grid;
    cfg.grid.degree_grid = plan.degree_grid;
    cfg.grid.coef0 = plan.coef0;
    cfg.grid.folds = plan.folds;
    cfg.grid.seed = plan.seed;
    cfg.grid.tol = plan.tol;
    cfg.grid.max_epochs = plan.max_epochs;
    cfg.grid.gamma_grid.clear();
    for (const auto& token : plan.gamma_tokens) {
        if (token == "auto" || token == "1/d")
            cfg.grid.gamma_grid.push_back(1.0 /
                                          static_cast<double>(method_dimensionality(method)));
        else
            cfg.grid.gamma_grid.push_back(std::stod(token));
    }
    return cfg;
}

inline std::vector<EvaluationReport> execute_plan(const ExperimentPlan& plan,
                                                  const Registry& registry, int jobs) {
    expand_jobs(plan, registry); // validate up front
    std::vector<EvaluationReport> reports;
    for (Method m : plan.methods) {
        const ExperimentConfig cfg = plan_config(plan, m, jobs);
        switch (plan.set) {
            case SetId::SET1_SAME: {
                for (const auto& id : plan.train_ids)
                    reports.push_back(run_same_dataset(registry.get(id), m, cfg));
                break;
            }
            case SetId::SET2_CROSS:
            case SetId::SET3_WILD: {
                const bool wild = plan.set == SetId::SET3_WILD;
                std::vector<std::string> universe =
                    plan.test_ids.empty() ? registry.ids(wild, !wild) : plan.test_ids;
                for (const auto& train : plan.train_ids) {
                    std::vector<const DatasetManifest*> tests;
                    for (const auto& test : universe)
                        if (test != train) tests.push_back(&registry.get(test));
                    auto batch = wild ? run_wild(registry.get(train), m, tests, cfg)
                                      : run_cross(registry.get(train), m, tests, cfg);
                    reports.insert(reports.end(), batch.begin(), batch.end());
                }
                break;
            }
            case SetId::SET1_AMALGAM:
            case SetId::SET3_AMALGAM: {
                std::vector<const DatasetManifest*> sources;
                for (const auto& id : plan.source_ids) sources.push_back(&registry.get(id));
                auto batch = run_amalgam(sources, m, plan.per_source_pristine,
                                         plan.per_source_tampered, plan.repeats, cfg,
                                         set_id_name(plan.set));
                reports.insert(reports.end(), batch.begin(), batch.end());
                break;
            }
        }
    }
    return reports;
}

} // namespace forens
