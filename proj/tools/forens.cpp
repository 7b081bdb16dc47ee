// forens: synthetic corpus generation, feature extraction, SVM training and
// the SET 1/2/3 evaluation protocols behind one command-line entry point.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "forens/forens.hpp"

namespace fs = std::filesystem;
using namespace forens;

namespace {

std::string g_invocation;

std::string join_invocation(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += " ";
        s += argv[i];
    }
    return s;
}

// Every command records what it wrote, plus the invocation that produced it.
void write_produced_files(const fs::path& out_dir, const std::vector<std::string>& files,
                          std::uint64_t seed) {
    std::ofstream out(out_dir / "produced_files.txt");
    out << "# invocation: " << g_invocation << "\n";
    out << "# seed: " << seed << "\n";
    for (const auto& f : files) out << f << "\n";
}

std::string provenance_header(std::uint64_t seed, double split_fraction) {
    std::ostringstream os;
    os << "invocation: " << g_invocation << "\n";
    os << "seed: " << seed << "\n";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", split_fraction);
    os << "split_fraction: " << buf;
    return os.str();
}

struct GlobalOpts {
    std::string registry_dir;
    std::string out_dir = "out";
    std::uint64_t seed = 42;
    int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    std::string grid_file;
};

// Grid override file: the grid subset of the plan syntax.
void apply_grid_file(const fs::path& path, GridSearchConfig& grid, KernelKind& kind) {
    std::ifstream in(path);
    if (!in) throw FileNotFound("grid file not found: " + path.string());
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        const std::size_t colon = t.find(':');
        if (colon == std::string::npos)
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": expected 'key: value'");
        const std::string key = detail::trim(t.substr(0, colon));
        const std::string value = detail::trim(t.substr(colon + 1));
        auto list = detail::split_commas(value);
        if (key == "kernel") {
            kind = parse_kernel_kind(value);
        } else if (key == "c_grid") {
            grid.c_grid.clear();
            for (auto& v : list) grid.c_grid.push_back(std::stod(detail::trim(v)));
        } else if (key == "gamma_grid") {
            grid.gamma_grid.clear();
            for (auto& v : list) grid.gamma_grid.push_back(std::stod(detail::trim(v)));
        } else if (key == "degree_grid") {
            grid.degree_grid.clear();
            for (auto& v : list) grid.degree_grid.push_back(std::stoi(detail::trim(v)));
        } else if (key == "coef0") {
            grid.coef0 = std::stod(value);
        } else if (key == "folds") {
            grid.folds = std::stoi(value);
        } else if (key == "tol") {
            grid.tol = std::stod(value);
        } else if (key == "max_epochs") {
            grid.max_epochs = std::stoi(value);
        } else {
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": unknown grid key '" + key + "'");
        }
    }
}

int cmd_synth(const GlobalOpts& g, std::size_t count, const std::string& size_str, double mix,
              bool matched_quality, std::size_t feather, const std::string& id) {
    synth::CorpusConfig cfg;
    cfg.id = id;
    cfg.n_pristine = count;
    cfg.n_tampered = count;
    cfg.copy_move_fraction = mix;
    cfg.seed = g.seed;
    cfg.matched_quality = matched_quality;
    cfg.feather_px = feather;
    const std::size_t x = size_str.find('x');
    if (x == std::string::npos) throw Error("--size must look like 128x128");
    cfg.width = std::stoul(size_str.substr(0, x));
    cfg.height = std::stoul(size_str.substr(x + 1));

    const fs::path out_dir(g.out_dir);
    fs::create_directories(out_dir);
    DatasetManifest m = synth::build_corpus(cfg, out_dir);

    std::vector<std::string> produced = {cfg.id + ".manifest"};
    for (const auto& e : m.entries) produced.push_back(e.path);
    write_produced_files(out_dir, produced, g.seed);
    std::cout << "wrote " << m.entries.size() << " images (" << m.n_pristine() << " pristine, "
              << m.n_tampered() << " tampered) under " << (out_dir / cfg.id).string() << "\n";
    std::cout << "manifest: " << (out_dir / (cfg.id + ".manifest")).string() << "\n";
    return 0;
}

int cmd_extract(const GlobalOpts& g, const std::string& dataset_id, const std::string& method_str) {
    const Method method = parse_method(method_str);
    const Registry registry = Registry::discover(g.registry_dir);
    const DatasetManifest& m = registry.get(dataset_id);

    ExtractedSet set = extract_dataset(m, method, g.jobs);
    const fs::path out_dir(g.out_dir);
    fs::create_directories(out_dir);
    const std::string filename = dataset_id + "_" + method_name(method) + ".features";
    {
        std::ofstream out(out_dir / filename);
        for (std::size_t i = 0; i < set.x.size(); ++i) {
            FeatureVector fv{method, set.x[i]};
            out << format_feature_record(fv, set.ids[i],
                                         set.y[i] == kTamperedLabel ? "tampered" : "pristine")
                << "\n";
        }
    }
    write_produced_files(out_dir, {filename}, g.seed);

    for (const auto& [path, reason] : set.failures)
        std::cerr << "skipped " << path << ": " << reason << "\n";
    std::cout << "extracted " << set.x.size() << "/" << m.entries.size() << " entries to "
              << (out_dir / filename).string() << "\n";
    const double failure_rate =
        m.entries.empty() ? 0.0
                          : static_cast<double>(set.failures.size()) /
                                static_cast<double>(m.entries.size());
    if (failure_rate > 0.05) {
        std::cerr << "error: " << set.failures.size() << " of " << m.entries.size()
                  << " entries failed (>5%)\n";
        return 1;
    }
    return 0;
}

int cmd_train(const GlobalOpts& g, const std::string& dataset_id, const std::string& method_str,
              const std::string& kernel_str, double fixed_c, double fixed_gamma, int degree,
              double coef0) {
    const Method method = parse_method(method_str);
    const Registry registry = Registry::discover(g.registry_dir);
    const DatasetManifest& m = registry.get(dataset_id);

    ExperimentConfig cfg;
    cfg.kernel_kind = parse_kernel_kind(kernel_str);
    cfg.seed = g.seed;
    cfg.jobs = g.jobs;
    cfg.grid.seed = g.seed;
    if (!g.grid_file.empty()) apply_grid_file(g.grid_file, cfg.grid, cfg.kernel_kind);

    ExtractedSet set = extract_dataset(m, method, g.jobs);
    for (const auto& [path, reason] : set.failures)
        std::cerr << "skipped " << path << ": " << reason << "\n";

    SvmModel model;
    KernelSpec chosen;
    double chosen_c;
    if (fixed_c > 0.0 && fixed_gamma > 0.0) {
        chosen.kind = cfg.kernel_kind;
        chosen.gamma = fixed_gamma;
        chosen.degree = degree;
        chosen.coef0 = coef0;
        chosen_c = fixed_c;
        TrainOptions opt;
        opt.seed = derive_seed(g.seed, 0xF17);
        model = train_svm(set.x, set.y, chosen, chosen_c, opt);
    } else {
        GridSearchConfig grid = cfg.grid;
        grid.jobs = g.jobs;
        const GridSearchResult gs = kfold_grid_search(set.x, set.y, cfg.kernel_kind, grid);
        chosen = gs.best_kernel;
        chosen_c = gs.best_c;
        TrainOptions opt;
        opt.seed = derive_seed(g.seed, 0xF17);
        model = train_svm(set.x, set.y, chosen, chosen_c, opt);
        std::cout << "grid search selected C=" << chosen_c << " gamma=" << chosen.gamma;
        if (cfg.kernel_kind == KernelKind::POLY) std::cout << " degree=" << chosen.degree;
        std::cout << "\n";
    }
    model.method_id = method_name(method);
    model.seed = g.seed;

    const fs::path out_dir(g.out_dir);
    fs::create_directories(out_dir);
    const std::string base = dataset_id + "_" + method_name(method);
    save_model(model, out_dir / (base + ".svm"));
    {
        std::ofstream txt(out_dir / (base + ".svm.txt"));
        txt << model_text_export(model);
    }
    write_produced_files(out_dir, {base + ".svm", base + ".svm.txt"}, g.seed);
    std::cout << "model: " << (out_dir / (base + ".svm")).string() << " ("
              << model.support_vectors.size() << " support vectors)\n";
    return 0;
}

int cmd_predict(const GlobalOpts& g, const std::string& model_path,
                const std::vector<std::string>& images, const std::string& dataset_id) {
    const SvmModel model = load_model(model_path);
    const Method method = parse_method(model.method_id);

    std::vector<std::pair<std::string, fs::path>> inputs;
    if (!dataset_id.empty()) {
        const Registry registry = Registry::discover(g.registry_dir);
        const DatasetManifest& m = registry.get(dataset_id);
        for (const auto& e : m.entries) inputs.emplace_back(e.path, m.resolve(e));
    }
    for (const auto& p : images) inputs.emplace_back(p, fs::path(p));
    if (inputs.empty()) throw Error("predict: give --image paths or --dataset");

    const fs::path out_dir(g.out_dir);
    fs::create_directories(out_dir);
    std::ofstream csv(out_dir / "predictions.csv");
    csv << "# invocation: " << g_invocation << "\n";
    csv << "path,label,decision_value\n";
    char buf[64];
    for (const auto& [id, path] : inputs) {
        const YCbCrImage img = load_image(path);
        const FeatureVector fv = extract_features(method, img);
        const Prediction p = predict(model, fv.values);
        std::snprintf(buf, sizeof(buf), "%.6f", p.decision_value);
        const char* label = p.label == kTamperedLabel ? "tampered" : "pristine";
        std::cout << id << "," << label << "," << buf << "\n";
        csv << id << "," << label << "," << buf << "\n";
    }
    write_produced_files(out_dir, {"predictions.csv"}, g.seed);
    return 0;
}

int cmd_run(const GlobalOpts& g, const std::string& plan_path, bool dry_run) {
    ExperimentPlan plan = load_plan(plan_path);
    const Registry registry = Registry::discover(g.registry_dir);
    const std::vector<PlanJob> jobs = expand_jobs(plan, registry);

    std::cout << "plan: " << set_id_name(plan.set) << ", seed " << plan.seed
              << ", split_fraction " << plan.split_fraction << ", folds " << plan.folds << "\n";
    if (dry_run) {
        for (const auto& j : jobs)
            std::cout << method_name(j.method) << "  " << j.train_id << " -> " << j.test_id
                      << "\n";
        std::cout << jobs.size() << " jobs (" << jobs.size() / plan.methods.size()
                  << " per method)\n";
        return 0;
    }

    const std::vector<EvaluationReport> reports = execute_plan(plan, registry, g.jobs);

    const fs::path out_dir(g.out_dir);
    fs::create_directories(out_dir);
    const std::string stem = fs::path(plan_path).stem().string();
    const std::string header = provenance_header(plan.seed, plan.split_fraction);
    const std::string csv_name = "report_" + stem + ".csv";
    const std::string md_name = "report_" + stem + ".md";
    {
        std::ofstream out(out_dir / csv_name);
        out << render_csv(reports, header);
    }
    {
        std::ofstream out(out_dir / md_name);
        out << render_markdown(reports, header);
    }
    write_produced_files(out_dir, {csv_name, md_name}, plan.seed);
    std::cout << "wrote " << (out_dir / csv_name).string() << " and "
              << (out_dir / md_name).string() << " (" << reports.size() << " reports)\n";
    return 0;
}

int cmd_report(const GlobalOpts& g, const std::string& input_csv) {
    std::ifstream in(input_csv);
    if (!in) throw FileNotFound("report csv not found: " + input_csv);
    const std::vector<EvaluationReport> reports = parse_report_csv(in);
    const fs::path out_dir(g.out_dir);
    fs::create_directories(out_dir);
    const std::string md_name = fs::path(input_csv).stem().string() + ".md";
    {
        std::ofstream out(out_dir / md_name);
        out << render_markdown(reports, "re-rendered from " + input_csv);
    }
    write_produced_files(out_dir, {md_name}, g.seed);
    std::cout << "wrote " << (out_dir / md_name).string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    g_invocation = join_invocation(argc, argv);

    CLI::App app{"handcrafted-feature image forgery detection benchmark"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--registry", g.registry_dir, "directory of dataset manifests");
    app.add_option("--out", g.out_dir, "output directory")->capture_default_str();
    app.add_option("--seed", g.seed, "base RNG seed")->capture_default_str();
    app.add_option("--jobs", g.jobs, "worker parallelism bound")->capture_default_str();
    app.add_option("--grid-file", g.grid_file, "grid-search override file");

    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic forgery corpus");
    std::size_t synth_count = 200;
    std::string synth_size = "128x128", synth_id = "synthetic";
    double synth_mix = 0.5;
    bool synth_matched = false;
    std::size_t synth_feather = 0;
    synth_cmd->add_option("--count", synth_count, "images per class")->capture_default_str();
    synth_cmd->add_option("--size", synth_size, "image size WxH")->capture_default_str();
    synth_cmd->add_option("--mix", synth_mix, "copy-move fraction of tampered images")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    synth_cmd->add_flag("--matched-quality", synth_matched,
                        "disable the requantization cue (harder forgeries)");
    synth_cmd->add_option("--feather", synth_feather, "feather paste edges by N pixels");
    synth_cmd->add_option("--id", synth_id, "corpus id")->capture_default_str();

    auto* extract_cmd = app.add_subcommand("extract", "extract features for a dataset");
    std::string ex_dataset, ex_method;
    extract_cmd->add_option("--dataset", ex_dataset, "dataset id")->required();
    extract_cmd->add_option("--method", ex_method, "ALAHMADI|DUA|ARMAN|MANDEEP|MOHAMMED")
        ->required();

    auto* train_cmd = app.add_subcommand("train", "train (and tune) an SVM on a dataset");
    std::string tr_dataset, tr_method, tr_kernel = "RBF";
    double tr_c = 0.0, tr_gamma = 0.0, tr_coef0 = 0.0;
    int tr_degree = 3;
    train_cmd->add_option("--dataset", tr_dataset, "dataset id")->required();
    train_cmd->add_option("--method", tr_method, "feature method")->required();
    train_cmd->add_option("--kernel", tr_kernel, "RBF or POLY")->capture_default_str();
    train_cmd->add_option("--c", tr_c, "skip grid search: fixed C");
    train_cmd->add_option("--gamma", tr_gamma, "skip grid search: fixed gamma");
    train_cmd->add_option("--degree", tr_degree, "POLY degree")->capture_default_str();
    train_cmd->add_option("--coef0", tr_coef0, "POLY coef0")->capture_default_str();

    auto* predict_cmd = app.add_subcommand("predict", "classify images with a trained model");
    std::string pr_model, pr_dataset;
    std::vector<std::string> pr_images;
    predict_cmd->add_option("--model", pr_model, "model file")->required();
    predict_cmd->add_option("--image", pr_images, "image path(s)");
    predict_cmd->add_option("--dataset", pr_dataset, "classify a whole registered dataset");

    auto* run_cmd = app.add_subcommand("run", "execute an experiment plan");
    std::string run_plan;
    bool run_dry = false;
    run_cmd->add_option("--plan", run_plan, "plan file")->required();
    run_cmd->add_flag("--dry-run", run_dry, "print the expanded job list and exit");

    auto* report_cmd = app.add_subcommand("report", "re-render a report csv as markdown");
    std::string rep_input;
    report_cmd->add_option("--input", rep_input, "report csv")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (synth_cmd->parsed())
            return cmd_synth(g, synth_count, synth_size, synth_mix, synth_matched, synth_feather,
                             synth_id);
        if (extract_cmd->parsed()) return cmd_extract(g, ex_dataset, ex_method);
        if (train_cmd->parsed())
            return cmd_train(g, tr_dataset, tr_method, tr_kernel, tr_c, tr_gamma, tr_degree,
                             tr_coef0);
        if (predict_cmd->parsed()) return cmd_predict(g, pr_model, pr_images, pr_dataset);
        if (run_cmd->parsed()) return cmd_run(g, run_plan, run_dry);
        if (report_cmd->parsed()) return cmd_report(g, rep_input);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
