#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "forens/errors.hpp"
#include "forens/rng.hpp"

namespace forens {

enum class Label { PRISTINE, TAMPERED };

inline const char* label_name(Label l) { return l == Label::PRISTINE ? "pristine" : "tampered"; }

inline Label parse_label(const std::string& s) {
    if (s == "pristine") return Label::PRISTINE;
    if (s == "tampered") return Label::TAMPERED;
    throw ParseError("unknown label '" + s + "'");
}

enum class ForgeryType { SPLICE, COPY_MOVE, ERASE_FILL, RETOUCH };

inline const char* forgery_type_name(ForgeryType t) {
    switch (t) {
        case ForgeryType::SPLICE: return "splice";
        case ForgeryType::COPY_MOVE: return "copy-move";
        case ForgeryType::ERASE_FILL: return "erase-fill";
        case ForgeryType::RETOUCH: return "retouch";
    }
    return "?";
}

inline ForgeryType parse_forgery_type(const std::string& s) {
    for (ForgeryType t : {ForgeryType::SPLICE, ForgeryType::COPY_MOVE, ForgeryType::ERASE_FILL,
                          ForgeryType::RETOUCH})
        if (s == forgery_type_name(t)) return t;
    throw ParseError("unknown forgery type '" + s + "'");
}

// Scale taxonomy: LARGE means >= 1400 images in total, SMALL means <= 400,
// everything between is MEDIUM. Era: OLD iff released before 2016.
enum class ScaleClass { LARGE, MEDIUM, SMALL };
enum class EraClass { OLD, NEW };

inline const char* scale_class_name(ScaleClass s) {
    switch (s) {
        case ScaleClass::LARGE: return "LARGE";
        case ScaleClass::MEDIUM: return "MEDIUM";
        case ScaleClass::SMALL: return "SMALL";
    }
    return "?";
}

inline const char* era_class_name(EraClass e) { return e == EraClass::OLD ? "OLD" : "NEW"; }

struct ManifestEntry {
    std::string path; // relative to the manifest's directory (or absolute)
    Label label = Label::PRISTINE;
    std::string source_id; // provenance through amalgamation
};

struct DatasetManifest {
    std::string id;
    int release_year = 0;
    std::vector<ForgeryType> forgery_types;
    bool in_the_wild = false;
    std::optional<std::pair<std::size_t, std::size_t>> declared_subsample;
    std::vector<ManifestEntry> entries;
    std::filesystem::path base_dir;
    std::vector<std::string> missing_files; // non-fatal, filled by load_manifest

    std::size_t n_pristine() const {
        std::size_t n = 0;
        for (const auto& e : entries)
            if (e.label == Label::PRISTINE) ++n;
        return n;
    }
    std::size_t n_tampered() const { return entries.size() - n_pristine(); }

    ScaleClass scale_class() const {
        const std::size_t total = entries.size();
        if (total >= 1400) return ScaleClass::LARGE;
        if (total <= 400) return ScaleClass::SMALL;
        return ScaleClass::MEDIUM;
    }

    EraClass era_class() const { return release_year < 2016 ? EraClass::OLD : EraClass::NEW; }

    std::filesystem::path resolve(const ManifestEntry& e) const {
        std::filesystem::path p(e.path);
        if (p.is_absolute() || base_dir.empty()) return p;
        return base_dir / p;
    }

    void validate() const {
        if (id.empty()) throw InvariantViolation("manifest has no id");
        std::set<std::string> seen;
        for (const auto& e : entries)
            if (!seen.insert(e.path).second)
                throw InvariantViolation("duplicate entry path: " + e.path);
    }
};

namespace detail {

inline std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

} // namespace detail

// Manifest text format: a header block of `key: value` lines, then one entry
// per line as `label,relative_path`. Blank lines and '#' comments are skipped.
inline DatasetManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FileNotFound("manifest not found: " + path.string());

    DatasetManifest m;
    m.base_dir = path.parent_path();
    std::optional<ScaleClass> declared_scale;
    std::optional<EraClass> declared_era;

    std::string line;
    int line_no = 0;
    auto fail = [&](const std::string& msg) {
        throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.rfind("pristine,", 0) == 0 || t.rfind("tampered,", 0) == 0) {
            const std::size_t comma = t.find(',');
            ManifestEntry e;
            e.label = parse_label(t.substr(0, comma));
            e.path = detail::trim(t.substr(comma + 1));
            if (e.path.empty()) fail("entry has empty path");
            e.source_id = m.id;
            m.entries.push_back(std::move(e));
            continue;
        }
        const std::size_t colon = t.find(':');
        if (colon == std::string::npos) fail("expected 'key: value' or 'label,path'");
        const std::string key = detail::trim(t.substr(0, colon));
        const std::string value = detail::trim(t.substr(colon + 1));
        try {
            if (key == "id") {
                m.id = value;
            } else if (key == "release_year") {
                m.release_year = std::stoi(value);
            } else if (key == "forgery_types") {
                for (const auto& f : detail::split_commas(value))
                    if (!detail::trim(f).empty())
                        m.forgery_types.push_back(parse_forgery_type(detail::trim(f)));
            } else if (key == "in_the_wild") {
                if (value != "true" && value != "false") fail("in_the_wild must be true or false");
                m.in_the_wild = (value == "true");
            } else if (key == "subsample") {
                const auto parts = detail::split_commas(value);
                if (parts.size() != 2) fail("subsample must be 'n_pristine,n_tampered'");
                m.declared_subsample = {std::stoul(detail::trim(parts[0])),
                                        std::stoul(detail::trim(parts[1]))};
            } else if (key == "scale_class") {
                if (value == "LARGE") declared_scale = ScaleClass::LARGE;
                else if (value == "MEDIUM") declared_scale = ScaleClass::MEDIUM;
                else if (value == "SMALL") declared_scale = ScaleClass::SMALL;
                else fail("scale_class must be LARGE, MEDIUM or SMALL");
            } else if (key == "era_class") {
                if (value == "OLD") declared_era = EraClass::OLD;
                else if (value == "NEW") declared_era = EraClass::NEW;
                else fail("era_class must be OLD or NEW");
            } else {
                fail("unknown header key '" + key + "'");
            }
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception& e) {
            fail(std::string("bad value: ") + e.what());
        }
    }
    for (auto& e : m.entries) e.source_id = m.id; // id may appear after entries

    m.validate();
    if (declared_scale && *declared_scale != m.scale_class())
        throw InvariantViolation(path.string() + ": declared scale_class " +
                                 scale_class_name(*declared_scale) + " but entry count implies " +
                                 scale_class_name(m.scale_class()));
    if (declared_era && *declared_era != m.era_class())
        throw InvariantViolation(path.string() + ": declared era_class inconsistent with year");

    for (const auto& e : m.entries) {
        std::error_code ec;
        if (!std::filesystem::exists(m.resolve(e), ec)) m.missing_files.push_back(e.path);
    }
    return m;
}

inline void save_manifest(const DatasetManifest& m, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write manifest: " + path.string());
    out << "id: " << m.id << "\n";
    out << "release_year: " << m.release_year << "\n";
    if (!m.forgery_types.empty()) {
        out << "forgery_types: ";
        for (std::size_t i = 0; i < m.forgery_types.size(); ++i)
            out << (i ? "," : "") << forgery_type_name(m.forgery_types[i]);
        out << "\n";
    }
    out << "in_the_wild: " << (m.in_the_wild ? "true" : "false") << "\n";
    if (m.declared_subsample)
        out << "subsample: " << m.declared_subsample->first << ","
            << m.declared_subsample->second << "\n";
    for (const auto& e : m.entries) out << label_name(e.label) << "," << e.path << "\n";
}

// Seeded uniform sub-sample without replacement; entry order is preserved.
inline DatasetManifest subsample(const DatasetManifest& m, std::size_t n_pristine,
                                 std::size_t n_tampered, std::uint64_t seed) {
    std::vector<std::size_t> pristine_idx, tampered_idx;
    for (std::size_t i = 0; i < m.entries.size(); ++i)
        (m.entries[i].label == Label::PRISTINE ? pristine_idx : tampered_idx).push_back(i);
    if (n_pristine > pristine_idx.size() || n_tampered > tampered_idx.size())
        throw InsufficientSamples("subsample: dataset '" + m.id + "' has only " +
                                  std::to_string(pristine_idx.size()) + "/" +
                                  std::to_string(tampered_idx.size()) + " pristine/tampered, " +
                                  "asked for " + std::to_string(n_pristine) + "/" +
                                  std::to_string(n_tampered));

    std::vector<std::size_t> chosen;
    {
        Rng rng(derive_seed(seed, 1));
        for (std::size_t k : rng.sample_without_replacement(pristine_idx.size(), n_pristine))
            chosen.push_back(pristine_idx[k]);
    }
    {
        Rng rng(derive_seed(seed, 2));
        for (std::size_t k : rng.sample_without_replacement(tampered_idx.size(), n_tampered))
            chosen.push_back(tampered_idx[k]);
    }
    std::sort(chosen.begin(), chosen.end());

    DatasetManifest out = m;
    out.entries.clear();
    out.missing_files.clear();
    for (std::size_t i : chosen) out.entries.push_back(m.entries[i]);
    out.declared_subsample = {n_pristine, n_tampered};
    return out;
}

// Balanced mixture: per-source seeded sub-sample, then union. Entries keep
// their source id and resolve against their original directories.
inline DatasetManifest amalgamate(const std::vector<const DatasetManifest*>& sources,
                                  std::size_t per_source_pristine,
                                  std::size_t per_source_tampered, std::uint64_t seed) {
    if (sources.empty()) throw EmptyInput("amalgamate: no sources");
    DatasetManifest out;
    std::string ids;
    out.in_the_wild = true;
    for (std::size_t s = 0; s < sources.size(); ++s) {
        const DatasetManifest& src = *sources[s];
        DatasetManifest sub =
            subsample(src, per_source_pristine, per_source_tampered, derive_seed(seed, s));
        for (const auto& e : sub.entries) {
            ManifestEntry copy = e;
            copy.path = src.resolve(e).string(); // absolute-ize across directories
            copy.source_id = src.id;
            out.entries.push_back(std::move(copy));
        }
        for (ForgeryType t : src.forgery_types)
            if (std::find(out.forgery_types.begin(), out.forgery_types.end(), t) ==
                out.forgery_types.end())
                out.forgery_types.push_back(t);
        out.release_year = std::max(out.release_year, src.release_year);
        out.in_the_wild = out.in_the_wild && src.in_the_wild;
        ids += (s ? "+" : "") + src.id;
    }
    out.id = "amalgam(" + ids + ")";
    out.base_dir.clear();
    out.declared_subsample = {per_source_pristine * sources.size(),
                              per_source_tampered * sources.size()};
    return out;
}

// Seeded stratified train/test split.
struct SplitPlan {
    std::vector<ManifestEntry> train;
    std::vector<ManifestEntry> test;
    std::uint64_t seed = 0;
    double train_fraction = 0.0;
};

inline SplitPlan stratified_split(const DatasetManifest& m, double train_fraction,
                                  std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw Error("stratified_split: train_fraction must be in (0, 1)");
    SplitPlan plan;
    plan.seed = seed;
    plan.train_fraction = train_fraction;
    for (int cls = 0; cls < 2; ++cls) {
        const Label label = cls == 0 ? Label::PRISTINE : Label::TAMPERED;
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < m.entries.size(); ++i)
            if (m.entries[i].label == label) idx.push_back(i);
        if (idx.size() < 2)
            throw TooFewSamplesPerClass("stratified_split: need at least 2 entries per class");
        Rng rng(derive_seed(seed, 100 + static_cast<std::uint64_t>(cls)));
        rng.shuffle(idx);
        std::size_t n_train = static_cast<std::size_t>(
            std::llround(train_fraction * static_cast<double>(idx.size())));
        if (n_train < 1) n_train = 1;
        if (n_train >= idx.size()) n_train = idx.size() - 1;
        for (std::size_t j = 0; j < idx.size(); ++j)
            (j < n_train ? plan.train : plan.test).push_back(m.entries[idx[j]]);
    }
    return plan;
}

// A directory of manifests, discovered by the .manifest extension.
struct Registry {
    std::map<std::string, DatasetManifest> datasets;

    static Registry discover(const std::filesystem::path& dir) {
        Registry reg;
        if (!std::filesystem::is_directory(dir))
            throw FileNotFound("registry directory not found: " + dir.string());
        std::vector<std::filesystem::path> files;
        for (const auto& entry : std::filesystem::directory_iterator(dir))
            if (entry.is_regular_file() && entry.path().extension() == ".manifest")
                files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            DatasetManifest m = load_manifest(f);
            reg.datasets.emplace(m.id, std::move(m));
        }
        return reg;
    }

    const DatasetManifest& get(const std::string& id) const {
        auto it = datasets.find(id);
        if (it == datasets.end()) throw UnknownDataset("dataset '" + id + "' is not registered");
        return it->second;
    }

    std::vector<std::string> ids(bool wild_only, bool standard_only) const {
        std::vector<std::string> out;
        for (const auto& [id, m] : datasets) {
            if (wild_only && !m.in_the_wild) continue;
            if (standard_only && m.in_the_wild) continue;
            out.push_back(id);
        }
        return out;
    }
};

} // namespace forens
