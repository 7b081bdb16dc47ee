#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "forens/errors.hpp"
#include "forens/metrics.hpp"

namespace forens {

// Benchmark table cell: "93.18% (0.93)", with a trailing '*' when
// the run was degenerate.
inline std::string format_report_cell(const EvaluationReport& r) {
    if (r.note.rfind("NONCONVERGENT", 0) == 0) return "NC";
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.2f%% (%.2f)%s", r.metrics.accuracy_pct,
                  r.metrics.macro_f1, r.metrics.degenerate ? "*" : "");
    return buf;
}

inline std::string render_csv(const std::vector<EvaluationReport>& reports,
                              const std::string& header_note = "") {
    if (reports.empty()) throw EmptyInput("render_csv: no reports");
    std::string out = "# forens evaluation report\n";
    if (!header_note.empty()) {
        std::istringstream lines(header_note);
        std::string line;
        while (std::getline(lines, line)) out += "# " + line + "\n";
    }
    out += "set,method,train,test,accuracy,macro_f1,p_prec,p_rec,t_prec,t_rec,degenerate,kernel,"
           "C,gamma_or_degree,seed\n";
    char buf[160];
    for (const auto& r : reports) {
        const bool poly = r.kernel.kind == KernelKind::POLY;
        std::snprintf(buf, sizeof(buf),
                      "%.2f,%.2f,%.4f,%.4f,%.4f,%.4f,%s,%s,%g,%g,%llu",
                      r.metrics.accuracy_pct, r.metrics.macro_f1, r.metrics.pristine.precision,
                      r.metrics.pristine.recall, r.metrics.tampered.precision,
                      r.metrics.tampered.recall, r.metrics.degenerate ? "true" : "false",
                      kernel_kind_name(r.kernel.kind), r.c,
                      poly ? static_cast<double>(r.kernel.degree) : r.kernel.gamma,
                      static_cast<unsigned long long>(r.seed));
        out += r.set_id + "," + r.method + "," + r.train_id + "," + r.test_id + "," + buf + "\n";
        if (!r.note.empty()) out += "# ^ note: " + r.note + "\n";
    }
    return out;
}

namespace detail {

template <typename T>
inline void push_unique(std::vector<T>& v, const T& x) {
    if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
}

inline std::string markdown_row(const std::vector<std::string>& cells) {
    std::string out = "|";
    for (const auto& c : cells) out += " " + c + " |";
    out += "\n";
    return out;
}

} // namespace detail

// Markdown tables, one shape per protocol: SET1 matrices are methods x datasets,
// cross/wild tables are (method, train) rows x test-dataset columns, and
// amalgamation tables are methods x (samples..., mean).
inline std::string render_markdown(const std::vector<EvaluationReport>& reports,
                                   const std::string& header_note = "") {
    if (reports.empty()) throw EmptyInput("render_markdown: no reports");
    std::string out = "# Evaluation report\n";
    if (!header_note.empty()) {
        std::istringstream lines(header_note);
        std::string line;
        while (std::getline(lines, line)) out += "> " + line + "\n";
    }

    std::vector<std::string> set_order;
    for (const auto& r : reports) detail::push_unique(set_order, r.set_id);

    for (const auto& set_id : set_order) {
        std::vector<const EvaluationReport*> rows;
        for (const auto& r : reports)
            if (r.set_id == set_id) rows.push_back(&r);

        out += "\n## " + set_id + "\n\n";
        const bool grouped_by_train = set_id == "SET2_CROSS" || set_id == "SET3_WILD";

        std::vector<std::string> columns;
        for (const auto* r : rows) detail::push_unique(columns, r->test_id);

        if (grouped_by_train) {
            std::vector<std::pair<std::string, std::string>> row_keys; // (method, train)
            for (const auto* r : rows)
                detail::push_unique(row_keys, std::make_pair(r->method, r->train_id));
            std::vector<std::string> header = {"Method", "Train"};
            header.insert(header.end(), columns.begin(), columns.end());
            out += detail::markdown_row(header);
            out += detail::markdown_row(std::vector<std::string>(header.size(), "---"));
            for (const auto& [method, train] : row_keys) {
                std::vector<std::string> cells = {method, train};
                for (const auto& col : columns) {
                    std::string cell = "-";
                    for (const auto* r : rows)
                        if (r->method == method && r->train_id == train && r->test_id == col)
                            cell = format_report_cell(*r);
                    cells.push_back(cell);
                }
                out += detail::markdown_row(cells);
            }
        } else {
            std::vector<std::string> methods;
            for (const auto* r : rows) detail::push_unique(methods, r->method);
            std::vector<std::string> header = {"Method"};
            header.insert(header.end(), columns.begin(), columns.end());
            out += detail::markdown_row(header);
            out += detail::markdown_row(std::vector<std::string>(header.size(), "---"));
            for (const auto& method : methods) {
                std::vector<std::string> cells = {method};
                for (const auto& col : columns) {
                    std::string cell = "-";
                    for (const auto* r : rows)
                        if (r->method == method && r->test_id == col)
                            cell = format_report_cell(*r);
                    cells.push_back(cell);
                }
                out += detail::markdown_row(cells);
            }
        }
    }
    return out;
}

// Reads back a CSV produced by render_csv (for re-rendering).
inline std::vector<EvaluationReport> parse_report_csv(std::istream& in) {
    std::vector<EvaluationReport> reports;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) { // column header
            header_seen = true;
            continue;
        }
        std::vector<std::string> f;
        std::string cur;
        for (char ch : line) {
            if (ch == ',') {
                f.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(ch);
            }
        }
        f.push_back(cur);
        if (f.size() != 15) throw ParseError("report csv: expected 15 columns");
        EvaluationReport r;
        r.set_id = f[0];
        r.method = f[1];
        r.train_id = f[2];
        r.test_id = f[3];
        r.metrics.accuracy_pct = std::stod(f[4]);
        r.metrics.macro_f1 = std::stod(f[5]);
        r.metrics.pristine.precision = std::stod(f[6]);
        r.metrics.pristine.recall = std::stod(f[7]);
        r.metrics.tampered.precision = std::stod(f[8]);
        r.metrics.tampered.recall = std::stod(f[9]);
        r.metrics.degenerate = f[10] == "true";
        r.kernel.kind = parse_kernel_kind(f[11]);
        r.c = std::stod(f[12]);
        if (r.kernel.kind == KernelKind::POLY)
            r.kernel.degree = static_cast<int>(std::stod(f[13]));
        else
            r.kernel.gamma = std::stod(f[13]);
        r.seed = std::stoull(f[14]);
        // per-class F1 is reconstructible from precision/recall
        for (ClassMetrics* m : {&r.metrics.pristine, &r.metrics.tampered})
            m->f1 = (m->precision + m->recall) > 0.0
                        ? 2.0 * m->precision * m->recall / (m->precision + m->recall)
                        : 0.0;
        reports.push_back(std::move(r));
    }
    if (reports.empty()) throw EmptyInput("report csv: no data rows");
    return reports;
}

} // namespace forens
