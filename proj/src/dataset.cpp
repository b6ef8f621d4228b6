#include "grfg/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace grfg {

Dataset::Dataset(std::vector<Descriptor> columns, std::vector<double> target,
                 std::string target_name)
    : columns_(std::move(columns)), target_(std::move(target)), target_name_(std::move(target_name)) {
    if (columns_.empty()) throw std::invalid_argument("Dataset: no descriptors");
    if (target_.empty()) throw std::invalid_argument("Dataset: empty target");
    n_samples_ = target_.size();
    std::unordered_set<std::string> seen;
    for (const auto& c : columns_) {
        if (c.values.size() != n_samples_) {
            throw std::invalid_argument("Dataset: column '" + c.name + "' has " +
                                        std::to_string(c.values.size()) + " values, expected " +
                                        std::to_string(n_samples_));
        }
        if (!seen.insert(c.name).second) {
            throw std::invalid_argument("Dataset: duplicate column name '" + c.name + "'");
        }
        for (double v : c.values) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("Dataset: non-finite value in column '" + c.name + "'");
            }
        }
    }
    for (double v : target_) {
        if (!std::isfinite(v)) throw std::invalid_argument("Dataset: non-finite target value");
    }
}

std::size_t Dataset::find(const std::string& name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (columns_[i].name == name) return i;
    }
    return npos;
}

Dataset Dataset::with_appended(std::vector<Descriptor> extra) const {
    std::vector<Descriptor> cols = columns_;
    for (auto& d : extra) cols.push_back(std::move(d));
    return Dataset(std::move(cols), target_, target_name_);
}

Dataset Dataset::subset(const std::vector<std::size_t>& keep) const {
    std::vector<Descriptor> cols;
    cols.reserve(keep.size());
    for (std::size_t i : keep) cols.push_back(columns_.at(i));
    return Dataset(std::move(cols), target_, target_name_);
}

namespace {

// Splits one CSV line. Quoted cells ("" escapes a quote) occur only in
// headers of exported files; numeric cells are never quoted.
std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cell += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell += c;
            }
        } else if (c == '"' && cell.empty()) {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(cell);
            cell.clear();
        } else {
            cell += c;
        }
    }
    if (quoted) {
        throw InputError("CSV line " + std::to_string(line_no) + ": unterminated quote");
    }
    cells.push_back(cell);
    return cells;
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& col) {
    if (cell.empty()) {
        throw InputError("CSV: missing value at row " + std::to_string(row) + ", column '" + col +
                         "'");
    }
    const char* begin = cell.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end != begin + cell.size() || !std::isfinite(v)) {
        throw InputError("CSV: non-numeric value '" + cell + "' at row " + std::to_string(row) +
                         ", column '" + col + "'");
    }
    return v;
}

std::string quote_if_needed(const std::string& name) {
    if (name.find(',') == std::string::npos && name.find('"') == std::string::npos) return name;
    std::string out = "\"";
    for (char c : name) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& target_column) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw InputError("empty file: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::vector<std::string> header = split_csv_line(line, 1);
    std::unordered_set<std::string> seen;
    for (const auto& h : header) {
        if (h.empty()) throw InputError("CSV header contains an empty column name");
        if (!seen.insert(h).second) throw InputError("CSV header has duplicate column '" + h + "'");
    }

    std::size_t target_idx = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == target_column) target_idx = i;
    }
    if (target_idx == header.size()) {
        throw InputError("target column '" + target_column + "' not found in " + path);
    }

    std::vector<std::vector<double>> cols(header.size());
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_csv_line(line, line_no);
        if (cells.size() != header.size()) {
            throw InputError("CSV row " + std::to_string(line_no) + " has " +
                             std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(header.size()));
        }
        for (std::size_t i = 0; i < cells.size(); ++i) {
            cols[i].push_back(parse_cell(cells[i], line_no, header[i]));
        }
    }

    std::size_t n = cols.empty() ? 0 : cols[0].size();
    if (n < 10) {
        throw InputError("dataset has only " + std::to_string(n) +
                         " rows; at least 10 are required to split");
    }

    std::vector<Descriptor> descriptors;
    descriptors.reserve(header.size() - 1);
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i == target_idx) continue;
        descriptors.push_back(Descriptor{header[i], std::move(cols[i]), Expression::raw(header[i])});
    }
    if (descriptors.empty()) throw InputError("CSV contains no descriptor columns besides the target");
    return Dataset(std::move(descriptors), std::move(cols[target_idx]), target_column);
}

void export_dataset(const Dataset& d, const std::string& path) {
    if (d.n_descriptors() == 0) throw InputError("export_dataset: empty descriptor list");
    std::ofstream out(path);
    if (!out) throw InputError("cannot write file: " + path);

    for (const auto& c : d.columns()) out << quote_if_needed(c.name) << ',';
    out << quote_if_needed(d.target_name()) << '\n';

    char buf[64];
    for (std::size_t r = 0; r < d.n_samples(); ++r) {
        for (const auto& c : d.columns()) {
            std::snprintf(buf, sizeof buf, "%.17g", c.values[r]);
            out << buf << ',';
        }
        std::snprintf(buf, sizeof buf, "%.17g", d.target()[r]);
        out << buf << '\n';
    }
    if (!out) throw InputError("write failed: " + path);
}

namespace {

std::vector<double> eval_rec(const Expression& expr, const Dataset& raw, const OperationSet* ops) {
    switch (expr.kind()) {
        case Expression::Kind::Raw: {
            std::size_t i = raw.find(expr.column_name());
            if (i == Dataset::npos) {
                throw InputError("evaluate_expression: unknown column '" + expr.column_name() + "'");
            }
            return raw.column(i).values;
        }
        case Expression::Kind::Unary: {
            if (ops && !ops->contains(expr.op())) {
                throw InputError("evaluate_expression: operation '" +
                                 std::string(op_token(expr.op())) + "' not in the run's set");
            }
            std::vector<double> v = eval_rec(expr.child(), raw, ops);
            for (double& x : v) x = apply_op(expr.op(), x);
            return v;
        }
        case Expression::Kind::Binary: {
            if (ops && !ops->contains(expr.op())) {
                throw InputError("evaluate_expression: operation '" +
                                 std::string(op_token(expr.op())) + "' not in the run's set");
            }
            std::vector<double> l = eval_rec(expr.left(), raw, ops);
            std::vector<double> r = eval_rec(expr.right(), raw, ops);
            for (std::size_t i = 0; i < l.size(); ++i) l[i] = apply_op(expr.op(), l[i], r[i]);
            return l;
        }
    }
    throw std::logic_error("unreachable");
}

}  // namespace

std::vector<double> evaluate_expression(const Expression& expr, const Dataset& raw) {
    return eval_rec(expr, raw, nullptr);
}

std::vector<double> evaluate_expression(const Expression& expr, const Dataset& raw,
                                        const OperationSet& ops) {
    return eval_rec(expr, raw, &ops);
}

Descriptor make_descriptor(const Expression& expr, const Dataset& raw) {
    return Descriptor{expr.str(), evaluate_expression(expr, raw), expr};
}

}  // namespace grfg
