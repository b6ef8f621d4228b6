#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "grfg/expression.hpp"

namespace grfg {

// Bad user input (files, config, CLI). Maps to exit code 1.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One named descriptor column plus the expression recording its lineage.
// For generated descriptors the name is the canonical expression string.
struct Descriptor {
    std::string name;
    std::vector<double> values;
    Expression expr;

    bool is_original() const { return expr.is_raw(); }
};

// Immutable descriptor matrix plus target vector. All mutation happens by
// constructing a new Dataset, so concurrent readers never need locks.
class Dataset {
public:
    Dataset(std::vector<Descriptor> columns, std::vector<double> target, std::string target_name);

    std::size_t n_samples() const { return n_samples_; }
    std::size_t n_descriptors() const { return columns_.size(); }

    const std::vector<Descriptor>& columns() const { return columns_; }
    const Descriptor& column(std::size_t i) const { return columns_.at(i); }
    const std::vector<double>& target() const { return target_; }
    const std::string& target_name() const { return target_name_; }

    // Index of a column by name, or npos.
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t find(const std::string& name) const;

    Dataset with_appended(std::vector<Descriptor> extra) const;
    Dataset subset(const std::vector<std::size_t>& keep) const;

private:
    std::vector<Descriptor> columns_;
    std::vector<double> target_;
    std::string target_name_;
    std::size_t n_samples_ = 0;
};

// CSV ingestion: header row, ',' separator, '.' decimal point. Every
// non-target column becomes a Raw descriptor in header order. Throws
// InputError (missing file/target, duplicate header, non-numeric cell with
// row/column, fewer than 10 data rows).
Dataset load_csv(const std::string& path, const std::string& target_column);

// Writes descriptors (headers = canonical expression strings; quoted when
// they contain separators) plus the target column, 17 significant digits so
// load_csv(export(d)) reproduces values bit-exactly.
void export_dataset(const Dataset& d, const std::string& path);

// Recursively evaluates `expr` against the raw dataset's columns. The same
// code path generation uses, so stored descriptor values always re-evaluate
// bit-identically. Throws InputError on unknown leaf names.
std::vector<double> evaluate_expression(const Expression& expr, const Dataset& raw);
// Variant that also rejects operations outside the run's operation set.
std::vector<double> evaluate_expression(const Expression& expr, const Dataset& raw,
                                        const OperationSet& ops);

// Builds a descriptor from an expression: evaluates, names it by the
// canonical string.
Descriptor make_descriptor(const Expression& expr, const Dataset& raw);

}  // namespace grfg
