#include "grfg/state_rep.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace grfg {

namespace {

double quantile_sorted(const std::vector<double>& sorted, double p) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    double h = p * static_cast<double>(n - 1);
    auto lo = static_cast<std::size_t>(h);
    if (lo >= n - 1) return sorted[n - 1];
    double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

std::array<double, 7> seven_stats(std::vector<double> values, double count_value) {
    if (values.empty()) throw std::invalid_argument("seven_stats: empty input");
    const std::size_t n = values.size();
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);

    std::sort(values.begin(), values.end());
    return {count_value,
            std::sqrt(var),
            values.front(),
            values.back(),
            quantile_sorted(values, 0.25),
            quantile_sorted(values, 0.50),
            quantile_sorted(values, 0.75)};
}

std::vector<double> rep_columns(const std::vector<const std::vector<double>*>& cols) {
    if (cols.empty()) throw std::invalid_argument("rep_columns: no columns");
    const std::size_t m = cols.size();
    const std::size_t n = cols[0]->size();
    if (n == 0) throw std::invalid_argument("rep_columns: no samples");

    // first pass: 7 statistic rows, one entry per column
    std::array<std::vector<double>, 7> rows;
    for (auto& r : rows) r.reserve(m);
    for (const auto* col : cols) {
        auto s = seven_stats(*col, static_cast<double>(n));
        for (std::size_t k = 0; k < 7; ++k) rows[k].push_back(s[k]);
    }

    // second pass over each row, count is now the column count
    std::vector<double> rep;
    rep.reserve(kRepWidth);
    for (const auto& r : rows) {
        auto s = seven_stats(r, static_cast<double>(m));
        rep.insert(rep.end(), s.begin(), s.end());
    }
    return rep;
}

std::vector<double> rep_descriptor_set(const Dataset& d) {
    std::vector<const std::vector<double>*> cols;
    cols.reserve(d.n_descriptors());
    for (const auto& c : d.columns()) cols.push_back(&c.values);
    return rep_columns(cols);
}

std::vector<double> rep_group(const Dataset& d, const DescriptorGroup& g) {
    if (g.members.empty()) throw std::invalid_argument("rep_group: empty group");
    std::vector<const std::vector<double>*> cols;
    cols.reserve(g.members.size());
    for (std::size_t i : g.members) cols.push_back(&d.column(i).values);
    return rep_columns(cols);
}

std::vector<double> rep_operation(OpKind op, const OperationSet& ops) {
    std::vector<double> v(ops.size(), 0.0);
    v[ops.index_of(op)] = 1.0;
    return v;
}

std::vector<double> concat_states(std::span<const std::vector<double>> parts) {
    if (parts.empty()) throw std::invalid_argument("concat_states: no parts");
    std::vector<double> out;
    std::size_t total = 0;
    for (const auto& p : parts) total += p.size();
    out.reserve(total);
    for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

}  // namespace grfg
