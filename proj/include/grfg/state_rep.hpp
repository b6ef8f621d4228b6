#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "grfg/dataset.hpp"
#include "grfg/info_metrics.hpp"

namespace grfg {

constexpr std::size_t kRepWidth = 49;  // 7 statistics x 7 statistics

// The seven descriptive statistics in pinned order:
// (count, population std, min, max, Q1, median, Q3).
// `count_value` is supplied by the caller: the sample count n in the first
// pass, the column count m in the second — that is where set size enters the
// representation. Quartiles interpolate linearly between order statistics.
std::array<double, 7> seven_stats(std::vector<double> values, double count_value);

// Two-pass statistics over a set of columns: per-column stats give a 7 x m
// matrix, per-row stats over that give 7 x 7, flattened row-major (row =
// first-pass statistic, column = second-pass statistic). Length is always 49
// regardless of descriptor or sample count.
std::vector<double> rep_columns(const std::vector<const std::vector<double>*>& cols);

std::vector<double> rep_descriptor_set(const Dataset& d);
std::vector<double> rep_group(const Dataset& d, const DescriptorGroup& g);

// One-hot over the run's operation set; index stability comes from the set's
// fixed ordering.
std::vector<double> rep_operation(OpKind op, const OperationSet& ops);

std::vector<double> concat_states(std::span<const std::vector<double>> parts);

}  // namespace grfg
