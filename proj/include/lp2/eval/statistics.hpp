#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lp2/eval/dataset.hpp"

namespace lp2::eval {

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population
  std::size_t count = 0;
};

MeanStd mean_std(std::span<const double> values);

double path_length(std::span<const Vec2> positions);

/// Straight-line endpoint distance over traveled length; absent for a
/// trajectory that never moves.
std::optional<double> path_efficiency(std::span<const Vec2> positions);

std::size_t levenshtein(const std::vector<std::string>& a, const std::vector<std::string>& b);

/// Interaction classes of a record, in time order.
std::vector<std::string> class_sequence(const TrajectoryRecord& record,
                                        const dsg::SceneGraph& graph);

struct DatasetStats {
  std::size_t records = 0;
  MeanStd distance;      // traveled path length, m
  MeanStd duration;      // s
  MeanStd interactions;  // per record
  MeanStd path_efficiency;
  /// Per record: edit distance to the closest other record's class
  /// sequence over the longer length, averaged. Absent for one record.
  std::optional<double> normalized_levenshtein;
};

DatasetStats dataset_stats(const Dataset& dataset);

enum class Subset { walking_at_start, future_distance_upper_quartile };

std::string_view to_string(Subset subset);
Subset parse_subset(std::string_view name);

/// Linear-interpolation percentile, q in [0, 100].
double percentile(std::vector<double> values, double q);

/// walking_at_start keeps records whose split time lies outside every
/// interaction interval; the upper quartile keeps records whose future
/// path length exceeds the 75th percentile. Records that cannot be split are
/// dropped. A filter already applied to `dataset` is a no-op.
Dataset subset_filter(const Dataset& dataset, Subset which);

}  // namespace lp2::eval
