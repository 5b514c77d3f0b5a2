#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mmgl {

/// Fraction of positions where preds equals gold. Throws LengthMismatch, Empty.
double accuracy(std::span<const int> preds, std::span<const int> gold);

/// Rows are gold classes, columns predicted classes plus a final column for
/// missing answers (negative predictions), so each row sums to the class support.
std::vector<std::vector<std::size_t>> confusion_matrix(std::span<const int> preds, std::span<const int> gold,
                                                       std::size_t num_classes);

/// Unweighted mean F1 over classes that occur in gold or preds (F1 = 0 when
/// precision and recall are both 0).
double macro_f1(std::span<const int> preds, std::span<const int> gold, std::size_t num_classes);

struct MeanStd {
  double mean = 0.0;
  /// Sample standard deviation; absent for a single value.
  std::optional<double> std;
};
MeanStd mean_std(std::span<const double> values);

struct SettingResult {
  std::string dataset;
  std::string setting;
  bool structure_aware = false;
  double accuracy = 0.0;
};

/// Best structure-aware accuracy minus best structure-agnostic accuracy.
/// Throws MissingGroup when either group is empty.
double structure_gain(std::span<const SettingResult> results);
/// structure_gain computed separately for each dataset.
std::map<std::string, double> structure_gain_by_dataset(std::span<const SettingResult> results);

}  // namespace mmgl
