#include "mmgl/harness/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "mmgl/error.hpp"

namespace mmgl {
namespace {

void require_pairs(std::span<const int> preds, std::span<const int> gold) {
  if (preds.size() != gold.size()) {
    throw Error(Errc::LengthMismatch, std::to_string(preds.size()) + " predictions for " +
                                          std::to_string(gold.size()) + " gold labels");
  }
  if (gold.empty()) throw Error(Errc::Empty, "no predictions to score");
}

}  // namespace

double accuracy(std::span<const int> preds, std::span<const int> gold) {
  require_pairs(preds, gold);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) correct += preds[i] == gold[i];
  return static_cast<double>(correct) / static_cast<double>(gold.size());
}

std::vector<std::vector<std::size_t>> confusion_matrix(std::span<const int> preds, std::span<const int> gold,
                                                       std::size_t num_classes) {
  require_pairs(preds, gold);
  std::vector<std::vector<std::size_t>> m(num_classes, std::vector<std::size_t>(num_classes + 1, 0));
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] < 0 || static_cast<std::size_t>(gold[i]) >= num_classes) {
      throw Error(Errc::LabelOutOfRange, "gold label " + std::to_string(gold[i]));
    }
    if (preds[i] >= static_cast<int>(num_classes)) {
      throw Error(Errc::LabelOutOfRange, "predicted label " + std::to_string(preds[i]));
    }
    ++m[gold[i]][preds[i] < 0 ? num_classes : static_cast<std::size_t>(preds[i])];
  }
  return m;
}

double macro_f1(std::span<const int> preds, std::span<const int> gold, std::size_t num_classes) {
  const auto m = confusion_matrix(preds, gold, num_classes);
  double total = 0.0;
  std::size_t counted = 0;
  for (std::size_t c = 0; c < num_classes; ++c) {
    std::size_t support = 0, predicted = 0;
    for (std::size_t j = 0; j <= num_classes; ++j) support += m[c][j];
    for (std::size_t r = 0; r < num_classes; ++r) predicted += m[r][c];
    if (support == 0 && predicted == 0) continue;
    const double tp = static_cast<double>(m[c][c]);
    total += 2.0 * tp / static_cast<double>(support + predicted);
    ++counted;
  }
  return counted ? total / static_cast<double>(counted) : 0.0;
}

MeanStd mean_std(std::span<const double> values) {
  if (values.empty()) throw Error(Errc::Empty, "no values to aggregate");
  MeanStd out;
  for (double v : values) out.mean += v;
  out.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

double structure_gain(std::span<const SettingResult> results) {
  std::optional<double> aware, agnostic;
  for (const auto& r : results) {
    auto& best = r.structure_aware ? aware : agnostic;
    best = best ? std::max(*best, r.accuracy) : r.accuracy;
  }
  if (!aware) throw Error(Errc::MissingGroup, "no structure-aware results");
  if (!agnostic) throw Error(Errc::MissingGroup, "no structure-agnostic results");
  return *aware - *agnostic;
}

std::map<std::string, double> structure_gain_by_dataset(std::span<const SettingResult> results) {
  std::map<std::string, std::vector<SettingResult>> groups;
  for (const auto& r : results) groups[r.dataset].push_back(r);
  std::map<std::string, double> out;
  for (const auto& [name, rs] : groups) {
    try {
      out[name] = structure_gain(rs);
    } catch (const Error& e) {
      throw Error(e.code(), "dataset '" + name + "': " + e.what());
    }
  }
  return out;
}

}  // namespace mmgl
