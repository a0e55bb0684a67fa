#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sensboot/corpus.hpp"

namespace sensboot {

// Sensitive is the positive class.
struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + fp + tn + fn; }
  void add(BinaryLabel predicted, BinaryLabel gold);
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  bool operator==(const ConfusionMatrix&) const = default;
};

/// Throws DataError on length mismatch or empty input.
ConfusionMatrix confusion(const std::vector<BinaryLabel>& predictions,
                          const std::vector<BinaryLabel>& golds);

// A ratio whose denominator was zero; the value is reported as 0.
struct Ratio {
  double value = 0.0;
  bool degenerate = false;
};

Ratio safe_ratio(double num, double den);

struct BinaryMetrics {
  Ratio precision_s, recall_s, precision_ns, recall_ns;
  Ratio f1_s, f1_ns, macro_f1;
  Ratio accuracy;
};

BinaryMetrics metrics(const ConfusionMatrix& cm);

struct ClassRecall {
  std::string gold_class;
  BinaryLabel collapsed = BinaryLabel::kSensitive;
  std::size_t support = 0;
  std::size_t hits = 0;  // predicted as the collapsed label
  double recall = 0.0;
};

/// For a sensitive sub-class, recall is the fraction of its examples
/// predicted sensitive; for a nonsensitive class, the fraction predicted
/// nonsensitive. Rows are ordered by class name. Throws DataError for
/// unmapped classes or a length mismatch.
std::vector<ClassRecall> per_class_recall(const std::vector<BinaryLabel>& predictions,
                                          const std::vector<std::string>& golds,
                                          const LabelMapping& mapping);

/// sum(support * recall) / sum(support). Throws DataError for an empty
/// table or zero total support.
double weighted_average_recall(const std::vector<ClassRecall>& table);

struct MetricsReport {
  ConfusionMatrix confusion;
  BinaryMetrics binary;
  std::vector<ClassRecall> classes;
  double weighted_average_recall = 0.0;
  std::string description;
};

MetricsReport build_report(const std::vector<BinaryLabel>& predictions,
                           const std::vector<std::string>& golds,
                           const LabelMapping& mapping, std::string description);

/// Aligned, human-readable table.
std::string format_report_text(const MetricsReport& report);
/// One JSON object per line: {"name", "value", "flags"}.
std::string format_report_jsonl(const MetricsReport& report);

}  // namespace sensboot
