#include "sensboot/eval.hpp"

#include <cstdio>
#include <map>

#include <json.hpp>

#include "sensboot/error.hpp"

namespace sensboot {

void ConfusionMatrix::add(BinaryLabel predicted, BinaryLabel gold) {
  const bool p = predicted == BinaryLabel::kSensitive;
  const bool g = gold == BinaryLabel::kSensitive;
  if (p && g) ++tp;
  else if (p) ++fp;
  else if (g) ++fn;
  else ++tn;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& o) {
  tp += o.tp;
  fp += o.fp;
  tn += o.tn;
  fn += o.fn;
  return *this;
}

ConfusionMatrix confusion(const std::vector<BinaryLabel>& predictions,
                          const std::vector<BinaryLabel>& golds) {
  if (predictions.size() != golds.size()) {
    throw DataError("predictions and gold labels differ in length (" +
                    std::to_string(predictions.size()) + " vs " +
                    std::to_string(golds.size()) + ")");
  }
  if (golds.empty()) throw DataError("cannot evaluate an empty set");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < golds.size(); ++i) cm.add(predictions[i], golds[i]);
  return cm;
}

Ratio safe_ratio(double num, double den) {
  if (den == 0.0) return {0.0, true};
  return {num / den, false};
}

namespace {

Ratio f1(const Ratio& p, const Ratio& r) {
  Ratio out = safe_ratio(2.0 * p.value * r.value, p.value + r.value);
  out.degenerate = out.degenerate || p.degenerate || r.degenerate;
  return out;
}

}  // namespace

BinaryMetrics metrics(const ConfusionMatrix& cm) {
  const auto d = [](std::uint64_t v) { return static_cast<double>(v); };
  BinaryMetrics m;
  m.precision_s = safe_ratio(d(cm.tp), d(cm.tp + cm.fp));
  m.recall_s = safe_ratio(d(cm.tp), d(cm.tp + cm.fn));
  m.precision_ns = safe_ratio(d(cm.tn), d(cm.tn + cm.fn));
  m.recall_ns = safe_ratio(d(cm.tn), d(cm.tn + cm.fp));
  m.f1_s = f1(m.precision_s, m.recall_s);
  m.f1_ns = f1(m.precision_ns, m.recall_ns);
  m.macro_f1 = {(m.f1_s.value + m.f1_ns.value) / 2.0,
                m.f1_s.degenerate || m.f1_ns.degenerate};
  m.accuracy = safe_ratio(d(cm.tp + cm.tn), d(cm.total()));
  return m;
}

std::vector<ClassRecall> per_class_recall(const std::vector<BinaryLabel>& predictions,
                                          const std::vector<std::string>& golds,
                                          const LabelMapping& mapping) {
  if (predictions.size() != golds.size()) {
    throw DataError("predictions and gold labels differ in length");
  }
  std::map<std::string, ClassRecall> rows;
  for (std::size_t i = 0; i < golds.size(); ++i) {
    const BinaryLabel collapsed = mapping.collapse(golds[i]);
    auto& row = rows[golds[i]];
    row.gold_class = golds[i];
    row.collapsed = collapsed;
    ++row.support;
    if (predictions[i] == collapsed) ++row.hits;
  }
  std::vector<ClassRecall> out;
  out.reserve(rows.size());
  for (auto& [name, row] : rows) {
    row.recall = static_cast<double>(row.hits) / static_cast<double>(row.support);
    out.push_back(row);
  }
  return out;
}

double weighted_average_recall(const std::vector<ClassRecall>& table) {
  if (table.empty()) throw DataError("weighted recall of an empty table");
  double num = 0.0;
  double den = 0.0;
  for (const auto& row : table) {
    num += static_cast<double>(row.support) * row.recall;
    den += static_cast<double>(row.support);
  }
  if (den == 0.0) throw DataError("weighted recall with zero total support");
  return num / den;
}

MetricsReport build_report(const std::vector<BinaryLabel>& predictions,
                           const std::vector<std::string>& golds,
                           const LabelMapping& mapping, std::string description) {
  std::vector<BinaryLabel> binary;
  binary.reserve(golds.size());
  for (const auto& g : golds) binary.push_back(mapping.collapse(g));
  MetricsReport r;
  r.confusion = confusion(predictions, binary);
  r.binary = metrics(r.confusion);
  r.classes = per_class_recall(predictions, golds, mapping);
  r.weighted_average_recall = weighted_average_recall(r.classes);
  r.description = std::move(description);
  return r;
}

namespace {

std::vector<std::pair<std::string, Ratio>> binary_rows(const BinaryMetrics& m) {
  return {{"precision_s", m.precision_s}, {"recall_s", m.recall_s},
          {"precision_ns", m.precision_ns}, {"recall_ns", m.recall_ns},
          {"f1_s", m.f1_s}, {"f1_ns", m.f1_ns},
          {"macro_f1", m.macro_f1}, {"accuracy", m.accuracy}};
}

constexpr const char* kWarNote =
    "weighted average recall covers every gold class, nonsensitive included";

}  // namespace

std::string format_report_text(const MetricsReport& r) {
  std::string out;
  char buf[256];
  if (!r.description.empty()) out += "# " + r.description + "\n";
  out += "# " + std::string(kWarNote) + "\n";
  std::snprintf(buf, sizeof buf, "%-24s %10s\n", "metric", "value");
  out += buf;
  for (const auto& [name, ratio] : binary_rows(r.binary)) {
    std::snprintf(buf, sizeof buf, "%-24s %10.4f%s\n", name.c_str(), ratio.value,
                  ratio.degenerate ? "  (degenerate 0/0)" : "");
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "%-24s %10.4f\n", "weighted_average_recall",
                r.weighted_average_recall);
  out += buf;
  std::snprintf(buf, sizeof buf, "\nconfusion  tp=%llu fp=%llu tn=%llu fn=%llu\n\n",
                static_cast<unsigned long long>(r.confusion.tp),
                static_cast<unsigned long long>(r.confusion.fp),
                static_cast<unsigned long long>(r.confusion.tn),
                static_cast<unsigned long long>(r.confusion.fn));
  out += buf;
  std::snprintf(buf, sizeof buf, "%-24s %-12s %8s %10s\n", "class", "collapsed",
                "support", "recall");
  out += buf;
  for (const auto& row : r.classes) {
    std::snprintf(buf, sizeof buf, "%-24s %-12s %8zu %10.4f\n", row.gold_class.c_str(),
                  std::string(to_string(row.collapsed)).c_str(), row.support,
                  row.recall);
    out += buf;
  }
  return out;
}

std::string format_report_jsonl(const MetricsReport& r) {
  std::string out;
  auto line = [&](const std::string& name, double value,
                  std::vector<std::string> flags) {
    nlohmann::json j;
    j["name"] = name;
    j["value"] = value;
    j["flags"] = std::move(flags);
    out += j.dump() + "\n";
  };
  for (const auto& [name, ratio] : binary_rows(r.binary)) {
    line(name, ratio.value,
         ratio.degenerate ? std::vector<std::string>{"degenerate"}
                          : std::vector<std::string>{});
  }
  line("weighted_average_recall", r.weighted_average_recall,
       {"includes_nonsensitive_classes"});
  line("tp", static_cast<double>(r.confusion.tp), {"count"});
  line("fp", static_cast<double>(r.confusion.fp), {"count"});
  line("tn", static_cast<double>(r.confusion.tn), {"count"});
  line("fn", static_cast<double>(r.confusion.fn), {"count"});
  for (const auto& row : r.classes) {
    line("recall[" + row.gold_class + "]", row.recall,
         {std::string(to_string(row.collapsed)),
          "support=" + std::to_string(row.support)});
  }
  return out;
}

}  // namespace sensboot
