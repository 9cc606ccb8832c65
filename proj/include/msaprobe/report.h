#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "msaprobe/metrics.h"

namespace msaprobe {

/// One encoder row of the benchmark table: scores without (np) and with (p)
/// sliding pooling. Missing runs stay empty and render as "n/a".
struct ReportRow {
  std::string model_id;
  std::optional<ScoreSummary> np;
  std::optional<ScoreSummary> p;

  bool operator==(const ReportRow& o) const;
};

struct ReportTable {
  std::vector<ReportRow> rows;

  /// Adds or replaces the (model_id, pooling) cell group; rows keep first
  /// insertion order.
  void add(const std::string& model_id, bool pooling, const ScoreSummary& s);
  bool operator==(const ReportTable&) const = default;
};

/// "54.2" for 0.542, "n/a" for a missing value.
std::string format_percent(std::optional<double> fraction);

/// Fixed-width text table with HR.5F / HR3F / PWF / ACC x {np, p} columns.
std::string render_text(const ReportTable& table);
std::string render_markdown(const ReportTable& table);

/// Machine-readable form: full-precision fractions, "n/a" for gaps.
std::string to_csv(const ReportTable& table);
ReportTable parse_report_csv(std::string_view text);

/// Reads summary.json from each CV output directory.
ReportTable collect_runs(const std::vector<std::string>& run_dirs);

}  // namespace msaprobe
