#include "msaprobe/report.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "msaprobe/errors.h"
#include "msaprobe/experiment.h"

namespace msaprobe {

namespace {

constexpr const char* kMetricNames[] = {"HR.5F", "HR3F", "PWF", "ACC"};
constexpr const char* kMetricKeys[] = {"hr05f", "hr3f", "pwf", "acc"};

std::optional<double> metric(const std::optional<ScoreSummary>& s, int i) {
  if (!s) return std::nullopt;
  switch (i) {
    case 0:
      return s->hr05f;
    case 1:
      return s->hr3f;
    case 2:
      return s->pwf;
    default:
      return s->acc;
  }
}

void set_metric(ScoreSummary& s, int i, double v) {
  switch (i) {
    case 0:
      s.hr05f = v;
      break;
    case 1:
      s.hr3f = v;
      break;
    case 2:
      s.pwf = v;
      break;
    default:
      s.acc = v;
  }
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  for (;;) {
    auto comma = line.find(',', pos);
    out.emplace_back(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

bool ReportRow::operator==(const ReportRow& o) const {
  if (model_id != o.model_id) return false;
  for (int i = 0; i < 4; ++i) {
    if (metric(np, i) != metric(o.np, i) || metric(p, i) != metric(o.p, i)) return false;
  }
  return true;
}

void ReportTable::add(const std::string& model_id, bool pooling, const ScoreSummary& s) {
  auto it = std::find_if(rows.begin(), rows.end(), [&](const ReportRow& r) { return r.model_id == model_id; });
  if (it == rows.end()) {
    rows.push_back({model_id, std::nullopt, std::nullopt});
    it = std::prev(rows.end());
  }
  (pooling ? it->p : it->np) = s;
}

std::string format_percent(std::optional<double> fraction) {
  if (!fraction) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", *fraction * 100.0);
  return buf;
}

std::string render_text(const ReportTable& table) {
  std::size_t name_w = 3;
  for (const ReportRow& r : table.rows) name_w = std::max(name_w, r.model_id.size());

  std::ostringstream out;
  char cell[32];
  out << std::string(name_w, ' ');
  for (const char* m : kMetricNames) {
    std::snprintf(cell, sizeof(cell), " | %-13s", m);
    out << cell;
  }
  out << '\n' << std::string(name_w - 3, ' ') << "FAE";
  for (int i = 0; i < 4; ++i) out << " |    np     p ";
  out << '\n' << std::string(name_w + 4 * 16, '-') << '\n';
  for (const ReportRow& r : table.rows) {
    out << r.model_id << std::string(name_w - r.model_id.size(), ' ');
    for (int i = 0; i < 4; ++i) {
      std::snprintf(cell, sizeof(cell), " | %5s %5s ", format_percent(metric(r.np, i)).c_str(),
                    format_percent(metric(r.p, i)).c_str());
      out << cell;
    }
    out << '\n';
  }
  return out.str();
}

std::string render_markdown(const ReportTable& table) {
  std::ostringstream out;
  out << "| FAE |";
  for (const char* m : kMetricNames) out << ' ' << m << " np | " << m << " p |";
  out << "\n|---|";
  for (int i = 0; i < 8; ++i) out << "---:|";
  out << '\n';
  for (const ReportRow& r : table.rows) {
    out << "| " << r.model_id << " |";
    for (int i = 0; i < 4; ++i) {
      out << ' ' << format_percent(metric(r.np, i)) << " | " << format_percent(metric(r.p, i)) << " |";
    }
    out << '\n';
  }
  return out.str();
}

std::string to_csv(const ReportTable& table) {
  std::ostringstream out;
  out << "model_id";
  for (const char* k : kMetricKeys) out << ',' << k << "_np," << k << "_p";
  out << '\n';
  for (const ReportRow& r : table.rows) {
    out << r.model_id;
    for (int i = 0; i < 4; ++i) {
      for (const auto* s : {&r.np, &r.p}) {
        const auto v = metric(*s, i);
        out << ',' << (v ? format_number(*v) : "n/a");
      }
    }
    out << '\n';
  }
  return out.str();
}

ReportTable parse_report_csv(std::string_view text) {
  ReportTable table;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_no == 1 || line.empty()) continue;

    const auto cells = split_csv_line(line);
    if (cells.size() != 9) throw ParseError(line_no, "expected 9 report columns");
    ReportRow row{cells[0], std::nullopt, std::nullopt};
    for (int i = 0; i < 4; ++i) {
      for (int pooled = 0; pooled < 2; ++pooled) {
        const std::string& c = cells[1 + 2 * i + pooled];
        if (c == "n/a") continue;
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
        if (ec != std::errc() || ptr != c.data() + c.size()) throw ParseError(line_no, "bad number '" + c + "'");
        auto& slot = pooled ? row.p : row.np;
        if (!slot) slot = ScoreSummary{};
        set_metric(*slot, i, v);
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

ReportTable collect_runs(const std::vector<std::string>& run_dirs) {
  ReportTable table;
  for (const std::string& dir : run_dirs) {
    const auto path = std::filesystem::path(dir) / "summary.json";
    std::ifstream in(path);
    if (!in) throw ValidationError("no summary.json in " + dir);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
      ScoreSummary s;
      s.hr05f = j.at("hr05f").get<double>();
      s.hr3f = j.at("hr3f").get<double>();
      s.pwf = j.at("pwf").get<double>();
      s.acc = j.at("acc").get<double>();
      table.add(j.at("model_id").get<std::string>(), j.at("pooling").get<bool>(), s);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(path.string() + ": " + e.what());
    }
  }
  return table;
}

}  // namespace msaprobe
