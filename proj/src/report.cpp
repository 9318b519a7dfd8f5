// Copyright 2026 The SuperICL Harness Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cctype>
#include <fstream>
#include <sstream>

#include "supericl/runner.hpp"
#include "util.hpp"

namespace sicl {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
}

void prepare_dir(const fs::path& dir, bool overwrite, const char* marker) {
  if (dir.empty()) throw Error(ErrorCode::ConfigError, "no output directory given");
  std::error_code ec;
  if (fs::exists(dir / marker, ec) && !overwrite) {
    throw Error(ErrorCode::OutputExists, dir.string() + " already holds a run (use --overwrite)");
  }
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  fs::remove(dir / "FAILED", ec);
}

json stats_json(const CallStats& s) {
  return {{"label_calls", s.label_calls},
          {"explanation_calls", s.explanation_calls},
          {"cache_hits", s.cache_hits},
          {"backend_invocations", s.backend_invocations},
          {"plugin_invocations", s.plugin_invocations}};
}

std::string fmt_opt(const std::optional<double>& v) {
  return v ? detail::shortest_repr(*v) : std::string();
}

}  // namespace

void emit_report(const RunArtifact& artifact, const fs::path& out_dir, bool overwrite) {
  prepare_dir(out_dir, overwrite, "report.json");
  write_file(out_dir / "report.json", report_to_json(artifact.report).dump(2) + "\n");
  {
    std::ostringstream csv;
    write_records_csv(csv, artifact.report);
    write_file(out_dir / "records.csv", csv.str());
  }
  {
    std::ostringstream csv;
    write_histogram_csv(csv, artifact.report);
    write_file(out_dir / "histogram.csv", csv.str());
  }
  write_file(out_dir / "config.json", artifact.config_snapshot.dump(2) + "\n");
  json stats = stats_json(artifact.stats);
  stats["context_ids"] = artifact.context_ids;
  write_file(out_dir / "stats.json", stats.dump(2) + "\n");
  if (!artifact.prompts.empty()) {
    std::string lines;
    for (const auto& p : artifact.prompts) {
      lines += json{{"id", p.id},
                    {"prompt", p.text},
                    {"entries_included", p.entries_included},
                    {"entries_requested", p.entries_requested},
                    {"token_count", p.token_count}}
                   .dump();
      lines += '\n';
    }
    write_file(out_dir / "prompts.jsonl", lines);
  }
  if (artifact.failed) write_file(out_dir / "FAILED", artifact.failure + "\n");
}

json table_summary_json(const ResultTable& table) {
  json rows = json::array();
  for (const auto& row : table.rows) {
    const auto& r = row.artifact.report;
    rows.push_back({{"name", row.name},
                    {"n", r.n},
                    {"accuracy", r.accuracy},
                    {"mcc", r.mcc ? json(*r.mcc) : json(nullptr)},
                    {"pct_overridden", r.pct_overridden},
                    {"overridden_accuracy",
                     r.overridden_accuracy ? json(*r.overridden_accuracy) : json(nullptr)},
                    {"failed", row.artifact.failed},
                    {"stats", stats_json(row.artifact.stats)}});
  }
  json out = {{"kind", table.kind}, {"rows", rows}};
  out["variance"] = table.variance ? json(*table.variance) : json(nullptr);
  return out;
}

std::string table_csv(const ResultTable& table) {
  std::ostringstream out;
  out << "name,n,accuracy,mcc,pct_overridden,overridden_accuracy\n";
  for (const auto& row : table.rows) {
    const auto& r = row.artifact.report;
    out << row.name << ',' << r.n << ',' << detail::shortest_repr(r.accuracy) << ',' << fmt_opt(r.mcc)
        << ',' << detail::shortest_repr(r.pct_overridden) << ',' << fmt_opt(r.overridden_accuracy)
        << '\n';
  }
  return out.str();
}

void emit_table(const ResultTable& table, const fs::path& out_dir, bool overwrite) {
  if (table.kind == "run" && table.rows.size() == 1) {
    emit_report(table.rows.front().artifact, out_dir, overwrite);
    return;
  }
  prepare_dir(out_dir, overwrite, "summary.json");
  for (const auto& row : table.rows) {
    std::string sub;
    for (char c : row.name) {
      sub += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '=') ? c : '_';
    }
    emit_report(row.artifact, out_dir / sub, overwrite);
  }
  write_file(out_dir / "summary.json", table_summary_json(table).dump(2) + "\n");
  write_file(out_dir / (table.kind + ".csv"), table_csv(table));
}

}  // namespace sicl
