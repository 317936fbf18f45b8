#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "krf/run.hpp"

namespace krf {

nlohmann::json to_json(const MonitorRecord& r);
MonitorRecord record_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ResidualReport& r);
ResidualReport residual_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ShiFit& f);
nlohmann::json to_json(const Breakdown& b);
Breakdown breakdown_from_json(const nlohmann::json& j);

// t,S_min,S_max,Q_sup,Q1_sup..Qm_sup,rm0..rmk,lam_min,lam_max,C_eq,volume,w_sup
std::string monitor_csv_header(int m_max, int k_max);
// Version line, header, one row per record with doubles at 17 digits.
void write_monitor_csv(std::ostream& out, const std::vector<MonitorRecord>& records, int m_max, int k_max);

nlohmann::json residuals_json(const std::vector<ResidualReport>& reports);
nlohmann::json run_summary(const RunResult& run);

// Writes text with a trailing newline; creates parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);

// monitors.csv, residuals.json and summary.json under `dir`.
void write_run_artifacts(const RunResult& run, const std::filesystem::path& dir);

// One two-column (t, value) file per monitor under dir/plot.
void emit_plotdata(const RunResult& run, const std::filesystem::path& dir);

std::string format_double(double v);

}  // namespace krf
