#include "krf/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace krf {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

// JSON has no infinities; they are stored as strings.
json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

double number_from(const json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
  }
  return j.get<double>();
}

json tagged(const std::string& format, json body) {
  json out{{"format", format}};
  out.update(body);
  return out;
}

}  // namespace

json to_json(const MonitorRecord& r) {
  return json{{"t", r.t},
              {"step", r.step},
              {"S_min", r.s_min},
              {"S_max", r.s_max},
              {"Q_sup", r.q_sup},
              {"Qm_sup", r.qm_sup},
              {"rm_sup", r.rm_sup},
              {"lam_min", r.lam_min},
              {"lam_max", r.lam_max},
              {"C_eq", number(r.c_eq)},
              {"volume", r.volume},
              {"w_sup", r.w_sup},
              {"ric_sup", r.ric_sup},
              {"gauss_bonnet", r.gauss_bonnet}};
}

MonitorRecord record_from_json(const json& j) {
  MonitorRecord r;
  r.t = j.at("t").get<double>();
  r.step = j.at("step").get<long>();
  r.s_min = j.at("S_min").get<double>();
  r.s_max = j.at("S_max").get<double>();
  r.q_sup = j.at("Q_sup").get<double>();
  r.qm_sup = j.at("Qm_sup").get<std::vector<double>>();
  r.rm_sup = j.at("rm_sup").get<std::vector<double>>();
  r.lam_min = j.at("lam_min").get<double>();
  r.lam_max = j.at("lam_max").get<double>();
  r.c_eq = number_from(j.at("C_eq"));
  r.volume = j.at("volume").get<double>();
  r.w_sup = j.at("w_sup").get<double>();
  r.ric_sup = j.at("ric_sup").get<double>();
  r.gauss_bonnet = j.at("gauss_bonnet").get<double>();
  return r;
}

json to_json(const ResidualReport& r) {
  return json{{"identity", r.identity}, {"residual", r.residual}, {"scale", r.scale},
              {"tolerance", r.tolerance}, {"bound", r.bound()},   {"pass", r.pass},
              {"times", r.times}};
}

ResidualReport residual_from_json(const json& j) {
  ResidualReport r;
  r.identity = j.at("identity").get<std::string>();
  r.residual = j.at("residual").get<double>();
  r.scale = j.at("scale").get<double>();
  r.tolerance = j.at("tolerance").get<double>();
  r.pass = j.at("pass").get<bool>();
  r.times = j.at("times").get<std::vector<double>>();
  return r;
}

json to_json(const ShiFit& f) {
  return json{{"k", f.k}, {"A", f.A}, {"B", f.B}, {"t_split", f.t_split}, {"samples", f.samples},
              {"violations", f.violations}};
}

json to_json(const Breakdown& b) {
  return json{{"t", b.t},           {"step", b.step},   {"stage", b.stage},
              {"point", b.point},   {"eigenvalue", number(b.eigenvalue)},
              {"C_eq", number(b.c_eq)}, {"what", b.what}};
}

Breakdown breakdown_from_json(const json& j) {
  Breakdown b;
  b.t = j.at("t").get<double>();
  b.step = j.at("step").get<long>();
  b.stage = j.at("stage").get<int>();
  b.point = j.at("point").get<std::size_t>();
  b.eigenvalue = number_from(j.at("eigenvalue"));
  b.c_eq = number_from(j.at("C_eq"));
  b.what = j.at("what").get<std::string>();
  return b;
}

std::string monitor_csv_header(int m_max, int k_max) {
  std::string h = "t,S_min,S_max,Q_sup";
  for (int m = 1; m <= m_max; ++m) h += ",Q" + std::to_string(m) + "_sup";
  for (int k = 0; k <= k_max; ++k) h += ",rm" + std::to_string(k);
  h += ",lam_min,lam_max,C_eq,volume,w_sup";
  return h;
}

void write_monitor_csv(std::ostream& out, const std::vector<MonitorRecord>& records, int m_max, int k_max) {
  out << "# KRFLAB-MONITORS v1\n" << monitor_csv_header(m_max, k_max) << '\n';
  for (const auto& r : records) {
    out << format_double(r.t) << ',' << format_double(r.s_min) << ',' << format_double(r.s_max) << ','
        << format_double(r.q_sup);
    for (double v : r.qm_sup) out << ',' << format_double(v);
    for (double v : r.rm_sup) out << ',' << format_double(v);
    out << ',' << format_double(r.lam_min) << ',' << format_double(r.lam_max) << ',' << format_double(r.c_eq)
        << ',' << format_double(r.volume) << ',' << format_double(r.w_sup) << '\n';
  }
}

json residuals_json(const std::vector<ResidualReport>& reports) {
  json list = json::array();
  for (const auto& r : reports) list.push_back(to_json(r));
  return tagged("KRFLAB-RESIDUALS v1", json{{"reports", list}});
}

json run_summary(const RunResult& run) {
  json body{{"config", to_json(run.config)},
            {"termination", to_string(run.termination)},
            {"steps", run.steps},
            {"records", run.records.size()},
            {"f_sup", run.f_sup},
            {"custom_forcing", run.custom_forcing}};
  if (run.breakdown) body["breakdown"] = to_json(*run.breakdown);
  if (!run.records.empty()) {
    body["final"] = to_json(run.records.back());
    const Theorem1Verdict v = theorem1_verdict(run);
    json fits = json::array();
    for (const auto& f : v.fits) fits.push_back(to_json(f));
    body["theorem1"] = json{{"completed", v.completed},
                            {"C_eq_initial", number(v.c_eq_initial)},
                            {"C_eq_max", number(v.c_eq_max)},
                            {"C_eq_bound", v.c_eq_bound},
                            {"coverage_violations", v.coverage_violations},
                            {"fits", fits},
                            {"pass", v.pass}};
    if (v.c_eq_at_breakdown) body["theorem1"]["C_eq_at_breakdown"] = number(*v.c_eq_at_breakdown);
    const WBoundReport w = w_bound_check(run);
    body["w_bound"] = json{{"f_sup", w.f_sup},         {"worst_margin", w.worst_margin},
                           {"violations", w.violations}, {"non_increasing", w.non_increasing},
                           {"pass", w.pass}};
  }
  return tagged("KRFLAB-SUMMARY v1", body);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (text.empty() || text.back() != '\n') out << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_run_artifacts(const RunResult& run, const std::filesystem::path& dir) {
  std::ostringstream csv;
  write_monitor_csv(csv, run.records, run.config.m_max, run.config.k_max);
  write_text(dir / "monitors.csv", csv.str());
  write_text(dir / "residuals.json", residuals_json(run.residuals).dump(2));
  write_text(dir / "summary.json", run_summary(run).dump(2));
}

void emit_plotdata(const RunResult& run, const std::filesystem::path& dir) {
  struct Series {
    std::string name;
    std::function<double(const MonitorRecord&)> get;
  };
  std::vector<Series> series{
      {"S_min", [](const auto& r) { return r.s_min; }},   {"S_max", [](const auto& r) { return r.s_max; }},
      {"Q_sup", [](const auto& r) { return r.q_sup; }},   {"C_eq", [](const auto& r) { return r.c_eq; }},
      {"volume", [](const auto& r) { return r.volume; }}, {"w_sup", [](const auto& r) { return r.w_sup; }},
      {"ric_sup", [](const auto& r) { return r.ric_sup; }}};
  for (int m = 1; m <= run.config.m_max; ++m) {
    series.push_back({"Q" + std::to_string(m) + "_sup", [m](const auto& r) { return r.qm_sup.at(m - 1); }});
  }
  for (int k = 0; k <= run.config.k_max; ++k) {
    series.push_back({"rm" + std::to_string(k), [k](const auto& r) { return r.rm_sup.at(k); }});
  }
  for (const auto& s : series) {
    std::ostringstream out;
    out << "# KRFLAB-PLOT v1 " << s.name << "\n# t " << s.name << '\n';
    for (const auto& r : run.records) out << format_double(r.t) << ' ' << format_double(s.get(r)) << '\n';
    write_text(dir / (s.name + ".dat"), out.str());
  }
}

}  // namespace krf
