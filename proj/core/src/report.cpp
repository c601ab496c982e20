#include "essk/report.hpp"

#include <iomanip>
#include <limits>
#include <sstream>

#include "essk/errors.hpp"

namespace essk {
namespace {

Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(x);
  return out;
}

Vector vector_from(const Json& j) {
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

std::string full_precision(double x) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << x;
  return os.str();
}

std::string joined(const Vector& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ';';
    out += full_precision(v[i]);
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

Json row_to_json(const ReportRow& r) {
  Json j;
  j["scenario"] = r.scenario;
  j["method"] = std::string(to_string(r.method));
  j["analytic_n0"] = r.analytic_n0 ? Json(*r.analytic_n0) : Json(nullptr);
  j["seed"] = r.seed;
  j["n"] = r.n;
  j["status"] = r.ok() ? "ok" : "error";
  j["error"] = r.error;
  if (!r.ok()) {
    j["n0"] = nullptr;
    return j;
  }
  const EssEstimate& e = *r.estimate;
  j["n0"] = e.n0;
  j["per_component"] = vector_json(e.per_component);
  j["var_phi"] = vector_json(e.var_phi);
  j["var_cond"] = vector_json(e.var_cond);
  j["M"] = e.M;
  j["elapsed_seconds"] = e.elapsed_seconds;
  j["warnings"] = e.warnings;
  Json diag = Json::object();
  if (!e.fits.empty()) {
    Json lambda = Json::array(), edf = Json::array(), gcv = Json::array();
    for (const auto& f : e.fits) {
      lambda.push_back(f.lambda);
      edf.push_back(f.edf);
      gcv.push_back(f.gcv_score);
    }
    diag["lambda"] = lambda;
    diag["edf"] = edf;
    diag["gcv"] = gcv;
  }
  if (e.mean_acceptance) diag["mean_acceptance"] = *e.mean_acceptance;
  j["diagnostics"] = diag;
  return j;
}

ReportRow row_from_json(const Json& j) {
  ReportRow r;
  r.scenario = j.at("scenario").get<std::string>();
  const auto m = parse_method(j.at("method").get<std::string>());
  if (!m) throw Error("report: unknown method");
  r.method = *m;
  if (!j.at("analytic_n0").is_null()) r.analytic_n0 = j["analytic_n0"].get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.n = j.at("n").get<std::int64_t>();
  r.error = j.at("error").get<std::string>();
  if (j.at("status").get<std::string>() != "ok") return r;
  EssEstimate e;
  e.method = r.method;
  e.n0 = j.at("n0").get<double>();
  e.per_component = vector_from(j.at("per_component"));
  e.var_phi = vector_from(j.at("var_phi"));
  e.var_cond = vector_from(j.at("var_cond"));
  e.M = j.at("M").get<Eigen::Index>();
  e.n = r.n;
  e.elapsed_seconds = j.at("elapsed_seconds").get<double>();
  e.warnings = j.at("warnings").get<std::vector<std::string>>();
  const Json& diag = j.at("diagnostics");
  if (diag.contains("lambda")) {
    for (std::size_t i = 0; i < diag["lambda"].size(); ++i) {
      ComponentFit f;
      f.lambda = diag["lambda"][i].get<double>();
      f.edf = diag["edf"][i].get<double>();
      f.gcv_score = diag["gcv"][i].get<double>();
      e.fits.push_back(std::move(f));
    }
  }
  if (diag.contains("mean_acceptance")) e.mean_acceptance = diag["mean_acceptance"].get<double>();
  r.estimate = std::move(e);
  return r;
}

}  // namespace

bool RunReport::all_succeeded() const noexcept {
  for (const auto& r : rows) {
    if (!r.ok()) return false;
  }
  return true;
}

Json report_to_json(const RunReport& report) {
  Json rows = Json::array();
  for (const auto& r : report.rows) rows.push_back(row_to_json(r));
  return Json{{"tool", "essk"},
              {"version", report.tool_version},
              {"elapsed_unit", "seconds"},
              {"config", config_to_json(report.config)},
              {"results", rows}};
}

RunReport report_from_json(const Json& doc) {
  RunReport r;
  r.tool_version = doc.at("version").get<std::string>();
  r.config = config_from_json(doc.at("config"));
  for (const auto& row : doc.at("results")) r.rows.push_back(row_from_json(row));
  return r;
}

std::string emit_report(const RunReport& report, OutputFormat format) {
  if (format == OutputFormat::kJson) return report_to_json(report).dump(2) + "\n";

  std::ostringstream os;
  os << "scenario,method,n0,per_component,var_phi,var_cond,M,n,seed,elapsed_seconds,warnings\n";
  for (const auto& r : report.rows) {
    os << csv_field(r.scenario) << ',' << to_string(r.method) << ',';
    if (r.ok()) {
      const EssEstimate& e = *r.estimate;
      std::string warnings;
      for (std::size_t i = 0; i < e.warnings.size(); ++i) {
        warnings += (i ? "; " : "") + e.warnings[i];
      }
      os << full_precision(e.n0) << ',' << joined(e.per_component) << ','
         << joined(e.var_phi) << ',' << joined(e.var_cond) << ',' << e.M << ',' << e.n << ','
         << r.seed << ',' << full_precision(e.elapsed_seconds) << ',' << csv_field(warnings);
    } else {
      os << ",,,," << report.config.M << ',' << r.n << ',' << r.seed << ",,"
         << csv_field("error: " + r.error);
    }
    os << '\n';
  }
  return os.str();
}

Json strip_timing(Json doc) {
  if (doc.is_object()) {
    doc.erase("elapsed_seconds");
    for (auto& [key, value] : doc.items()) value = strip_timing(value);
  } else if (doc.is_array()) {
    for (auto& v : doc) v = strip_timing(v);
  }
  return doc;
}

}  // namespace essk
