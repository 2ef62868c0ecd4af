#include "gibbsdyn/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace gibbsdyn {

namespace {

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// JSON has no representation for non-finite numbers (they serialise as null),
// so numeric fields are read back defensively.
double jnum(const Json& j, const char* key, double dflt) {
  auto it = j.find(key);
  return it != j.end() && it->is_number() ? it->get<double>() : dflt;
}

}  // namespace

Json to_json(const MCTestReport& rep) {
  Json j;
  j["id"] = rep.id;
  j["estimate"] = rep.estimate;
  j["se"] = rep.se;
  j["z"] = rep.z;
  j["n"] = rep.n;
  j["pass"] = rep.pass;
  j["inconclusive"] = rep.inconclusive;
  Json meta = Json::object();
  for (const auto& [k, v] : rep.meta) meta[k] = v;
  j["meta"] = meta;
  return j;
}

Json to_json(const ConditionReport& rep) {
  Json j;
  j["id"] = rep.id;
  j["verdict"] = to_string(rep.verdict);
  Json est = Json::object();
  for (const auto& [k, v] : rep.estimates)
    est[k] = std::isfinite(v) ? Json(v) : Json(num(v));
  j["estimates"] = est;
  j["notes"] = rep.notes;
  return j;
}

Json to_json(const EnsembleDiagnostics& diag) {
  Json j;
  j["accept_insert"] = diag.accept_insert;
  j["accept_remove"] = diag.accept_remove;
  j["accept_displace"] = diag.accept_displace;
  j["tau_count"] = diag.tau_count;
  j["thinning"] = diag.thinning;
  j["ess"] = diag.ess;
  return j;
}

std::string json_text(const Json& j) { return j.dump(2) + "\n"; }

Json parse_json(const std::string& text) { return Json::parse(text); }

namespace {

void digest_mc_reports(std::ostringstream& out, const Json& reports) {
  for (const auto& r : reports) {
    out << "  " << (r.value("pass", false) ? "pass" : "FAIL");
    if (r.value("inconclusive", false)) out << " (inconclusive)";
    out << "  " << r.value("id", std::string("?"));
    out << "  estimate=" << num(jnum(r, "estimate", 0.0));
    out << " se=" << num(jnum(r, "se", 0.0));
    out << " z=" << num(jnum(r, "z", 0.0));
    out << " n=" << r.value("n", 0);
    out << "\n";
  }
}

}  // namespace

std::string render_digest(const Json& report) {
  std::ostringstream out;
  const std::string command = report.value("command", std::string("?"));
  out << "== " << command << " report ==\n";
  if (report.contains("config_summary"))
    out << report["config_summary"].get<std::string>() << "\n";

  if (command == "sample") {
    out << "samples: " << report.value("count", 0) << "  mean count: "
        << num(report.value("mean_count", 0.0)) << "\n";
    if (report.contains("diagnostics")) {
      const auto& d = report["diagnostics"];
      out << "accept i/r/d: " << num(d.value("accept_insert", 0.0)) << " "
          << num(d.value("accept_remove", 0.0)) << " "
          << num(d.value("accept_displace", 0.0))
          << "  tau: " << num(d.value("tau_count", 0.0))
          << "  thinning: " << d.value("thinning", 0)
          << "  ess: " << num(d.value("ess", 0.0)) << "\n";
    }
    out << "artifact: " << report.value("artifact", std::string()) << "\n";
  } else if (command == "simulate") {
    out << "system: " << report.value("system", std::string("?"))
        << "  steps: " << report.value("steps", 0)
        << "  frames: " << report.value("frames", 0)
        << "  rejection rate: " << num(report.value("rejection_rate", 0.0)) << "\n";
    if (report.value("rejection_warning", false))
      out << "warning: a 1000-step window rejected more than 20% of proposals\n";
    out << "artifact: " << report.value("artifact", std::string()) << "\n";
  } else if (command == "verify") {
    out << "sign convention: " << report.value("sign", std::string("?"))
        << " (" << report.value("sign_origin", std::string("?")) << ")\n";
    for (const auto& seed_block : report["seeds"]) {
      out << "seed " << seed_block.value("seed", 0) << " (ensemble "
          << seed_block.value("samples", 0) << " samples, ess "
          << num(seed_block["diagnostics"].value("ess", 0.0)) << "):\n";
      digest_mc_reports(out, seed_block["identities"]);
    }
    out << "suite verdict: " << (report.value("suite_pass", false) ? "pass" : "FAIL")
        << "\n";
  } else if (command == "conditions") {
    for (const auto& r : report["conditions"]) {
      out << "  " << r.value("verdict", std::string("?")) << "  "
          << r.value("id", std::string("?"));
      if (r.contains("estimates"))
        for (const auto& [k, v] : r["estimates"].items()) {
          out << "  " << k << "=";
          if (v.is_number())
            out << num(v.get<double>());
          else if (v.is_string())
            out << v.get<std::string>();
          else
            out << v.dump();
        }
      out << "\n";
      const std::string notes = r.value("notes", std::string());
      if (!notes.empty()) out << "      " << notes << "\n";
    }
    out << "overall: " << (report.value("all_pass", false) ? "no failures" : "FAIL")
        << "\n";
  } else {
    out << report.dump(2) << "\n";
  }
  return out.str();
}

}  // namespace gibbsdyn
