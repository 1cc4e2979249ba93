#include "iissqda/serialization.hpp"

#include <cstdio>
#include <sstream>

namespace iissqda {

namespace {

Json moment_json(const std::optional<Moment>& m, double scale = 1.0) {
  if (!m) {
    return nullptr;
  }
  return {{"mean", m->mean * scale}, {"se", m->se * scale}, {"count", m->count}};
}

std::string cell(const std::optional<Moment>& m, double scale = 1.0) {
  if (!m) {
    return "--";
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f (%.2f)", m->mean * scale, m->se * scale);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) {
    return s;
  }
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') {
      out += '"';
    }
    out += c;
  }
  return out + "\"";
}

}  // namespace

Json report_to_json(const PerformanceReport& report) {
  Json doc;
  doc["scenario"] = report.scenario;
  doc["config"] = benchmark_config_to_json(report.config);
  doc["replicationSeeds"] = report.replicationSeeds;
  doc["seconds"] = report.seconds;
  doc["notes"] = report.notes;
  Json methods = Json::array();
  for (const MethodSummary& m : report.methods) {
    methods.push_back({{"method", m.method},
                       {"succeeded", m.succeeded},
                       {"failed", m.failed},
                       {"mrPercent", moment_json(m.mr, 100.0)},
                       {"fpMain", moment_json(m.fpMain)},
                       {"fpInter", moment_json(m.fpInter)},
                       {"fnMain", moment_json(m.fnMain)},
                       {"fnInter", moment_json(m.fnInter)},
                       {"screeningFp", moment_json(m.screeningFp)},
                       {"screeningFn", moment_json(m.screeningFn)}});
  }
  doc["methods"] = methods;
  Json records = Json::array();
  for (const ReplicationRecord& r : report.records) {
    Json rec = {{"replication", r.replication}, {"method", r.method}, {"seed", r.seed},
                {"ok", r.ok},                   {"seconds", r.seconds}};
    if (!r.ok) {
      rec["error"] = r.error;
    }
    if (r.mr) {
      rec["mr"] = *r.mr;
    }
    if (r.selection) {
      rec["fpMain"] = r.selection->fpMain;
      rec["fpInter"] = r.selection->fpInter;
      rec["fnMain"] = r.selection->fnMain;
      rec["fnInter"] = r.selection->fnInter;
    }
    if (r.screening) {
      rec["screeningFp"] = r.screening->fp;
      rec["screeningFn"] = r.screening->fn;
    }
    rec["ridgeFallback"] = r.ridgeFallback;
    records.push_back(rec);
  }
  doc["records"] = records;
  return doc;
}

std::string report_table_csv(const PerformanceReport& report) {
  std::ostringstream out;
  out << "Measure";
  for (const MethodSummary& m : report.methods) {
    out << ',' << csv_escape(m.method);
  }
  out << '\n';
  auto row = [&](const char* name, auto field, double scale) {
    out << name;
    for (const MethodSummary& m : report.methods) {
      out << ',' << csv_escape(cell(m.*field, scale));
    }
    out << '\n';
  };
  row("MR (%)", &MethodSummary::mr, 100.0);
  row("FP.main", &MethodSummary::fpMain, 1.0);
  row("FP.inter", &MethodSummary::fpInter, 1.0);
  row("FN.main", &MethodSummary::fnMain, 1.0);
  row("FN.inter", &MethodSummary::fnInter, 1.0);
  row("Screening FP", &MethodSummary::screeningFp, 1.0);
  row("Screening FN", &MethodSummary::screeningFn, 1.0);
  out << "Failures";
  for (const MethodSummary& m : report.methods) {
    out << ',' << m.failed;
  }
  out << '\n';
  return out.str();
}

std::string report_records_csv(const PerformanceReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "replication,method,seed,ok,mr,fp_main,fp_inter,fn_main,fn_inter,screening_fp,screening_fn,"
         "ridge_fallback,seconds,error\n";
  for (const ReplicationRecord& r : report.records) {
    out << r.replication << ',' << csv_escape(r.method) << ',' << r.seed << ',' << (r.ok ? 1 : 0) << ',';
    if (r.mr) {
      out << *r.mr;
    }
    out << ',';
    if (r.selection) {
      out << r.selection->fpMain << ',' << r.selection->fpInter << ',' << r.selection->fnMain << ','
          << r.selection->fnInter;
    } else {
      out << ",,,";
    }
    out << ',';
    if (r.screening) {
      out << r.screening->fp << ',' << r.screening->fn;
    } else {
      out << ',';
    }
    out << ',' << (r.ridgeFallback ? 1 : 0) << ',' << r.seconds << ',' << csv_escape(r.error) << '\n';
  }
  return out.str();
}

}  // namespace iissqda
