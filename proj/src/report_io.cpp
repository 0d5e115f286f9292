#include "a1bellman/report_io.hpp"

#include "a1bellman/tree_json.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace a1bellman {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

nlohmann::ordered_json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

nlohmann::ordered_json report_to_json(const CheckReport& r) {
  nlohmann::ordered_json j;
  j["suite"] = r.suite;
  j["samples"] = r.samples;
  j["worst_slack"] = finite_or_null(r.worst_slack);
  nlohmann::ordered_json wit = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.worst_witness) wit[k] = finite_or_null(v);
  j["worst_witness"] = wit;
  j["tol"] = r.tol;
  j["passed"] = r.passed;
  j["applicable"] = r.applicable;
  nlohmann::ordered_json counters = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.counters) counters[k] = v;
  j["counters"] = counters;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

nlohmann::ordered_json oracle_to_json(const OracleTable& t, bool with_witnesses) {
  nlohmann::ordered_json j;
  j["Q"] = t.params.Q;
  j["d"] = t.params.d;
  j["depth"] = t.depth;
  j["grid"] = t.grid;
  j["x_step"] = t.x_step.str();
  j["y_width"] = t.y_width;
  j["weights_enumerated"] = t.weights_enumerated;
  j["weights_admissible"] = t.weights_admissible;
  auto buckets = nlohmann::ordered_json::array();
  for (const auto& b : t.buckets) {
    nlohmann::ordered_json e;
    e["x"] = b.x;
    e["y"] = b.y_mid;
    e["m"] = b.m;
    e["value"] = b.value;
    e["witness_y"] = b.witness_y;
    e["witness_id"] = b.witness_id;
    buckets.push_back(std::move(e));
  }
  j["buckets"] = std::move(buckets);
  if (with_witnesses) {
    auto wits = nlohmann::ordered_json::array();
    for (const auto& w : t.witnesses) {
      wits.push_back(to_json(TreeDocument{t.params.Q, t.params.d, w.w, w.E}));
    }
    j["witnesses"] = std::move(wits);
  }
  return j;
}

std::string oracle_to_csv(const OracleTable& t) {
  std::ostringstream out;
  out << "x,y,m,value,witness_id\n";
  for (const auto& b : t.buckets) {
    out << format_number(b.x) << ',' << format_number(b.y_mid) << ',' << format_number(b.m) << ','
        << format_number(b.value) << ',' << b.witness_id << '\n';
  }
  return out.str();
}

std::string format_report(const CheckReport& r) {
  std::ostringstream out;
  out << r.suite << ": " << (r.passed ? "PASS" : (r.applicable ? "FAIL" : "NOT APPLICABLE"))
      << "\n  samples      " << r.samples << "\n  worst slack  " << format_number(r.worst_slack)
      << "\n  tolerance    " << format_number(r.tol) << '\n';
  if (!r.worst_witness.empty()) {
    out << "  witness     ";
    for (const auto& [k, v] : r.worst_witness) out << ' ' << k << '=' << format_number(v);
    out << '\n';
  }
  for (const auto& [k, v] : r.counters) out << "  " << k << ": " << v << '\n';
  if (!r.note.empty()) out << "  note: " << r.note << '\n';
  return out.str();
}

}  // namespace a1bellman
