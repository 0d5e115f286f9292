#pragma once

// Serialization of verification output: CheckReport and OracleTable to JSON,
// OracleTable to CSV, and a plain-text rendering of a report.

#include "a1bellman/verify.hpp"

#include <json.hpp>

#include <string>

namespace a1bellman {

/// 17 significant digits, '.' decimal point; round-trips every double.
std::string format_number(double v);

/// Non-finite slack (no samples) is written as null.
nlohmann::ordered_json report_to_json(const CheckReport& r);

/// Witness trees are included only on request; they can be large.
nlohmann::ordered_json oracle_to_json(const OracleTable& t, bool with_witnesses = false);

/// Header row x,y,m,value,witness_id; y is the bucket midpoint.
std::string oracle_to_csv(const OracleTable& t);

/// Multi-line human summary: verdict, samples, worst slack, witness,
/// counters.
std::string format_report(const CheckReport& r);

}  // namespace a1bellman
