#pragma once

// Shared machinery for the seeded samplers: per-block accumulation with a
// deterministic reduction (smallest slack wins, ties go to the lower index).

#include "a1bellman/parallel.hpp"
#include "a1bellman/verify.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace a1bellman::detail {

using Witness = std::vector<std::pair<std::string, double>>;

struct Accumulator {
  long long samples = 0;
  double worst = std::numeric_limits<double>::infinity();
  std::uint64_t worst_index = std::numeric_limits<std::uint64_t>::max();
  Witness witness;
  std::map<std::string, long long> counters;

  void record(std::uint64_t index, double slack, const Witness& w) {
    ++samples;
    if (slack < worst || (slack == worst && index < worst_index)) {
      worst = slack;
      worst_index = index;
      witness = w;
    }
  }

  void merge(const Accumulator& other) {
    samples += other.samples;
    if (other.worst < worst || (other.worst == worst && other.worst_index < worst_index)) {
      worst = other.worst;
      worst_index = other.worst_index;
      witness = other.witness;
    }
    for (const auto& [k, v] : other.counters) counters[k] += v;
  }
};

/// Runs body(index, acc) for index in [0, n) across worker threads.
template <class Body>
CheckReport run_indexed(const std::string& suite, std::uint64_t n, double tol, Body body) {
  auto blocks = parallel_blocks<Accumulator>(n, [&](std::size_t begin, std::size_t end) {
    Accumulator acc;
    for (std::size_t i = begin; i < end; ++i) body(static_cast<std::uint64_t>(i), acc);
    return acc;
  });
  Accumulator total;
  for (const auto& b : blocks) total.merge(b);
  CheckReport report;
  report.suite = suite;
  report.samples = total.samples;
  report.worst_slack = total.worst;
  report.worst_witness = total.witness;
  report.counters = total.counters;
  report.tol = tol;
  if (total.samples == 0) report.note = "no admissible samples";
  report.finalize();
  return report;
}

}  // namespace a1bellman::detail
