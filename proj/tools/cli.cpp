#include "cli.hpp"

#include "a1bellman/closed_form.hpp"
#include "a1bellman/errors.hpp"
#include "a1bellman/extremize.hpp"
#include "a1bellman/report_io.hpp"
#include "a1bellman/tree_json.hpp"
#include "a1bellman/verify.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

namespace a1bellman::cli {
namespace {

using Config = std::vector<std::pair<std::string, std::string>>;

struct Common {
  double Q = 10.0;
  int d = 2;
  std::string format = "text";
  std::string out_path;
};

std::string header(const Config& cfg) {
  std::string h = std::string("# a1bellman ") + kVersion;
  for (const auto& [k, v] : cfg) h += " " + k + "=" + v;
  return h;
}

nlohmann::ordered_json config_json(const Config& cfg) {
  nlohmann::ordered_json j;
  j["version"] = kVersion;
  for (const auto& [k, v] : cfg) j[k] = v;
  return j;
}

Config base_config(const std::string& command, const Common& c) {
  return {{"command", command}, {"Q", format_number(c.Q)}, {"d", std::to_string(c.d)}};
}

// Writes `text` to --out if given, else to stdout.
void emit(const Common& c, const std::string& text, std::ostream& out) {
  if (c.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(c.out_path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot open output file " + c.out_path);
  f << text;
}

void add_common(CLI::App* sub, Common& c, std::vector<std::string> formats) {
  sub->add_option("--Q", c.Q, "A1 bound Q >= 1")->capture_default_str();
  sub->add_option("--d", c.d, "dimension, N = 2^d")->capture_default_str();
  sub->add_option("--format", c.format, "output format")
      ->check(CLI::IsMember(formats))
      ->capture_default_str();
  sub->add_option("--out", c.out_path, "write the main output to this file");
}

// ---------------------------------------------------------------------------

int cmd_eval(const Common& c, double x, double y, double m, std::ostream& out) {
  const Params p = new_params(c.Q, c.d);
  if (!in_omega_b(p, x, y, m)) {
    throw DomainError("point (x=" + format_number(x) + ", y=" + format_number(y) +
                      ", m=" + format_number(m) + ") is outside the domain");
  }
  Config cfg = base_config("eval", c);
  cfg.insert(cfg.end(), {{"x", format_number(x)}, {"y", format_number(y)}, {"m", format_number(m)}});
  const double value = eval_B(p, x, y, m);
  const std::string branch = p.degenerate ? "degenerate (Q = 1)" : describe_M(p, x, y / m).describe();
  std::ostringstream s;
  if (c.format == "json") {
    nlohmann::ordered_json j;
    j["config"] = config_json(cfg);
    j["value"] = value;
    j["branch"] = branch;
    s << j.dump(2) << '\n';
  } else {
    s << header(cfg) << '\n' << "value " << format_number(value) << '\n' << "branch " << branch
      << '\n';
  }
  emit(c, s.str(), out);
  return kPass;
}

int cmd_table(const Common& c, int nx, int ny, double m, std::ostream& out) {
  const Params p = new_params(c.Q, c.d);
  if (nx < 2 || ny < 2) throw DomainError("table needs at least 2 points per axis");
  if (!(m > 0)) throw DomainError("m must be positive");
  std::vector<double> xs, ys;
  for (int i = 0; i < nx; ++i) xs.push_back(static_cast<double>(i) / (nx - 1));
  for (int i = 0; i < ny; ++i) ys.push_back(m * (1.0 + (p.Q - 1.0) * i / (ny - 1)));
  Config cfg = base_config("table", c);
  cfg.insert(cfg.end(),
             {{"nx", std::to_string(nx)}, {"ny", std::to_string(ny)}, {"m", format_number(m)}});
  const auto samples = tabulate_B(p, xs, ys, m);
  std::ostringstream s;
  if (c.format == "json") {
    nlohmann::ordered_json j;
    j["config"] = config_json(cfg);
    auto rows = nlohmann::ordered_json::array();
    for (const auto& r : samples) rows.push_back({r.x, r.y, r.m, r.value});
    j["columns"] = {"x", "y", "m", "value"};
    j["rows"] = rows;
    s << j.dump(2) << '\n';
  } else {
    s << header(cfg) << '\n' << "x,y,m,value\n";
    for (const auto& r : samples) {
      s << format_number(r.x) << ',' << format_number(r.y) << ',' << format_number(r.m) << ','
        << format_number(r.value) << '\n';
    }
  }
  emit(c, s.str(), out);
  return kPass;
}

// Log-spaced points on [1e-6, 1] merged with every node N^-k >= 1e-6.
std::vector<double> plot_grid(const Params& p, int n) {
  std::vector<double> xs;
  for (int i = 0; i < n; ++i) xs.push_back(std::pow(10.0, -6.0 + 6.0 * i / (n - 1)));
  xs.front() = 1e-6;
  xs.back() = 1.0;
  for (int k = 0;; ++k) {
    const double node = std::ldexp(1.0, -p.d * k);
    if (node < 1e-6) break;
    xs.push_back(node);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

int cmd_plot_data(const Common& c, int n, std::ostream& out) {
  const Params p = new_params(c.Q, c.d);
  if (n < 2) throw DomainError("plot-data needs n >= 2");
  Config cfg = base_config("plot-data", c);
  cfg.emplace_back("n", std::to_string(n));
  std::ostringstream s;
  s << header(cfg) << '\n' << "x,f,f_smooth,f_over_Q,f_smooth_over_Q\n";
  for (double x : plot_grid(p, n)) {
    const double f = eval_f(p, x);
    const double fs = eval_f_smooth(p, x);
    s << format_number(x) << ',' << format_number(f) << ',' << format_number(fs) << ','
      << format_number(f / p.Q) << ',' << format_number(fs / p.Q) << '\n';
  }
  emit(c, s.str(), out);
  return kPass;
}

template <class T>
int report_extremizer(const Common& c, const Params& p, const BasicPair<T>& pair, Config cfg,
                      std::ostream& out) {
  const WeightStats<double> a = to_double(pair.achieved);
  const double closed = eval_M(p, pair.target.x, pair.target.y);
  const double gap = closed - a.value;
  nlohmann::ordered_json j;
  j["config"] = config_json(cfg);
  j["target"] = {{"x", pair.target.x}, {"y", pair.target.y}, {"m", pair.target.m}};
  j["achieved"] = {{"x", a.x},
                   {"y", a.y},
                   {"m", a.m},
                   {"characteristic", a.characteristic},
                   {"value", a.value}};
  j["depth"] = pair.truncation_depth;
  j["closed_form"] = closed;
  j["gap"] = gap;

  std::ostringstream text;
  text << header(cfg) << '\n'
       << "target   x=" << format_number(pair.target.x) << " y=" << format_number(pair.target.y)
       << " m=1\n"
       << "achieved x=" << format_number(a.x) << " y=" << format_number(a.y)
       << " m=" << format_number(a.m) << " characteristic=" << format_number(a.characteristic)
       << " value=" << format_number(a.value) << '\n'
       << "closed form M " << format_number(closed) << '\n'
       << "gap " << format_number(gap) << '\n'
       << "depth " << pair.truncation_depth << '\n';
  if constexpr (is_exact_v<T>) {
    j["exact_value"] = pair.achieved.value.str();
    text << "exact value " << pair.achieved.value.str() << '\n';
  }

  auto with_tree = [&] {
    nlohmann::ordered_json full = j;
    const DyadicWeight w = [&] {
      if constexpr (is_exact_v<T>) {
        return pair.w.template convert<double>();
      } else {
        return pair.w;
      }
    }();
    full["tree"] = to_json(TreeDocument{p.Q, p.d, w, pair.E});
    return full.dump() + "\n";
  };
  if (!c.out_path.empty()) {
    emit(c, with_tree(), out);
    out << text.str();
  } else if (c.format == "json") {
    out << with_tree();
  } else {
    out << text.str();
  }
  return kPass;
}

int cmd_extremize(const Common& c, double x, double y, int depth, bool exact, std::ostream& out) {
  const Params p = new_params(c.Q, c.d);
  Config cfg = base_config("extremize", c);
  cfg.insert(cfg.end(), {{"x", format_number(x)},
                         {"y", format_number(y)},
                         {"depth", std::to_string(depth)},
                         {"exact", exact ? "true" : "false"}});
  if (exact) return report_extremizer(c, p, build_extremizer<Rational>(p, x, y, depth), cfg, out);
  return report_extremizer(c, p, build_extremizer<double>(p, x, y, depth), cfg, out);
}

struct VerifyOptions {
  std::string suite = "all";
  long long samples = 100000;
  std::uint64_t seed = 1;
  double tol = kDefaultTol;
  int k_max = 0;
};

CheckReport weak_type_on_corners(const Params& p, double tol) {
  const double p_max = osekowski_p_max(p);
  CheckReport total;
  total.suite = "weak-type";
  total.tol = tol;
  for (int k = 0; k <= 8; ++k) {
    CheckReport r = check_weak_type(build_corner(p, k).w, p_max, tol);
    total.samples += r.samples;
    if (!r.applicable) {
      total.applicable = false;
      total.note = "corner k=" + std::to_string(k) + ": " + r.note;
    }
    if (r.worst_slack < total.worst_slack) {
      total.worst_slack = r.worst_slack;
      total.worst_witness = r.worst_witness;
      total.worst_witness.insert(total.worst_witness.begin(), {"k", static_cast<double>(k)});
    }
  }
  total.counters["corners"] = 9;
  total.finalize();
  return total;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {
      "main-inequality-M", "main-inequality-B", "wedge-inequality",  "concavity",
      "t-monotonicity",    "smooth-bound",      "branch-continuity", "homogeneity",
      "wedge-domination",  "weak-type"};
  return names;
}

CheckReport run_suite(const std::string& name, const Params& p, const VerifyOptions& o) {
  const long long n = o.samples;
  if (name == "main-inequality-M") return check_main_inequality_M(p, n, o.seed, o.tol);
  if (name == "main-inequality-B") return check_main_inequality_B(p, n, o.seed, o.tol);
  if (name == "wedge-inequality") {
    return check_wedge_inequality(p, o.k_max > 0 ? o.k_max : 6, n, o.seed, o.tol);
  }
  if (name == "concavity") return check_concavity(p, n, o.seed, o.tol);
  if (name == "t-monotonicity") return check_t_monotonicity(p, n, o.seed, o.tol);
  if (name == "smooth-bound") return check_smooth_bound(p, n, o.tol);
  if (name == "branch-continuity") return check_branch_continuity(p, n, o.tol);
  if (name == "homogeneity") return check_homogeneity(p, n, o.seed, 1e-12);
  if (name == "wedge-domination") {
    const long long side = std::max(3LL, std::llround(std::sqrt(static_cast<double>(n))));
    return check_wedge_domination(p, o.k_max > 0 ? o.k_max : 10, side, o.tol);
  }
  if (name == "weak-type") return weak_type_on_corners(p, o.tol);
  throw std::invalid_argument("unknown suite " + name);
}

int cmd_verify(const Common& c, const VerifyOptions& o, std::ostream& out) {
  const Params p = new_params(c.Q, c.d);
  if (o.samples < 1) throw DomainError("--samples must be >= 1");
  Config cfg = base_config("verify", c);
  cfg.insert(cfg.end(), {{"suite", o.suite},
                         {"samples", std::to_string(o.samples)},
                         {"seed", std::to_string(o.seed)},
                         {"tol", format_number(o.tol)},
                         {"k_max", std::to_string(o.k_max)}});
  std::vector<CheckReport> reports;
  if (o.suite == "all") {
    for (const auto& name : suite_names()) reports.push_back(run_suite(name, p, o));
  } else {
    reports.push_back(run_suite(o.suite, p, o));
  }
  bool passed = true;
  for (const auto& r : reports) passed = passed && r.passed;

  std::ostringstream s;
  if (c.format == "json") {
    nlohmann::ordered_json j;
    j["config"] = config_json(cfg);
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : reports) arr.push_back(report_to_json(r));
    j["reports"] = arr;
    j["passed"] = passed;
    s << j.dump(2) << '\n';
  } else {
    s << header(cfg) << '\n';
    for (const auto& r : reports) s << format_report(r);
    if (reports.size() > 1) {
      s << "all: " << (passed ? "PASS" : "FAIL") << " (" << reports.size() << " suites)\n";
    }
  }
  emit(c, s.str(), out);
  return passed ? kPass : kFail;
}

struct OracleOptions {
  int depth = 2;
  int grid = 6;
  std::string x_step;
  bool witnesses = false;
};

int cmd_oracle(const Common& c, const OracleOptions& o, std::ostream& out) {
  const Params p = new_params(c.Q, c.d);
  Rational step(1);
  if (o.x_step.empty()) {
    for (int i = 0; i < o.depth; ++i) step /= p.N;
  } else {
    try {
      step = Rational(o.x_step);
    } catch (const std::exception&) {
      throw DomainError("cannot parse --x-step '" + o.x_step + "' as a rational");
    }
  }
  const std::vector<double> grid = default_oracle_grid(p, o.grid, o.depth);
  const OracleTable table = brute_force_oracle(p, o.depth, grid, step);
  const CheckReport report = oracle_vs_closed_form(table, p);
  Config cfg = base_config("oracle", c);
  cfg.insert(cfg.end(), {{"depth", std::to_string(o.depth)},
                         {"grid", std::to_string(o.grid)},
                         {"x_step", step.str()}});
  std::ostringstream s;
  if (c.format == "json") {
    nlohmann::ordered_json j;
    j["config"] = config_json(cfg);
    j["table"] = oracle_to_json(table, o.witnesses);
    j["check"] = report_to_json(report);
    s << j.dump(2) << '\n';
    emit(c, s.str(), out);
  } else if (c.format == "csv") {
    s << header(cfg) << '\n' << oracle_to_csv(table);
    emit(c, s.str(), out);
    if (!c.out_path.empty()) out << format_report(report);
  } else {
    s << header(cfg) << '\n'
      << "weights enumerated " << table.weights_enumerated << ", admissible "
      << table.weights_admissible << ", buckets " << table.buckets.size() << '\n'
      << oracle_to_csv(table) << format_report(report);
    emit(c, s.str(), out);
  }
  return report.passed ? kPass : kFail;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bellman function for dyadic A1 weights: evaluation, extremizers, verification"};
  app.name("a1bellman");
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Common common;
  double x = 0, y = 1, m = 1;
  int nx = 11, ny = 11, n_points = 200, depth = 20;
  bool exact = false;
  VerifyOptions vopt;
  OracleOptions oopt;

  auto* eval = app.add_subcommand("eval", "evaluate B(x, y, m) and report the branch");
  add_common(eval, common, {"text", "json"});
  eval->add_option("--x", x, "|E|")->required();
  eval->add_option("--y", y, "average of w")->required();
  eval->add_option("--m", m, "ess inf of w")->capture_default_str();

  auto* table = app.add_subcommand("table", "tabulate B on a grid as CSV");
  add_common(table, common, {"text", "csv", "json"});
  table->add_option("--nx", nx)->capture_default_str();
  table->add_option("--ny", ny)->capture_default_str();
  table->add_option("--m", m)->capture_default_str();

  auto* plot = app.add_subcommand("plot-data", "f and Q x^epsilon on a log grid, as CSV");
  add_common(plot, common, {"text", "csv"});
  plot->add_option("--n", n_points, "log-spaced points on [1e-6, 1]")->capture_default_str();

  auto* extremize = app.add_subcommand("extremize", "build an extremal weight/set pair");
  add_common(extremize, common, {"text", "json"});
  extremize->add_option("--x", x)->required();
  extremize->add_option("--y", y)->required();
  extremize->add_option("--depth", depth, "binary digits per concatenation")->capture_default_str();
  extremize->add_flag("--exact", exact, "exact rational arithmetic");

  auto* verify = app.add_subcommand("verify", "run verification suites");
  add_common(verify, common, {"text", "json"});
  std::vector<std::string> suites = suite_names();
  suites.push_back("all");
  verify->add_option("--suite", vopt.suite)->check(CLI::IsMember(suites))->capture_default_str();
  verify->add_option("--samples", vopt.samples)->capture_default_str();
  verify->add_option("--seed", vopt.seed)->capture_default_str();
  verify->add_option("--tol", vopt.tol)->capture_default_str();
  verify->add_option("--k-max", vopt.k_max, "wedge index bound (0: suite default)");

  auto* oracle = app.add_subcommand("oracle", "exhaustive supremum over small dyadic trees");
  add_common(oracle, common, {"text", "csv", "json"});
  oracle->add_option("--depth", oopt.depth)->capture_default_str();
  oracle->add_option("--grid", oopt.grid, "number of evenly spaced grid values")
      ->capture_default_str();
  oracle->add_option("--x-step", oopt.x_step, "rational step of |E| (default N^-depth)");
  oracle->add_flag("--witnesses", oopt.witnesses, "include witness trees in JSON");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (*eval) return cmd_eval(common, x, y, m, out);
    if (*table) return cmd_table(common, nx, ny, m, out);
    if (*plot) return cmd_plot_data(common, n_points, out);
    if (*extremize) return cmd_extremize(common, x, y, depth, exact, out);
    if (*verify) return cmd_verify(common, vopt, out);
    if (*oracle) return cmd_oracle(common, oopt, out);
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::length_error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const InfeasibleError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace a1bellman::cli
