#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "species/analysis.hpp"
#include "species/errors.hpp"
#include "species/integral.hpp"
#include "species/numeric.hpp"
#include "species/solve.hpp"

using json = nlohmann::ordered_json;
using namespace species;

namespace {

constexpr const char* kVersion = "1.0.0";

struct Input {
  std::string file;
  std::string inline_spec;

  std::string text() const {
    if (!inline_spec.empty()) return inline_spec;
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open '" + file + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
};

void add_input(CLI::App* cmd, Input& in) {
  auto* file = cmd->add_option("file", in.file, "system description file");
  auto* spec = cmd->add_option("--spec", in.inline_spec, "inline system description");
  file->excludes(spec);
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json report_to_json(const WellFoundedReport& r, const SystemSpec& sys) {
  json j;
  j["verdict"] = r.verdict;
  if (r.verdict) {
    j["reason"] = nullptr;
  } else {
    std::string reason = to_string(r.reason);
    if (r.reason == WfReason::ZeroCoordinate && r.coordinate >= 0)
      reason += "(" + sys.equations[static_cast<std::size_t>(r.coordinate)].name + ")";
    if (r.reason == WfReason::CompanionNotWFAt0)
      reason += "[" + to_string(r.companion_detail) + "]";
    j["reason"] = reason;
  }
  j["constant_term"] = r.constant_term;
  j["jacobian_nilpotence_order"] = r.nilpotence_order;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

WellFoundedReport analyze(const SystemSpec& sys) {
  return sys.mode == Mode::Linear ? check_integral_wf(sys) : is_well_founded(sys);
}

int run_check(const Input& in, bool as_json) {
  SystemSpec sys = parse_system(in.text());
  WellFoundedReport r = analyze(sys);
  if (as_json) {
    std::cout << report_to_json(r, sys).dump() << "\n";
  } else if (r.verdict) {
    std::cout << "well-founded: yes; S(0) = (";
    for (std::size_t i = 0; i < r.constant_term.size(); ++i)
      std::cout << (i ? ", " : "") << r.constant_term[i];
    std::cout << ")\n";
  } else {
    std::string reason = to_string(r.reason);
    if (r.reason == WfReason::ZeroCoordinate && r.coordinate >= 0)
      reason += "(" + sys.equations[static_cast<std::size_t>(r.coordinate)].name + ")";
    if (r.reason == WfReason::CompanionNotWFAt0)
      reason += "[" + to_string(r.companion_detail) + "]";
    std::cout << "well-founded: no; reason = " << reason << "\n";
  }
  return r.verdict ? 0 : 1;
}

BigInt factorial(unsigned long n) {
  BigInt f;
  mpz_fac_ui(f.get_mpz_t(), n);
  return f;
}

int run_count(const Input& in, const std::string& kind_name, unsigned long terms,
              bool labeled_counts, bool as_json) {
  SystemSpec sys = parse_system(in.text());
  SeriesKind kind = kind_name == "egf" ? SeriesKind::EGF : SeriesKind::OGF;
  if (sys.mode == Mode::Linear && kind != SeriesKind::EGF)
    throw DomainError("UnsupportedKind", "ordered structures have labeled series only");

  WellFoundedReport wf = analyze(sys);
  if (!wf.verdict)
    throw DomainError("IllFounded", "system is not well founded (" + to_string(wf.reason) + ")");

  std::vector<Series<Rat>> y = sys.mode == Mode::Linear
                                   ? solve_integral(sys, terms)
                                   : newton_solve<Rat>(sys, kind, terms);

  bool virtual_flag = false;
  for (const auto& s : y)
    for (std::size_t i = 0; i < s.order(); ++i)
      if (sgn(s[i]) < 0) virtual_flag = true;

  json out;
  out["kind"] = kind_name;
  out["terms"] = terms;
  if (virtual_flag) out["virtual"] = true;
  json series = json::object();
  for (std::size_t i = 0; i < sys.size(); ++i) {
    json coeffs = json::array();
    json labeled = json::array();
    for (std::size_t n = 0; n < y[i].order(); ++n) {
      coeffs.push_back(y[i][n].get_str());
      if (labeled_counts) {
        Rat f = y[i][n] * Rat(factorial(static_cast<unsigned long>(n)));
        labeled.push_back(f.get_str());
      }
    }
    json entry;
    entry["coefficients"] = coeffs;
    if (labeled_counts) entry["labeled_counts"] = labeled;
    series[sys.equations[i].name] = entry;
  }
  out["series"] = series;

  if (as_json) {
    std::cout << out.dump() << "\n";
    return 0;
  }
  if (virtual_flag)
    std::cout << "# note: negative coefficients present (virtual class)\n";
  for (std::size_t i = 0; i < sys.size(); ++i) {
    std::cout << sys.equations[i].name << ":";
    for (std::size_t n = 0; n < y[i].order(); ++n) std::cout << " " << y[i][n].get_str();
    std::cout << "\n";
    if (labeled_counts) {
      std::cout << sys.equations[i].name << "!:";
      for (std::size_t n = 0; n < y[i].order(); ++n) {
        Rat f = y[i][n] * Rat(factorial(static_cast<unsigned long>(n)));
        std::cout << " " << f.get_str();
      }
      std::cout << "\n";
    }
  }
  return 0;
}

json eval_one(const SystemSpec& sys, SeriesKind kind, double point, double eps, int powers,
              std::optional<double> radius, int max_iter) {
  json j;
  j["point"] = point;
  if (kind == SeriesKind::EGF) {
    std::vector<std::vector<double>> trace;
    std::vector<double> v = egf_value(sys, point, eps, max_iter, &trace);
    json vals = json::array();
    for (double x : v) vals.push_back(fmt_double(x));
    j["values"] = vals;
    j["iterations"] = trace.size();
  } else {
    EvalRequest req;
    req.kind = kind;
    req.point = point;
    req.eps = eps;
    req.powers = powers;
    req.max_iter = max_iter;
    req.radius = radius;
    EvalState st = ogf_value(sys, req);
    json vals = json::array();
    for (double x : st.values) vals.push_back(fmt_double(x));
    j["values"] = vals;
    json rows = json::array();
    for (const auto& row : st.values_at_powers) {
      json r = json::array();
      for (double x : row) r.push_back(fmt_double(x));
      rows.push_back(r);
    }
    j["values_at_powers"] = rows;
    j["iterations"] = st.iterations;
    j["tail_length"] = st.tail_length;
    j["truncation_order"] = st.truncation_order;
  }
  return j;
}

int run_eval(const Input& in, const std::string& kind_name, const std::vector<double>& points,
             double eps, int powers, std::optional<double> radius, int max_iter, int jobs,
             bool as_json) {
  SystemSpec sys = parse_system(in.text());
  if (sys.mode == Mode::Linear)
    throw DomainError("UnsupportedNumeric", "integral systems have no numeric oracle");
  SeriesKind kind = kind_name == "egf" ? SeriesKind::EGF : SeriesKind::OGF;

  WellFoundedReport wf = analyze(sys);
  if (!wf.verdict)
    throw DomainError("IllFounded", "system is not well founded (" + to_string(wf.reason) + ")");

  std::vector<json> results(points.size());
  std::vector<std::exception_ptr> errors(points.size());
  auto work = [&](std::size_t i) {
    try {
      results[i] = eval_one(sys, kind, points[i], eps, powers, radius, max_iter);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (jobs > 1 && points.size() > 1) {
    std::vector<std::thread> pool;
    std::size_t next = 0;
    for (int t = 0; t < jobs && next < points.size(); ++t, ++next)
      pool.emplace_back([&, t]() {
        for (std::size_t i = static_cast<std::size_t>(t); i < points.size();
             i += static_cast<std::size_t>(jobs))
          work(i);
      });
    for (auto& th : pool) th.join();
  } else {
    for (std::size_t i = 0; i < points.size(); ++i) work(i);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  if (as_json) {
    json out;
    out["kind"] = kind_name;
    out["points"] = results;
    std::cout << out.dump() << "\n";
  } else {
    for (const auto& r : results) {
      char pt[32];
      std::snprintf(pt, sizeof pt, "%g", r["point"].get<double>());
      std::cout << kind_name << "(" << pt << ") = (";
      const auto& vals = r["values"];
      for (std::size_t i = 0; i < vals.size(); ++i)
        std::cout << (i ? ", " : "") << vals[i].get<std::string>();
      std::cout << ")\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"combinatorial system toolkit: well-foundedness, counting series, "
               "numeric values"};
  app.require_subcommand(1);

  Input check_in, count_in, eval_in;
  bool check_json = false, count_json = false, eval_json = false;

  auto* check = app.add_subcommand("check", "decide well-foundedness");
  add_input(check, check_in);
  check->add_flag("--json", check_json, "machine-readable output");

  auto* count = app.add_subcommand("count", "first N series coefficients");
  add_input(count, count_in);
  std::string count_kind = "egf";
  unsigned long terms = 16;
  bool labeled = false;
  count->add_option("--kind", count_kind, "egf or ogf")
      ->check(CLI::IsMember({"egf", "ogf"}));
  count->add_option("--terms", terms, "number of coefficients")->required();
  count->add_flag("--labeled-counts", labeled, "also print n! times the egf coefficient");
  count->add_flag("--json", count_json, "machine-readable output");

  auto* eval = app.add_subcommand("eval", "numeric series values inside the disk");
  add_input(eval, eval_in);
  std::string eval_kind = "egf";
  std::vector<double> points;
  double eps = 1e-10;
  int powers = 4, max_iter = 200, jobs = 1;
  double radius_opt = -1.0;
  eval->add_option("--kind", eval_kind, "egf or ogf")->check(CLI::IsMember({"egf", "ogf"}));
  eval->add_option("--point", points, "evaluation point(s), 0 <= point")
      ->required()
      ->allow_extra_args(false);  // one value per occurrence; repeat for more
  eval->add_option("--eps", eps, "target accuracy");
  eval->add_option("--powers", powers, "values kept at point^1..point^K (ogf)");
  eval->add_option("--radius", radius_opt, "dominant-radius hint");
  eval->add_option("--max-iter", max_iter, "iteration budget");
  eval->add_option("--jobs", jobs, "parallel evaluation of multiple points");
  eval->add_flag("--json", eval_json, "machine-readable output");

  auto* version = app.add_subcommand("version", "print the tool version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (version->parsed()) {
      std::cout << "species " << kVersion << "\n";
      return 0;
    }
    if (check->parsed()) {
      if (check_in.file.empty() && check_in.inline_spec.empty())
        throw ParseError(0, 0, "an input file or --spec is required");
      return run_check(check_in, check_json);
    }
    if (count->parsed()) {
      if (count_in.file.empty() && count_in.inline_spec.empty())
        throw ParseError(0, 0, "an input file or --spec is required");
      return run_count(count_in, count_kind, terms, labeled, count_json);
    }
    if (eval->parsed()) {
      if (eval_in.file.empty() && eval_in.inline_spec.empty())
        throw ParseError(0, 0, "an input file or --spec is required");
      std::optional<double> radius;
      if (radius_opt > 0) radius = radius_opt;
      return run_eval(eval_in, eval_kind, points, eps, powers, radius, max_iter, jobs,
                      eval_json);
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
