#include <CLI11.hpp>

#include <stdexcept>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "alternant/evaluable.hpp"
#include "alternant/free_knot.hpp"
#include "alternant/poly_fit.hpp"
#include "alternant/report_json.hpp"
#include "alternant/spline_fit.hpp"

namespace {

using alternant::EvaluableFunction;
using alternant::FitParams;
using alternant::FreeKnotParams;
using alternant::Interval;
using alternant::KnotVector;

struct CommonOpts {
  std::string func;
  std::string csv;
  std::vector<double> interval{-1.0, 1.0};
  int grid = alternant::kDefaultGrid;
  double beta_min = 0.5;
  double beta_max = 0.99;
  double gamma_down = 0.9;
  double gamma_up = 1.1;
  int max_iter = 500;
  double tol = -1.0;
  std::string out;
  std::string dump_csv;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--func", o.func,
                  "builtin function: abs|runge|sin|cos|exp|poly:<c0,c1,...>");
  cmd->add_option("--csv", o.csv,
                  "two-column t,value CSV defining a tabulated function");
  cmd->add_option("--interval", o.interval, "domain endpoints a,b")
      ->expected(2)
      ->delimiter(',');
  cmd->add_option("--grid", o.grid, "scan grid size");
  cmd->add_option("--beta-min", o.beta_min, "lower clamp of the beta schedule");
  cmd->add_option("--beta-max", o.beta_max, "certification level beta+");
  cmd->add_option("--gamma-down", o.gamma_down, "beta decrease factor");
  cmd->add_option("--gamma-up", o.gamma_up, "beta increase factor");
  cmd->add_option("--max-iter", o.max_iter, "iteration cap");
  cmd->add_option("--tol", o.tol, "degeneracy tolerance (auto when < 0)");
  cmd->add_option("--out", o.out, "output JSON path (stdout when omitted)");
  cmd->add_option("--dump-csv", o.dump_csv,
                  "write t,f,fit,residual,marker samples to this CSV path");
}

EvaluableFunction make_function(const CommonOpts& o) {
  if (!o.csv.empty()) {
    std::ifstream in(o.csv);
    if (!in) throw std::invalid_argument("cannot open CSV file: " + o.csv);
    std::vector<double> ts, vs;
    std::string line;
    while (std::getline(in, line)) {
      for (char& c : line)
        if (c == ',' || c == ';' || c == '\t') c = ' ';
      std::istringstream row(line);
      double t = 0.0, v = 0.0;
      if (row >> t >> v) {
        ts.push_back(t);
        vs.push_back(v);
      }
    }
    return EvaluableFunction::tabulated(ts, vs);
  }
  if (!o.func.empty())
    return EvaluableFunction::builtin(o.func,
                                      Interval{o.interval[0], o.interval[1]});
  throw std::invalid_argument("one of --func or --csv is required");
}

FitParams fit_params(const CommonOpts& o) {
  FitParams p;
  p.beta_min = o.beta_min;
  p.beta_max = o.beta_max;
  p.gamma_down = o.gamma_down;
  p.gamma_up = o.gamma_up;
  p.max_iter = o.max_iter;
  p.tol = o.tol;
  p.grid_size = o.grid;
  return p;
}

unsigned seed_from_env() {
  if (const char* s = std::getenv("ALTERNANT_SEED")) {
    try {
      return static_cast<unsigned>(std::stoul(s));
    } catch (const std::exception&) {
      throw std::invalid_argument("ALTERNANT_SEED must be a non-negative integer");
    }
  }
  return 0x5eedU;
}

std::string timestamp_utc() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

void write_json(nlohmann::json j, const std::string& out) {
  j["timestamp"] = timestamp_utc();
  const std::string text = j.dump(2) + "\n";
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) throw std::runtime_error("cannot write output file: " + out);
  f << text;
}

void dump_curve(const std::string& path, const EvaluableFunction& f,
                const std::function<double(double)>& fit,
                const std::vector<double>& markers, int grid) {
  if (path.empty()) return;
  std::ofstream csv(path);
  if (!csv) throw std::runtime_error("cannot write CSV file: " + path);
  csv.precision(17);
  csv << "t,f,fit,residual,marker\n";
  const Interval dom = f.domain();
  const double step = dom.length() / (grid - 1);
  std::vector<bool> used(markers.size(), false);
  for (int i = 0; i < grid; ++i) {
    const double t = i + 1 == grid ? dom.hi : dom.lo + step * i;
    const double fv = f(t);
    const double pv = fit(t);
    const char* marker = "";
    for (std::size_t m = 0; m < markers.size(); ++m) {
      if (!used[m] && std::fabs(markers[m] - t) <= 0.5 * step) {
        marker = "peak";
        used[m] = true;
        break;
      }
    }
    csv << t << ',' << fv << ',' << pv << ',' << (pv - fv) << ',' << marker
        << '\n';
  }
}

int status_code(const std::string& status) {
  if (status == "max-iterations" || status == "max-moves") return 2;
  return 0;
}

// --knots lists interior knots only; the domain endpoints are supplied by
// --interval (or by the CSV sample range) through the function's domain.
std::vector<double> with_endpoints(const EvaluableFunction& f,
                                   const std::vector<double>& interior) {
  std::vector<double> full;
  full.reserve(interior.size() + 2);
  full.push_back(f.domain().lo);
  full.insert(full.end(), interior.begin(), interior.end());
  full.push_back(f.domain().hi);
  return full;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"minimax polynomial and spline approximation toolkit"};
  app.require_subcommand(1);

  CommonOpts poly_opts;
  int degree = 3;
  CLI::App* fit_poly = app.add_subcommand(
      "fit-poly", "best uniform polynomial approximation on an interval");
  add_common(fit_poly, poly_opts);
  fit_poly->add_option("--degree", degree, "polynomial degree")->required();

  CommonOpts spline_opts;
  std::vector<double> knots;
  std::vector<int> degrees;
  CLI::App* fit_spline = app.add_subcommand(
      "fit-spline", "best continuous spline approximation with fixed knots");
  add_common(fit_spline, spline_opts);
  fit_spline
      ->add_option("--knots", knots,
                   "interior knot abscissae x1,...,xp (endpoints come from "
                   "--interval or the CSV range)")
      ->required()
      ->delimiter(',');
  fit_spline->add_option("--degrees", degrees, "per-piece degrees n0,...,np")
      ->required()
      ->delimiter(',');

  CommonOpts fk_opts;
  std::vector<double> fk_knots;
  std::vector<int> fk_degrees;
  double beta_cert = 1.0 - 1e-7;
  int max_moves = 30;
  CLI::App* free_knots = app.add_subcommand(
      "free-knots", "knot-placement optimality analysis and descent");
  free_knots->require_subcommand(1);
  CLI::App* fk_check = free_knots->add_subcommand(
      "check", "test the local optimality condition for the knot placement");
  CLI::App* fk_descend = free_knots->add_subcommand(
      "descend", "move knots while the optimality condition is violated");
  for (CLI::App* sub : {fk_check, fk_descend}) {
    add_common(sub, fk_opts);
    sub->add_option("--knots", fk_knots,
                    "interior knot abscissae x1,...,xp (endpoints come from "
                    "--interval or the CSV range)")
        ->required()
        ->delimiter(',');
    sub->add_option("--degrees", fk_degrees, "per-piece degrees n0,...,np")
        ->required()
        ->delimiter(',');
    sub->add_option("--beta-cert", beta_cert,
                    "certification level for the inner fixed-knot fits");
  }
  fk_descend->add_option("--max-moves", max_moves, "cap on executed knot moves");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (fit_poly->parsed()) {
      const EvaluableFunction f = make_function(poly_opts);
      const alternant::FitReport rep =
          alternant::remez_fit(f, degree, fit_params(poly_opts));
      dump_curve(poly_opts.dump_csv, f,
                 [&](double t) { return rep.polynomial(t); },
                 rep.alternation.peaks, poly_opts.grid);
      write_json(alternant::to_json(rep), poly_opts.out);
      return status_code(rep.status);
    }
    if (fit_spline->parsed()) {
      const EvaluableFunction f = make_function(spline_opts);
      const KnotVector kv(with_endpoints(f, knots), degrees);
      const alternant::SplineFitReport rep =
          alternant::fixed_knot_fit(f, kv, fit_params(spline_opts));
      dump_curve(spline_opts.dump_csv, f,
                 [&](double t) { return rep.spline(t); },
                 rep.alternation.peaks, spline_opts.grid);
      write_json(alternant::to_json(rep), spline_opts.out);
      return status_code(rep.status);
    }
    const EvaluableFunction f = make_function(fk_opts);
    const KnotVector kv(with_endpoints(f, fk_knots), fk_degrees);
    FreeKnotParams fkp;
    fkp.fit = fit_params(fk_opts);
    fkp.beta_cert = beta_cert;
    fkp.seed = seed_from_env();
    if (fk_check->parsed()) {
      const alternant::WMinimalityReport rep =
          alternant::check_w_minimality(f, kv, fkp);
      if (rep.sigma.has_value())
        dump_curve(fk_opts.dump_csv, f,
                   [&](double t) { return (*rep.sigma)(t); }, {}, fk_opts.grid);
      write_json(alternant::to_json(rep), fk_opts.out);
      return 0;
    }
    const alternant::DescentResult res =
        alternant::descend_free_knots(f, kv, max_moves, fkp);
    if (res.sigma.has_value())
      dump_curve(fk_opts.dump_csv, f,
                 [&](double t) { return (*res.sigma)(t); }, {}, fk_opts.grid);
    write_json(alternant::to_json(res), fk_opts.out);
    return status_code(res.status);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
