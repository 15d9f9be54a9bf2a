#include <pybind11/pybind11.h>

#include <stdexcept>
#include <pybind11/stl.h>

#include <json.hpp>
#include <string>
#include <utility>
#include <vector>

#include "alternant/alternance.hpp"
#include "alternant/evaluable.hpp"
#include "alternant/extrema.hpp"
#include "alternant/free_knot.hpp"
#include "alternant/oracle.hpp"
#include "alternant/poly_fit.hpp"
#include "alternant/report_json.hpp"
#include "alternant/spline_fit.hpp"

namespace py = pybind11;

namespace {

using alternant::EvaluableFunction;
using alternant::FitParams;
using alternant::FreeKnotParams;
using alternant::Interval;
using alternant::KnotVector;

py::object json_to_py(const nlohmann::json& j) {
  using value_t = nlohmann::json::value_t;
  switch (j.type()) {
    case value_t::null:
      return py::none();
    case value_t::boolean:
      return py::bool_(j.get<bool>());
    case value_t::number_integer:
      return py::int_(j.get<long long>());
    case value_t::number_unsigned:
      return py::int_(j.get<unsigned long long>());
    case value_t::number_float:
      return py::float_(j.get<double>());
    case value_t::string:
      return py::str(j.get<std::string>());
    case value_t::array: {
      py::list out;
      for (const auto& e : j) out.append(json_to_py(e));
      return out;
    }
    case value_t::object: {
      py::dict out;
      for (const auto& [k, v] : j.items()) out[py::str(k)] = json_to_py(v);
      return out;
    }
    default:
      return py::none();
  }
}

EvaluableFunction to_function(const py::object& func,
                              std::pair<double, double> interval) {
  const Interval dom{interval.first, interval.second};
  if (py::isinstance<py::str>(func))
    return EvaluableFunction::builtin(func.cast<std::string>(), dom);
  if (py::isinstance<py::function>(func) || PyCallable_Check(func.ptr())) {
    py::function fn = func.cast<py::function>();
    return EvaluableFunction::callable(
        dom, [fn](double t) { return fn(t).cast<double>(); }, "python");
  }
  throw std::invalid_argument(
      "func must be a builtin name (abs|runge|sin|cos|exp|poly:...) "
      "or a callable");
}

FitParams make_fit_params(int grid, double beta_min, double beta_max,
                          double gamma_down, double gamma_up, int max_iter,
                          double tol) {
  FitParams p;
  p.grid_size = grid;
  p.beta_min = beta_min;
  p.beta_max = beta_max;
  p.gamma_down = gamma_down;
  p.gamma_up = gamma_up;
  p.max_iter = max_iter;
  p.tol = tol;
  return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "minimax polynomial and free-knot spline approximation via "
      "beta-alternating sequences";

  m.def(
      "fit_poly",
      [](const py::object& func, int degree, std::pair<double, double> interval,
         int grid, double beta_min, double beta_max, double gamma_down,
         double gamma_up, int max_iter, double tol) {
        const EvaluableFunction f = to_function(func, interval);
        const alternant::FitReport rep = alternant::remez_fit(
            f, degree,
            make_fit_params(grid, beta_min, beta_max, gamma_down, gamma_up,
                            max_iter, tol));
        return json_to_py(alternant::to_json(rep));
      },
      py::arg("func"), py::arg("degree"),
      py::arg("interval") = std::pair<double, double>{-1.0, 1.0},
      py::arg("grid") = alternant::kDefaultGrid, py::arg("beta_min") = 0.5,
      py::arg("beta_max") = 0.99, py::arg("gamma_down") = 0.9,
      py::arg("gamma_up") = 1.1, py::arg("max_iter") = 500,
      py::arg("tol") = -1.0,
      "Best uniform polynomial approximation of the given degree; returns the "
      "fit report as a dict.");

  m.def(
      "fit_spline",
      [](const py::object& func, std::vector<double> knots,
         std::vector<int> degrees, std::pair<double, double> interval, int grid,
         double beta_min, double beta_max, double gamma_down, double gamma_up,
         int max_iter, double tol) {
        const EvaluableFunction f = to_function(func, interval);
        const KnotVector kv(std::move(knots), std::move(degrees));
        const alternant::SplineFitReport rep = alternant::fixed_knot_fit(
            f, kv,
            make_fit_params(grid, beta_min, beta_max, gamma_down, gamma_up,
                            max_iter, tol));
        return json_to_py(alternant::to_json(rep));
      },
      py::arg("func"), py::arg("knots"), py::arg("degrees"),
      py::arg("interval") = std::pair<double, double>{-1.0, 1.0},
      py::arg("grid") = alternant::kDefaultGrid, py::arg("beta_min") = 0.5,
      py::arg("beta_max") = 0.99, py::arg("gamma_down") = 0.9,
      py::arg("gamma_up") = 1.1, py::arg("max_iter") = 500,
      py::arg("tol") = -1.0,
      "Best continuous spline approximation with fixed knots; returns the fit "
      "report as a dict.");

  m.def(
      "beta_alternance",
      [](const py::object& func, double beta,
         std::pair<double, double> interval, int grid) {
        const EvaluableFunction f = to_function(func, interval);
        const auto [shift, g] = alternant::recentre(f, grid);
        const alternant::AlternatingSequence seq =
            alternant::build_beta_alternance(g, beta, -1.0, grid);
        nlohmann::json j = alternant::to_json(seq);
        j["shift"] = shift;
        return json_to_py(j);
      },
      py::arg("func"), py::arg("beta"),
      py::arg("interval") = std::pair<double, double>{-1.0, 1.0},
      py::arg("grid") = alternant::kDefaultGrid,
      "Recentre the function and build its maximal beta-alternating sequence; "
      "returns {beta, eps, big_m, pairs}.");

  m.def(
      "check_free_knots",
      [](const py::object& func, std::vector<double> knots,
         std::vector<int> degrees, std::pair<double, double> interval, int grid,
         double beta_cert, unsigned seed) {
        const EvaluableFunction f = to_function(func, interval);
        const KnotVector kv(std::move(knots), std::move(degrees));
        FreeKnotParams p;
        p.fit.grid_size = grid;
        p.beta_cert = beta_cert;
        p.seed = seed;
        return json_to_py(
            alternant::to_json(alternant::check_w_minimality(f, kv, p)));
      },
      py::arg("func"), py::arg("knots"), py::arg("degrees"),
      py::arg("interval") = std::pair<double, double>{-1.0, 1.0},
      py::arg("grid") = alternant::kDefaultGrid,
      py::arg("beta_cert") = 1.0 - 1e-7, py::arg("seed") = 0x5eedU,
      "Test the local-optimality condition of the knot placement; returns the "
      "analysis as a dict.");

  m.def(
      "descend_free_knots",
      [](const py::object& func, std::vector<double> knots,
         std::vector<int> degrees, int max_moves,
         std::pair<double, double> interval, int grid, double beta_cert,
         unsigned seed) {
        const EvaluableFunction f = to_function(func, interval);
        const KnotVector kv(std::move(knots), std::move(degrees));
        FreeKnotParams p;
        p.fit.grid_size = grid;
        p.beta_cert = beta_cert;
        p.seed = seed;
        return json_to_py(alternant::to_json(
            alternant::descend_free_knots(f, kv, max_moves, p)));
      },
      py::arg("func"), py::arg("knots"), py::arg("degrees"),
      py::arg("max_moves") = 30,
      py::arg("interval") = std::pair<double, double>{-1.0, 1.0},
      py::arg("grid") = alternant::kDefaultGrid,
      py::arg("beta_cert") = 1.0 - 1e-7, py::arg("seed") = 0x5eedU,
      "Move knots while the optimality condition is violated; returns the "
      "descent trace as a dict.");

  m.def(
      "oracle_minimax_poly",
      [](const py::object& func, int degree,
         std::pair<double, double> interval, int grid) {
        const EvaluableFunction f = to_function(func, interval);
        const alternant::oracle::PolyMinimaxResult res =
            alternant::oracle::grid_minimax_poly(f, degree, grid);
        nlohmann::json j;
        j["value"] = res.value;
        j["coefficients"] = res.polynomial.monomial_coefficients();
        j["reference"] = res.reference;
        return json_to_py(j);
      },
      py::arg("func"), py::arg("degree"),
      py::arg("interval") = std::pair<double, double>{-1.0, 1.0},
      py::arg("grid") = 8193,
      "Independent grid/exchange reference solution of the same polynomial "
      "problem, for cross-checks.");
}
