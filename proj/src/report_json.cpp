#include "alternant/report_json.hpp"

#include <cstddef>
#include <vector>

namespace alternant {

namespace {

using nlohmann::json;

std::vector<double> padded(std::vector<double> v, std::size_t n) {
  if (v.size() < n) v.resize(n, 0.0);
  return v;
}

}  // namespace

json to_json(const AlternatingSequence& seq) {
  json pairs = json::array();
  for (const auto& pr : seq.pairs) pairs.push_back({pr.first, pr.second});
  return json{{"beta", seq.beta},
              {"eps", seq.eps},
              {"big_m", seq.big_m},
              {"pairs", pairs}};
}

json to_json(const FitReport& report) {
  const std::size_t n = static_cast<std::size_t>(report.degree) + 1;
  json out{
      {"degree", report.degree},
      {"basis", "chebyshev"},
      {"coefficients", padded(report.polynomial.chebyshev_coefficients(), n)},
      {"monomial_coefficients",
       padded(report.polynomial.monomial_coefficients(), n)},
      {"final_norm", report.final_norm},
      {"iterations", report.iterations},
      {"beta_history", report.beta_history},
      {"alternating_points", report.alternation.peaks},
      {"status", report.status},
  };
  return out;
}

json to_json(const SplineFitReport& report) {
  const KnotVector& kv = report.spline.knots();
  json pieces = json::array();
  for (int i = 0; i < kv.piece_count(); ++i) {
    const Interval iv = kv.piece_interval(i);
    const auto& poly = report.spline.piece(i);
    pieces.push_back(json{
        {"interval", {iv.lo, iv.hi}},
        {"coefficients",
         padded(poly.chebyshev_coefficients(),
                static_cast<std::size_t>(kv.degrees[static_cast<std::size_t>(i)]) + 1)},
    });
  }
  json cert = nullptr;
  if (report.certificate.has_value()) {
    cert = json{{"i1", report.certificate->i1},
                {"i2", report.certificate->i2},
                {"count", report.certificate->count},
                {"required", report.certificate->required}};
  }
  return json{{"knots", kv.knots},
              {"degrees", kv.degrees},
              {"pieces", pieces},
              {"final_norm", report.final_norm},
              {"certificate", cert},
              {"iterations", report.iterations},
              {"beta_history", report.beta_history},
              {"status", report.status}};
}

json to_json(const WMinimalityReport& report) {
  json knots = json::array();
  for (const auto& c : report.knots) {
    knots.push_back(json{{"x", c.x},
                         {"extreme", c.extreme},
                         {"s", c.s},
                         {"jump", c.jump},
                         {"kind", c.kind}});
  }
  json moves = json::array();
  for (const auto& m : report.moves) {
    moves.push_back(json{{"knot", m.knot},
                         {"direction", m.direction},
                         {"exists", m.exists},
                         {"count_check_agrees", m.count_check_agrees},
                         {"witness_degrees", m.witness_degrees},
                         {"lambda", m.lambda},
                         {"new_knot", m.new_knot},
                         {"theta_after", m.theta_after},
                         {"improved", m.improved}});
  }
  json out{{"theta", report.theta},
           {"knots", knots},
           {"moves", moves},
           {"verdict", report.verdict}};
  if (report.verdict == "violated-at") {
    out["violated_knot"] = report.violated_knot;
    out["violated_direction"] = report.violated_direction;
  }
  if (report.barrier.has_value()) {
    const BarrierInfo& b = *report.barrier;
    out["barrier"] = json{{"i_minus", b.i_minus},   {"i_zero", b.i_zero},
                          {"i_plus", b.i_plus},     {"j_minus", b.j_minus},
                          {"j_plus", b.j_plus},     {"samples", b.samples},
                          {"verified", b.verified}, {"worst_margin", b.worst_margin}};
  }
  return out;
}

json to_json(const DescentResult& result) {
  json out{{"status", result.status},
           {"moves", result.moves},
           {"theta_history", result.theta_history},
           {"knot_trace", result.knot_trace}};
  if (result.sigma.has_value()) {
    out["final_knots"] = result.sigma->knots().knots;
    out["final_theta"] = result.theta_history.back();
  }
  return out;
}

}  // namespace alternant
