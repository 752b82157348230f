#include "astar/io.hpp"

#include <charconv>
#include <cmath>

namespace astar {

namespace {

// Shortest round-trip form, so reports are byte-stable.
std::string num(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v + 0.0);
  return std::string(buf, r.ptr);
}

nlohmann::ordered_json stats(const std::vector<EquationStats>& v) {
  nlohmann::ordered_json o = nlohmann::ordered_json::object();
  for (const EquationStats& e : v) {
    o[e.name] = {{"max_abs", e.max},
                 {"l2", e.l2},
                 {"argmax", {e.where.w, e.where.z}}};
  }
  return o;
}

}  // namespace

nlohmann::ordered_json to_json(const ResidualReport& rep) {
  return {{"reduced", stats(rep.reduced)},
          {"einstein", stats(rep.einstein)},
          {"max_reduced", rep.max_reduced()},
          {"max_einstein", rep.max_einstein()}};
}

nlohmann::ordered_json to_json(const SolveReport& rep) {
  nlohmann::ordered_json o;
  o["converged"] = rep.converged;
  o["outer_iters"] = rep.outer_iters;
  o["message"] = rep.message;
  if (rep.failure) o["failure"] = std::string(to_string(*rep.failure));
  if (rep.where) o["where"] = {rep.where->w, rep.where->z};
  nlohmann::ordered_json h = nlohmann::ordered_json::array();
  for (const IterationRecord& r : rep.history) {
    h.push_back({{"delta", r.delta},
                 {"rF", r.rF},
                 {"rA", r.rA},
                 {"rPi", r.rPi},
                 {"k_mismatch", r.k_mismatch},
                 {"defect_L", r.defect_L}});
  }
  o["history"] = h;
  return o;
}

nlohmann::ordered_json to_json(const Jet& j) {
  return {j.val, j.w, j.z, j.ww, j.wz, j.zz};
}

nlohmann::ordered_json to_json(const AdmissibleState& s) {
  return {{"F", to_json(s.jet.F)},
          {"A", to_json(s.jet.A)},
          {"K", to_json(s.jet.K)},
          {"Pi", to_json(s.jet.Pi)},
          {"Omega", to_json(s.Omega)},
          {"rho", s.fluid.rho},
          {"eps", s.fluid.eps},
          {"P", s.fluid.P}};
}

nlohmann::ordered_json to_json(const SuiteReport& rep) {
  nlohmann::ordered_json o;
  o["seed"] = rep.seed;
  o["points"] = rep.points;
  o["tol"] = rep.tol;
  o["passed"] = rep.passed();
  nlohmann::ordered_json c = nlohmann::ordered_json::object();
  for (const IdentityCheck& k : rep.checks) c[k.name] = k.max_error;
  o["max_error"] = c;
  if (rep.first_failure) {
    const IdentityFailure& f = *rep.first_failure;
    o["first_failure"] = {{"identity", f.identity},
                          {"sample", f.sample},
                          {"error", f.error},
                          {"state", to_json(f.state)}};
  }
  return o;
}

nlohmann::ordered_json to_json(const RicciStudy& st) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const RicciRow& r : st.rows) {
    rows.push_back({{"h", r.h}, {"max_discrepancy", r.max_discrepancy}});
  }
  nlohmann::ordered_json o;
  o["fields"] = st.fields;
  o["rows"] = rows;
  if (std::isfinite(st.min_order)) {
    o["min_order"] = st.min_order;
  } else {
    o["min_order"] = "round-off";
  }
  return o;
}

void write_fields_csv(std::ostream& out, const FieldState& s,
                      const GridPhysics& ph) {
  const Grid2D& g = s.grid;
  out << "w,z,F,A,K,Pi,rho,P\n";
  for (int j = 0; j <= g.nz; ++j) {
    for (int i = 0; i <= g.nw; ++i) {
      const double rho = s.rho(i, j);
      const double P = rho > 0.0 ? eos_pressure(rho, ph.eos(), ph.constants()).P
                                 : 0.0;
      out << num(g.w(i)) << ',' << num(g.z(j)) << ',' << num(s.F(i, j)) << ','
          << num(s.A(i, j)) << ',' << num(s.K(i, j)) << ','
          << num(s.Pi(i, j)) << ',' << num(rho) << ',' << num(P) << '\n';
    }
  }
}

}  // namespace astar
