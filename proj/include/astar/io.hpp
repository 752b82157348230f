#pragma once

#include <ostream>

#include "astar/solver.hpp"
#include "astar/verify.hpp"
#include "json.hpp"

namespace astar {

/// {equation: {max_abs, l2, argmax: [w, z]}} for the reduced and Einstein
/// residuals, keyed "reduced" and "einstein".
nlohmann::ordered_json to_json(const ResidualReport& rep);
nlohmann::ordered_json to_json(const SolveReport& rep);
nlohmann::ordered_json to_json(const SuiteReport& rep);
nlohmann::ordered_json to_json(const RicciStudy& st);
nlohmann::ordered_json to_json(const AdmissibleState& s);
nlohmann::ordered_json to_json(const Jet& j);

/// Header "w,z,F,A,K,Pi,rho,P"; rows run over w inside z.
void write_fields_csv(std::ostream& out, const FieldState& s,
                      const GridPhysics& ph);

}  // namespace astar
