#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace ksgas {

// Additive worst-case error budget a residual is certified against.
struct ErrorBudget {
  double tail = 0.0;  // series / sum truncation remainders
  double quad = 0.0;  // quadrature error estimates
  double fd = 0.0;    // finite-difference error estimates
  double total() const { return tail + quad + fd; }
};

struct ResidualReport {
  std::string equation;
  int n = 0;
  std::vector<double> location;  // flattened configuration (plus extras)
  double residual = 0.0;
  double budget = 0.0;
  bool pass = false;
  ErrorBudget components;
};

inline void to_json(nlohmann::ordered_json& j, const ResidualReport& r) {
  j = nlohmann::ordered_json{{"equation", r.equation},
                             {"n", r.n},
                             {"location", r.location},
                             {"residual", r.residual},
                             {"budget", r.budget},
                             {"pass", r.pass},
                             {"components",
                              {{"tail", r.components.tail},
                               {"quad", r.components.quad},
                               {"fd", r.components.fd}}}};
}

inline ResidualReport make_report(std::string equation, int n, std::vector<double> location,
                                  double residual, const ErrorBudget& parts) {
  ResidualReport r;
  r.equation = std::move(equation);
  r.n = n;
  r.location = std::move(location);
  r.residual = residual;
  r.components = parts;
  r.budget = parts.total();
  r.pass = std::abs(residual) <= r.budget;
  return r;
}

}  // namespace ksgas
