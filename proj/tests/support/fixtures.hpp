#pragma once

#include "nlqm/analytic.hpp"
#include "oracles.hpp"

namespace nlqm::fixture {

/// Library-side solution for an oracle pair (channels expressed in the eigenbasis).
inline AnalyticSolution solution_for(const oracle::ClosedFormPair& p) {
  const HermitianOperator H(p.H);
  return validate_spec({H.to_eigenbasis(p.A), H.to_eigenbasis(p.B), p.omega0, p.vartheta, p.theta,
                        Coupling{p.g.real(), p.g.imag()}, H, p.t0});
}

inline AnalyticSolution reference_solution() { return solution_for(oracle::reference_pair()); }

inline double max_deviation(const std::vector<StateVector>& states,
                            const std::vector<CVector>& expected) {
  double worst = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i)
    worst = std::max(worst, (states[i].amplitudes() - expected[i]).norm());
  return worst;
}

}  // namespace nlqm::fixture
