#ifndef KIEFER_RELAX_HPP
#define KIEFER_RELAX_HPP

#include <span>
#include <vector>

#include "kiefer/instance.hpp"

namespace kiefer {

// Outcome of the continuous solve: weights plus the equivalence-theorem
// optimality gap max_i budgetScale_i * g_i / phi_p(w) - 1, which is <= 0 at a
// global optimum (Kiefer/Wolfowitz general equivalence theorem).
struct RelaxationCertificate {
  WeightVector weights;
  double objective = 0.0;  // phi_p(w)
  double gap = 0.0;
  long long iterations = 0;
  bool converged = false;
};

struct SolveOptions {
  double tol = 1e-6;
  long long maxIter = 100000;
  // Multiplicative update exponent in (0,1]; 1 is monotone for p in [0,1].
  double lambda = 1.0;
  // Weights below activeTolFactor * budget are zeroed at termination.
  double activeTolFactor = 1e-12;
  // Optional instrumentation, filled per iterate when non-null. For p > 0 the
  // objective trace records phi_p; for p = 0 it records log det (the actual
  // quantity the p = 0 iteration ascends; phi_0 is constant at full rank).
  std::vector<double>* objectiveTrace = nullptr;
  std::vector<std::vector<double>>* iterateTrace = nullptr;
};

// Multiplicative-weight solve of the continuous relaxation. Requires
// M_F(1) of full rank (run project_if_rank_deficient first). p = 1 is
// dispatched to its closed-form vertex solution.
RelaxationCertificate solve_continuous(const DesignProblem& problem,
                                       const SolveOptions& options = {});

// Stationarity gap of an arbitrary strictly feasible weight vector; <= 0
// (within tolerance) certifies global optimality.
double equivalence_gap(const DesignProblem& problem,
                       std::span<const double> weights);

}  // namespace kiefer

#endif  // KIEFER_RELAX_HPP
