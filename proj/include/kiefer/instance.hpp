#ifndef KIEFER_INSTANCE_HPP
#define KIEFER_INSTANCE_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "kiefer/spectra.hpp"

namespace kiefer {

// Budget of N unit-cost selections (replication allowed).
struct Replication {
  long long N = 1;
};

// Per-atom costs c_i with total budget B.
struct Budget {
  std::vector<double> costs;
  double B = 0.0;
};

using BudgetMode = std::variant<Replication, Budget>;

// The full problem data: atoms, dimension, exponent and budget.
struct DesignProblem {
  std::vector<PsdAtom> atoms;
  Eigen::Index dim = 0;
  double p = 0.0;
  BudgetMode budget;
  std::string label;

  std::size_t s() const { return atoms.size(); }
  bool is_replication() const {
    return std::holds_alternative<Replication>(budget);
  }
  // Total budget: N in replication mode, B in budget mode.
  double budget_amount() const;
  // Cost of one unit of atom i (1 in replication mode).
  double unit_cost(std::size_t i) const;
  long long replication_count() const;  // throws unless replication mode
  const std::vector<double>& cost_vector() const;  // throws unless budget mode
};

// Continuous design w >= 0 with its budget consumption.
struct WeightVector {
  std::vector<double> w;
  double budgetUsed = 0.0;
};

// Integer design; binary designs are flagged and keep n in {0,1}.
struct IntegerDesign {
  std::vector<long long> n;
  bool binary = false;
};

// Validates nonnegativity and budget feasibility before wrapping.
WeightVector make_weight_vector(const DesignProblem& problem,
                                std::vector<double> w);

// Checks all DesignProblem invariants; throws SchemaError/NotPsd/
// DimensionMismatch on violation.
void validate(const DesignProblem& problem);

// Feasibility of an integer design for the problem's budget.
bool is_feasible(const DesignProblem& problem, const IntegerDesign& design);

// --- document I/O (UTF-8 JSON, schema in README) ---
DesignProblem load_problem(const std::string& text);
DesignProblem load_problem_file(const std::filesystem::path& path);
std::string save_problem(const DesignProblem& problem);
void save_problem_file(const DesignProblem& problem,
                       const std::filesystem::path& path);

// Power-of-ten denominator of the shortest decimal form of x, capped at
// 10^9; SchemaError beyond the cap (costs must be decimal literals).
long long decimal_denominator(double x);

// --- rank-deficiency projection ---
struct ProjectionResult {
  DesignProblem problem;
  Eigen::MatrixXd projector;  // m x r*, leading singular vectors of M_F(1)
  bool projected = false;
  Eigen::Index originalDim = 0;
};

// If rank(M_F(1)) = r* < m, rewrites every atom as U^T M_i U with U the r*
// leading singular vectors; otherwise returns the problem unchanged with an
// identity projector.
ProjectionResult project_if_rank_deficient(const DesignProblem& problem);

// --- synthetic instances ---
enum class GenKind { Coverage, RandomPsd, RankOne };

struct GenParams {
  long long s = 4;
  long long m = 3;
  long long N = 2;
  double p = 0.5;
  long long maxSetSize = 2;   // coverage
  long long rowsPerAtom = 0;  // random-psd; 0 means m
  std::string label;
};

GenKind parse_gen_kind(const std::string& name);  // BadParams on unknown
DesignProblem generate(GenKind kind, const GenParams& params,
                       std::uint64_t seed);

// Coverage instance from an explicit set system over ground set [m]
// (1-based element ids): atom i is the 0/1 diagonal matrix of S_i.
DesignProblem coverage_problem(const std::vector<std::vector<int>>& sets,
                               Eigen::Index m, long long N, double p,
                               std::string label = "coverage");

}  // namespace kiefer

#endif  // KIEFER_INSTANCE_HPP
