#include "kiefer/instance.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "kiefer/rng.hpp"

namespace kiefer {

using ordered_json = nlohmann::ordered_json;

double DesignProblem::budget_amount() const {
  if (is_replication())
    return static_cast<double>(std::get<Replication>(budget).N);
  return std::get<Budget>(budget).B;
}

double DesignProblem::unit_cost(std::size_t i) const {
  if (is_replication()) return 1.0;
  return std::get<Budget>(budget).costs.at(i);
}

long long DesignProblem::replication_count() const {
  if (!is_replication())
    throw BadParams("problem '" + label + "' is not in replication mode");
  return std::get<Replication>(budget).N;
}

const std::vector<double>& DesignProblem::cost_vector() const {
  if (is_replication())
    throw BadParams("problem '" + label + "' is not in budget mode");
  return std::get<Budget>(budget).costs;
}

WeightVector make_weight_vector(const DesignProblem& problem,
                                std::vector<double> w) {
  if (w.size() != problem.s())
    throw DimensionMismatch("weight vector length " + std::to_string(w.size()) +
                            " vs " + std::to_string(problem.s()) + " atoms");
  double used = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] < 0.0) throw BadParams("negative weight at index " +
                                    std::to_string(i));
    used += problem.unit_cost(i) * w[i];
  }
  const double cap = problem.budget_amount();
  if (used > cap * (1.0 + 1e-9))
    throw BadBudget("weights use " + std::to_string(used) + " of budget " +
                    std::to_string(cap));
  return WeightVector{std::move(w), used};
}

void validate(const DesignProblem& problem) {
  if (problem.atoms.empty()) throw SchemaError("problem needs at least one atom");
  if (problem.dim < 1) throw SchemaError("dimension m must be >= 1");
  if (!(problem.p >= 0.0 && problem.p <= 1.0))
    throw SchemaError("exponent p must lie in [0,1]");
  for (const auto& atom : problem.atoms) {
    if (atom.matrix.dim() != problem.dim)
      throw DimensionMismatch("atom '" + atom.name + "' has dim " +
                              std::to_string(atom.matrix.dim()) + ", expected " +
                              std::to_string(problem.dim));
  }
  if (problem.is_replication()) {
    if (std::get<Replication>(problem.budget).N < 1)
      throw SchemaError("replication budget N must be >= 1");
  } else {
    const auto& b = std::get<Budget>(problem.budget);
    if (b.costs.size() != problem.s())
      throw SchemaError("cost vector length must equal the atom count");
    for (double c : b.costs) {
      if (!(c > 0.0)) throw SchemaError("costs must be positive");
      decimal_denominator(c);  // rejects non-decimal costs early
    }
    if (b.B < *std::min_element(b.costs.begin(), b.costs.end()))
      throw SchemaError("budget B below the cheapest atom");
  }
}

bool is_feasible(const DesignProblem& problem, const IntegerDesign& design) {
  if (design.n.size() != problem.s()) return false;
  double used = 0.0;
  for (std::size_t i = 0; i < design.n.size(); ++i) {
    if (design.n[i] < 0) return false;
    if (design.binary && design.n[i] > 1) return false;
    used += problem.unit_cost(i) * static_cast<double>(design.n[i]);
  }
  return used <= problem.budget_amount() * (1.0 + 1e-12);
}

namespace {

std::string shortest_repr(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

Eigen::MatrixXd parse_dense(const ordered_json& node, const std::string& where) {
  if (!node.is_array() || node.empty() || !node.front().is_array())
    throw SchemaError(where + ": expected an array of arrays");
  const std::size_t rows = node.size();
  const std::size_t cols = node.front().size();
  Eigen::MatrixXd out(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const auto& row = node[i];
    if (!row.is_array() || row.size() != cols)
      throw SchemaError(where + ": ragged row " + std::to_string(i));
    for (std::size_t j = 0; j < cols; ++j) {
      if (!row[j].is_number())
        throw SchemaError(where + ": non-numeric entry");
      out(i, j) = row[j].get<double>();
    }
  }
  return out;
}

ordered_json dense_to_json(const Eigen::MatrixXd& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

long long decimal_denominator(double x) {
  const std::string s = shortest_repr(x);
  long long fracDigits = 0;
  const auto epos = s.find_first_of("eE");
  const auto dot = s.find('.');
  if (dot != std::string::npos) {
    const auto end = epos == std::string::npos ? s.size() : epos;
    fracDigits = static_cast<long long>(end - dot - 1);
  }
  if (epos != std::string::npos) {
    const long long expo = std::stoll(s.substr(epos + 1));
    fracDigits -= expo;  // 1.5e-3 has 4 fractional digits, 1.5e3 none
  }
  fracDigits = std::max<long long>(fracDigits, 0);
  if (fracDigits > 9)
    throw SchemaError("cost " + s +
                      " is not a decimal literal with <= 9 fractional digits");
  long long den = 1;
  for (long long k = 0; k < fracDigits; ++k) den *= 10;
  return den;
}

DesignProblem load_problem(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what());
  }
  if (!doc.is_object()) throw SchemaError("top-level value must be an object");

  DesignProblem problem;
  problem.label = doc.value("label", std::string{});
  if (!doc.contains("m") || !doc["m"].is_number_integer())
    throw SchemaError("missing integer key 'm'");
  problem.dim = doc["m"].get<long long>();
  if (!doc.contains("p") || !doc["p"].is_number())
    throw SchemaError("missing numeric key 'p'");
  problem.p = doc["p"].get<double>();

  const bool hasN = doc.contains("N");
  const bool hasBudget = doc.contains("costs") || doc.contains("budget");
  if (hasN == hasBudget)
    throw SchemaError("exactly one of 'N' or 'costs'+'budget' is required");
  if (hasN) {
    if (!doc["N"].is_number_integer()) throw SchemaError("'N' must be an integer");
    problem.budget = Replication{doc["N"].get<long long>()};
  } else {
    if (!doc.contains("costs") || !doc.contains("budget"))
      throw SchemaError("budget mode needs both 'costs' and 'budget'");
    Budget b;
    if (!doc["costs"].is_array()) throw SchemaError("'costs' must be an array");
    for (const auto& c : doc["costs"]) {
      if (!c.is_number()) throw SchemaError("'costs' entries must be numbers");
      b.costs.push_back(c.get<double>());
    }
    if (!doc["budget"].is_number()) throw SchemaError("'budget' must be a number");
    b.B = doc["budget"].get<double>();
    problem.budget = std::move(b);
  }

  if (!doc.contains("atoms") || !doc["atoms"].is_array())
    throw SchemaError("missing array key 'atoms'");
  for (const auto& entry : doc["atoms"]) {
    if (!entry.is_object() || !entry.contains("name") ||
        !entry["name"].is_string())
      throw SchemaError("every atom needs a string 'name'");
    const std::string name = entry["name"].get<std::string>();
    const bool hasMatrix = entry.contains("matrix");
    const bool hasRows = entry.contains("rows");
    if (hasMatrix == hasRows)
      throw SchemaError("atom '" + name +
                        "': exactly one of 'matrix' or 'rows' is required");
    if (hasMatrix) {
      const Eigen::MatrixXd m = parse_dense(entry["matrix"], "atom '" + name + "'");
      if (m.rows() != problem.dim || m.cols() != problem.dim)
        throw DimensionMismatch("atom '" + name + "': matrix must be " +
                                std::to_string(problem.dim) + "x" +
                                std::to_string(problem.dim));
      problem.atoms.push_back(PsdAtom::from_matrix(name, m));
    } else {
      const Eigen::MatrixXd rows = parse_dense(entry["rows"], "atom '" + name + "'");
      if (rows.cols() != problem.dim)
        throw DimensionMismatch("atom '" + name + "': rows must have " +
                                std::to_string(problem.dim) + " columns");
      problem.atoms.push_back(PsdAtom::from_rows(name, rows));
    }
  }

  validate(problem);
  return problem;
}

DesignProblem load_problem_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_problem(buf.str());
}

std::string save_problem(const DesignProblem& problem) {
  ordered_json doc;
  doc["label"] = problem.label;
  doc["m"] = static_cast<long long>(problem.dim);
  doc["p"] = problem.p;
  if (problem.is_replication()) {
    doc["N"] = std::get<Replication>(problem.budget).N;
  } else {
    const auto& b = std::get<Budget>(problem.budget);
    doc["costs"] = b.costs;
    doc["budget"] = b.B;
  }
  ordered_json atoms = ordered_json::array();
  for (const auto& atom : problem.atoms) {
    ordered_json entry;
    entry["name"] = atom.name;
    if (atom.observationRows)
      entry["rows"] = dense_to_json(*atom.observationRows);
    else
      entry["matrix"] = dense_to_json(atom.matrix.mat());
    atoms.push_back(std::move(entry));
  }
  doc["atoms"] = std::move(atoms);
  return doc.dump(2) + "\n";
}

void save_problem_file(const DesignProblem& problem,
                       const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open " + path.string() + " for writing");
  out << save_problem(problem);
}

ProjectionResult project_if_rank_deficient(const DesignProblem& problem) {
  validate(problem);
  const std::vector<double> ones(problem.s(), 1.0);
  const SymmetricMatrix total = info_matrix(ones, problem.atoms);
  const EigenPairs pairs = eig_psd_pairs(total);
  const double tol =
      auto_rank_tol(problem.dim, pairs.values.cwiseAbs().maxCoeff());
  const Eigen::Index rank = (pairs.values.array() > tol).count();

  ProjectionResult out;
  out.originalDim = problem.dim;
  if (rank == problem.dim) {
    out.problem = problem;
    out.projector = Eigen::MatrixXd::Identity(problem.dim, problem.dim);
    out.projected = false;
    return out;
  }

  const Eigen::MatrixXd u = pairs.vectors.leftCols(rank);
  DesignProblem reduced;
  reduced.dim = rank;
  reduced.p = problem.p;
  reduced.budget = problem.budget;
  reduced.label = problem.label;
  for (const auto& atom : problem.atoms) {
    if (atom.observationRows) {
      reduced.atoms.push_back(
          PsdAtom::from_rows(atom.name, *atom.observationRows * u));
    } else {
      reduced.atoms.push_back(PsdAtom::from_matrix(
          atom.name, u.transpose() * atom.matrix.mat() * u));
    }
  }
  out.problem = std::move(reduced);
  out.projector = u;
  out.projected = true;
  return out;
}

GenKind parse_gen_kind(const std::string& name) {
  if (name == "coverage") return GenKind::Coverage;
  if (name == "random-psd") return GenKind::RandomPsd;
  if (name == "rank-one") return GenKind::RankOne;
  throw BadParams("unknown instance kind '" + name + "'");
}

DesignProblem coverage_problem(const std::vector<std::vector<int>>& sets,
                               Eigen::Index m, long long N, double p,
                               std::string label) {
  DesignProblem problem;
  problem.dim = m;
  problem.p = p;
  problem.budget = Replication{N};
  problem.label = std::move(label);
  for (std::size_t i = 0; i < sets.size(); ++i) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m, m);
    for (int element : sets[i]) {
      if (element < 1 || element > m)
        throw BadParams("set element " + std::to_string(element) +
                        " outside ground set [1," + std::to_string(m) + "]");
      d(element - 1, element - 1) = 1.0;
    }
    problem.atoms.push_back(
        PsdAtom::from_matrix("set" + std::to_string(i + 1), d));
  }
  validate(problem);
  return problem;
}

DesignProblem generate(GenKind kind, const GenParams& params,
                       std::uint64_t seed) {
  if (params.s < 1 || params.m < 1 || params.N < 1)
    throw BadParams("generator needs s, m, N >= 1");
  if (!(params.p >= 0.0 && params.p <= 1.0))
    throw BadParams("generator needs p in [0,1]");
  Rng rng(seed);

  DesignProblem problem;
  problem.dim = params.m;
  problem.p = params.p;
  problem.budget = Replication{params.N};

  switch (kind) {
    case GenKind::Coverage: {
      if (params.maxSetSize < 1 || params.maxSetSize > params.m)
        throw BadParams("coverage needs maxSetSize in [1,m]");
      problem.label = params.label.empty()
                          ? "coverage-s" + std::to_string(params.s) + "-m" +
                                std::to_string(params.m) + "-seed" +
                                std::to_string(seed)
                          : params.label;
      std::vector<int> ground(params.m);
      std::iota(ground.begin(), ground.end(), 0);
      for (long long i = 0; i < params.s; ++i) {
        const long long size = rng.uniform_int(1, params.maxSetSize);
        // partial Fisher-Yates: first `size` entries become the set
        for (long long k = 0; k < size; ++k) {
          const long long j = rng.uniform_int(k, params.m - 1);
          std::swap(ground[k], ground[j]);
        }
        Eigen::MatrixXd d = Eigen::MatrixXd::Zero(params.m, params.m);
        for (long long k = 0; k < size; ++k) d(ground[k], ground[k]) = 1.0;
        problem.atoms.push_back(
            PsdAtom::from_matrix("set" + std::to_string(i + 1), d));
      }
      break;
    }
    case GenKind::RandomPsd: {
      const long long rows = params.rowsPerAtom > 0 ? params.rowsPerAtom
                                                    : params.m;
      problem.label = params.label.empty()
                          ? "random-psd-s" + std::to_string(params.s) + "-m" +
                                std::to_string(params.m) + "-seed" +
                                std::to_string(seed)
                          : params.label;
      for (long long i = 0; i < params.s; ++i) {
        Eigen::MatrixXd a(rows, params.m);
        for (long long r = 0; r < rows; ++r)
          for (long long c = 0; c < params.m; ++c) a(r, c) = rng.normal();
        problem.atoms.push_back(
            PsdAtom::from_rows("atom" + std::to_string(i + 1), a));
      }
      break;
    }
    case GenKind::RankOne: {
      problem.label = params.label.empty()
                          ? "rank-one-s" + std::to_string(params.s) + "-m" +
                                std::to_string(params.m) + "-seed" +
                                std::to_string(seed)
                          : params.label;
      for (long long i = 0; i < params.s; ++i) {
        Eigen::MatrixXd a(1, params.m);
        for (long long c = 0; c < params.m; ++c) a(0, c) = rng.normal();
        problem.atoms.push_back(
            PsdAtom::from_rows("atom" + std::to_string(i + 1), a));
      }
      break;
    }
  }

  validate(problem);
  return problem;
}

}  // namespace kiefer
