#include "kiefer/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kiefer {

namespace {

// 0^0 = 0 convention used throughout.
double pow_conv(double base, double expo) {
  if (base == 0.0) return 0.0;
  return std::pow(base, expo);
}

void check_same_dim(const SymmetricMatrix& a, const SymmetricMatrix& b,
                    const char* what) {
  if (a.dim() != b.dim())
    throw DimensionMismatch(std::string(what) + ": dimensions " +
                            std::to_string(a.dim()) + " vs " +
                            std::to_string(b.dim()));
}

struct ScalarFun {
  double (*f)(double, double);
  double (*df)(double, double);
};

ScalarFun scalar_fun(SpectralFun id) {
  switch (id) {
    case SpectralFun::PowerP:
      return {[](double x, double p) { return std::pow(x, p); },
              [](double x, double p) { return p * std::pow(x, p - 1.0); }};
    case SpectralFun::PowerPMinusOne:
      return {[](double x, double p) { return std::pow(x, p - 1.0); },
              [](double x, double p) {
                return (p - 1.0) * std::pow(x, p - 2.0);
              }};
    case SpectralFun::Log:
    default:
      return {[](double x, double) { return std::log(x); },
              [](double x, double) { return 1.0 / x; }};
  }
}

}  // namespace

SymmetricMatrix::SymmetricMatrix(const Eigen::MatrixXd& entries, double symTol) {
  if (entries.rows() != entries.cols())
    throw NotSymmetric("matrix is not square: " +
                       std::to_string(entries.rows()) + "x" +
                       std::to_string(entries.cols()));
  const double scale = entries.size() > 0 ? entries.cwiseAbs().maxCoeff() : 0.0;
  const double gap = (entries - entries.transpose()).cwiseAbs().maxCoeff();
  if (gap > symTol * std::max(scale, 1e-300))
    throw NotSymmetric("asymmetry " + std::to_string(gap) +
                       " exceeds tolerance");
  mat_ = 0.5 * (entries + entries.transpose());
}

SymmetricMatrix SymmetricMatrix::zero(Eigen::Index dim) {
  SymmetricMatrix s;
  s.mat_ = Eigen::MatrixXd::Zero(dim, dim);
  return s;
}

SymmetricMatrix SymmetricMatrix::identity(Eigen::Index dim) {
  SymmetricMatrix s;
  s.mat_ = Eigen::MatrixXd::Identity(dim, dim);
  return s;
}

double auto_rank_tol(Eigen::Index dim, double maxAbsEigenvalue) {
  return static_cast<double>(dim) *
         std::numeric_limits<double>::epsilon() * maxAbsEigenvalue;
}

EigenPairs eig_psd_pairs(const SymmetricMatrix& m, double rankTol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.mat());
  if (solver.info() != Eigen::Success)
    throw IndefiniteBeyondTol("eigendecomposition failed to converge");

  const Eigen::Index n = m.dim();
  EigenPairs out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  // Eigen sorts ascending; flip to descending.
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values[k] = solver.eigenvalues()[n - 1 - k];
    out.vectors.col(k) = solver.eigenvectors().col(n - 1 - k);
  }

  const double maxAbs = n > 0 ? out.values.cwiseAbs().maxCoeff() : 0.0;
  const double tol = rankTol == kAutoTol ? auto_rank_tol(n, maxAbs) : rankTol;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (out.values[k] < -tol)
      throw IndefiniteBeyondTol("eigenvalue " + std::to_string(out.values[k]) +
                                " below -" + std::to_string(tol));
    if (out.values[k] < 0.0) out.values[k] = 0.0;
  }
  return out;
}

Spectrum eig_psd(const SymmetricMatrix& m, double rankTol) {
  EigenPairs pairs = eig_psd_pairs(m, rankTol);
  const Eigen::Index n = m.dim();
  const double maxAbs = n > 0 ? pairs.values.cwiseAbs().maxCoeff() : 0.0;
  Spectrum s;
  s.eigenvalues = std::move(pairs.values);
  s.rankTol = rankTol == kAutoTol ? auto_rank_tol(n, maxAbs) : rankTol;
  s.effectiveRank =
      (s.eigenvalues.array() > s.rankTol).count();
  return s;
}

PsdAtom PsdAtom::from_matrix(std::string name, const Eigen::MatrixXd& m,
                             double psdTol) {
  SymmetricMatrix sym(m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym.mat());
  const double lo = solver.eigenvalues().minCoeff();
  const double hi = solver.eigenvalues().maxCoeff();
  if (lo < -psdTol * std::max(hi, 1e-300))
    throw NotPsd("atom '" + name + "' has eigenvalue " + std::to_string(lo));
  return PsdAtom{std::move(name), std::move(sym), std::nullopt};
}

PsdAtom PsdAtom::from_rows(std::string name, const Eigen::MatrixXd& rows) {
  SymmetricMatrix sym(rows.transpose() * rows);
  return PsdAtom{std::move(name), std::move(sym), rows};
}

namespace {

template <typename Scalar>
SymmetricMatrix info_matrix_impl(std::span<const Scalar> design,
                                 const std::vector<PsdAtom>& atoms) {
  if (design.size() != atoms.size())
    throw DimensionMismatch("design length " + std::to_string(design.size()) +
                            " vs " + std::to_string(atoms.size()) + " atoms");
  if (atoms.empty()) throw DimensionMismatch("no atoms");
  const Eigen::Index m = atoms.front().matrix.dim();
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i].matrix.dim() != m)
      throw DimensionMismatch("atom '" + atoms[i].name + "' has dim " +
                              std::to_string(atoms[i].matrix.dim()));
    if (design[i] != Scalar{0})
      acc += static_cast<double>(design[i]) * atoms[i].matrix.mat();
  }
  return SymmetricMatrix(acc);
}

}  // namespace

SymmetricMatrix info_matrix(std::span<const double> weights,
                            const std::vector<PsdAtom>& atoms) {
  return info_matrix_impl(weights, atoms);
}

SymmetricMatrix info_matrix(std::span<const long long> counts,
                            const std::vector<PsdAtom>& atoms) {
  return info_matrix_impl(counts, atoms);
}

double phi_p(const SymmetricMatrix& m, double p, double rankTol) {
  if (p < 0.0 || p > 1.0)
    throw BadParams("phi_p expects p in [0,1], got " + std::to_string(p));
  const Spectrum s = eig_psd(m, rankTol);
  if (p == 0.0) return static_cast<double>(s.effectiveRank);
  double acc = 0.0;
  for (Eigen::Index k = 0; k < s.eigenvalues.size(); ++k)
    acc += pow_conv(s.eigenvalues[k], p);
  return acc;
}

double phi_p(std::span<const double> weights, const std::vector<PsdAtom>& atoms,
             double p, double rankTol) {
  return phi_p(info_matrix(weights, atoms), p, rankTol);
}

double phi_p(std::span<const long long> counts,
             const std::vector<PsdAtom>& atoms, double p, double rankTol) {
  return phi_p(info_matrix(counts, atoms), p, rankTol);
}

double kiefer_phi(const SymmetricMatrix& m, double p, double rankTol) {
  if (p > 1.0)
    throw BadParams("kiefer_phi expects p in [-inf,1], got " +
                    std::to_string(p));
  const Spectrum s = eig_psd(m, rankTol);
  const Eigen::Index n = m.dim();
  const bool singular = s.effectiveRank < n;

  if (p <= 0.0 && singular) return 0.0;
  if (p == -std::numeric_limits<double>::infinity())
    return s.eigenvalues[n - 1];
  if (p == 0.0) {
    // det(M)^{1/m} through the log domain.
    double logDet = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) logDet += std::log(s.eigenvalues[k]);
    return std::exp(logDet / static_cast<double>(n));
  }
  double acc = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) acc += pow_conv(s.eigenvalues[k], p);
  return std::pow(acc / static_cast<double>(n), 1.0 / p);
}

Eigen::MatrixXd matrix_power(const SymmetricMatrix& m, double exponent,
                             double rankTol) {
  const EigenPairs pairs = eig_psd_pairs(m, rankTol);
  const Eigen::Index n = m.dim();
  const double tol = rankTol == kAutoTol
                         ? auto_rank_tol(n, pairs.values.cwiseAbs().maxCoeff())
                         : rankTol;
  if (exponent < 0.0 && pairs.values[n - 1] <= tol)
    throw SingularInformationMatrix(
        "matrix power with negative exponent on a singular matrix");
  Eigen::VectorXd powered(n);
  for (Eigen::Index k = 0; k < n; ++k)
    powered[k] = pow_conv(pairs.values[k], exponent);
  return pairs.vectors * powered.asDiagonal() * pairs.vectors.transpose();
}

double gradient_trace(const SymmetricMatrix& m, double p, const PsdAtom& atom,
                      double rankTol) {
  check_same_dim(m, atom.matrix, "gradient_trace");
  const EigenPairs pairs = eig_psd_pairs(m, rankTol);
  const Eigen::Index n = m.dim();
  const double tol = rankTol == kAutoTol
                         ? auto_rank_tol(n, pairs.values.cwiseAbs().maxCoeff())
                         : rankTol;
  if (pairs.values[n - 1] <= tol)
    throw SingularInformationMatrix("gradient_trace needs M > 0");
  // trace(M^{p-1} M_i) = sum_k lambda_k^{p-1} q_k^T M_i q_k.
  double acc = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double quad =
        pairs.vectors.col(k).dot(atom.matrix.mat() * pairs.vectors.col(k));
    acc += std::pow(pairs.values[k], p - 1.0) * quad;
  }
  return acc;
}

SymmetricMatrix frechet_derivative(SpectralFun id, double p,
                                   const SymmetricMatrix& m,
                                   const SymmetricMatrix& h) {
  check_same_dim(m, h, "frechet_derivative");
  const ScalarFun fun = scalar_fun(id);
  const Eigen::Index n = m.dim();

  // Exactly diagonal M: Q = I, so Df(M)(H) = f^[1](D) .* H with no rotation
  // error. This also realizes Df(M)(H) = f'(M) H exactly when H is diagonal.
  const bool diagonal = [&] {
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        if (i != j && m(i, j) != 0.0) return false;
    return true;
  }();

  Eigen::VectorXd lambda;
  Eigen::MatrixXd q, core;
  if (diagonal) {
    lambda = m.mat().diagonal();
    if (lambda.minCoeff() <= 0.0)
      throw SingularInformationMatrix("frechet_derivative needs M > 0");
    core = h.mat();
  } else {
    const EigenPairs pairs = eig_psd_pairs(m);
    lambda = pairs.values;
    const double tol = auto_rank_tol(n, lambda.cwiseAbs().maxCoeff());
    if (lambda[n - 1] <= tol)
      throw SingularInformationMatrix("frechet_derivative needs M > 0");
    q = pairs.vectors;
    core = q.transpose() * h.mat() * q;
  }

  const double tieTol = kEigTieFactor * lambda.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double li = lambda[i], lj = lambda[j];
      double dd;
      if (std::abs(li - lj) <= tieTol) {
        dd = fun.df(0.5 * (li + lj), p);
      } else {
        dd = (fun.f(li, p) - fun.f(lj, p)) / (li - lj);
      }
      core(i, j) *= dd;
    }
  }

  if (diagonal) return SymmetricMatrix(core);
  return SymmetricMatrix(q * core * q.transpose());
}

double submodularity_slack(const SymmetricMatrix& x, const SymmetricMatrix& y,
                           const SymmetricMatrix& z, double p) {
  if (p <= 0.0 || p > 1.0)
    throw BadParams("submodularity_slack expects p in (0,1]");
  check_same_dim(x, y, "submodularity_slack");
  check_same_dim(x, z, "submodularity_slack");
  const SymmetricMatrix xz(x.mat() + z.mat());
  const SymmetricMatrix yz(y.mat() + z.mat());
  const SymmetricMatrix xyz(x.mat() + y.mat() + z.mat());
  return phi_p(xz, p) + phi_p(yz, p) - phi_p(xyz, p) - phi_p(z, p);
}

Eigen::VectorXd blue_estimate(const Eigen::MatrixXd& stackedRows,
                              const Eigen::VectorXd& y) {
  if (stackedRows.rows() != y.size())
    throw DimensionMismatch("observation count " +
                            std::to_string(stackedRows.rows()) + " vs " +
                            std::to_string(y.size()) + " measurements");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(stackedRows);
  if (qr.rank() < stackedRows.cols())
    throw RankDeficientObservations(
        "stacked observation matrix has rank " + std::to_string(qr.rank()) +
        " < " + std::to_string(stackedRows.cols()));
  return qr.solve(y);
}

Eigen::VectorXd blue_estimate(const std::vector<PsdAtom>& atoms,
                              std::span<const long long> counts,
                              const Eigen::VectorXd& y) {
  if (counts.size() != atoms.size())
    throw DimensionMismatch("design length vs atoms");
  Eigen::Index rows = 0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (counts[i] == 0) continue;
    if (!atoms[i].observationRows)
      throw BadParams("atom '" + atoms[i].name + "' has no observation rows");
    rows += counts[i] * atoms[i].observationRows->rows();
  }
  if (atoms.empty() || rows == 0)
    throw RankDeficientObservations("empty design has no observations");
  const Eigen::Index m = atoms.front().matrix.dim();
  Eigen::MatrixXd stacked(rows, m);
  Eigen::Index at = 0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    for (long long r = 0; r < counts[i]; ++r) {
      const auto& a = *atoms[i].observationRows;
      stacked.middleRows(at, a.rows()) = a;
      at += a.rows();
    }
  }
  return blue_estimate(stacked, y);
}

}  // namespace kiefer
