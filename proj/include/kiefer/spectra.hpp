#ifndef KIEFER_SPECTRA_HPP
#define KIEFER_SPECTRA_HPP

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kiefer/errors.hpp"

namespace kiefer {

// Relative tolerance for the symmetry check |a_ij - a_ji| <= tol * max|a|.
inline constexpr double kSymTol = 1e-9;
// Relative tolerance for the PSD check: lambda_min >= -tol * lambda_max.
inline constexpr double kPsdTol = 1e-9;
// Near-equal eigenvalues switch the divided difference to f' at the mean,
// below kEigTieFactor * lambda_max.
inline constexpr double kEigTieFactor = 1e-8;
// Sentinel: pick the numerical-rank tolerance m * eps * lambda_max.
inline constexpr double kAutoTol = -1.0;

// Dense real symmetric matrix. Construction validates (and then exactly
// symmetrizes) the entries, so downstream spectral code can rely on symmetry.
class SymmetricMatrix {
 public:
  explicit SymmetricMatrix(const Eigen::MatrixXd& entries,
                           double symTol = kSymTol);

  // Dimension-only constructor, zero-filled.
  static SymmetricMatrix zero(Eigen::Index dim);
  static SymmetricMatrix identity(Eigen::Index dim);

  Eigen::Index dim() const { return mat_.rows(); }
  const Eigen::MatrixXd& mat() const { return mat_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return mat_(i, j); }

 private:
  SymmetricMatrix() = default;
  Eigen::MatrixXd mat_;
};

// Eigenvalues of a PSD matrix, sorted descending, negatives within tolerance
// clamped to zero.
struct Spectrum {
  Eigen::VectorXd eigenvalues;  // descending
  double rankTol = 0.0;
  Eigen::Index effectiveRank = 0;
};

// Full decomposition used internally by matrix-function code. Columns of
// `vectors` match `values` (both descending).
struct EigenPairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

// One experiment's information matrix M_i, optionally carrying the
// observation rows A_i it came from (matrix == A_i^T A_i).
struct PsdAtom {
  std::string name;
  SymmetricMatrix matrix;
  std::optional<Eigen::MatrixXd> observationRows;

  // Validating factories.
  static PsdAtom from_matrix(std::string name, const Eigen::MatrixXd& m,
                             double psdTol = kPsdTol);
  static PsdAtom from_rows(std::string name, const Eigen::MatrixXd& rows);
};

// Spectral decomposition with PSD validation. Eigenvalues in [-rankTol, 0)
// are clamped to zero; anything below -rankTol throws IndefiniteBeyondTol.
Spectrum eig_psd(const SymmetricMatrix& m, double rankTol = kAutoTol);
EigenPairs eig_psd_pairs(const SymmetricMatrix& m, double rankTol = kAutoTol);

// Numerical-rank tolerance used repo-wide: dim * eps * max|lambda|.
double auto_rank_tol(Eigen::Index dim, double maxAbsEigenvalue);

// M_F(design) = sum_i design_i * M_i.
SymmetricMatrix info_matrix(std::span<const double> weights,
                            const std::vector<PsdAtom>& atoms);
SymmetricMatrix info_matrix(std::span<const long long> counts,
                            const std::vector<PsdAtom>& atoms);

// phi_p(M) = sum_k lambda_k^p for p in (0,1]; the effective rank at p = 0
// (convention 0^0 = 0).
double phi_p(const SymmetricMatrix& m, double p, double rankTol = kAutoTol);
double phi_p(std::span<const double> weights, const std::vector<PsdAtom>& atoms,
             double p, double rankTol = kAutoTol);
double phi_p(std::span<const long long> counts,
             const std::vector<PsdAtom>& atoms, double p,
             double rankTol = kAutoTol);

// Kiefer's Phi_p information function, p in [-inf, 1]. Evaluation only;
// optimization elsewhere is restricted to p in [0,1]. Singular matrices give
// 0 for p <= 0.
double kiefer_phi(const SymmetricMatrix& m, double p, double rankTol = kAutoTol);

// trace(M^{p-1} M_i) for invertible M, p in [0,1]. The gradient of
// w -> phi_p(w) in the direction of atom i (log-det gradient at p = 0).
double gradient_trace(const SymmetricMatrix& m, double p, const PsdAtom& atom,
                      double rankTol = kAutoTol);

// M^{p-1} as a matrix, shared by the gradient and the solver loop.
Eigen::MatrixXd matrix_power(const SymmetricMatrix& m, double exponent,
                             double rankTol = kAutoTol);

// Scalar functions whose matrix Frechet derivative the library needs.
enum class SpectralFun { PowerP, PowerPMinusOne, Log };

// Df(M)(H) via the first divided difference: Q (f^[1](D) .* Q^T H Q) Q^T.
SymmetricMatrix frechet_derivative(SpectralFun f, double p,
                                   const SymmetricMatrix& m,
                                   const SymmetricMatrix& h);

// trace f(X+Z) + trace f(Y+Z) - trace f(X+Y+Z) - trace f(Z) for f = x^p.
// Nonnegative for PSD inputs and p in (0,1].
double submodularity_slack(const SymmetricMatrix& x, const SymmetricMatrix& y,
                           const SymmetricMatrix& z, double p);

// Least-squares estimate (A^T A)^{-1} A^T y for a full-column-rank stacked
// observation matrix.
Eigen::VectorXd blue_estimate(const Eigen::MatrixXd& stackedRows,
                              const Eigen::VectorXd& y);
// Stacks n_i copies of each atom's observation rows, then solves.
Eigen::VectorXd blue_estimate(const std::vector<PsdAtom>& atoms,
                              std::span<const long long> counts,
                              const Eigen::VectorXd& y);

}  // namespace kiefer

#endif  // KIEFER_SPECTRA_HPP
