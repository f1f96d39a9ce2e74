// Copyright 2026 The qhmm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qhmm {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class InvariantError : public Error {
 public:
  using Error::Error;
};

namespace tol {
inline constexpr double kHermitian = 1e-10;
inline constexpr double kTrace = 1e-10;
inline constexpr double kMinEigenvalue = -1e-9;
inline constexpr double kUnitary = 1e-9;
inline constexpr double kIsometry = 1e-9;
inline constexpr double kRank = 1e-7;
inline constexpr double kGramSchmidtResidual = 1e-8;
}  // namespace tol

double max_abs_entry(const ComplexMatrix& m);
bool all_finite(const ComplexMatrix& m);

struct DensityCheck {
  double hermitian_violation = 0.0;
  double trace_error = 0.0;
  double min_eigenvalue = 0.0;
  bool valid = false;
};

DensityCheck check_density(const ComplexMatrix& m);

/// Hermitian, unit-trace, positive semidefinite operator. Construction
/// validates; once built the value is immutable.
class DensityOperator {
 public:
  static DensityOperator from_matrix(ComplexMatrix m);
  static DensityOperator pure(const ComplexVector& psi);
  static DensityOperator ground(std::size_t dim);
  static DensityOperator maximally_mixed(std::size_t dim);
  static DensityOperator diagonal(const RealVector& probabilities);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }

 private:
  explicit DensityOperator(ComplexMatrix m) : m_(std::move(m)) {}
  ComplexMatrix m_;
};

class UnitaryOperator {
 public:
  static UnitaryOperator from_matrix(ComplexMatrix m);
  static UnitaryOperator identity(std::size_t dim);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }

 private:
  explicit UnitaryOperator(ComplexMatrix m) : m_(std::move(m)) {}
  ComplexMatrix m_;
};

double unitarity_violation(const ComplexMatrix& m);

/// Kronecker product. Index convention (ia*rows_b + ib, ja*cols_b + jb);
/// the state system is always the left factor and the emission system the
/// right one, so a composite basis index is s*M + e.
ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b);

/// (rho_S)_{s,s'} = sum_e rho_{s*M+e, s'*M+e}. Works on unnormalized
/// operators; the DensityOperator overload validates the result.
ComplexMatrix partial_trace_emission(const ComplexMatrix& rho, std::size_t dim_s,
                                     std::size_t dim_e);
DensityOperator partial_trace_emission(const DensityOperator& rho, std::size_t dim_s,
                                       std::size_t dim_e);

struct HermitianEigen {
  RealVector values;      // descending
  ComplexMatrix vectors;  // columns, matching values
};

/// Throws InvariantError if m is not Hermitian within 1e-8.
HermitianEigen eig_hermitian(const ComplexMatrix& m);

/// Descending, nonnegative.
RealVector singular_values(const ComplexMatrix& m);
RealVector singular_values(const RealMatrix& m);
double spectral_norm(const ComplexMatrix& m);

/// Number of singular values above rel_tol * sigma_max. Zero for the zero matrix.
std::size_t numerical_rank(const ComplexMatrix& m, double rel_tol = tol::kRank);
std::size_t numerical_rank(const RealMatrix& m, double rel_tol = tol::kRank);

/// Extends a D x N isometry to a D x D unitary. Column s of v is placed at
/// composite column s*dim_e + e0 (the embedded input |s>|e0>); the remaining
/// columns come from Gram-Schmidt over the canonical basis.
UnitaryOperator complete_isometry_to_unitary(const ComplexMatrix& v, std::size_t dim_e,
                                             std::size_t e0);
/// Convenience overload with dim_e = D / N and e0 = 0.
UnitaryOperator complete_isometry_to_unitary(const ComplexMatrix& v);

/// n^2 linearly independent density operators spanning the Hermitian
/// operators on C^n: the diagonal projectors, then for each i<j the real and
/// imaginary off-diagonal mixtures (both scaled by 1/2 to stay PSD).
std::vector<DensityOperator> density_basis(std::size_t n);

/// Row-major vectorization used for superoperator (transfer) matrices:
/// vec(rho)[i*N + j] = rho(i, j).
ComplexVector vectorize(const ComplexMatrix& m);
ComplexMatrix unvectorize(const ComplexVector& v, std::size_t n);

struct FixedSpaceProjection {
  ComplexVector vector;          // spectral projection of the seed onto ker(T - I)
  std::size_t multiplicity = 0;  // number of eigenvalues within the tolerance of 1
};

/// Projects `seed` onto the eigenvalue-1 eigenspace of `transfer` along the
/// complementary invariant subspace (the Cesaro limit of T^k applied to the
/// seed). Throws Error when no eigenvalue lies within `tolerance` of 1.
FixedSpaceProjection project_onto_fixed_space(const ComplexMatrix& transfer,
                                              const ComplexVector& seed,
                                              double tolerance = 1e-6);

}  // namespace qhmm
