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

#include "qhmm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace qhmm {

double max_abs_entry(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool all_finite(const ComplexMatrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const Complex z = m.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

DensityCheck check_density(const ComplexMatrix& m) {
  DensityCheck c;
  if (m.rows() != m.cols() || m.rows() == 0 || !all_finite(m)) return c;
  c.hermitian_violation = max_abs_entry(m - m.adjoint());
  c.trace_error = std::abs(m.trace() - Complex(1.0, 0.0));
  const ComplexMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
  c.min_eigenvalue = es.eigenvalues().minCoeff();
  c.valid = c.hermitian_violation <= tol::kHermitian && c.trace_error <= tol::kTrace &&
            c.min_eigenvalue >= tol::kMinEigenvalue;
  return c;
}

DensityOperator DensityOperator::from_matrix(ComplexMatrix m) {
  const DensityCheck c = check_density(m);
  if (!c.valid) {
    std::ostringstream msg;
    msg << "not a density operator: hermitian violation " << c.hermitian_violation
        << ", trace error " << c.trace_error << ", min eigenvalue " << c.min_eigenvalue;
    throw InvariantError(msg.str());
  }
  return DensityOperator(std::move(m));
}

DensityOperator DensityOperator::pure(const ComplexVector& psi) {
  const double norm = psi.norm();
  if (norm == 0.0) throw InvariantError("pure state from the zero vector");
  const ComplexVector u = psi / norm;
  return from_matrix(u * u.adjoint());
}

DensityOperator DensityOperator::ground(std::size_t dim) {
  if (dim == 0) throw DimensionError("density operator of dimension 0");
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  m(0, 0) = 1.0;
  return DensityOperator(std::move(m));
}

DensityOperator DensityOperator::maximally_mixed(std::size_t dim) {
  if (dim == 0) throw DimensionError("density operator of dimension 0");
  return DensityOperator(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityOperator DensityOperator::diagonal(const RealVector& probabilities) {
  return from_matrix(probabilities.cast<Complex>().asDiagonal().toDenseMatrix());
}

double unitarity_violation(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return max_abs_entry(m.adjoint() * m - ComplexMatrix::Identity(m.rows(), m.cols()));
}

UnitaryOperator UnitaryOperator::from_matrix(ComplexMatrix m) {
  if (m.rows() != m.cols() || m.rows() == 0) throw DimensionError("unitary must be square");
  if (!all_finite(m)) throw InvariantError("unitary has non-finite entries");
  const double v = unitarity_violation(m);
  if (v > tol::kUnitary) {
    std::ostringstream msg;
    msg << "matrix is not unitary: max |U^dag U - I| = " << v;
    throw InvariantError(msg.str());
  }
  return UnitaryOperator(std::move(m));
}

UnitaryOperator UnitaryOperator::identity(std::size_t dim) {
  return UnitaryOperator(ComplexMatrix::Identity(dim, dim));
}

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexMatrix partial_trace_emission(const ComplexMatrix& rho, std::size_t dim_s,
                                     std::size_t dim_e) {
  const auto d = static_cast<Eigen::Index>(dim_s * dim_e);
  if (rho.rows() != d || rho.cols() != d)
    throw DimensionError("partial trace: operator dimension != dimS * dimE");
  ComplexMatrix out = ComplexMatrix::Zero(dim_s, dim_s);
  for (std::size_t s = 0; s < dim_s; ++s)
    for (std::size_t t = 0; t < dim_s; ++t) {
      Complex acc = 0.0;
      for (std::size_t e = 0; e < dim_e; ++e) acc += rho(s * dim_e + e, t * dim_e + e);
      out(s, t) = acc;
    }
  return out;
}

DensityOperator partial_trace_emission(const DensityOperator& rho, std::size_t dim_s,
                                       std::size_t dim_e) {
  return DensityOperator::from_matrix(partial_trace_emission(rho.matrix(), dim_s, dim_e));
}

HermitianEigen eig_hermitian(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("eig_hermitian: matrix not square");
  if (max_abs_entry(m - m.adjoint()) > 1e-8)
    throw InvariantError("eig_hermitian: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (m + m.adjoint()));
  const Eigen::Index n = m.rows();
  HermitianEigen out{RealVector(n), ComplexMatrix(n, n)};
  // Eigen returns ascending order.
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = es.eigenvalues()(n - 1 - k);
    out.vectors.col(k) = es.eigenvectors().col(n - 1 - k);
  }
  return out;
}

RealVector singular_values(const ComplexMatrix& m) {
  if (m.size() == 0) return RealVector();
  Eigen::BDCSVD<ComplexMatrix> svd(m);
  return svd.singularValues();
}

RealVector singular_values(const RealMatrix& m) {
  if (m.size() == 0) return RealVector();
  Eigen::BDCSVD<RealMatrix> svd(m);
  return svd.singularValues();
}

double spectral_norm(const ComplexMatrix& m) {
  const RealVector s = singular_values(m);
  return s.size() == 0 ? 0.0 : s(0);
}

namespace {

std::size_t count_above(const RealVector& s, double rel_tol) {
  if (s.size() == 0 || s(0) <= 0.0) return 0;
  const double cut = rel_tol * s(0);
  return static_cast<std::size_t>((s.array() > cut).count());
}

}  // namespace

std::size_t numerical_rank(const ComplexMatrix& m, double rel_tol) {
  return count_above(singular_values(m), rel_tol);
}

std::size_t numerical_rank(const RealMatrix& m, double rel_tol) {
  return count_above(singular_values(m), rel_tol);
}

UnitaryOperator complete_isometry_to_unitary(const ComplexMatrix& v, std::size_t dim_e,
                                             std::size_t e0) {
  const auto d = static_cast<std::size_t>(v.rows());
  const auto n = static_cast<std::size_t>(v.cols());
  if (n == 0 || n > d) throw DimensionError("isometry must be D x N with 0 < N <= D");
  if (dim_e == 0 || n * dim_e != d || e0 >= dim_e)
    throw DimensionError("isometry rows must equal N * dimE and e0 < dimE");
  const double iso = max_abs_entry(v.adjoint() * v - ComplexMatrix::Identity(n, n));
  if (iso > tol::kIsometry) {
    std::ostringstream msg;
    msg << "input is not an isometry: max |V^dag V - I| = " << iso;
    throw InvariantError(msg.str());
  }

  ComplexMatrix u = ComplexMatrix::Zero(d, d);
  std::vector<bool> taken(d, false);
  std::vector<ComplexVector> basis;
  basis.reserve(d);
  for (std::size_t s = 0; s < n; ++s) {
    u.col(s * dim_e + e0) = v.col(s);
    taken[s * dim_e + e0] = true;
    basis.emplace_back(v.col(s));
  }

  std::size_t next_slot = 0;
  for (std::size_t k = 0; k < d && basis.size() < d; ++k) {
    ComplexVector r = ComplexVector::Unit(d, k);
    // Two passes of modified Gram-Schmidt keep the completion orthonormal to 1e-15.
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : basis) r -= q * q.dot(r);
    const double norm = r.norm();
    if (norm < tol::kGramSchmidtResidual) continue;
    r /= norm;
    while (taken[next_slot]) ++next_slot;
    u.col(next_slot) = r;
    taken[next_slot] = true;
    basis.push_back(std::move(r));
  }
  if (basis.size() != d) throw Error("Gram-Schmidt completion failed to span the space");
  return UnitaryOperator::from_matrix(std::move(u));
}

UnitaryOperator complete_isometry_to_unitary(const ComplexMatrix& v) {
  if (v.cols() == 0 || v.rows() % v.cols() != 0)
    throw DimensionError("isometry rows must be a multiple of its columns");
  return complete_isometry_to_unitary(v, static_cast<std::size_t>(v.rows() / v.cols()), 0);
}

std::vector<DensityOperator> density_basis(std::size_t n) {
  if (n == 0) throw DimensionError("density_basis requires n >= 1");
  const Complex i_unit(0.0, 1.0);
  std::vector<DensityOperator> out;
  out.reserve(n * n);
  auto b = [n](std::size_t i, std::size_t j) {
    ComplexMatrix m = ComplexMatrix::Zero(n, n);
    m(i, j) = 1.0;
    return m;
  };
  for (std::size_t i = 0; i < n; ++i) out.push_back(DensityOperator::from_matrix(b(i, i)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      out.push_back(
          DensityOperator::from_matrix(0.5 * (b(i, i) + b(j, j) + b(i, j) + b(j, i))));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      out.push_back(DensityOperator::from_matrix(
          0.5 * (b(i, i) + b(j, j) + i_unit * (b(j, i) - b(i, j)))));
  return out;
}

ComplexVector vectorize(const ComplexMatrix& m) {
  ComplexVector v(m.rows() * m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) v(i * m.cols() + j) = m(i, j);
  return v;
}

ComplexMatrix unvectorize(const ComplexVector& v, std::size_t n) {
  if (static_cast<std::size_t>(v.size()) != n * n) throw DimensionError("unvectorize: size != n^2");
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = v(i * n + j);
  return m;
}

FixedSpaceProjection project_onto_fixed_space(const ComplexMatrix& transfer,
                                              const ComplexVector& seed, double tolerance) {
  const Eigen::Index n = transfer.rows();
  if (transfer.cols() != n || seed.size() != n)
    throw DimensionError("fixed-space projection: dimension mismatch");

  Eigen::ComplexEigenSolver<ComplexMatrix> es(transfer, /*computeEigenvectors=*/false);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (std::abs(es.eigenvalues()(i) - Complex(1.0, 0.0)) < tolerance) ++k;
  if (k == 0) throw Error("no eigenvalue within tolerance of 1");

  // The eigenvalue-1 part of a stochastic or CPTP transfer matrix is
  // semisimple, so its right and left null vectors of (T - I) pair up and
  // V0 (U0^dag V0)^-1 U0^dag is the spectral projector.
  const ComplexMatrix shifted = transfer - ComplexMatrix::Identity(n, n);
  Eigen::JacobiSVD<ComplexMatrix> svd(shifted, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto kk = static_cast<Eigen::Index>(k);
  const ComplexMatrix right = svd.matrixV().rightCols(kk);
  const ComplexMatrix left = svd.matrixU().rightCols(kk);
  const ComplexMatrix gram = left.adjoint() * right;
  const ComplexVector coeffs = gram.fullPivLu().solve(left.adjoint() * seed);
  return FixedSpaceProjection{right * coeffs, k};
}

}  // namespace qhmm
