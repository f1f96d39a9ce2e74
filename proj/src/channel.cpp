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

#include "qhmm/channel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace qhmm {

KrausChannel::KrausChannel(std::size_t dim, std::vector<std::string> symbols,
                           std::vector<std::vector<ComplexMatrix>> groups)
    : dim_(dim), symbols_(std::move(symbols)), groups_(std::move(groups)) {
  if (dim_ == 0) throw DimensionError("channel dimension must be positive");
  if (symbols_.size() != groups_.size())
    throw DimensionError("channel: one label per Kraus group required");
  for (const auto& g : groups_)
    for (const auto& k : g)
      if (static_cast<std::size_t>(k.rows()) != dim_ || static_cast<std::size_t>(k.cols()) != dim_)
        throw DimensionError("channel: every Kraus operator must be N x N");
  for (std::size_t i = 0; i < symbols_.size(); ++i)
    for (std::size_t j = i + 1; j < symbols_.size(); ++j)
      if (symbols_[i] == symbols_[j]) throw Error("channel: duplicate symbol '" + symbols_[i] + "'");
}

KrausChannel KrausChannel::from_operators(std::vector<ComplexMatrix> ops) {
  if (ops.empty()) throw DimensionError("channel needs at least one Kraus operator");
  const auto dim = static_cast<std::size_t>(ops.front().rows());
  std::vector<std::string> symbols;
  std::vector<std::vector<ComplexMatrix>> groups;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    symbols.push_back(std::to_string(i));
    groups.push_back({std::move(ops[i])});
  }
  return KrausChannel(dim, std::move(symbols), std::move(groups));
}

std::size_t KrausChannel::symbol_index(const std::string& label) const {
  const auto it = std::find(symbols_.begin(), symbols_.end(), label);
  if (it == symbols_.end()) throw Error("unknown symbol '" + label + "'");
  return static_cast<std::size_t>(it - symbols_.begin());
}

std::size_t KrausChannel::total_operators() const {
  std::size_t n = 0;
  for (const auto& g : groups_) n += g.size();
  return n;
}

std::vector<ComplexMatrix> KrausChannel::all_operators() const {
  std::vector<ComplexMatrix> out;
  out.reserve(total_operators());
  for (const auto& g : groups_) out.insert(out.end(), g.begin(), g.end());
  return out;
}

CptpReport validate_cptp(const KrausChannel& ch) {
  ComplexMatrix sum = ComplexMatrix::Zero(ch.dim(), ch.dim());
  for (const auto& g : ch.groups())
    for (const auto& k : g) sum += k.adjoint() * k;
  CptpReport r;
  r.max_violation = max_abs_entry(sum - ComplexMatrix::Identity(ch.dim(), ch.dim()));
  r.complete = r.max_violation <= 1e-9;
  return r;
}

void require_cptp(const KrausChannel& ch) {
  const CptpReport r = validate_cptp(ch);
  if (!r.complete) {
    std::ostringstream msg;
    msg << "Kraus family is not complete: max |sum K^dag K - I| = " << r.max_violation;
    throw InvariantError(msg.str());
  }
}

ComplexMatrix apply_symbol(const KrausChannel& ch, std::size_t symbol, const ComplexMatrix& rho) {
  if (symbol >= ch.num_symbols()) throw Error("symbol index out of range");
  ComplexMatrix out = ComplexMatrix::Zero(ch.dim(), ch.dim());
  for (const auto& k : ch.group(symbol)) out.noalias() += k * rho * k.adjoint();
  return out;
}

ComplexMatrix apply(const KrausChannel& ch, const ComplexMatrix& rho) {
  if (static_cast<std::size_t>(rho.rows()) != ch.dim())
    throw DimensionError("apply: state dimension does not match channel");
  ComplexMatrix out = ComplexMatrix::Zero(ch.dim(), ch.dim());
  for (const auto& g : ch.groups())
    for (const auto& k : g) out.noalias() += k * rho * k.adjoint();
  return out;
}

DensityOperator apply(const KrausChannel& ch, const DensityOperator& rho) {
  return DensityOperator::from_matrix(qhmm::apply(ch, rho.matrix()));
}

double symbol_probability(const KrausChannel& ch, const DensityOperator& rho, std::size_t symbol) {
  if (rho.dim() != ch.dim()) throw DimensionError("symbol_probability: dimension mismatch");
  const double p = apply_symbol(ch, symbol, rho.matrix()).trace().real();
  return std::clamp(p, 0.0, 1.0);
}

double symbol_probability(const KrausChannel& ch, const DensityOperator& rho,
                          const std::string& symbol) {
  return symbol_probability(ch, rho, ch.symbol_index(symbol));
}

ChoiMatrix choi(const KrausChannel& ch) {
  const std::size_t n = ch.dim();
  ChoiMatrix out{n, ComplexMatrix::Zero(n * n, n * n)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      ComplexMatrix eij = ComplexMatrix::Zero(n, n);
      eij(i, j) = 1.0;
      out.matrix.block(i * n, j * n, n, n) = qhmm::apply(ch, eij);
    }
  return out;
}

std::size_t kraus_rank(const KrausChannel& ch, double rel_tol) {
  const HermitianEigen e = eig_hermitian(choi(ch).matrix);
  const double top = e.values(0);
  if (top <= 0.0) return 0;
  return static_cast<std::size_t>((e.values.array() > rel_tol * top).count());
}

std::vector<ComplexMatrix> kraus_from_unitary(const UnitaryOperator& u, std::size_t dim_s,
                                              std::size_t dim_e, std::size_t e0) {
  if (u.dim() != dim_s * dim_e) throw DimensionError("kraus_from_unitary: U.dim != dimS * dimE");
  if (e0 >= dim_e) throw DimensionError("kraus_from_unitary: e0 out of range");
  const ComplexMatrix& m = u.matrix();
  std::vector<ComplexMatrix> out(dim_e, ComplexMatrix(dim_s, dim_s));
  for (std::size_t e = 0; e < dim_e; ++e)
    for (std::size_t s = 0; s < dim_s; ++s)
      for (std::size_t t = 0; t < dim_s; ++t) out[e](s, t) = m(s * dim_e + e, t * dim_e + e0);
  return out;
}

UnitaryOperator stinespring_dilate(const KrausChannel& ch, std::size_t dim_e, std::size_t e0) {
  require_cptp(ch);
  const std::size_t total = ch.total_operators();
  if (dim_e < total) throw DimensionError("stinespring_dilate: dimE smaller than the Kraus count");
  if (e0 >= dim_e) throw DimensionError("stinespring_dilate: e0 out of range");
  const std::size_t n = ch.dim();
  ComplexMatrix v = ComplexMatrix::Zero(n * dim_e, n);
  std::size_t e = 0;
  for (const auto& g : ch.groups())
    for (const auto& k : g) {
      for (std::size_t s = 0; s < n; ++s)
        for (std::size_t t = 0; t < n; ++t) v(s * dim_e + e, t) = k(s, t);
      ++e;
    }
  return complete_isometry_to_unitary(v, dim_e, e0);
}

ComplexMatrix transfer_matrix(const KrausChannel& ch) {
  const std::size_t n = ch.dim();
  ComplexMatrix t = ComplexMatrix::Zero(n * n, n * n);
  for (const auto& g : ch.groups())
    for (const auto& k : g) t += tensor_product(k, k.conjugate());
  return t;
}

SteadyState steady_state(const KrausChannel& ch) {
  require_cptp(ch);
  const std::size_t n = ch.dim();
  const ComplexMatrix seed = ComplexMatrix::Identity(n, n) / static_cast<double>(n);
  const FixedSpaceProjection p = project_onto_fixed_space(transfer_matrix(ch), vectorize(seed));
  ComplexMatrix rho = unvectorize(p.vector, n);
  rho = 0.5 * (rho + rho.adjoint());
  const Complex tr = rho.trace();
  if (std::abs(tr) < 1e-12) throw Error("steady state: projected state has zero trace");
  rho /= tr.real();
  return SteadyState{DensityOperator::from_matrix(std::move(rho)), p.multiplicity};
}

namespace channels {

KrausChannel identity(std::size_t dim) {
  return KrausChannel(dim, {"0"}, {{ComplexMatrix::Identity(dim, dim)}});
}

KrausChannel completely_depolarizing(std::size_t dim) {
  std::vector<ComplexMatrix> ops;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) {
      ComplexMatrix k = ComplexMatrix::Zero(dim, dim);
      k(i, j) = scale;
      ops.push_back(std::move(k));
    }
  return KrausChannel(dim, {"0"}, {std::move(ops)});
}

KrausChannel amplitude_damping(double gamma) {
  if (gamma < 0.0 || gamma > 1.0) throw Error("amplitude damping: gamma must lie in [0, 1]");
  ComplexMatrix k0 = ComplexMatrix::Zero(2, 2);
  ComplexMatrix k1 = ComplexMatrix::Zero(2, 2);
  k0(0, 0) = 1.0;
  k0(1, 1) = std::sqrt(1.0 - gamma);
  k1(0, 1) = std::sqrt(gamma);
  return KrausChannel(2, {"0", "1"}, {{k0}, {k1}});
}

KrausChannel monras() {
  const double r = 1.0 / std::sqrt(2.0);
  ComplexVector up(2), down(2), plus(2), minus(2);
  up << 1.0, 0.0;
  down << 0.0, 1.0;
  plus << r, r;
  minus << r, -r;
  std::vector<ComplexMatrix> ops;
  for (const ComplexVector* v : {&up, &down, &plus, &minus})
    ops.push_back(r * (*v) * v->adjoint());
  return KrausChannel::from_operators(std::move(ops));
}

}  // namespace channels

}  // namespace qhmm
