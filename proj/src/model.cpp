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

#include "qhmm/model.hpp"

#include <algorithm>
#include <cmath>

#include "qhmm/rng.hpp"

#ifdef QHMM_HAVE_OPENMP
#include <omp.h>
#endif

namespace qhmm {

QhmmKraus::QhmmKraus(KrausChannel channel, DensityOperator rho0)
    : channel_(std::move(channel)), rho0_(std::move(rho0)) {
  require_cptp(channel_);
  if (rho0_.dim() != channel_.dim()) throw DimensionError("rho0 dimension does not match channel");
}

QhmmUnitary::QhmmUnitary(std::vector<std::string> alphabet, std::size_t dim_s, std::size_t dim_e,
                         UnitaryOperator u, std::vector<int> symbol_map, DensityOperator rho0,
                         std::size_t e0, ResetMode reset, MeasuredRegister measured)
    : alphabet_(std::move(alphabet)),
      dim_s_(dim_s),
      dim_e_(dim_e),
      u_(std::move(u)),
      symbol_map_(std::move(symbol_map)),
      rho0_(std::move(rho0)),
      e0_(e0),
      reset_(reset),
      measured_(measured) {
  if (alphabet_.empty()) throw DimensionError("alphabet must be nonempty");
  if (dim_s_ == 0 || dim_e_ == 0) throw DimensionError("register dimensions must be positive");
  if (u_.dim() != dim_s_ * dim_e_) throw DimensionError("U must act on H_S (x) H_E");
  if (rho0_.dim() != dim_s_) throw DimensionError("rho0 must act on H_S");
  if (e0_ >= dim_e_) throw DimensionError("e0 out of range");
  if (symbol_map_.size() != measured_dim())
    throw DimensionError("symbol map needs one entry per outcome of the measured register");
  std::vector<bool> used(alphabet_.size(), false);
  for (int s : symbol_map_) {
    if (s < 0 || static_cast<std::size_t>(s) >= alphabet_.size())
      throw Error("symbol map refers to an unknown symbol");
    used[static_cast<std::size_t>(s)] = true;
  }
  if (std::find(used.begin(), used.end(), false) != used.end())
    throw Error("every symbol needs at least one outcome in the symbol map");
}

std::vector<int> QhmmUnitary::modular_symbol_map(std::size_t outcomes, std::size_t m) {
  std::vector<int> map(outcomes);
  for (std::size_t k = 0; k < outcomes; ++k) map[k] = static_cast<int>(k % m);
  return map;
}

QhmmKraus to_kraus(const QhmmUnitary& q) {
  if (q.reset_mode() == ResetMode::Carry)
    throw Error("a QHMM without emission reset has no stationary Kraus family");
  const std::size_t n = q.dim_s();
  const std::size_t m = q.dim_e();
  std::vector<std::vector<ComplexMatrix>> groups(q.num_symbols());
  if (q.measured() == MeasuredRegister::Emission) {
    auto ks = kraus_from_unitary(q.unitary(), n, m, q.e0());
    for (std::size_t e = 0; e < m; ++e)
      groups[static_cast<std::size_t>(q.symbol_map()[e])].push_back(std::move(ks[e]));
  } else {
    // Outcome s leaves the system in |s>; the reset register contributes e.
    const ComplexMatrix& u = q.unitary().matrix();
    for (std::size_t s = 0; s < n; ++s)
      for (std::size_t e = 0; e < m; ++e) {
        ComplexMatrix k = ComplexMatrix::Zero(n, n);
        for (std::size_t t = 0; t < n; ++t)
          k(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)) =
              u(static_cast<Eigen::Index>(s * m + e), static_cast<Eigen::Index>(t * m + q.e0()));
        if (max_abs_entry(k) == 0.0) continue;
        groups[static_cast<std::size_t>(q.symbol_map()[s])].push_back(std::move(k));
      }
  }
  return QhmmKraus(KrausChannel(n, q.alphabet(), std::move(groups)), q.rho0());
}

QhmmUnitary from_kraus(const QhmmKraus& q, std::size_t dim_e) {
  const UnitaryOperator u = stinespring_dilate(q.channel(), dim_e, 0);
  std::vector<int> map(dim_e, 0);
  std::size_t e = 0;
  for (std::size_t a = 0; a < q.num_symbols(); ++a)
    for (std::size_t k = 0; k < q.channel().group(a).size(); ++k) map[e++] = static_cast<int>(a);
  // Spare outcomes never occur (their Kraus operators vanish); give them to
  // the last symbol so the map stays total.
  for (; e < dim_e; ++e) map[e] = static_cast<int>(q.num_symbols() - 1);
  return QhmmUnitary(q.alphabet(), q.dim(), dim_e, u, std::move(map), q.rho0());
}

QhmmKraus quantize_classical(const ClassicalHmm& h) {
  const auto ops = observable_operators(h);
  const std::size_t n = h.num_states();
  std::vector<std::vector<ComplexMatrix>> groups(h.num_symbols());
  for (std::size_t a = 0; a < ops.size(); ++a)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double o = ops[a](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        if (o <= 0.0) continue;
        ComplexMatrix k = ComplexMatrix::Zero(n, n);
        k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::sqrt(o);
        groups[a].push_back(std::move(k));
      }
  return QhmmKraus(KrausChannel(n, h.alphabet(), std::move(groups)),
                   DensityOperator::diagonal(h.initial()));
}

double sequence_probability(const QhmmKraus& q, const SymbolSequence& s) {
  ComplexMatrix rho = q.rho0().matrix();
  for (int a : s) {
    if (a < 0 || static_cast<std::size_t>(a) >= q.num_symbols())
      throw Error("symbol " + std::to_string(a) + " outside the alphabet");
    rho = apply_symbol(q.channel(), static_cast<std::size_t>(a), rho);
  }
  return std::clamp(rho.trace().real(), 0.0, 1.0);
}

namespace {

constexpr double kPruneMass = 1e-15;

void descend(const KrausChannel& ch, const ComplexMatrix& rho, std::size_t depth,
             std::size_t index, std::vector<DistributionTable>& out) {
  const std::size_t m = ch.num_symbols();
  ComplexMatrix next(rho.rows(), rho.cols());
  for (std::size_t a = 0; a < m; ++a) {
    next.setZero();
    for (const auto& k : ch.group(a)) next.noalias() += k * rho * k.adjoint();
    const double p = next.trace().real();
    const std::size_t child = index * m + a;
    out[depth][child] = std::max(p, 0.0);
    if (depth + 1 < out.size() && p > kPruneMass) descend(ch, next, depth + 1, child, out);
  }
}

}  // namespace

std::vector<DistributionTable> distributions_upto(const QhmmKraus& q, std::size_t n) {
  std::vector<DistributionTable> out;
  for (std::size_t t = 1; t <= n; ++t) out.emplace_back(q.num_symbols(), t);
  if (n > 0) descend(q.channel(), q.rho0().matrix(), 0, 0, out);
  return out;
}

DistributionTable distribution(const QhmmKraus& q, std::size_t t) {
  if (t == 0) return DistributionTable(q.num_symbols(), 0, {1.0});
  table_size(q.num_symbols(), t);
  return std::move(distributions_upto(q, t).back());
}

namespace {

struct Trajectory {
  const QhmmUnitary& q;
  std::vector<double> mix_weights;      // eigenvalues of rho0
  std::vector<ComplexVector> mix_states;
  // With reset the joint state stays in span{|s>|e0>}, so only these columns
  // of U are ever touched.
  ComplexMatrix active;

  explicit Trajectory(const QhmmUnitary& model) : q(model) {
    const HermitianEigen e = eig_hermitian(q.rho0().matrix());
    for (Eigen::Index i = 0; i < e.values.size(); ++i) {
      mix_weights.push_back(std::max(e.values(i), 0.0));
      mix_states.push_back(e.vectors.col(i));
    }
    const auto n = static_cast<Eigen::Index>(q.dim_s());
    const auto m = static_cast<Eigen::Index>(q.dim_e());
    active.resize(n * m, n);
    for (Eigen::Index s = 0; s < n; ++s)
      active.col(s) = q.unitary().matrix().col(s * m + static_cast<Eigen::Index>(q.e0()));
  }

  SymbolSequence run(std::size_t t, Rng& rng) const {
    const std::size_t n = q.dim_s();
    const std::size_t m = q.dim_e();
    const bool on_emission = q.measured() == MeasuredRegister::Emission;
    const bool reset = q.reset_mode() == ResetMode::Reset;
    const std::size_t outcomes = q.measured_dim();
    // phi holds the system amplitudes when reset; psi the joint state otherwise.
    ComplexVector phi = mix_states[sample_index(mix_weights, rng)];
    ComplexVector psi;
    if (!reset) {
      psi = ComplexVector::Zero(static_cast<Eigen::Index>(n * m));
      for (std::size_t s = 0; s < n; ++s) psi(static_cast<Eigen::Index>(s * m + q.e0())) = phi(static_cast<Eigen::Index>(s));
    }

    SymbolSequence out(t);
    std::vector<double> probs(outcomes);
    ComplexVector next(static_cast<Eigen::Index>(n * m));
    for (std::size_t step = 0; step < t; ++step) {
      if (reset) next.noalias() = active * phi;
      else next.noalias() = q.unitary().matrix() * psi;
      std::fill(probs.begin(), probs.end(), 0.0);
      for (std::size_t s = 0; s < n; ++s)
        for (std::size_t e = 0; e < m; ++e)
          probs[on_emission ? e : s] += std::norm(next(static_cast<Eigen::Index>(s * m + e)));
      const std::size_t k = sample_index(probs, rng);
      out[step] = q.symbol_map()[k];
      const double scale = 1.0 / std::sqrt(probs[k]);
      if (reset) {
        if (on_emission) {
          for (std::size_t s = 0; s < n; ++s)
            phi(static_cast<Eigen::Index>(s)) = next(static_cast<Eigen::Index>(s * m + k)) * scale;
        } else {
          phi.setZero();
          phi(static_cast<Eigen::Index>(k)) = 1.0;
        }
        continue;
      }
      psi.setZero();
      if (on_emission) {
        for (std::size_t s = 0; s < n; ++s)
          psi(static_cast<Eigen::Index>(s * m + k)) = next(static_cast<Eigen::Index>(s * m + k)) * scale;
      } else {
        for (std::size_t e = 0; e < m; ++e)
          psi(static_cast<Eigen::Index>(k * m + e)) = next(static_cast<Eigen::Index>(k * m + e)) * scale;
      }
    }
    return out;
  }
};

}  // namespace

std::vector<SymbolSequence> simulate(const QhmmUnitary& q, std::size_t t, std::size_t shots,
                                     std::uint64_t seed, int threads) {
  const Trajectory traj(q);
  std::vector<SymbolSequence> out(shots);
  const auto count = static_cast<std::int64_t>(shots);
#ifdef QHMM_HAVE_OPENMP
  const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(nt)
#else
  (void)threads;
#endif
  for (std::int64_t i = 0; i < count; ++i) {
    Rng rng = stream(seed, {static_cast<std::uint64_t>(i)});
    out[static_cast<std::size_t>(i)] = traj.run(t, rng);
  }
  return out;
}

std::vector<SymbolSequence> simulate_serial(const QhmmUnitary& q, std::size_t t,
                                            std::size_t shots, std::uint64_t seed) {
  const Trajectory traj(q);
  std::vector<SymbolSequence> out(shots);
  for (std::size_t i = 0; i < shots; ++i) {
    Rng rng = stream(seed, {static_cast<std::uint64_t>(i)});
    out[i] = traj.run(t, rng);
  }
  return out;
}

SteadyState steady_state(const QhmmKraus& q) { return steady_state(q.channel()); }

namespace models {

QhmmKraus monras() {
  return QhmmKraus(channels::monras(), DensityOperator::maximally_mixed(2));
}

QhmmUnitary amplitude_damping(double theta, MeasuredRegister measured) {
  const AmplitudeDampingCircuit c = amplitude_damping_circuit(theta);
  ComplexVector plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  return QhmmUnitary({"0", "1"}, 2, 2, compile(c.step), {0, 1}, DensityOperator::pure(plus), 0,
                     ResetMode::Reset, measured);
}

QhmmKraus market() { return quantize_classical(fixtures::market()); }
QhmmKraus gaussian4() { return quantize_classical(fixtures::gaussian4()); }

}  // namespace models

}  // namespace qhmm
