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

#include "qhmm/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "qhmm/linalg.hpp"

namespace qhmm {

namespace {

/// Budget-aware wrapper that remembers the best point seen so far.
class Tracker {
 public:
  explicit Tracker(const ObjectiveSpec& obj) : obj_(obj) {
    if (!obj_.evaluate) throw Error("objective has no evaluate callback");
    if (obj_.budget == 0) throw Error("objective budget must be at least 1");
  }

  std::size_t count() const { return count_; }
  bool exhausted() const { return count_ >= obj_.budget; }
  bool reached_target() const { return obj_.target && best_f_ <= *obj_.target; }
  bool should_stop() const { return exhausted() || reached_target(); }

  double operator()(const std::vector<double>& x) {
    double f = obj_.evaluate(x);
    if (std::isnan(f)) f = std::numeric_limits<double>::infinity();
    ++count_;
    if (count_ == 1 || f < best_f_) {
      best_f_ = f;
      best_x_ = x;
    }
    trace_.push_back(best_f_);
    return f;
  }

  OptResult result(bool converged) const {
    return OptResult{best_x_, best_f_, count_, converged, trace_};
  }

 private:
  const ObjectiveSpec& obj_;
  std::size_t count_ = 0;
  double best_f_ = std::numeric_limits<double>::infinity();
  std::vector<double> best_x_;
  std::vector<double> trace_;
};

void require_arity(const ObjectiveSpec& obj, const std::vector<double>& x0) {
  if (x0.size() != obj.arity) throw DimensionError("x0 length does not match objective arity");
}

std::vector<double> axpy(const std::vector<double>& x, double a, const std::vector<double>& d) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + a * d[i];
  return out;
}

}  // namespace

OptResult nelder_mead(const ObjectiveSpec& obj, const std::vector<double>& x0,
                      const OptimizerOptions& opts) {
  require_arity(obj, x0);
  Tracker f(obj);
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> pts{x0};
  std::vector<double> vals{f(x0)};
  if (n == 0) return f.result(true);
  for (std::size_t i = 0; i < n && !f.should_stop(); ++i) {
    std::vector<double> p = x0;
    p[i] += opts.initial_step;
    vals.push_back(f(p));
    pts.push_back(std::move(p));
  }
  if (pts.size() < n + 1) return f.result(f.reached_target());

  constexpr double kAlpha = 1.0, kGamma = 2.0, kRho = 0.5, kSigma = 0.5;
  std::vector<std::size_t> order(n + 1);
  while (true) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

    double diameter = 0.0;
    for (std::size_t k = 0; k <= n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        diameter = std::max(diameter, std::abs(pts[k][i] - pts[best][i]));
    if (vals[worst] - vals[best] < opts.f_tol && diameter < opts.x_tol) return f.result(true);
    if (f.should_stop()) return f.result(f.reached_target());

    std::vector<double> centroid(n, 0.0);
    for (std::size_t k = 0; k <= n; ++k)
      if (k != worst)
        for (std::size_t i = 0; i < n; ++i) centroid[i] += pts[k][i] / static_cast<double>(n);
    std::vector<double> dir(n);
    for (std::size_t i = 0; i < n; ++i) dir[i] = centroid[i] - pts[worst][i];

    const std::vector<double> xr = axpy(centroid, kAlpha, dir);
    const double fr = f(xr);
    if (fr < vals[best]) {
      if (f.should_stop()) {
        pts[worst] = xr;
        vals[worst] = fr;
        continue;
      }
      const std::vector<double> xe = axpy(centroid, kGamma, dir);
      const double fe = f(xe);
      if (fe < fr) {
        pts[worst] = xe;
        vals[worst] = fe;
      } else {
        pts[worst] = xr;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[second]) {
      pts[worst] = xr;
      vals[worst] = fr;
      continue;
    }
    if (f.should_stop()) continue;
    // Contraction: outside if the reflection beat the worst point, else inside.
    const bool outside = fr < vals[worst];
    const std::vector<double> xc = axpy(centroid, outside ? kRho : -kRho, dir);
    const double fc = f(xc);
    if (fc < (outside ? fr : vals[worst])) {
      pts[worst] = xc;
      vals[worst] = fc;
      continue;
    }
    for (std::size_t k = 0; k <= n && !f.should_stop(); ++k) {
      if (k == best) continue;
      for (std::size_t i = 0; i < n; ++i)
        pts[k][i] = pts[best][i] + kSigma * (pts[k][i] - pts[best][i]);
      vals[k] = f(pts[k]);
    }
  }
}

std::vector<double> fd_gradient(const Objective& f, const std::vector<double>& x, double eps) {
  std::vector<double> g(x.size());
  std::vector<double> p = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    p[i] = x[i] + eps;
    const double up = f(p);
    p[i] = x[i] - eps;
    const double down = f(p);
    p[i] = x[i];
    g[i] = (up - down) / (2.0 * eps);
  }
  return g;
}

OptResult fd_gradient_descent(const ObjectiveSpec& obj, const std::vector<double>& x0,
                              const OptimizerOptions& opts) {
  require_arity(obj, x0);
  Tracker f(obj);
  std::vector<double> x = x0;
  double fx = f(x);
  if (x.empty()) return f.result(true);
  double step = opts.line_step;
  while (!f.should_stop()) {
    if (obj.budget - f.count() < 2 * x.size())
      return f.result(false);
    const std::vector<double> g = fd_gradient([&](const std::vector<double>& p) { return f(p); },
                                              x, opts.fd_epsilon);
    double gmax = 0.0, gnorm2 = 0.0;
    for (double gi : g) {
      gmax = std::max(gmax, std::abs(gi));
      gnorm2 += gi * gi;
    }
    if (gmax < opts.grad_tol) return f.result(true);
    // Armijo backtracking, starting from twice the last accepted step.
    double alpha = step * 2.0;
    bool accepted = false;
    for (int k = 0; k < 60 && !f.should_stop(); ++k) {
      const std::vector<double> trial = axpy(x, -alpha, g);
      const double ft = f(trial);
      if (ft <= fx - 1e-4 * alpha * gnorm2) {
        x = trial;
        fx = ft;
        step = alpha;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) return f.result(!f.exhausted());
  }
  return f.result(f.reached_target());
}

OptResult coordinate_search(const ObjectiveSpec& obj, const std::vector<double>& x0,
                            const OptimizerOptions& opts) {
  require_arity(obj, x0);
  Tracker f(obj);
  std::vector<double> x = x0;
  double fx = f(x);
  const std::size_t n = x.size();
  if (n == 0) return f.result(true);
  std::vector<double> steps(n, opts.initial_step);
  constexpr double kInvPhi = 0.6180339887498949;

  auto along = [&](std::size_t i, double t) {
    std::vector<double> p = x;
    p[i] += t;
    return f(p);
  };

  while (!f.should_stop()) {
    const double sweep_start = fx;
    for (std::size_t i = 0; i < n && !f.should_stop(); ++i) {
      double h = steps[i];
      double fp = along(i, h);
      if (f.should_stop()) break;
      if (fp >= fx) {
        const double fm = along(i, -h);
        if (fm >= fx) {
          steps[i] *= 0.5;
          continue;
        }
        h = -h;
        fp = fm;
      }
      // Expand until the value rises: bracket [a, c] around b.
      double a = 0.0, b = h, fb = fp;
      double c = 2.0 * h, fc = along(i, c);
      while (fc < fb && !f.should_stop()) {
        a = b;
        b = c;
        fb = fc;
        c = b + 2.0 * (b - a);
        fc = along(i, c);
      }
      double best_t = b, best_f = fb;
      if (fc < best_f) {
        best_t = c;
        best_f = fc;
      }
      double lo = std::min(a, c), hi = std::max(a, c);
      double x1 = hi - kInvPhi * (hi - lo), x2 = lo + kInvPhi * (hi - lo);
      double f1 = f.should_stop() ? best_f : along(i, x1);
      double f2 = f.should_stop() ? best_f : along(i, x2);
      while (hi - lo > opts.x_tol && !f.should_stop()) {
        if (f1 < f2) {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - kInvPhi * (hi - lo);
          f1 = along(i, x1);
        } else {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + kInvPhi * (hi - lo);
          f2 = along(i, x2);
        }
      }
      if (f1 < best_f) {
        best_t = x1;
        best_f = f1;
      }
      if (f2 < best_f) {
        best_t = x2;
        best_f = f2;
      }
      if (best_f < fx) {
        x[i] += best_t;
        fx = best_f;
        steps[i] = std::max(std::abs(best_t), opts.x_tol * 4.0);
      } else {
        steps[i] *= 0.5;
      }
    }
    const double largest = *std::max_element(steps.begin(), steps.end());
    if (largest < opts.x_tol || (sweep_start - fx < opts.f_tol && largest < 1e-6))
      return f.result(true);
  }
  return f.result(f.reached_target());
}

const std::vector<std::string>& optimizer_labels() {
  static const std::vector<std::string> labels{"tnc", "cbla", "bfsg", "gc", "slsqp", "nm"};
  return labels;
}

Optimizer lookup_optimizer(const std::string& label) {
  if (label == "tnc" || label == "cbla") return coordinate_search;
  if (label == "bfsg" || label == "gc" || label == "slsqp") return fd_gradient_descent;
  if (label == "nm") return nelder_mead;
  throw Error("unknown optimizer '" + label + "'");
}

}  // namespace qhmm
