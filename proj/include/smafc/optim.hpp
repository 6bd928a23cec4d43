#pragma once

// Quasi-Newton minimization for the likelihood and capacity searches.
// Objectives here are smooth but lack analytic gradients, so derivatives
// come from finite differences and the line search only ever shortens steps.

#include "smafc/core.hpp"
#include "smafc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace smafc {

using Objective = std::function<double(const RVector&)>;

struct OptimOptions {
  int max_iterations = 400;
  double gradient_tolerance = 1e-7; // infinity norm of the gradient
  double step_tolerance = 1e-11;    // relative parameter movement
  double fd_step = 1e-6;            // relative finite-difference step
  bool central_differences = false; // twice the cost, one order more accuracy
};

struct OptimResult {
  RVector x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::vector<double> trace; // objective after each accepted step, start included
};

inline RVector fd_gradient(const Objective& f, const RVector& x, double rel_step,
                           bool central, double f_at_x, int& evaluations) {
  const auto n = x.size();
  RVector g(n);
  RVector probe = x;
  for (Eigen::Index i = 0; i < n; ++i) {
    double h = rel_step * std::max(1.0, std::abs(x[i]));
    probe[i] = x[i] + h;
    double fp = f(probe);
    ++evaluations;
    if (central) {
      probe[i] = x[i] - h;
      double fm = f(probe);
      ++evaluations;
      g[i] = (fp - fm) / (2.0 * h);
    } else {
      g[i] = (fp - f_at_x) / h;
    }
    probe[i] = x[i];
  }
  return g;
}

inline RVector fd_gradient(const Objective& f, const RVector& x,
                           const OptimOptions& opts = {}) {
  int evals = 0;
  double fx = opts.central_differences ? 0.0 : f(x);
  return fd_gradient(f, x, opts.fd_step, opts.central_differences, fx, evals);
}

// BFGS with Armijo backtracking. The inverse Hessian estimate is reset to the
// identity whenever the curvature condition fails, which keeps the noisy
// finite-difference gradients from poisoning the update.
inline OptimResult bfgs_minimize(const Objective& f, const RVector& x0,
                                 const OptimOptions& opts = {}) {
  const auto n = x0.size();
  if (n == 0) throw OptimError("bfgs_minimize: empty parameter vector");

  OptimResult res;
  res.x = x0;
  res.value = f(res.x);
  res.evaluations = 1;
  res.trace.push_back(res.value);
  if (!std::isfinite(res.value)) throw OptimError("bfgs_minimize: objective not finite at start");

  RMatrix h_inv = RMatrix::Identity(n, n);
  RVector grad = fd_gradient(f, res.x, opts.fd_step, opts.central_differences,
                             res.value, res.evaluations);

  constexpr double armijo = 1e-4;
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    if (grad.lpNorm<Eigen::Infinity>() < opts.gradient_tolerance) {
      res.converged = true;
      break;
    }

    RVector dir = -(h_inv * grad);
    double slope = grad.dot(dir);
    if (!(slope < 0.0)) { // not a descent direction, fall back to steepest descent
      dir = -grad;
      slope = grad.dot(dir);
      h_inv.setIdentity();
    }

    double alpha = 1.0;
    double f_new = res.value;
    RVector x_new = res.x;
    bool accepted = false;
    for (int bt = 0; bt < 45; ++bt) {
      x_new = res.x + alpha * dir;
      f_new = f(x_new);
      ++res.evaluations;
      if (std::isfinite(f_new) && f_new <= res.value + armijo * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      res.converged = grad.lpNorm<Eigen::Infinity>() < 1e3 * opts.gradient_tolerance;
      break;
    }

    RVector step = x_new - res.x;
    double rel_move = step.lpNorm<Eigen::Infinity>() /
                      std::max(1.0, res.x.lpNorm<Eigen::Infinity>());

    RVector grad_new = fd_gradient(f, x_new, opts.fd_step, opts.central_differences,
                                   f_new, res.evaluations);
    RVector y = grad_new - grad;
    double sy = step.dot(y);
    if (sy > 1e-12 * step.norm() * y.norm() && sy > 0.0) {
      RVector hy = h_inv * y;
      double yhy = y.dot(hy);
      h_inv += ((sy + yhy) / (sy * sy)) * (step * step.transpose()) -
               (hy * step.transpose() + step * hy.transpose()) / sy;
    } else {
      h_inv.setIdentity();
    }

    res.x = x_new;
    res.value = f_new;
    grad = grad_new;
    ++res.iterations;
    res.trace.push_back(res.value);

    if (rel_move < opts.step_tolerance) {
      res.converged = true;
      break;
    }
  }
  return res;
}

// Runs the base start plus (restarts - 1) Gaussian perturbations of it and
// keeps the best minimum. Near-ties go to the smaller parameter vector so the
// winner is reproducible when several starts land in the same basin.
inline OptimResult multi_start_minimize(const Objective& f, const RVector& x0,
                                        const OptimOptions& opts, RngStream& rng,
                                        int restarts = 5, double spread = 0.3) {
  if (restarts < 1) throw OptimError("multi_start_minimize: needs at least one start");
  OptimResult best;
  bool have_best = false;
  for (int r = 0; r < restarts; ++r) {
    RVector start = x0;
    if (r > 0)
      for (Eigen::Index i = 0; i < start.size(); ++i)
        start[i] += rng.normal(0.0, spread * std::max(1.0, std::abs(x0[i])));
    OptimResult cand;
    try {
      cand = bfgs_minimize(f, start, opts);
    } catch (const OptimError&) {
      continue; // a bad start is not fatal as long as one start finishes
    }
    bool better = !have_best || cand.value < best.value - 1e-10 * std::max(1.0, std::abs(best.value));
    bool tie = have_best && !better &&
               cand.value < best.value + 1e-10 * std::max(1.0, std::abs(best.value));
    if (better || (tie && cand.x.norm() < best.x.norm())) {
      best = std::move(cand);
      have_best = true;
    }
  }
  if (!have_best) throw OptimError("multi_start_minimize: every start failed");
  return best;
}

} // namespace smafc
