#include "ttc/tr_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "ttc/errors.hpp"

namespace ttc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double boundary_step(double eta_sq, double eta_delta, double delta_sq,
                     double radius) {
  if (delta_sq <= 0.0) return 0.0;
  // Positive root of ||eta + tau delta||^2 = radius^2.
  const double disc =
      eta_delta * eta_delta + delta_sq * (radius * radius - eta_sq);
  return (-eta_delta + std::sqrt(std::max(disc, 0.0))) / delta_sq;
}

struct TcgOut {
  ProductVec eta;
  TcgStop reason = TcgStop::max_iterations;
  int iters = 0;
  double model_value = 0.0;  // m(eta) = <g,eta> + 1/2 <eta, H eta>, <= 0
};

template <typename HessOp>
TcgOut truncated_cg(const ProductManifold& manifold, const ProductVec& grad,
                    HessOp&& hess, double radius, const TRConfig& cfg) {
  TcgOut out;
  out.eta = manifold.zero_vec();
  ProductVec heta = manifold.zero_vec();  // H eta, maintained incrementally
  ProductVec r = grad;
  double rr = manifold.metric(r, r);
  const double r0 = std::sqrt(rr);
  if (r0 == 0.0) {
    out.reason = TcgStop::reached_tolerance;
    return out;
  }
  const double stop_tol =
      r0 * std::min(cfg.tcg_kappa, std::pow(r0, cfg.tcg_theta));
  ProductVec delta = grad;
  delta.scale(-1.0);
  double eta_sq = 0.0;

  for (int j = 0; j < cfg.tcg_max_iters; ++j) {
    out.iters = j + 1;
    const ProductVec hdelta = hess(delta);
    const double d_hd = manifold.metric(delta, hdelta);
    const double eta_delta = manifold.metric(out.eta, delta);
    const double delta_sq = manifold.metric(delta, delta);
    if (!std::isfinite(d_hd)) {
      throw NumericalError("non-finite curvature in truncated CG");
    }
    if (d_hd <= 0.0) {
      const double tau = boundary_step(eta_sq, eta_delta, delta_sq, radius);
      out.eta.axpy(tau, delta);
      heta.axpy(tau, hdelta);
      out.reason = TcgStop::negative_curvature;
      break;
    }
    const double alpha = rr / d_hd;
    const double moved_sq =
        eta_sq + 2.0 * alpha * eta_delta + alpha * alpha * delta_sq;
    if (moved_sq >= radius * radius) {
      const double tau = boundary_step(eta_sq, eta_delta, delta_sq, radius);
      out.eta.axpy(tau, delta);
      heta.axpy(tau, hdelta);
      out.reason = TcgStop::exceeded_radius;
      break;
    }
    out.eta.axpy(alpha, delta);
    heta.axpy(alpha, hdelta);
    eta_sq = moved_sq;
    r.axpy(alpha, hdelta);
    const double rr_next = manifold.metric(r, r);
    if (!std::isfinite(rr_next)) {
      throw NumericalError("non-finite residual in truncated CG");
    }
    if (std::sqrt(rr_next) <= stop_tol) {
      out.reason = TcgStop::reached_tolerance;
      break;
    }
    const double beta = rr_next / rr;
    rr = rr_next;
    delta.scale(beta);
    delta.axpy(-1.0, r);
  }
  out.model_value =
      manifold.metric(grad, out.eta) + 0.5 * manifold.metric(out.eta, heta);
  return out;
}

}  // namespace

const char* to_string(TcgStop reason) {
  switch (reason) {
    case TcgStop::negative_curvature:
      return "negative_curvature";
    case TcgStop::exceeded_radius:
      return "exceeded_radius";
    case TcgStop::reached_tolerance:
      return "reached_tolerance";
    case TcgStop::max_iterations:
      return "max_iterations";
  }
  return "unknown";
}

TRConfig TRConfig::resolved(Index manifold_dim) const {
  TRConfig cfg = *this;
  if (cfg.max_radius <= 0.0) {
    cfg.max_radius = std::sqrt(static_cast<double>(manifold_dim));
  }
  if (cfg.initial_radius <= 0.0) cfg.initial_radius = cfg.max_radius / 8.0;
  if (cfg.tcg_max_iters <= 0) {
    cfg.tcg_max_iters =
        static_cast<int>(std::min<Index>(manifold_dim, 100));
  }
  if (!(cfg.rho_accept > 0.0) ||
      !(cfg.rho_accept <= cfg.rho_shrink_threshold) ||
      !(cfg.rho_shrink_threshold < cfg.rho_expand_threshold) ||
      !(cfg.rho_expand_threshold < 1.0)) {
    throw ConfigError(
        "need 0 < rho_accept <= rho_shrink < rho_expand < 1");
  }
  if (!(cfg.initial_radius > 0.0) || !(cfg.max_radius > 0.0)) {
    throw ConfigError("trust-region radii must be positive");
  }
  if (cfg.max_outer_iters < 0 || cfg.grad_tol < 0.0) {
    throw ConfigError("invalid iteration budget or tolerance");
  }
  return cfg;
}

void TRTrace::write_csv(std::ostream& os) const {
  os << "iter,cost,gradnorm,radius,rho,tcg_reason,seconds\n";
  char buf[64];
  const auto fmt = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  for (const auto& it : iters) {
    os << it.iter << "," << fmt(it.cost) << "," << fmt(it.grad_norm) << ","
       << fmt(it.radius) << "," << fmt(it.rho) << "," << to_string(it.tcg_reason)
       << "," << fmt(it.seconds) << "\n";
  }
}

TRResult tr_solve(CostModel& cost, const ProductManifold& manifold,
                  const ProductPoint& x0, const TRConfig& cfg_in) {
  const TRConfig cfg = cfg_in.resolved(manifold.dim());
  if (!manifold.is_point(x0, 1e-9)) {
    throw ShapeError("initial point is not on the manifold");
  }

  TRResult res;
  res.x = x0;
  double fx = cost.value(res.x);
  if (!std::isfinite(fx)) {
    throw NumericalError("cost is not finite at the initial point");
  }
  double radius = cfg.initial_radius;
  double grad_norm = kInf;

  for (int iter = 0; iter < cfg.max_outer_iters; ++iter) {
    const auto t0 = std::chrono::steady_clock::now();
    const ProductVec eg = cost.egrad(res.x);
    const ProductVec g = manifold.egrad_to_rgrad(res.x, eg);
    grad_norm = std::sqrt(manifold.metric(g, g));
    if (!std::isfinite(grad_norm)) {
      throw NumericalError("non-finite gradient");
    }
    if (grad_norm < cfg.grad_tol) {
      res.converged = true;
      break;
    }

    const auto hess = [&](const ProductVec& v) {
      return manifold.ehess_to_rhess(res.x, eg, cost.ehess_vec(res.x, v), v);
    };
    const TcgOut tcg = truncated_cg(manifold, g, hess, radius, cfg);
    const double predicted = -tcg.model_value;

    bool degenerate = false;
    ProductPoint candidate;
    double fc = kInf;
    try {
      candidate = manifold.retract(res.x, tcg.eta);
      fc = cost.value(candidate);
    } catch (const DegenerateStepError&) {
      degenerate = true;
    }

    const double denom = predicted + 1e-15 * std::abs(fx) + 1e-300;
    const double rho =
        (degenerate || !std::isfinite(fc)) ? -kInf : (fx - fc) / denom;

    TRIterRecord rec;
    rec.iter = iter;
    rec.grad_norm = grad_norm;
    rec.radius = radius;
    rec.rho = rho;
    rec.tcg_reason = tcg.reason;
    rec.tcg_iters = tcg.iters;
    rec.model_decrease = predicted;
    rec.accepted = std::isfinite(fc) && rho > cfg.rho_accept;
    rec.cost = std::isfinite(fc) ? fc : fx;

    if (rec.accepted) {
      if (!manifold.is_point(candidate, 1e-12)) {
        throw NumericalError("iterate left the manifold");
      }
      res.x = std::move(candidate);
      fx = fc;
      ++res.accepted_steps;
    }
    if (rho < cfg.rho_shrink_threshold) {
      radius *= 0.25;
    } else if (rho > cfg.rho_expand_threshold &&
               (tcg.reason == TcgStop::negative_curvature ||
                tcg.reason == TcgStop::exceeded_radius)) {
      radius = std::min(2.0 * radius, cfg.max_radius);
    }

    rec.seconds = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    res.trace.iters.push_back(rec);
  }

  res.final_cost = fx;
  res.final_grad_norm = grad_norm;
  if (grad_norm < cfg.grad_tol) res.converged = true;
  return res;
}

}  // namespace ttc
