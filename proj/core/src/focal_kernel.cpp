#include "primscope/focal_kernel.hpp"

#include <cmath>
#include <cstddef>

#include "internal.hpp"
#include "primscope/bf16.hpp"

namespace primscope {

std::string_view to_string(Precision p) {
  switch (p) {
    case Precision::f64: return "f64";
    case Precision::f32: return "f32";
    case Precision::bf16_emulated: return "bf16_emulated";
  }
  return "f64";
}

std::string_view to_string(Reduction r) {
  switch (r) {
    case Reduction::none: return "none";
    case Reduction::mean: return "mean";
    case Reduction::sum: return "sum";
  }
  return "none";
}

std::optional<Precision> precision_from(std::string_view name) {
  if (name == "f64") return Precision::f64;
  if (name == "f32") return Precision::f32;
  if (name == "bf16_emulated" || name == "bf16") return Precision::bf16_emulated;
  return std::nullopt;
}

std::optional<Reduction> reduction_from(std::string_view name) {
  if (name == "none") return Reduction::none;
  if (name == "mean") return Reduction::mean;
  if (name == "sum") return Reduction::sum;
  return std::nullopt;
}

double snap_to(double v, Precision p) {
  switch (p) {
    case Precision::f64: return v;
    case Precision::f32: return double(float(v));
    case Precision::bf16_emulated: return double(round_bf16(float(v)));
  }
  return v;
}

std::size_t ElementBuffer::numel() const {
  std::size_t n = 1;
  for (auto d : shape) n *= std::size_t(d);
  return n;
}

ElementBuffer ElementBuffer::make(std::vector<std::int64_t> shape, std::vector<double> values,
                                  Precision precision) {
  std::size_t n = 1;
  for (auto d : shape) {
    if (d < 0) throw ShapeError("negative dim " + std::to_string(d));
    n *= std::size_t(d);
  }
  if (values.size() != n)
    throw ShapeError("shape wants " + std::to_string(n) + " values, got " +
                     std::to_string(values.size()));
  ElementBuffer out;
  out.shape = std::move(shape);
  out.values = std::move(values);
  out.precision = precision;
  for (double& v : out.values) v = snap_to(v, precision);
  return out;
}

ElementBuffer ElementBuffer::scalar(double value, Precision precision) {
  return make({}, {value}, precision);
}

namespace {

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

// 0^0 = 1: gamma = 0 must reduce to plain cross entropy everywhere.
double pow_gamma(double base, double exponent) {
  if (exponent == 0.0) return 1.0;
  return std::pow(base, exponent);
}

void check_params(const FocalParams& p) {
  if (!(p.gamma >= 0)) throw InvalidParameterError("gamma must be >= 0");
  if (!(p.binary_tolerance >= 0)) throw InvalidParameterError("binary_tolerance must be >= 0");
}

void check_same_shape(const ElementBuffer& x, const ElementBuffer& y) {
  if (x.shape != y.shape) throw ShapeError("x and y shapes differ");
}

double binary_value(double v, double tolerance) {
  if (v == 0.0 || v == 1.0) return v;
  if (tolerance > 0.0) {
    if (std::abs(v) <= tolerance) return 0.0;
    if (std::abs(v - 1.0) <= tolerance) return 1.0;
  }
  throw BinaryTargetRequiredError("target value " + detail::fmt_double(v) + " is not 0 or 1");
}

// One counted elementwise pass: computes f(i) at f64, stores at `prec`.
template <class F>
std::vector<double> pass(std::size_t n, Precision prec, EvalStats* stats, F f) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = snap_to(f(i), prec);
  if (stats) stats->elementwise_passes += 1;
  return out;
}

// Fixed association regardless of any internal partitioning.
double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  std::size_t half = n / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

ElementBuffer reduce(std::vector<double> vals, const ElementBuffer& like, Reduction reduction) {
  const Precision prec = like.precision;
  switch (reduction) {
    case Reduction::none: {
      ElementBuffer out;
      out.shape = like.shape;
      out.values = std::move(vals);  // snapped per pass already
      out.precision = prec;
      return out;
    }
    case Reduction::sum:
      return ElementBuffer::scalar(snap_to(pairwise_sum(vals.data(), vals.size()), prec), prec);
    case Reduction::mean: {
      if (vals.empty()) throw EmptyReductionError("mean over an empty buffer");
      double s = snap_to(pairwise_sum(vals.data(), vals.size()), prec);
      return ElementBuffer::scalar(snap_to(s / double(vals.size()), prec), prec);
    }
  }
  throw InvalidParameterError("bad reduction");
}

}  // namespace

ElementBuffer focal_forward_reference(const ElementBuffer& x, const ElementBuffer& y,
                                      const FocalParams& p, EvalStats* stats) {
  check_params(p);
  check_same_shape(x, y);
  for (double v : y.values)
    if (!(v >= 0.0 && v <= 1.0))
      throw TargetRangeError("target value " + detail::fmt_double(v) + " outside [0,1]");
  const std::size_t n = x.values.size();
  const Precision prec = x.precision;
  const auto& xv = x.values;
  const auto& yv = y.values;
  auto P = [&](auto f) { return pass(n, prec, stats, f); };

  auto prob = P([&](std::size_t i) { return sigmoid(xv[i]); });
  auto ce = P([&](std::size_t i) { return softplus(xv[i]) - xv[i] * yv[i]; });
  auto one_m_p = P([&](std::size_t i) { return 1.0 - prob[i]; });
  auto one_m_y = P([&](std::size_t i) { return 1.0 - yv[i]; });
  auto t_neg = P([&](std::size_t i) { return one_m_p[i] * one_m_y[i]; });
  auto t_pos = P([&](std::size_t i) { return prob[i] * yv[i]; });
  auto p_t = P([&](std::size_t i) { return t_pos[i] + t_neg[i]; });
  auto one_m_pt = P([&](std::size_t i) { return 1.0 - p_t[i]; });
  auto mod = P([&](std::size_t i) { return pow_gamma(one_m_pt[i], p.gamma); });
  auto loss = P([&](std::size_t i) { return ce[i] * mod[i]; });
  if (p.alpha >= 0.0) {
    auto a_pos = P([&](std::size_t i) { return p.alpha * yv[i]; });
    auto one_m_y2 = P([&](std::size_t i) { return 1.0 - yv[i]; });
    auto a_neg = P([&](std::size_t i) { return (1.0 - p.alpha) * one_m_y2[i]; });
    auto alpha_t = P([&](std::size_t i) { return a_pos[i] + a_neg[i]; });
    loss = P([&](std::size_t i) { return alpha_t[i] * loss[i]; });
  }
  return reduce(std::move(loss), x, p.reduction);
}

ElementBuffer focal_forward_general(const ElementBuffer& x, const ElementBuffer& y,
                                    const FocalParams& p, EvalStats* stats) {
  check_params(p);
  check_same_shape(x, y);
  const std::size_t n = x.values.size();
  const Precision prec = x.precision;
  const auto& xv = x.values;
  const auto& yv = y.values;
  auto P = [&](auto f) { return pass(n, prec, stats, f); };

  auto sp = P([&](std::size_t i) { return softplus(xv[i]); });
  auto sig = P([&](std::size_t i) { return sigmoid(xv[i]); });
  auto base = P([&](std::size_t i) { return yv[i] + sig[i] * (1.0 - 2.0 * yv[i]); });
  auto powed = P([&](std::size_t i) { return pow_gamma(base[i], p.gamma); });
  auto ce = P([&](std::size_t i) { return sp[i] - xv[i] * yv[i]; });
  auto out = P([&](std::size_t i) {
    double coeff = p.alpha < 0.0 ? 1.0 : p.alpha * (2.0 * yv[i] - 1.0) - yv[i] + 1.0;
    return coeff * powed[i] * ce[i];
  });
  return reduce(std::move(out), x, p.reduction);
}

ElementBuffer focal_forward_simplified(const ElementBuffer& x, const ElementBuffer& y,
                                       const FocalParams& p, EvalStats* stats) {
  check_params(p);
  check_same_shape(x, y);
  const std::size_t n = x.values.size();
  const Precision prec = x.precision;
  const auto& xv = x.values;
  const auto& yv = y.values;
  const double tol = p.binary_tolerance;
  auto P = [&](auto f) { return pass(n, prec, stats, f); };

  auto sp = P([&](std::size_t i) { return softplus(xv[i]); });
  auto sig = P([&](std::size_t i) { return sigmoid(xv[i]); });
  auto base = P([&](std::size_t i) {
    double yb = binary_value(yv[i], tol);
    return yb + sig[i] * (1.0 - 2.0 * yb);
  });
  auto powed = P([&](std::size_t i) { return pow_gamma(base[i], p.gamma); });
  auto weighted_ce = P([&](std::size_t i) {
    double yb = binary_value(yv[i], tol);
    if (p.alpha < 0.0) return sp[i] - xv[i] * yb;
    double alpha_t = (2.0 * p.alpha - 1.0) * yb + (1.0 - p.alpha);
    return alpha_t * sp[i] - p.alpha * xv[i] * yb;
  });
  auto out = P([&](std::size_t i) { return powed[i] * weighted_ce[i]; });
  return reduce(std::move(out), x, p.reduction);
}

ElementBuffer focal_backward(const ElementBuffer& grad, const ElementBuffer& x,
                             const ElementBuffer& y, const FocalParams& p, EvalStats* stats) {
  check_params(p);
  check_same_shape(x, y);
  if (p.reduction == Reduction::none) {
    if (grad.shape != x.shape) throw ShapeError("upstream grad must match x's shape");
  } else if (grad.numel() != 1) {
    throw ShapeError("upstream grad must be a scalar for mean/sum reductions");
  }
  const std::size_t n = x.values.size();
  const Precision prec = x.precision;
  const auto& xv = x.values;
  const auto& yv = y.values;
  const double tol = p.binary_tolerance;
  double scalar_g = 0.0;
  if (p.reduction != Reduction::none && n > 0) {
    scalar_g = grad.values[0];
    if (p.reduction == Reduction::mean) scalar_g /= double(n);
  }
  auto upstream = [&](std::size_t i) {
    return p.reduction == Reduction::none ? grad.values[i] : scalar_g;
  };
  auto P = [&](auto f) { return pass(n, prec, stats, f); };

  auto sp = P([&](std::size_t i) { return softplus(xv[i]); });
  // sigmoid((1-2y)x) is 1-p for y=1 and p for y=0; the tail is an exact
  // exponential instead of a 1-p style cancellation that rounds to zero past
  // |x| ~ 37.
  auto base = P([&](std::size_t i) {
    double yb = binary_value(yv[i], tol);
    return sigmoid((1.0 - 2.0 * yb) * xv[i]);
  });
  auto powed = P([&](std::size_t i) { return pow_gamma(base[i], p.gamma); });
  auto out = P([&](std::size_t i) {
    double yb = binary_value(yv[i], tol);
    // d/dx [ alpha_t * base^g * ce ] = alpha_t*(1-2y)*base^g*(g*ce*(1-base)
    // + base); keeping base^g grouped (never base^(g-1) alone) stays finite
    // as base -> 0 for any g >= 0.
    double ce = sp[i] - xv[i] * yb;
    double core = (1.0 - 2.0 * yb) * powed[i] *
                  (p.gamma * ce * (1.0 - base[i]) + base[i]);
    if (p.alpha >= 0.0) core *= p.alpha * yb + (1.0 - p.alpha) * (1.0 - yb);
    return core * upstream(i);
  });
  return reduce(std::move(out), x, Reduction::none);
}

ElementBuffer focal_backward_numeric(const ElementBuffer& x, const ElementBuffer& y,
                                     const FocalParams& p, double h) {
  if (!(h > 0.0)) throw InvalidParameterError("h must be positive");
  check_params(p);
  check_same_shape(x, y);
  if (p.reduction == Reduction::mean && x.numel() == 0)
    throw EmptyReductionError("mean over an empty buffer");

  FocalParams elementwise = p;
  elementwise.reduction = Reduction::none;
  ElementBuffer xp = x, xm = x, yf = y;
  xp.precision = xm.precision = yf.precision = Precision::f64;
  for (double& v : xp.values) v += h;
  for (double& v : xm.values) v -= h;
  ElementBuffer fp = focal_forward_reference(xp, yf, elementwise);
  ElementBuffer fm = focal_forward_reference(xm, yf, elementwise);

  double scale = p.reduction == Reduction::mean ? 1.0 / double(x.numel()) : 1.0;
  ElementBuffer out;
  out.shape = x.shape;
  out.precision = Precision::f64;
  out.values.resize(x.values.size());
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] = (fp.values[i] - fm.values[i]) / (2.0 * h) * scale;
  return out;
}

}  // namespace primscope
