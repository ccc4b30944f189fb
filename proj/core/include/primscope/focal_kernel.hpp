#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "primscope/error.hpp"

namespace primscope {

/// Numeric datapath for buffer math. f32 and bf16_emulated round once per
/// elementwise pass, at the store; arithmetic inside a pass runs at f64.
enum class Precision { f64, f32, bf16_emulated };

enum class Reduction { none, mean, sum };

std::string_view to_string(Precision p);
std::string_view to_string(Reduction r);
std::optional<Precision> precision_from(std::string_view name);
std::optional<Reduction> reduction_from(std::string_view name);

/// Dense row-major numeric buffer. An empty shape is a scalar (one value);
/// a zero dim makes the buffer empty. Values are snapped to the precision on
/// construction, so bf16_emulated buffers only hold bf16-representable values.
struct ElementBuffer {
  std::vector<std::int64_t> shape;
  std::vector<double> values;
  Precision precision = Precision::f64;

  std::size_t numel() const;
  bool is_scalar() const { return shape.empty(); }

  /// Validates shape (entries >= 0) against the value count and snaps values.
  /// Throws ShapeError on mismatch or a negative dim.
  static ElementBuffer make(std::vector<std::int64_t> shape, std::vector<double> values,
                            Precision precision = Precision::f64);
  static ElementBuffer scalar(double value, Precision precision = Precision::f64);
};

/// Rounds one value the way a store at this precision would.
double snap_to(double v, Precision p);

struct FocalParams {
  double alpha = 0.25;  // negative disables class weighting entirely
  double gamma = 2.0;   // >= 0
  Reduction reduction = Reduction::none;
  /// Targets must be exactly 0 or 1 where binary targets are required; values
  /// within this distance of 0 or 1 are snapped instead of rejected.
  double binary_tolerance = 0.0;
};

/// Elementwise-pass instrumentation: each full sweep over the buffer that
/// stores a result counts as one pass. Reductions are not counted.
struct EvalStats {
  std::uint64_t elementwise_passes = 0;
};

/// Op-by-op forward mirroring the framework reference: p = sigmoid(x),
/// ce = softplus(x) - x*y, p_t blend, (1-p_t)^gamma modulation, optional
/// alpha_t weighting, then reduction. Targets must lie in [0,1].
ElementBuffer focal_forward_reference(const ElementBuffer& x, const ElementBuffer& y,
                                      const FocalParams& p, EvalStats* stats = nullptr);

/// Closed-form forward valid for real-valued targets; numerically stable
/// (softplus/logistic factoring, no raw exp(x)).
ElementBuffer focal_forward_general(const ElementBuffer& x, const ElementBuffer& y,
                                    const FocalParams& p, EvalStats* stats = nullptr);

/// Fused forward specialized to binary targets; at most 6 elementwise passes.
/// Throws BinaryTargetRequiredError when a target is not 0/1.
ElementBuffer focal_forward_simplified(const ElementBuffer& x, const ElementBuffer& y,
                                       const FocalParams& p, EvalStats* stats = nullptr);

/// Analytic gradient of the focal loss w.r.t. x. `grad` is the upstream
/// gradient: a buffer of x's shape for Reduction::none, a scalar for
/// mean/sum (mean divides by numel). Binary targets required.
ElementBuffer focal_backward(const ElementBuffer& grad, const ElementBuffer& x,
                             const ElementBuffer& y, const FocalParams& p,
                             EvalStats* stats = nullptr);

/// Central-difference oracle on focal_forward_reference at f64:
/// (f(x+h) - f(x-h)) / (2h) per element, with the reduction's scaling.
/// Throws InvalidParameterError when h <= 0.
ElementBuffer focal_backward_numeric(const ElementBuffer& x, const ElementBuffer& y,
                                     const FocalParams& p, double h);

}  // namespace primscope
