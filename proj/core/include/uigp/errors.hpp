#pragma once

#include <stdexcept>
#include <string>

namespace uigp {

/// Cholesky factorization of a noise-augmented Gram matrix failed even after
/// the conditioning jitter was added to the diagonal.
class IllConditionedKernelError : public std::runtime_error {
 public:
  IllConditionedKernelError(const std::string& what, double attempted_jitter)
      : std::runtime_error(what), attempted_jitter_(attempted_jitter) {}

  double attempted_jitter() const noexcept { return attempted_jitter_; }

 private:
  double attempted_jitter_;
};

/// Every multi-start restart of the hyperparameter optimizer failed to reach
/// a finite objective value.
class OptimizationFailedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Too many per-sample GP fits were dropped while marginalizing, or all of
/// them failed.
class PredictionFailedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Automatic bandwidth selection collapsed to zero (all samples identical).
class DegenerateBandwidthError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Failure inside the experiment pipeline, tagged with the stage that raised it.
class PipelineError : public std::runtime_error {
 public:
  PipelineError(const std::string& stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(stage) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace uigp
