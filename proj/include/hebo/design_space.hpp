#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "hebo/rng.hpp"

namespace hebo {

enum class ParamKind { kReal, kInteger };
enum class ParamScale { kLinear, kLog, kLogit };

struct Parameter {
  std::string name;
  ParamKind kind = ParamKind::kReal;
  double lower = 0.0;
  double upper = 1.0;
  ParamScale scale = ParamScale::kLinear;
};

/// A configuration assigns one value per parameter. Integer parameters
/// hold integral values stored as doubles.
using Configuration = std::map<std::string, double>;

/// Ordered, immutable search space over mixed real/integer parameters.
/// Provides the bijection between configurations and the unit hypercube
/// in which the surrogate and the evolutionary solver operate.
class DesignSpace {
 public:
  explicit DesignSpace(std::vector<Parameter> params);

  int dim() const { return static_cast<int>(params_.size()); }
  const std::vector<Parameter>& parameters() const { return params_; }
  const Parameter& parameter(int i) const { return params_[static_cast<std::size_t>(i)]; }

  /// Throws ValidationError if the configuration is missing/extra a
  /// parameter, out of bounds, or non-integral for an integer parameter.
  void validate(const Configuration& c) const;

  /// Maps a valid configuration to [0,1]^d (per-coordinate affine map in
  /// the parameter's scaled domain: identity, log, or logit).
  Eigen::VectorXd encode(const Configuration& c) const;

  /// Inverse of encode; integer parameters round to the nearest integer
  /// after inverse scaling and are clamped to their bounds.
  Configuration decode(const Eigen::VectorXd& u) const;

  /// n configurations uniform in the encoded (scaled) space.
  std::vector<Configuration> sample_uniform(int n, Rng& rng) const;

 private:
  std::vector<Parameter> params_;
  std::map<std::string, int> index_;
};

/// Parses the JSON document
///   {"params":[{"name":..,"kind":"real"|"integer","lower":..,"upper":..,
///               "scale":"linear"|"log"|"logit"}, ...]}
/// Parameter order is document order. Throws ParseError on malformed
/// documents and ValidationError on invariant violations.
DesignSpace parse_space(const std::string& json_text);

}  // namespace hebo
