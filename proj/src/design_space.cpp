#include "hebo/design_space.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "hebo/errors.hpp"

namespace hebo {

namespace {

bool is_integral(double v) { return std::isfinite(v) && v == std::floor(v); }

void check_parameter(const Parameter& p) {
  if (p.name.empty()) throw ValidationError("parameter with empty name");
  if (!std::isfinite(p.lower) || !std::isfinite(p.upper))
    throw ValidationError("parameter '" + p.name + "': bounds must be finite");
  if (!(p.lower < p.upper))
    throw ValidationError("parameter '" + p.name + "': lower must be < upper");
  if (p.scale == ParamScale::kLog && !(p.lower > 0.0))
    throw ValidationError("parameter '" + p.name + "': log scale requires lower > 0");
  if (p.scale == ParamScale::kLogit && !(p.lower > 0.0 && p.upper < 1.0))
    throw ValidationError("parameter '" + p.name + "': logit scale requires bounds inside (0,1)");
  if (p.kind == ParamKind::kInteger) {
    if (!is_integral(p.lower) || !is_integral(p.upper))
      throw ValidationError("parameter '" + p.name + "': integer bounds must be integral");
    if (p.upper - p.lower < 1.0)
      throw ValidationError("parameter '" + p.name + "': integer range must span at least 1");
  }
}

double scale_fwd(double v, ParamScale s) {
  switch (s) {
    case ParamScale::kLinear: return v;
    case ParamScale::kLog: return std::log(v);
    case ParamScale::kLogit: return std::log(v / (1.0 - v));
  }
  return v;
}

double scale_inv(double z, ParamScale s) {
  switch (s) {
    case ParamScale::kLinear: return z;
    case ParamScale::kLog: return std::exp(z);
    case ParamScale::kLogit: return 1.0 / (1.0 + std::exp(-z));
  }
  return z;
}

}  // namespace

DesignSpace::DesignSpace(std::vector<Parameter> params) : params_(std::move(params)) {
  if (params_.empty()) throw ValidationError("design space must contain at least one parameter");
  for (int i = 0; i < dim(); ++i) {
    const auto& p = params_[static_cast<std::size_t>(i)];
    check_parameter(p);
    if (!index_.emplace(p.name, i).second)
      throw ValidationError("duplicate parameter name '" + p.name + "'");
  }
}

void DesignSpace::validate(const Configuration& c) const {
  if (c.size() != params_.size())
    throw ValidationError("configuration has " + std::to_string(c.size()) + " values, expected " +
                          std::to_string(params_.size()));
  for (const auto& p : params_) {
    auto it = c.find(p.name);
    if (it == c.end()) throw ValidationError("configuration missing parameter '" + p.name + "'");
    const double v = it->second;
    if (!(v >= p.lower && v <= p.upper))
      throw ValidationError("parameter '" + p.name + "': value out of bounds");
    if (p.kind == ParamKind::kInteger && !is_integral(v))
      throw ValidationError("parameter '" + p.name + "': integer parameter holds non-integral value");
  }
}

Eigen::VectorXd DesignSpace::encode(const Configuration& c) const {
  validate(c);
  Eigen::VectorXd u(dim());
  for (int i = 0; i < dim(); ++i) {
    const auto& p = params_[static_cast<std::size_t>(i)];
    const double v = c.at(p.name);
    const double lo = scale_fwd(p.lower, p.scale);
    const double hi = scale_fwd(p.upper, p.scale);
    u[i] = (scale_fwd(v, p.scale) - lo) / (hi - lo);
    u[i] = std::clamp(u[i], 0.0, 1.0);
  }
  return u;
}

Configuration DesignSpace::decode(const Eigen::VectorXd& u) const {
  if (u.size() != dim())
    throw ValidationError("decode: vector has dimension " + std::to_string(u.size()) +
                          ", expected " + std::to_string(dim()));
  Configuration c;
  for (int i = 0; i < dim(); ++i) {
    const auto& p = params_[static_cast<std::size_t>(i)];
    const double ui = std::clamp(u[i], 0.0, 1.0);
    const double lo = scale_fwd(p.lower, p.scale);
    const double hi = scale_fwd(p.upper, p.scale);
    double v = scale_inv(lo + ui * (hi - lo), p.scale);
    if (p.kind == ParamKind::kInteger) v = std::round(v);
    v = std::clamp(v, p.lower, p.upper);
    c[p.name] = v;
  }
  return c;
}

std::vector<Configuration> DesignSpace::sample_uniform(int n, Rng& rng) const {
  if (n < 1) throw ValidationError("sample_uniform: n must be >= 1");
  std::vector<Configuration> out;
  out.reserve(static_cast<std::size_t>(n));
  Eigen::VectorXd u(dim());
  for (int s = 0; s < n; ++s) {
    for (int i = 0; i < dim(); ++i) u[i] = rng.uniform();
    out.push_back(decode(u));
  }
  return out;
}

DesignSpace parse_space(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("design space: invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("params") || !doc["params"].is_array())
    throw ParseError("design space: expected object with a 'params' array");
  std::vector<Parameter> params;
  for (const auto& jp : doc["params"]) {
    Parameter p;
    try {
      p.name = jp.at("name").get<std::string>();
      const std::string kind = jp.at("kind").get<std::string>();
      if (kind == "real") p.kind = ParamKind::kReal;
      else if (kind == "integer") p.kind = ParamKind::kInteger;
      else throw ParseError("design space: unknown kind '" + kind + "'");
      p.lower = jp.at("lower").get<double>();
      p.upper = jp.at("upper").get<double>();
      const std::string scale = jp.value("scale", std::string("linear"));
      if (scale == "linear") p.scale = ParamScale::kLinear;
      else if (scale == "log") p.scale = ParamScale::kLog;
      else if (scale == "logit") p.scale = ParamScale::kLogit;
      else throw ParseError("design space: unknown scale '" + scale + "'");
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("design space: parameter entry: " + std::string(e.what()));
    }
    params.push_back(std::move(p));
  }
  return DesignSpace(std::move(params));
}

}  // namespace hebo
