#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace psomle {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  bool contains(double v) const { return v >= lo && v <= hi; }
  bool finite() const { return std::isfinite(lo) && std::isfinite(hi); }
  bool operator==(const Interval&) const = default;
};

/// Names, positivity constraints and default initialization box of a parameter vector.
struct ParamSpace {
  std::vector<std::string> names;
  std::vector<bool> positive;
  std::vector<Interval> default_init_box;

  std::size_t dimension() const { return names.size(); }
  std::optional<std::size_t> index_of(std::string_view name) const;
  /// Index for a parameter given by name or decimal position. Throws LookupError.
  std::size_t resolve(std::string_view name_or_index) const;
};

/// A named fitness function to be maximized over a parameter space.
///
/// The callable must be pure and reentrant; it may return non-finite values,
/// which the swarm engine treats as the worst possible fitness.
class Objective {
 public:
  using Fn = std::function<double(std::span<const double>)>;

  Objective(std::string name, ParamSpace space, Fn fn);

  const std::string& name() const { return name_; }
  const ParamSpace& space() const { return *space_; }
  std::size_t dimension() const { return space_->dimension(); }

  /// Raw objective value. Throws ContractViolation on a dimension mismatch.
  double operator()(std::span<const double> params) const;

 private:
  std::string name_;
  std::shared_ptr<const ParamSpace> space_;
  std::shared_ptr<const Fn> fn_;
};

}  // namespace psomle
