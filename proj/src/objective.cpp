#include "psomle/objective.hpp"

#include <charconv>

#include "psomle/error.hpp"

namespace psomle {

std::optional<std::size_t> ParamSpace::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return i;
  return std::nullopt;
}

std::size_t ParamSpace::resolve(std::string_view name_or_index) const {
  if (auto idx = index_of(name_or_index)) return *idx;
  std::size_t idx = 0;
  const auto* end = name_or_index.data() + name_or_index.size();
  auto [ptr, ec] = std::from_chars(name_or_index.data(), end, idx);
  if (ec == std::errc{} && ptr == end && idx < dimension()) return idx;
  std::string valid;
  for (const auto& n : names) valid += (valid.empty() ? "" : ", ") + n;
  throw LookupError("unknown parameter '" + std::string(name_or_index) + "' (valid: " + valid +
                    ")");
}

Objective::Objective(std::string name, ParamSpace space, Fn fn)
    : name_(std::move(name)),
      space_(std::make_shared<const ParamSpace>(std::move(space))),
      fn_(std::make_shared<const Fn>(std::move(fn))) {}

double Objective::operator()(std::span<const double> params) const {
  if (params.size() != dimension())
    throw ContractViolation("objective '" + name_ + "' expects " + std::to_string(dimension()) +
                            " parameters, got " + std::to_string(params.size()));
  return (*fn_)(params);
}

}  // namespace psomle
