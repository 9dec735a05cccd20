// Samples embedded verbatim from their published listings.

#include "psomle/data_io.hpp"
#include "psomle/error.hpp"

namespace psomle {
namespace {

const std::vector<double> k_glass_fibers = {
    0.55, 0.74, 0.77, 0.81, 0.84, 0.93, 1.04, 1.11, 1.13, 1.24, 1.27, 1.28, 1.29, 1.30, 1.36,
    1.39, 1.42, 1.48, 1.49, 1.50, 1.50, 1.52, 1.53, 1.54, 1.55, 1.55, 1.58, 1.59, 1.60, 1.61,
    1.61, 1.61, 1.61, 1.62, 1.62, 1.63, 1.64, 1.66, 1.66, 1.66, 1.67, 1.68, 1.68, 1.69, 1.70,
    1.73, 1.76, 1.77, 1.78, 1.81, 1.82, 1.84, 1.84, 1.89, 2.00, 2.01, 2.24};

const std::vector<double> k_aluminum_coupons = {
    70, 90, 96, 97, 99, 100, 103, 104, 104, 105, 107, 108, 108, 108, 109, 109, 112, 112, 113,
    114, 114, 114, 116, 119, 120, 120, 120, 121, 121, 123, 124, 124, 124, 124, 124, 128, 128,
    129, 129, 130, 130, 130, 131, 131, 131, 131, 131, 132, 132, 133, 134, 134, 134, 134, 134,
    136, 136, 137, 138, 138, 138, 139, 139, 141, 141, 142, 142, 142, 142, 142, 142, 144, 144,
    145, 146, 148, 149, 151, 151, 152, 155, 156, 157, 157, 157, 157, 158, 159, 162, 163, 163,
    164, 166, 166, 168, 170, 174, 196, 212};

const std::vector<double> k_covid19 = {
    0.0557, 0.0559, 0.0617, 0.0649, 0.0683, 0.0709, 0.0711, 0.0736, 0.0737, 0.0739, 0.0741,
    0.0743, 0.0776, 0.0782, 0.0804, 0.0808, 0.0815, 0.0818, 0.0819, 0.0840, 0.0850, 0.0864,
    0.0867, 0.0869, 0.0901, 0.0904, 0.0907, 0.0914, 0.0943, 0.0946, 0.1009, 0.1134};

const std::vector<double> k_carbon_fibers = {
    3.7, 3.11, 4.42, 3.28, 3.75, 2.96, 3.39, 3.31, 3.15, 2.81, 1.41, 2.76, 3.19, 1.59, 2.17,
    3.51, 1.84, 1.61, 1.57, 1.89, 2.74, 3.27, 2.41, 3.09, 2.43, 2.53, 2.81, 3.31, 2.35, 2.77,
    0.39, 2.79, 1.08, 2.88, 2.73, 2.85, 2.55, 2.17, 2.97, 3.68, 2.03, 2.82, 2.50, 1.47, 3.22,
    2.83, 1.36, 1.84, 5.56, 1.12, 3.60, 3.11, 1.69, 4.90, 3.39, 1.59, 1.73, 1.71, 1.18, 4.38,
    2.68, 4.91, 1.57, 2.00, 2.87, 3.19, 1.87, 2.95, 0.81, 1.22, 5.08, 1.69, 3.15, 2.97, 2.93,
    3.33, 2.48, 1.25, 2.48, 2.03, 3.22, 2.55, 3.56, 2.38, 0.85, 1.80, 2.12, 3.65, 1.17, 2.17,
    2.67, 4.20, 3.68, 4.70, 2.56, 2.59, 1.61, 2.05, 1.92, 0.98};

const std::vector<double> k_ball_bearings = {
    17.88, 28, 92, 33, 41.52, 42.12, 45.60, 48.4, 51.84, 51.96, 54.12, 55.56, 67.8, 68.64, 68.88,
    84.12, 93.12, 98.64, 105.12, 105.84, 127.92, 128.04, 173.4};

// The published bearings listing prints "28, 92" where the classical data
// set has the single value 28.92.
std::vector<double> corrected_bearings() {
  std::vector<double> v = k_ball_bearings;
  v.erase(v.begin() + 1, v.begin() + 3);
  v.insert(v.begin() + 1, 28.92);
  return v;
}

}  // namespace

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names = {"glass_fibers",  "aluminum_coupons",
                                                 "covid19",       "carbon_fibers",
                                                 "ball_bearings", "ball_bearings_corrected"};
  return names;
}

Dataset builtin_dataset(std::string_view name) {
  auto make = [&](std::vector<double> v) {
    return Dataset{std::string(name), DataSource::builtin, std::move(v)};
  };
  if (name == "glass_fibers") return make(k_glass_fibers);
  if (name == "aluminum_coupons") return make(k_aluminum_coupons);
  if (name == "covid19") return make(k_covid19);
  if (name == "carbon_fibers") return make(k_carbon_fibers);
  if (name == "ball_bearings") return make(k_ball_bearings);
  if (name == "ball_bearings_corrected") return make(corrected_bearings());
  std::string valid;
  for (const auto& n : builtin_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw LookupError("unknown builtin data set '" + std::string(name) + "' (valid: " + valid + ")");
}

}  // namespace psomle
