#include "seasky/sonar_core.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace seasky {

const char* to_string(SonarSource source) {
  return source == SonarSource::kHorizontal ? "horizontal" : "vertical";
}

void SonarIntrinsics::validate() const {
  if (num_beams < 2) throw std::invalid_argument("num_beams must be >= 2");
  if (num_range_bins < 1)
    throw std::invalid_argument("num_range_bins must be positive");
  if (!(max_range > 0.0)) throw std::invalid_argument("max_range must be > 0");
  if (!(min_range >= 0.0 && min_range < max_range))
    throw std::invalid_argument("min_range must lie in [0, max_range)");
  if (!(bearing_min < bearing_max))
    throw std::invalid_argument("bearing_min must be < bearing_max");
  if (bearing_min < -kPi || bearing_max > kPi)
    throw std::invalid_argument("bearings must lie within [-pi, pi]");
  if (!(vertical_aperture > 0.0))
    throw std::invalid_argument("vertical_aperture must be > 0");
  if (bit_depth != 8 && bit_depth != 16)
    throw std::invalid_argument("bit_depth must be 8 or 16");
}

SonarIntrinsics SonarIntrinsics::horizontal_default() {
  SonarIntrinsics in;
  in.num_beams = 512;
  in.num_range_bins = 512;
  in.max_range = 10.0;
  in.bearing_min = deg2rad(-65.0);
  in.bearing_max = deg2rad(65.0);
  in.vertical_aperture = deg2rad(20.0);
  return in;
}

SonarIntrinsics SonarIntrinsics::vertical_default() {
  SonarIntrinsics in;
  in.num_beams = 256;
  in.num_range_bins = 512;
  in.max_range = 10.0;
  in.bearing_min = deg2rad(-22.5);
  in.bearing_max = deg2rad(22.5);
  in.vertical_aperture = deg2rad(20.0);
  return in;
}

PolarSonarImage::PolarSonarImage(SonarIntrinsics intrinsics, double timestamp)
    : intrinsics_(intrinsics), timestamp_(timestamp) {
  intrinsics_.validate();
  data_.assign(static_cast<std::size_t>(intrinsics_.num_beams) *
                   intrinsics_.num_range_bins,
               0.0);
}

PolarSonarImage::PolarSonarImage(SonarIntrinsics intrinsics,
                                 std::vector<double> data, double timestamp)
    : intrinsics_(intrinsics), data_(std::move(data)), timestamp_(timestamp) {
  intrinsics_.validate();
  const auto expected = static_cast<std::size_t>(intrinsics_.num_beams) *
                        intrinsics_.num_range_bins;
  if (data_.size() != expected) {
    throw std::invalid_argument("image data has " +
                                std::to_string(data_.size()) +
                                " cells, intrinsics require " +
                                std::to_string(expected));
  }
  for (double v : data_) {
    if (!(v >= 0.0)) throw std::invalid_argument("negative or NaN intensity");
  }
}

double PolarSonarImage::max_value() const {
  return data_.empty() ? 0.0 : *std::max_element(data_.begin(), data_.end());
}

double PolarSonarImage::min_value() const {
  return data_.empty() ? 0.0 : *std::min_element(data_.begin(), data_.end());
}

PolarSonarImage PolarSonarImage::with_data(std::vector<double> data) const {
  PolarSonarImage out;
  out.intrinsics_ = intrinsics_;
  out.timestamp_ = timestamp_;
  out.data_ = std::move(data);
  return out;
}

double bearing_of_column(const SonarIntrinsics& intrinsics, int column) {
  if (column < 0 || column >= intrinsics.num_beams) {
    throw std::out_of_range("column " + std::to_string(column) +
                            " outside [0, " +
                            std::to_string(intrinsics.num_beams) + ")");
  }
  if (column == intrinsics.num_beams - 1) return intrinsics.bearing_max;
  return intrinsics.bearing_min + column * intrinsics.bearing_step();
}

double range_of_bin(const SonarIntrinsics& intrinsics, int range_bin) {
  return intrinsics.min_range +
         (range_bin + 0.5) * intrinsics.range_resolution();
}

CartesianPoint project_planar(double range, double bearing, double intensity) {
  return {range * std::cos(bearing), range * std::sin(bearing), 0.0,
          intensity};
}

std::optional<PolarIndex> polar_index_of(const SonarIntrinsics& intrinsics,
                                         const CartesianPoint& point) {
  const double range = std::hypot(point.x, point.y);
  const double bearing = std::atan2(point.y, point.x);
  if (range < intrinsics.min_range || range > intrinsics.max_range)
    return std::nullopt;
  constexpr double kBearingSlack = 1e-12;
  if (bearing < intrinsics.bearing_min - kBearingSlack ||
      bearing > intrinsics.bearing_max + kBearingSlack)
    return std::nullopt;

  const int last_bin = intrinsics.num_range_bins - 1;
  const int bin = std::min(
      last_bin, static_cast<int>(std::floor((range - intrinsics.min_range) /
                                            intrinsics.range_resolution())));
  const int column = std::clamp(
      static_cast<int>(std::lround((bearing - intrinsics.bearing_min) /
                                   intrinsics.bearing_step())),
      0, intrinsics.num_beams - 1);
  return PolarIndex{bin, column};
}

}  // namespace seasky
