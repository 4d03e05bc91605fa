#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace seasky {

inline constexpr double kPi = 3.14159265358979323846;

constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

enum class SonarSource { kHorizontal, kVertical };

const char* to_string(SonarSource source);

// Beam-range geometry of a multibeam forward-looking sonar. Columns are
// bearings on a uniform grid, rows are range bins of width range_resolution()
// starting at min_range (blanking distance, normally 0).
struct SonarIntrinsics {
  int num_beams = 512;
  int num_range_bins = 512;
  double max_range = 10.0;
  double min_range = 0.0;
  double bearing_min = deg2rad(-65.0);
  double bearing_max = deg2rad(65.0);
  double vertical_aperture = deg2rad(20.0);
  int bit_depth = 8;

  // Throws std::invalid_argument when any field violates its domain.
  void validate() const;

  double range_resolution() const {
    return (max_range - min_range) / num_range_bins;
  }
  double bearing_step() const {
    return (bearing_max - bearing_min) / (num_beams - 1);
  }
  double max_intensity() const { return (1 << bit_depth) - 1.0; }

  // Horizontal sonar: 130 deg / 512 beams; vertical sonar: 45 deg / 256 beams.
  static SonarIntrinsics horizontal_default();
  static SonarIntrinsics vertical_default();
};

struct CartesianPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double intensity = 0.0;
};

struct PolarIndex {
  int range_bin = 0;
  int column = 0;

  friend bool operator==(const PolarIndex&, const PolarIndex&) = default;
};

// Row-major intensity grid, rows = range bins, columns = beams.
class PolarSonarImage {
 public:
  PolarSonarImage() = default;
  explicit PolarSonarImage(SonarIntrinsics intrinsics, double timestamp = 0.0);
  PolarSonarImage(SonarIntrinsics intrinsics, std::vector<double> data,
                  double timestamp = 0.0);

  const SonarIntrinsics& intrinsics() const { return intrinsics_; }
  double timestamp() const { return timestamp_; }
  void set_timestamp(double t) { timestamp_ = t; }

  int rows() const { return intrinsics_.num_range_bins; }
  int cols() const { return intrinsics_.num_beams; }

  double& at(int row, int col) { return data_[index(row, col)]; }
  double at(int row, int col) const { return data_[index(row, col)]; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  double max_value() const;
  double min_value() const;

  // Same geometry and timestamp, new pixel buffer.
  PolarSonarImage with_data(std::vector<double> data) const;

 private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * intrinsics_.num_beams + col;
  }

  SonarIntrinsics intrinsics_;
  std::vector<double> data_;
  double timestamp_ = 0.0;
};

// Throws std::out_of_range for a column outside [0, num_beams).
double bearing_of_column(const SonarIntrinsics& intrinsics, int column);

// Center range of a bin: min_range + (bin + 0.5) * dr.
double range_of_bin(const SonarIntrinsics& intrinsics, int range_bin);

// Planar projection with zero elevation: (R cos t, R sin t, 0).
CartesianPoint project_planar(double range, double bearing,
                              double intensity = 0.0);

// Nearest (bin, column) of a point in the sonar's own plane; nullopt when
// the point falls outside [min_range, max_range] x [bearing_min, bearing_max].
std::optional<PolarIndex> polar_index_of(const SonarIntrinsics& intrinsics,
                                         const CartesianPoint& point);

}  // namespace seasky
