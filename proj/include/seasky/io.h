#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "seasky/associate.h"
#include "seasky/leading_edge.h"
#include "seasky/mapping.h"
#include "seasky/sonar_core.h"

namespace seasky {

// Unreadable or malformed input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shortest round-trip decimal form.
std::string format_double(double v);

// Writes to a sibling temporary and renames over `path`.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& contents);
std::string read_file(const std::filesystem::path& path);

// Binary PGM (P5), 8 or 16 bit by intrinsics.bit_depth. Intensities are
// rounded and clamped to the bit-depth range on write.
std::string encode_pgm(const PolarSonarImage& img);
// Pixel grid only, returned row-major with its dimensions and maxval.
struct PgmData {
  int width = 0;
  int height = 0;
  int maxval = 0;
  std::vector<double> pixels;
};
PgmData decode_pgm(const std::string& bytes);

// Sidecar metadata: num_beams, num_range_bins, max_range_m, bearing_min_deg,
// bearing_max_deg, vertical_aperture_deg, timestamp_s, optional blanking_m.
std::string encode_frame_metadata(const PolarSonarImage& img);
void decode_frame_metadata(const std::string& json, SonarIntrinsics& intrinsics,
                           double& timestamp);

// stem.pgm + stem.json.
void write_frame(const std::filesystem::path& stem, const PolarSonarImage& img);
// Throws DataError when the pair is missing, malformed or inconsistent.
PolarSonarImage read_frame(const std::filesystem::path& stem);

// Rows t,x,y,z,qx,qy,qz,qw with a header line.
std::string encode_trajectory_csv(const Trajectory& trajectory);
Trajectory decode_trajectory_csv(const std::string& text);

// Binary little-endian PLY: double x, y, z; uchar channel; double timestamp.
std::string encode_map_ply(const SeabedSkyMap& map);
std::vector<MapPoint> decode_map_ply(const std::string& bytes);

// "x y z channel timestamp" rows.
std::string encode_map_xyz(const SeabedSkyMap& map);

// "x y z intensity" rows with a "# channel:" header.
std::string encode_line_scan_xyz(const LineScan& scan);

// "x y z # h=<id> v=<id>" rows.
std::string encode_fused_xyz(const std::vector<FusedPoint>& points);

// Whitespace separated x y z [...] rows; '#' starts a comment.
std::vector<Eigen::Vector3d> decode_xyz(const std::string& text);

}  // namespace seasky
