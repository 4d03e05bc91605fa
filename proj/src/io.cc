#include "seasky/io.h"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace seasky {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_file_atomic(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw std::runtime_error("short write to " + tmp.string());
    }
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string encode_pgm(const PolarSonarImage& img) {
  const int maxval = static_cast<int>(img.intrinsics().max_intensity());
  const bool wide = maxval > 255;
  std::string out = "P5\n" + std::to_string(img.cols()) + " " +
                    std::to_string(img.rows()) + "\n" + std::to_string(maxval) +
                    "\n";
  out.reserve(out.size() + img.data().size() * (wide ? 2 : 1));
  for (double v : img.data()) {
    const auto q = static_cast<unsigned>(
        std::clamp(std::floor(v + 0.5), 0.0, static_cast<double>(maxval)));
    if (wide) out.push_back(static_cast<char>(q >> 8));  // big-endian
    out.push_back(static_cast<char>(q & 0xFF));
  }
  return out;
}

PgmData decode_pgm(const std::string& bytes) {
  std::size_t pos = 0;
  auto next_token = [&]() {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
    const std::size_t start = pos;
    while (pos < bytes.size() &&
           !std::isspace(static_cast<unsigned char>(bytes[pos])))
      ++pos;
    return bytes.substr(start, pos - start);
  };
  auto next_int = [&]() {
    const std::string tok = next_token();
    int v = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || res.ec != std::errc() ||
        res.ptr != tok.data() + tok.size())
      throw DataError("malformed PGM header");
    return v;
  };
  if (next_token() != "P5") throw DataError("not a binary PGM (P5)");
  PgmData pgm;
  pgm.width = next_int();
  pgm.height = next_int();
  pgm.maxval = next_int();
  if (pgm.width <= 0 || pgm.height <= 0 || pgm.maxval <= 0 ||
      pgm.maxval > 65535)
    throw DataError("invalid PGM dimensions");
  ++pos;  // single whitespace after maxval
  const int bpp = pgm.maxval > 255 ? 2 : 1;
  const std::size_t n = static_cast<std::size_t>(pgm.width) * pgm.height;
  if (bytes.size() < pos + n * bpp) throw DataError("truncated PGM data");
  pgm.pixels.resize(n);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + pos);
  for (std::size_t i = 0; i < n; ++i) {
    pgm.pixels[i] = bpp == 2 ? (p[2 * i] << 8) | p[2 * i + 1] : p[i];
  }
  return pgm;
}

std::string encode_frame_metadata(const PolarSonarImage& img) {
  const auto& in = img.intrinsics();
  json j;
  j["num_beams"] = in.num_beams;
  j["num_range_bins"] = in.num_range_bins;
  j["max_range_m"] = in.max_range;
  j["bearing_min_deg"] = rad2deg(in.bearing_min);
  j["bearing_max_deg"] = rad2deg(in.bearing_max);
  j["vertical_aperture_deg"] = rad2deg(in.vertical_aperture);
  j["timestamp_s"] = img.timestamp();
  j["blanking_m"] = in.min_range;
  j["bit_depth"] = in.bit_depth;
  return j.dump(2) + "\n";
}

void decode_frame_metadata(const std::string& text, SonarIntrinsics& in,
                           double& timestamp) {
  try {
    const json j = json::parse(text);
    in.num_beams = j.at("num_beams").get<int>();
    in.num_range_bins = j.at("num_range_bins").get<int>();
    in.max_range = j.at("max_range_m").get<double>();
    in.bearing_min = deg2rad(j.at("bearing_min_deg").get<double>());
    in.bearing_max = deg2rad(j.at("bearing_max_deg").get<double>());
    in.vertical_aperture = deg2rad(j.at("vertical_aperture_deg").get<double>());
    in.min_range = j.value("blanking_m", 0.0);
    in.bit_depth = j.value("bit_depth", 8);
    timestamp = j.at("timestamp_s").get<double>();
    in.validate();
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed frame metadata: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("invalid frame metadata: ") + e.what());
  }
}

void write_frame(const fs::path& stem, const PolarSonarImage& img) {
  fs::path pgm = stem, meta = stem;
  pgm += ".pgm";
  meta += ".json";
  write_file_atomic(pgm, encode_pgm(img));
  write_file_atomic(meta, encode_frame_metadata(img));
}

PolarSonarImage read_frame(const fs::path& stem) {
  fs::path pgm_path = stem, meta_path = stem;
  pgm_path += ".pgm";
  meta_path += ".json";
  SonarIntrinsics in;
  double timestamp = 0.0;
  decode_frame_metadata(read_file(meta_path), in, timestamp);
  PgmData pgm = decode_pgm(read_file(pgm_path));
  if (pgm.width != in.num_beams || pgm.height != in.num_range_bins)
    throw DataError("PGM size does not match metadata for " + stem.string());
  if (pgm.maxval > 255) in.bit_depth = 16;
  return PolarSonarImage(in, std::move(pgm.pixels), timestamp);
}

std::string encode_trajectory_csv(const Trajectory& trajectory) {
  std::string out = "t,x,y,z,qx,qy,qz,qw\n";
  for (const auto& p : trajectory.poses()) {
    const double vals[] = {p.timestamp,      p.translation.x(), p.translation.y(),
                           p.translation.z(), p.rotation.x(),    p.rotation.y(),
                           p.rotation.z(),    p.rotation.w()};
    for (std::size_t i = 0; i < 8; ++i) {
      if (i) out += ',';
      out += format_double(vals[i]);
    }
    out += '\n';
  }
  return out;
}

Trajectory decode_trajectory_csv(const std::string& text) {
  std::vector<Pose> poses;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#' || line[0] == 't') continue;
    std::vector<double> vals;
    std::size_t start = 0;
    while (start <= line.size()) {
      const std::size_t end = std::min(line.find(',', start), line.size());
      std::string field = line.substr(start, end - start);
      field.erase(0, field.find_first_not_of(" \t\r"));
      field.erase(field.find_last_not_of(" \t\r") + 1);
      double v = 0.0;
      const auto res =
          std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || res.ec != std::errc())
        throw DataError("trajectory line " + std::to_string(line_no) +
                        ": bad number '" + field + "'");
      vals.push_back(v);
      start = end + 1;
    }
    if (vals.size() != 8)
      throw DataError("trajectory line " + std::to_string(line_no) +
                      ": expected 8 columns");
    Pose p;
    p.timestamp = vals[0];
    p.translation = {vals[1], vals[2], vals[3]};
    p.rotation = Eigen::Quaterniond(vals[7], vals[4], vals[5], vals[6]);
    if (std::abs(p.rotation.norm() - 1.0) > 1e-6)
      throw DataError("trajectory line " + std::to_string(line_no) +
                      ": quaternion is not unit");
    p.rotation.normalize();
    poses.push_back(p);
  }
  try {
    return Trajectory(std::move(poses));
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("invalid trajectory: ") + e.what());
  }
}

namespace {

template <typename T>
void put_le(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(buf, buf + sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T get_le(const char* p) {
  char buf[sizeof(T)];
  std::memcpy(buf, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(buf, buf + sizeof(T));
  T value;
  std::memcpy(&value, buf, sizeof(T));
  return value;
}

constexpr std::size_t kPlyRecord = 3 * 8 + 1 + 8;

}  // namespace

std::string encode_map_ply(const SeabedSkyMap& map) {
  std::string out =
      "ply\nformat binary_little_endian 1.0\n"
      "comment channel: 0=lidar 1=stereo 2=edge_h 3=edge_v\n"
      "element vertex " +
      std::to_string(map.points.size()) +
      "\nproperty double x\nproperty double y\nproperty double z\n"
      "property uchar channel\nproperty double timestamp\nend_header\n";
  out.reserve(out.size() + map.points.size() * kPlyRecord);
  for (const auto& p : map.points) {
    put_le(out, p.position.x());
    put_le(out, p.position.y());
    put_le(out, p.position.z());
    out.push_back(static_cast<char>(p.channel));
    put_le(out, p.timestamp);
  }
  return out;
}

std::vector<MapPoint> decode_map_ply(const std::string& bytes) {
  const std::string marker = "end_header\n";
  const auto end = bytes.find(marker);
  if (bytes.rfind("ply\n", 0) != 0 || end == std::string::npos)
    throw DataError("not a PLY file");
  const std::string header = bytes.substr(0, end);
  if (header.find("format binary_little_endian 1.0") == std::string::npos)
    throw DataError("unsupported PLY format");
  const std::string expected_props =
      "property double x\nproperty double y\nproperty double z\n"
      "property uchar channel\nproperty double timestamp\n";
  if (header.find(expected_props) == std::string::npos)
    throw DataError("unsupported PLY vertex layout");
  const auto vpos = header.find("element vertex ");
  if (vpos == std::string::npos) throw DataError("PLY has no vertex element");
  const std::size_t count = std::stoull(header.substr(vpos + 15));
  const std::size_t body = end + marker.size();
  if (bytes.size() < body + count * kPlyRecord)
    throw DataError("truncated PLY data");
  std::vector<MapPoint> points(count);
  const char* p = bytes.data() + body;
  for (auto& mp : points) {
    mp.position = {get_le<double>(p), get_le<double>(p + 8),
                   get_le<double>(p + 16)};
    const auto ch = static_cast<unsigned char>(p[24]);
    if (ch > 3) throw DataError("PLY channel byte out of range");
    mp.channel = static_cast<MapChannel>(ch);
    mp.timestamp = get_le<double>(p + 25);
    p += kPlyRecord;
  }
  return points;
}

std::string encode_map_xyz(const SeabedSkyMap& map) {
  std::string out = "# x y z channel timestamp\n";
  for (const auto& p : map.points) {
    out += format_double(p.position.x()) + ' ' + format_double(p.position.y()) +
           ' ' + format_double(p.position.z()) + ' ' + to_string(p.channel) +
           ' ' + format_double(p.timestamp) + '\n';
  }
  return out;
}

std::string encode_line_scan_xyz(const LineScan& scan) {
  std::string out = std::string("# channel: ") +
                    (scan.source == SonarSource::kHorizontal ? "edge_h"
                                                             : "edge_v") +
                    "\n# timestamp_s: " + format_double(scan.timestamp) +
                    "\n# x y z intensity\n";
  for (const auto& e : scan.points) {
    out += format_double(e.point.x) + ' ' + format_double(e.point.y) + ' ' +
           format_double(e.point.z) + ' ' + format_double(e.point.intensity) +
           '\n';
  }
  return out;
}

std::string encode_fused_xyz(const std::vector<FusedPoint>& points) {
  std::string out = "# channel: stereo\n# x y z # h_id v_id\n";
  for (const auto& p : points) {
    out += format_double(p.x) + ' ' + format_double(p.y) + ' ' +
           format_double(p.z) + " # h=" + std::to_string(p.h_id) +
           " v=" + std::to_string(p.v_id) + '\n';
  }
  return out;
}

std::vector<Eigen::Vector3d> decode_xyz(const std::string& text) {
  std::vector<Eigen::Vector3d> out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = line.substr(0, line.find('#'));
    std::istringstream fields(line);
    double x, y, z;
    if (!(fields >> x)) continue;  // blank or comment-only line
    if (!(fields >> y >> z))
      throw DataError("xyz line " + std::to_string(line_no) +
                      ": expected x y z");
    out.emplace_back(x, y, z);
  }
  return out;
}

}  // namespace seasky
