#include "camreloc/dataset.hpp"

#include <Eigen/SVD>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "camreloc/png_io.hpp"

namespace fs = std::filesystem;

namespace camreloc {

namespace {

std::string frame_name(std::size_t i, const char* ext) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06zu.%s", i, ext);
  return buf;
}

std::vector<std::vector<double>> read_number_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::MissingFile, path);
  }
  std::vector<std::vector<double>> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::vector<double> values;
    double v;
    while (ss >> v) values.push_back(v);
    if (!values.empty()) lines.push_back(std::move(values));
  }
  return lines;
}

// Accept small drift, reject garbage, return an exactly orthonormal R.
Mat3 checked_rotation(const Mat3& r, std::size_t frame) {
  const double deviation = (r.transpose() * r - Mat3::Identity()).norm();
  if (deviation > 1e-3 || r.determinant() < 0.0) {
    throw Error(ErrorCode::MalformedPose,
                "frame " + std::to_string(frame) + " rotation is not orthonormal");
  }
  const Eigen::JacobiSVD<Mat3> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

}  // namespace

void write_cloud_bin(const std::string& path, const PointCloud& cloud) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::MissingFile, "cannot write " + path);
  }
  for (const Vec3& p : cloud.points) {
    const float xyz[3] = {static_cast<float>(p.x()), static_cast<float>(p.y()),
                          static_cast<float>(p.z())};
    out.write(reinterpret_cast<const char*>(xyz), sizeof(xyz));
  }
}

PointCloud read_cloud_bin(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::MissingFile, path);
  }
  PointCloud cloud;
  float xyz[3];
  while (in.read(reinterpret_cast<char*>(xyz), sizeof(xyz))) {
    cloud.points.emplace_back(xyz[0], xyz[1], xyz[2]);
  }
  return cloud;
}

DatasetIndex load_dataset(const std::string& root) {
  const fs::path base(root);
  if (!fs::exists(base / "intrinsics.txt")) {
    throw Error(ErrorCode::MissingFile, (base / "intrinsics.txt").string());
  }
  const auto intr_lines = read_number_lines((base / "intrinsics.txt").string());
  if (intr_lines.size() != 1 || intr_lines[0].size() != 5) {
    throw Error(ErrorCode::InvalidArgument, "intrinsics.txt must hold fx fy cx cy skew");
  }
  DatasetIndex dataset;
  dataset.intrinsics = Intrinsics(intr_lines[0][0], intr_lines[0][1], intr_lines[0][2],
                                  intr_lines[0][3], intr_lines[0][4]);

  const auto pose_lines = read_number_lines((base / "poses.txt").string());
  const std::size_t n = pose_lines.size();
  if (n == 0) {
    throw Error(ErrorCode::CountMismatch, "poses.txt is empty");
  }

  std::vector<std::vector<double>> position_lines;
  const bool have_positions = fs::exists(base / "positions.txt");
  if (have_positions) {
    position_lines = read_number_lines((base / "positions.txt").string());
    if (position_lines.size() != n) {
      throw Error(ErrorCode::CountMismatch, "positions.txt count differs from poses.txt");
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    const auto& values = pose_lines[i];
    if (values.size() != 12) {
      throw Error(ErrorCode::MalformedPose, "pose line " + std::to_string(i) +
                                                " must hold 12 reals");
    }
    Mat3 r_cw;
    Vec3 c;
    for (int row = 0; row < 3; ++row) {
      for (int col = 0; col < 3; ++col) r_cw(row, col) = values[row * 4 + col];
      c[row] = values[row * 4 + 3];
    }
    const Mat3 r_clean = checked_rotation(r_cw, i);

    const fs::path image_path = base / "images" / frame_name(i, "png");
    const fs::path cloud_path = base / "clouds" / frame_name(i, "bin");
    if (!fs::exists(image_path)) {
      throw Error(ErrorCode::CountMismatch, "missing " + image_path.string());
    }
    if (!fs::exists(cloud_path)) {
      throw Error(ErrorCode::CountMismatch, "missing " + cloud_path.string());
    }

    DatasetFrame frame;
    frame.ref.id = static_cast<int>(i);
    frame.ref.image = read_png_gray8(image_path.string());
    frame.ref.cloud = read_cloud_bin(cloud_path.string());
    // Stored camera-to-world [R_cw | C]; pipelines use world-to-camera.
    frame.ref.pose = PoseSE3(r_clean.transpose(), -(r_clean.transpose() * c));
    frame.ground_position = have_positions
                                ? Vec2(position_lines[i][0], position_lines[i][1])
                                : Vec2(c.x(), c.y());
    dataset.frames.push_back(std::move(frame));
  }
  return dataset;
}

void write_dataset(const std::string& root, const DatasetIndex& dataset) {
  const fs::path base(root);
  fs::create_directories(base / "images");
  fs::create_directories(base / "clouds");

  {
    std::ofstream out(base / "intrinsics.txt");
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g %.17g %.17g\n",
                  dataset.intrinsics.fx, dataset.intrinsics.fy, dataset.intrinsics.cx,
                  dataset.intrinsics.cy, dataset.intrinsics.skew);
    out << buf;
  }
  {
    std::ofstream poses(base / "poses.txt");
    std::ofstream positions(base / "positions.txt");
    for (const auto& frame : dataset.frames) {
      // world-to-camera back to the stored camera-to-world convention
      const PoseSE3 cw = invert(frame.ref.pose);
      char buf[64];
      for (int row = 0; row < 3; ++row) {
        for (int col = 0; col < 4; ++col) {
          const double v = col < 3 ? cw.rotation()(row, col) : cw.translation()[row];
          std::snprintf(buf, sizeof(buf), "%.17g", v);
          poses << buf << (row == 2 && col == 3 ? "" : " ");
        }
      }
      poses << "\n";
      char pbuf[128];
      std::snprintf(pbuf, sizeof(pbuf), "%.17g %.17g\n", frame.ground_position.x(),
                    frame.ground_position.y());
      positions << pbuf;
    }
  }
  for (std::size_t i = 0; i < dataset.frames.size(); ++i) {
    write_png_gray8(dataset.frames[i].ref.image,
                    (base / "images" / frame_name(i, "png")).string());
    write_cloud_bin((base / "clouds" / frame_name(i, "bin")).string(),
                    dataset.frames[i].ref.cloud);
  }
}

}  // namespace camreloc
