#include "scatopt/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace scatopt {

void write_matrix(const std::string& path, const Eigen::VectorXd& values,
                  int nx, int ny) {
  if (values.size() != static_cast<Eigen::Index>(nx) * ny) {
    throw IoError("write_matrix: size mismatch for " + path);
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  char buf[64];
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", values[j * nx + i]);
      out << buf << (i + 1 < nx ? " " : "");
    }
    out << "\n";
  }
  if (!out) throw IoError("error while writing " + path);
}

Eigen::VectorXd read_matrix(const std::string& path, int* nx, int* ny) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<double> vals;
  std::string line;
  int cols = -1, rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    double v;
    int c = 0;
    while (ls >> v) {
      vals.push_back(v);
      ++c;
    }
    if (cols < 0) cols = c;
    else if (c != cols) throw IoError(path + ": ragged rows in matrix");
    ++rows;
  }
  if (rows == 0) throw IoError(path + ": empty matrix");
  *nx = cols;
  *ny = rows;
  return Eigen::Map<Eigen::VectorXd>(vals.data(),
                                     static_cast<Eigen::Index>(vals.size()));
}

void write_complex_matrix(const std::string& path,
                          const Eigen::VectorXcd& values, int nx, int ny) {
  if (values.size() != static_cast<Eigen::Index>(nx) * ny) {
    throw IoError("write_complex_matrix: size mismatch for " + path);
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  char buf[96];
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const auto v = values[j * nx + i];
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g", v.real(), v.imag());
      out << buf << (i + 1 < nx ? " " : "");
    }
    out << "\n";
  }
  if (!out) throw IoError("error while writing " + path);
}

void write_pgm(const std::string& path, const Eigen::VectorXd& values, int nx,
               int ny) {
  if (values.size() != static_cast<Eigen::Index>(nx) * ny) {
    throw IoError("write_pgm: size mismatch for " + path);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "P5\n" << nx << " " << ny << "\n255\n";
  for (int j = ny - 1; j >= 0; --j) {
    for (int i = 0; i < nx; ++i) {
      const double v = std::clamp(values[j * nx + i], 0.0, 1.0);
      out.put(static_cast<char>(std::lround(v * 255.0)));
    }
  }
  if (!out) throw IoError("error while writing " + path);
}

void write_ppm(const std::string& path, const std::vector<unsigned char>& rgb,
               int width, int height) {
  if (rgb.size() != static_cast<size_t>(width) * height * 3) {
    throw IoError("write_ppm: size mismatch for " + path);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "P6\n" << width << " " << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(rgb.data()),
            static_cast<std::streamsize>(rgb.size()));
  if (!out) throw IoError("error while writing " + path);
}

std::array<unsigned char, 3> hsv_to_rgb(double hue_deg, double sat,
                                        double val) {
  hue_deg = std::fmod(std::fmod(hue_deg, 360.0) + 360.0, 360.0);
  const double c = val * sat;
  const double hp = hue_deg / 60.0;
  const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  if (hp < 1) { r = c; g = x; }
  else if (hp < 2) { r = x; g = c; }
  else if (hp < 3) { g = c; b = x; }
  else if (hp < 4) { g = x; b = c; }
  else if (hp < 5) { r = x; b = c; }
  else { r = c; b = x; }
  const double m = val - c;
  auto u8 = [](double v) {
    return static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
  };
  return {u8(r + m), u8(g + m), u8(b + m)};
}

}  // namespace scatopt
