#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <string>
#include <vector>

#include "scatopt/errors.hpp"

namespace scatopt {

/// Plain-text matrix, row-major, space-separated, one grid row per line.
/// Values are written with %.17g and round-trip exactly.
void write_matrix(const std::string& path, const Eigen::VectorXd& values,
                  int nx, int ny);
Eigen::VectorXd read_matrix(const std::string& path, int* nx, int* ny);

/// Complex matrix as "re,im" pairs, same layout.
void write_complex_matrix(const std::string& path,
                          const Eigen::VectorXcd& values, int nx, int ny);

/// 8-bit binary portable graymap; values clamped to [0,1]. Row 0 of the grid
/// is written at the bottom of the image.
void write_pgm(const std::string& path, const Eigen::VectorXd& values, int nx,
               int ny);

/// 24-bit binary portable pixmap; rgb has 3 bytes per pixel, row 0 at the top.
void write_ppm(const std::string& path, const std::vector<unsigned char>& rgb,
               int width, int height);

std::array<unsigned char, 3> hsv_to_rgb(double hue_deg, double sat, double val);

}  // namespace scatopt
