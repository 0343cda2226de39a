// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace wetbeam {

using cdouble = std::complex<double>;
using cvec = Eigen::VectorXcd;
using cmat = Eigen::MatrixXcd;
using rvec = Eigen::VectorXd;
using rmat = Eigen::MatrixXd;
using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = 3.14159265358979323846;

} // namespace wetbeam
