#pragma once

#include "strips/geometry.hpp"

#include <string>
#include <vector>

namespace strips {

// Natural cubic spline through uniformly spaced samples on [0, L];
// backs custom curvature tables.
class CubicTable {
  public:
    CubicTable() = default;
    CubicTable(double length, std::vector<double> samples);
    double operator()(double s) const;
    double length() const { return length_; }

  private:
    double length_ = 1.0;
    std::vector<double> y_;
    std::vector<double> m_; // second derivatives at knots
};

struct PresetParams {
    double L = 3.141592653589793;
    double curvature = 1.0; // constant kappa of flat-arc / sphere-circle, amplitude of flat-sine
    double epsilon = 0.1;
};

// Named presets:
//   flat-line           kappa = 0,             K = 0
//   flat-arc            kappa = c,             K = 0
//   flat-sine           kappa = A sin(2 pi s/L), K = 0
//   sphere-geodesic     kappa = 0,             K = +1
//   hyperbolic-geodesic kappa = 0,             K = -1
//   sphere-circle       kappa = c,             K = +1
StripGeometry make_preset(const std::string& name, const PresetParams& params = {});

// Custom geometry from sampled tables (cubic interpolation in s).
// The Gauss table is constant in the normal direction.
StripGeometry make_custom(double L, std::vector<double> kappa_samples,
                          std::vector<double> gauss_samples, double epsilon);

std::vector<std::string> preset_names();

} // namespace strips
