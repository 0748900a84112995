#include "strips/presets.hpp"

#include <cmath>
#include <utility>

namespace strips {

CubicTable::CubicTable(double length, std::vector<double> samples)
    : length_(length), y_(std::move(samples)) {
    const int n = static_cast<int>(y_.size());
    if (length_ <= 0.0)
        throw PreconditionViolated("CubicTable: length must be positive");
    if (n < 2)
        throw PreconditionViolated("CubicTable: need at least 2 samples");
    m_.assign(n, 0.0);
    if (n == 2)
        return;

    // tridiagonal solve for natural spline second derivatives
    const double h = length_ / (n - 1);
    std::vector<double> diag(n - 2, 4.0), rhs(n - 2);
    for (int i = 1; i <= n - 2; ++i)
        rhs[i - 1] = 6.0 * (y_[i - 1] - 2.0 * y_[i] + y_[i + 1]) / (h * h);
    for (int i = 1; i < n - 2; ++i) {
        const double w = 1.0 / diag[i - 1];
        diag[i] -= w;
        rhs[i] -= w * rhs[i - 1];
    }
    for (int i = n - 3; i >= 0; --i)
        m_[i + 1] = (rhs[i] - (i + 1 < n - 2 ? m_[i + 2] : 0.0)) / diag[i];
}

double CubicTable::operator()(double s) const {
    const int n = static_cast<int>(y_.size());
    const double h = length_ / (n - 1);
    const double x = std::clamp(s, 0.0, length_);
    int i = std::min(static_cast<int>(x / h), n - 2);
    const double a = (x - i * h) / h;
    const double b = 1.0 - a;
    return b * y_[i] + a * y_[i + 1] +
           h * h / 6.0 * ((b * b * b - b) * m_[i] + (a * a * a - a) * m_[i + 1]);
}

StripGeometry make_preset(const std::string& name, const PresetParams& p) {
    StripGeometry g;
    g.L = p.L;
    g.epsilon = p.epsilon;
    g.constant_gauss = true;

    const double c = p.curvature;
    const double L = p.L;
    if (name == "flat-line") {
        g.kappa = [](double) { return 0.0; };
        g.gauss_value = 0.0;
    } else if (name == "flat-arc") {
        g.kappa = [c](double) { return c; };
        g.gauss_value = 0.0;
    } else if (name == "flat-sine") {
        g.kappa = [c, L](double s) { return c * std::sin(2.0 * M_PI * s / L); };
        g.gauss_value = 0.0;
    } else if (name == "sphere-geodesic") {
        g.kappa = [](double) { return 0.0; };
        g.gauss_value = 1.0;
    } else if (name == "hyperbolic-geodesic") {
        g.kappa = [](double) { return 0.0; };
        g.gauss_value = -1.0;
    } else if (name == "sphere-circle") {
        g.kappa = [c](double) { return c; };
        g.gauss_value = 1.0;
    } else {
        throw ConfigError("unknown geometry preset: " + name);
    }
    g.gauss = [v = g.gauss_value](double, double) { return v; };
    return g;
}

StripGeometry make_custom(double L, std::vector<double> kappa_samples,
                          std::vector<double> gauss_samples, double epsilon) {
    StripGeometry g;
    g.L = L;
    g.epsilon = epsilon;
    CubicTable kap(L, std::move(kappa_samples));
    g.kappa = [kap](double s) { return kap(s); };
    if (gauss_samples.size() == 1) {
        g.constant_gauss = true;
        g.gauss_value = gauss_samples[0];
        g.gauss = [v = g.gauss_value](double, double) { return v; };
    } else {
        CubicTable K(L, std::move(gauss_samples));
        g.gauss = [K](double s, double) { return K(s); };
    }
    return g;
}

std::vector<std::string> preset_names() {
    return {"flat-line", "flat-arc", "flat-sine", "sphere-geodesic",
            "hyperbolic-geodesic", "sphere-circle"};
}

} // namespace strips
