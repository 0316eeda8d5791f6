#include "intimg/field.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "intimg/error.hpp"

namespace intimg {

ScalarField2D::ScalarField2D(std::size_t nx, std::size_t ny, double pitch, double fill)
    : nx_(nx), ny_(ny), pitch_(pitch), values_(nx * ny, fill) {
    if (nx == 0 || ny == 0) throw DomainError("ScalarField2D: empty grid");
    if (!(pitch > 0.0) || !std::isfinite(pitch)) throw DomainError("ScalarField2D: pitch must be positive");
}

double ScalarField2D::sum() const {
    return std::accumulate(values_.begin(), values_.end(), 0.0);
}

double ScalarField2D::max() const {
    return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());
}

double ScalarField2D::min() const {
    return values_.empty() ? 0.0 : *std::min_element(values_.begin(), values_.end());
}

void ScalarField2D::scale(double factor) {
    for (double& v : values_) v *= factor;
}

double max_relative_difference(const ScalarField2D& a, const ScalarField2D& b) {
    if (a.nx() != b.nx() || a.ny() != b.ny()) throw DomainError("max_relative_difference: grid mismatch");
    double peak = 0.0;
    double diff = 0.0;
    const auto va = a.values();
    const auto vb = b.values();
    for (std::size_t k = 0; k < va.size(); ++k) {
        peak = std::max({peak, std::abs(va[k]), std::abs(vb[k])});
        diff = std::max(diff, std::abs(va[k] - vb[k]));
    }
    return peak > 0.0 ? diff / peak : diff;
}

double normalized_cross_correlation(const ScalarField2D& a, const ScalarField2D& b) {
    if (a.nx() != b.nx() || a.ny() != b.ny()) throw DomainError("normalized_cross_correlation: grid mismatch");
    const auto va = a.values();
    const auto vb = b.values();
    const double n = static_cast<double>(va.size());
    const double ma = std::accumulate(va.begin(), va.end(), 0.0) / n;
    const double mb = std::accumulate(vb.begin(), vb.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t k = 0; k < va.size(); ++k) {
        const double da = va[k] - ma;
        const double db = vb[k] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa <= 0.0 || sbb <= 0.0) throw DegenerateInputError("normalized_cross_correlation: constant field");
    return sab / std::sqrt(saa * sbb);
}

}  // namespace intimg
