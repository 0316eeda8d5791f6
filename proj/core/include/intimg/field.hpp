#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace intimg {

/// Intensity sampled on a uniform grid centred on the origin.
///
/// Sample (i, j) sits at x = (i - (nx-1)/2) * pitch, y = (j - (ny-1)/2) * pitch and
/// is stored row-major (j is the row). With odd nx/ny the grid is exactly
/// symmetric: sample i and nx-1-i have coordinates of equal magnitude.
class ScalarField2D {
public:
    ScalarField2D() = default;
    ScalarField2D(std::size_t nx, std::size_t ny, double pitch, double fill = 0.0);

    std::size_t nx() const { return nx_; }
    std::size_t ny() const { return ny_; }
    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }
    double pitch() const { return pitch_; }

    double x(std::size_t i) const { return (static_cast<double>(i) - 0.5 * static_cast<double>(nx_ - 1)) * pitch_; }
    double y(std::size_t j) const { return (static_cast<double>(j) - 0.5 * static_cast<double>(ny_ - 1)) * pitch_; }

    double& operator()(std::size_t i, std::size_t j) { return values_[j * nx_ + i]; }
    double operator()(std::size_t i, std::size_t j) const { return values_[j * nx_ + i]; }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    double sum() const;
    double max() const;
    double min() const;

    /// Multiplies every sample by `factor`.
    void scale(double factor);

    bool same_geometry(const ScalarField2D& other) const {
        return nx_ == other.nx_ && ny_ == other.ny_ && pitch_ == other.pitch_;
    }

private:
    std::size_t nx_ = 0;
    std::size_t ny_ = 0;
    double pitch_ = 0.0;
    std::vector<double> values_;
};

/// Largest |a-b| / max(|a|max, |b|max) over two fields of equal geometry.
double max_relative_difference(const ScalarField2D& a, const ScalarField2D& b);

/// Zero-mean normalised cross-correlation of two equally sized fields, in [-1, 1].
double normalized_cross_correlation(const ScalarField2D& a, const ScalarField2D& b);

}  // namespace intimg
