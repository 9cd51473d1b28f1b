#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>

namespace gasrec {

// Spatial modules (regions, activity fields, recursion, sampling) work in
// d <= kMaxDimension. Potentials themselves are radial and accept any d.
inline constexpr int kMaxDimension = 3;

class Point {
public:
    Point() = default;

    explicit Point(int dimension) : dim_(dimension) {
        if (dimension < 1 || dimension > kMaxDimension) {
            throw std::invalid_argument("point dimension out of range");
        }
    }

    Point(std::initializer_list<double> coords) : Point(static_cast<int>(coords.size())) {
        std::size_t i = 0;
        for (double c : coords) c_[i++] = c;
    }

    static Point origin(int dimension) { return Point(dimension); }

    int dimension() const { return dim_; }
    double operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
    double& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }

    bool operator==(const Point& other) const {
        if (dim_ != other.dim_) return false;
        for (int i = 0; i < dim_; ++i) {
            if (c_[i] != other.c_[i]) return false;
        }
        return true;
    }

    friend Point operator-(const Point& a, const Point& b) {
        Point out(a.dim_);
        for (int i = 0; i < a.dim_; ++i) out.c_[i] = a.c_[i] - b.c_[i];
        return out;
    }

    friend Point operator+(const Point& a, const Point& b) {
        Point out(a.dim_);
        for (int i = 0; i < a.dim_; ++i) out.c_[i] = a.c_[i] + b.c_[i];
        return out;
    }

    double norm() const {
        if (dim_ == 1) return std::abs(c_[0]);
        double s = 0.0;
        for (int i = 0; i < dim_; ++i) s += c_[i] * c_[i];
        return std::sqrt(s);
    }

private:
    std::array<double, kMaxDimension> c_{};
    int dim_ = 1;
};

inline double dist(const Point& a, const Point& b) { return (a - b).norm(); }

}  // namespace gasrec
