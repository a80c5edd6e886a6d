#pragma once

#include <cmath>

namespace silkstage {

// Planar coordinates: y horizontal (between the grips), z vertical up.
struct Vec2 {
    double y = 0.0;
    double z = 0.0;

    Vec2 operator+(const Vec2& o) const { return {y + o.y, z + o.z}; }
    Vec2 operator-(const Vec2& o) const { return {y - o.y, z - o.z}; }
    Vec2 operator*(double s) const { return {y * s, z * s}; }
    Vec2 operator/(double s) const { return {y / s, z / s}; }
    Vec2& operator+=(const Vec2& o) { y += o.y; z += o.z; return *this; }
    Vec2& operator-=(const Vec2& o) { y -= o.y; z -= o.z; return *this; }
    Vec2& operator*=(double s) { y *= s; z *= s; return *this; }
    bool operator==(const Vec2& o) const = default;

    double norm() const { return std::sqrt(y * y + z * z); }
    double norm2() const { return y * y + z * z; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

} // namespace silkstage
