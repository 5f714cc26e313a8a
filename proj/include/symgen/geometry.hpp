#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace symgen {

template <typename Scalar>
using Point2 = Eigen::Matrix<Scalar, 2, 1>;

/// Closed polygon, one column per vertex. The closing edge is implicit.
template <typename Scalar>
using Contour = Eigen::Matrix<Scalar, 2, Eigen::Dynamic>;

template <typename Scalar>
using Affine2 = Eigen::Transform<Scalar, 2, Eigen::Affine>;

template <typename Scalar>
struct Box {
  Point2<Scalar> min{Point2<Scalar>::Constant(std::numeric_limits<Scalar>::max())};
  Point2<Scalar> max{Point2<Scalar>::Constant(std::numeric_limits<Scalar>::lowest())};

  bool empty() const { return !(min.x() <= max.x() && min.y() <= max.y()); }
  Scalar width() const { return empty() ? Scalar(0) : max.x() - min.x(); }
  Scalar height() const { return empty() ? Scalar(0) : max.y() - min.y(); }
  Scalar area() const { return width() * height(); }
  Point2<Scalar> center() const { return (min + max) / Scalar(2); }

  void extend(const Point2<Scalar>& p) {
    min = min.cwiseMin(p);
    max = max.cwiseMax(p);
  }
};

/// Flattened glyph outline: polygons filled with the nonzero winding rule.
template <typename Scalar>
struct BasicOutline {
  std::vector<Contour<Scalar>> contours;

  bool empty() const {
    return std::all_of(contours.begin(), contours.end(),
                       [](const Contour<Scalar>& c) { return c.cols() < 3; });
  }

  Box<Scalar> bbox() const {
    Box<Scalar> box;
    for (const auto& c : contours) {
      if (c.cols() == 0) continue;
      box.min = box.min.cwiseMin(c.rowwise().minCoeff());
      box.max = box.max.cwiseMax(c.rowwise().maxCoeff());
    }
    return box;
  }

  /// Shoelace area summed over contours; the sign encodes orientation.
  Scalar signed_area() const {
    Scalar total = 0;
    for (const auto& c : contours) {
      const Eigen::Index n = c.cols();
      for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index j = (i + 1) % n;
        total += c(0, i) * c(1, j) - c(0, j) * c(1, i);
      }
    }
    return total / Scalar(2);
  }

  BasicOutline transformed(const Affine2<Scalar>& t) const {
    BasicOutline out;
    out.contours.reserve(contours.size());
    for (const auto& c : contours) out.contours.push_back(t * c.colwise().homogeneous());
    return out;
  }

  template <typename Other>
  BasicOutline<Other> cast() const {
    BasicOutline<Other> out;
    for (const auto& c : contours) out.contours.push_back(c.template cast<Other>());
    return out;
  }
};

using Outline = BasicOutline<double>;
using Box2d = Box<double>;

/// Moves every edge outward (away from the filled side) by `offset`, using
/// miter joins clamped to twice the offset. Holes shrink, strokes thicken.
template <typename Scalar>
BasicOutline<Scalar> embolden(const BasicOutline<Scalar>& in, Scalar offset) {
  // Filled region lies to the right of each edge when the total area is
  // negative (TrueType convention), to the left otherwise.
  const Scalar side = in.signed_area() < 0 ? Scalar(1) : Scalar(-1);
  BasicOutline<Scalar> out;
  out.contours.reserve(in.contours.size());
  for (const auto& c : in.contours) {
    const Eigen::Index n = c.cols();
    Contour<Scalar> moved(2, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Point2<Scalar> prev = c.col((i + n - 1) % n);
      const Point2<Scalar> cur = c.col(i);
      const Point2<Scalar> next = c.col((i + 1) % n);
      Point2<Scalar> e1 = cur - prev, e2 = next - cur;
      if (e1.norm() > 0) e1.normalize();
      if (e2.norm() > 0) e2.normalize();
      // Left normal times side = outward normal.
      const Point2<Scalar> n1 = side * Point2<Scalar>(-e1.y(), e1.x());
      const Point2<Scalar> n2 = side * Point2<Scalar>(-e2.y(), e2.x());
      const Scalar denom = Scalar(1) + n1.dot(n2);
      Point2<Scalar> miter = denom > Scalar(1e-6) ? Point2<Scalar>((n1 + n2) / denom)
                                                  : Point2<Scalar>(n1);
      const Scalar len = miter.norm();
      if (len > Scalar(2)) miter *= Scalar(2) / len;
      moved.col(i) = cur + offset * miter;
    }
    out.contours.push_back(std::move(moved));
  }
  return out;
}

/// x' = x + k * y (slants right for positive k with y pointing up).
template <typename Scalar>
BasicOutline<Scalar> shear_x(const BasicOutline<Scalar>& in, Scalar k) {
  Affine2<Scalar> t = Affine2<Scalar>::Identity();
  t.linear()(0, 1) = k;
  return in.transformed(t);
}

}  // namespace symgen
