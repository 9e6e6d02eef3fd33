#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace contactflow {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Axis-aligned box used both as a chart domain and as an escape region
/// for flows.
struct Box {
  Vector lo;
  Vector hi;

  int dim() const { return static_cast<int>(lo.size()); }

  bool contains(const Vector& x) const {
    if (x.size() != lo.size()) return false;
    for (int i = 0; i < x.size(); ++i)
      if (!(x[i] >= lo[i] && x[i] <= hi[i])) return false;
    return true;
  }

  // True when x +- margin stays inside along every axis.
  bool interior(const Vector& x, double margin) const {
    for (int i = 0; i < x.size(); ++i)
      if (x[i] - margin < lo[i] || x[i] + margin > hi[i]) return false;
    return true;
  }

  Box inflated(double factor) const {
    Box out;
    Vector c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    out.lo = c - factor * h;
    out.hi = c + factor * h;
    return out;
  }

  double max_halfwidth() const { return 0.5 * (hi - lo).maxCoeff(); }

  static Box cube(int dim, double halfwidth) {
    Box b;
    b.lo = Vector::Constant(dim, -halfwidth);
    b.hi = Vector::Constant(dim, halfwidth);
    return b;
  }
};

/// A single named coordinate chart. Points are plain coordinate vectors in
/// the axis order given here; there is no atlas and no change-of-chart
/// machinery. Odd-dimensional contact charts list the Reeb-transverse
/// coordinate z first and then the conjugate pairs interleaved,
/// (z, q1, p1, ..., qn, pn); surface charts drop z.
struct Chart {
  std::string name;
  std::vector<std::string> axes;
  Box box;

  int dim() const { return static_cast<int>(axes.size()); }

  int axis(const std::string& label) const {
    for (int i = 0; i < dim(); ++i)
      if (axes[i] == label) return i;
    throw std::invalid_argument("chart '" + name + "' has no axis '" + label + "'");
  }

  bool contains(const Vector& x) const { return box.contains(x); }

  double scale() const { return box.max_halfwidth(); }

  /// Chart with axis k removed (used for graph surfaces and slice charts).
  Chart without_axis(int k, const std::string& new_name) const {
    Chart out;
    out.name = new_name;
    const int d = dim();
    out.box.lo.resize(d - 1);
    out.box.hi.resize(d - 1);
    int j = 0;
    for (int i = 0; i < d; ++i) {
      if (i == k) continue;
      out.axes.push_back(axes[i]);
      out.box.lo[j] = box.lo[i];
      out.box.hi[j] = box.hi[i];
      ++j;
    }
    return out;
  }

  /// Chart with a fresh axis prepended at index 0 (contactification and
  /// symplectification both extend by a leading line coordinate).
  Chart with_leading_axis(const std::string& axis_name, double lo, double hi,
                          const std::string& new_name) const {
    Chart out;
    out.name = new_name;
    out.axes.push_back(axis_name);
    out.axes.insert(out.axes.end(), axes.begin(), axes.end());
    const int d = dim();
    out.box.lo.resize(d + 1);
    out.box.hi.resize(d + 1);
    out.box.lo[0] = lo;
    out.box.hi[0] = hi;
    out.box.lo.tail(d) = box.lo;
    out.box.hi.tail(d) = box.hi;
    return out;
  }
};

/// Drop coordinate k of x (inverse of inserting a graph coordinate).
inline Vector drop_coordinate(const Vector& x, int k) {
  Vector out(x.size() - 1);
  int j = 0;
  for (int i = 0; i < x.size(); ++i)
    if (i != k) out[j++] = x[i];
  return out;
}

/// Insert value v as coordinate k.
inline Vector insert_coordinate(const Vector& x, int k, double v) {
  Vector out(x.size() + 1);
  for (int i = 0; i < k; ++i) out[i] = x[i];
  out[k] = v;
  for (int i = k; i < x.size(); ++i) out[i + 1] = x[i];
  return out;
}

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace contactflow
