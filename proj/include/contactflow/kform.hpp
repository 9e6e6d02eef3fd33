#pragma once

#include "contactflow/chart.hpp"

#include <initializer_list>
#include <vector>

namespace contactflow {

namespace detail {

// Binomial table for dims at desk scale; forms never exceed dim 10 here.
constexpr int kMaxDim = 12;
long binomial(int n, int k);

// Strictly increasing k-tuples of {0..dim-1} are stored in colexicographic
// order; rank(I) = sum_m C(I[m], m+1).
long combo_rank(const std::vector<int>& tuple);
std::vector<int> combo_unrank(long rank, int dim, int k);
const std::vector<std::vector<int>>& combos(int dim, int k);

// Merge two disjoint increasing tuples; returns the permutation sign of
// concatenation-then-sort, or 0 if they overlap.
int merge_sign(const std::vector<int>& a, const std::vector<int>& b, std::vector<int>& merged);

}  // namespace detail

/**
 * Pointwise alternating k-form on a dim-dimensional chart.
 *
 * Coefficients are stored densely over the C(dim, k) strictly increasing
 * index tuples. Evaluation and the wedge product use the shuffle-sum
 * (determinant) convention with no factorial normalization, so that the
 * contact volume eta ^ (d eta)^n is a plain iterated product.
 */
class KForm {
 public:
  KForm() : dim_(0), degree_(0) {}

  KForm(int dim, int degree) : dim_(dim), degree_(degree) {
    if (degree < 0 || degree > dim)
      throw std::invalid_argument("KForm: degree out of range");
    coeffs_ = Vector::Zero(detail::binomial(dim, degree));
  }

  static KForm scalar(int dim, double value) {
    KForm f(dim, 0);
    f.coeffs_[0] = value;
    return f;
  }

  /// Elementary form c * dx^{i1} ^ ... ^ dx^{ik}; the axes need not be
  /// sorted, the sign of the sorting permutation is absorbed into the
  /// coefficient. Repeated axes give the zero form.
  static KForm basis(int dim, std::initializer_list<int> axes, double c = 1.0);

  static KForm covector(const Vector& components) {
    KForm f(static_cast<int>(components.size()), 1);
    f.coeffs_ = components;
    return f;
  }

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  const Vector& coefficients() const { return coeffs_; }
  Vector& coefficients() { return coeffs_; }

  double coefficient(const std::vector<int>& increasing_tuple) const;
  void set_coefficient(const std::vector<int>& increasing_tuple, double v);

  /// Multilinear evaluation on degree() argument vectors.
  double evaluate(const std::vector<Vector>& args) const;

  double max_abs() const { return coeffs_.size() ? coeffs_.cwiseAbs().maxCoeff() : 0.0; }

  KForm& operator+=(const KForm& o);
  KForm& operator-=(const KForm& o);
  KForm& operator*=(double s) { coeffs_ *= s; return *this; }

  friend KForm operator+(KForm a, const KForm& b) { a += b; return a; }
  friend KForm operator-(KForm a, const KForm& b) { a -= b; return a; }
  friend KForm operator*(double s, KForm a) { a *= s; return a; }
  friend KForm operator*(KForm a, double s) { a *= s; return a; }

 private:
  int dim_;
  int degree_;
  Vector coeffs_;
};

/// Shuffle-sum wedge product; associative and graded-commutative.
KForm wedge(const KForm& a, const KForm& b);

/// w ^ w ^ ... ^ w (k factors). k = 0 gives the scalar 1.
KForm wedge_power(const KForm& w, int k);

/// Interior product (i_v w)(u2..uk) = w(v, u2..uk).
KForm interior_product(const Vector& v, const KForm& w);

/// Coefficient-level pullback through a linear map: jac is the
/// (target dim) x (source dim) Jacobian, the result lives on the source.
KForm pullback_linear(const Matrix& jac, const KForm& w);

/// The single coefficient of a top-degree form relative to the coordinate
/// volume dx^0 ^ ... ^ dx^{dim-1}, orientation-signed.
double top_coefficient(const KForm& w);

/// Reinterpret w on a chart extended by one leading axis (axis indices
/// shift by one; the new axis does not appear in w).
KForm lift_leading_axis(const KForm& w);

}  // namespace contactflow
