#include "contactflow/kform.hpp"

#include <algorithm>
#include <map>
#include <mutex>

namespace contactflow {
namespace detail {

long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

long combo_rank(const std::vector<int>& tuple) {
  long r = 0;
  for (size_t m = 0; m < tuple.size(); ++m) r += binomial(tuple[m], static_cast<int>(m) + 1);
  return r;
}

std::vector<int> combo_unrank(long rank, int dim, int k) {
  std::vector<int> out(k);
  for (int m = k; m >= 1; --m) {
    int v = m - 1;
    while (v + 1 < dim && binomial(v + 1, m) <= rank) ++v;
    out[m - 1] = v;
    rank -= binomial(v, m);
  }
  return out;
}

const std::vector<std::vector<int>>& combos(int dim, int k) {
  static std::map<std::pair<int, int>, std::vector<std::vector<int>>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(dim, k);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<std::vector<int>> list;
  const long count = binomial(dim, k);
  list.reserve(count);
  for (long r = 0; r < count; ++r) list.push_back(combo_unrank(r, dim, k));
  return cache.emplace(key, std::move(list)).first->second;
}

int merge_sign(const std::vector<int>& a, const std::vector<int>& b, std::vector<int>& merged) {
  merged.clear();
  merged.reserve(a.size() + b.size());
  size_t i = 0, j = 0;
  // Count the transpositions needed to interleave b into a: each element of
  // b drawn while elements of a remain ahead of it crosses all of them.
  long crossings = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) return 0;
    if (a[i] < b[j]) {
      merged.push_back(a[i++]);
    } else {
      merged.push_back(b[j++]);
      crossings += static_cast<long>(a.size() - i);
    }
  }
  while (i < a.size()) merged.push_back(a[i++]);
  while (j < b.size()) merged.push_back(b[j++]);
  return (crossings % 2 == 0) ? 1 : -1;
}

}  // namespace detail

KForm KForm::basis(int dim, std::initializer_list<int> axes, double c) {
  KForm f(dim, static_cast<int>(axes.size()));
  std::vector<int> idx(axes);
  for (int a : idx)
    if (a < 0 || a >= dim) throw std::invalid_argument("KForm::basis: axis out of range");
  // Sort, tracking the permutation sign; duplicates annihilate the form.
  int sign = 1;
  for (size_t i = 0; i + 1 < idx.size(); ++i)
    for (size_t j = 0; j + 1 < idx.size() - i; ++j) {
      if (idx[j] == idx[j + 1]) return KForm(dim, static_cast<int>(axes.size()));
      if (idx[j] > idx[j + 1]) {
        std::swap(idx[j], idx[j + 1]);
        sign = -sign;
      }
    }
  f.coeffs_[detail::combo_rank(idx)] = sign * c;
  return f;
}

double KForm::coefficient(const std::vector<int>& tuple) const {
  return coeffs_[detail::combo_rank(tuple)];
}

void KForm::set_coefficient(const std::vector<int>& tuple, double v) {
  coeffs_[detail::combo_rank(tuple)] = v;
}

double KForm::evaluate(const std::vector<Vector>& args) const {
  if (static_cast<int>(args.size()) != degree_)
    throw std::invalid_argument("KForm::evaluate: wrong argument count");
  if (degree_ == 0) return coeffs_[0];
  for (const auto& v : args)
    if (v.size() != dim_) throw std::invalid_argument("KForm::evaluate: dimension mismatch");
  const auto& tuples = detail::combos(dim_, degree_);
  Matrix minor(degree_, degree_);
  double total = 0.0;
  for (size_t r = 0; r < tuples.size(); ++r) {
    const double c = coeffs_[r];
    if (c == 0.0) continue;
    for (int row = 0; row < degree_; ++row)
      for (int col = 0; col < degree_; ++col) minor(row, col) = args[col][tuples[r][row]];
    total += c * minor.determinant();
  }
  return total;
}

KForm& KForm::operator+=(const KForm& o) {
  if (o.dim_ != dim_ || o.degree_ != degree_)
    throw std::invalid_argument("KForm: mismatched shapes in +=");
  coeffs_ += o.coeffs_;
  return *this;
}

KForm& KForm::operator-=(const KForm& o) {
  if (o.dim_ != dim_ || o.degree_ != degree_)
    throw std::invalid_argument("KForm: mismatched shapes in -=");
  coeffs_ -= o.coeffs_;
  return *this;
}

KForm wedge(const KForm& a, const KForm& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("wedge: dimension mismatch");
  const int dim = a.dim();
  const int k = a.degree(), l = b.degree();
  if (k + l > dim) throw std::invalid_argument("wedge: degree overflow");
  KForm out(dim, k + l);
  if (k == 0) { out = b; out *= a.coefficients()[0]; return out; }
  if (l == 0) { out = a; out *= b.coefficients()[0]; return out; }
  const auto& ta = detail::combos(dim, k);
  const auto& tb = detail::combos(dim, l);
  std::vector<int> merged;
  for (size_t ra = 0; ra < ta.size(); ++ra) {
    const double ca = a.coefficients()[ra];
    if (ca == 0.0) continue;
    for (size_t rb = 0; rb < tb.size(); ++rb) {
      const double cb = b.coefficients()[rb];
      if (cb == 0.0) continue;
      const int sign = detail::merge_sign(ta[ra], tb[rb], merged);
      if (sign == 0) continue;
      out.coefficients()[detail::combo_rank(merged)] += sign * ca * cb;
    }
  }
  return out;
}

KForm wedge_power(const KForm& w, int k) {
  if (k < 0) throw std::invalid_argument("wedge_power: negative exponent");
  KForm out = KForm::scalar(w.dim(), 1.0);
  for (int i = 0; i < k; ++i) out = wedge(out, w);
  return out;
}

KForm interior_product(const Vector& v, const KForm& w) {
  if (v.size() != w.dim()) throw std::invalid_argument("interior_product: dimension mismatch");
  if (w.degree() < 1) throw std::invalid_argument("interior_product: degree-0 form");
  const int dim = w.dim(), k = w.degree();
  KForm out(dim, k - 1);
  const auto& tuples = detail::combos(dim, k);
  std::vector<int> rest(k - 1);
  for (size_t r = 0; r < tuples.size(); ++r) {
    const double c = w.coefficients()[r];
    if (c == 0.0) continue;
    const auto& I = tuples[r];
    for (int m = 0; m < k; ++m) {
      const double vm = v[I[m]];
      if (vm == 0.0) continue;
      int j = 0;
      for (int i = 0; i < k; ++i)
        if (i != m) rest[j++] = I[i];
      const double sign = (m % 2 == 0) ? 1.0 : -1.0;
      out.coefficients()[detail::combo_rank(rest)] += sign * vm * c;
    }
  }
  return out;
}

KForm pullback_linear(const Matrix& jac, const KForm& w) {
  if (jac.rows() != w.dim()) throw std::invalid_argument("pullback_linear: Jacobian rows != form dim");
  if (!jac.allFinite()) throw NumericalError("pullback_linear: non-finite Jacobian entries");
  const int src = static_cast<int>(jac.cols());
  const int k = w.degree();
  if (k > src) return KForm(src, src);  // pulls back to zero: too few source directions
  KForm out(src, k);
  if (k == 0) {
    out.coefficients()[0] = w.coefficients()[0];
    return out;
  }
  // Cauchy-Binet: (map* w)_I = sum_K w_K det(jac[K, I]).
  const auto& tk = detail::combos(w.dim(), k);
  const auto& ti = detail::combos(src, k);
  Matrix minor(k, k);
  for (size_t ri = 0; ri < ti.size(); ++ri) {
    double acc = 0.0;
    for (size_t rk = 0; rk < tk.size(); ++rk) {
      const double c = w.coefficients()[rk];
      if (c == 0.0) continue;
      for (int row = 0; row < k; ++row)
        for (int col = 0; col < k; ++col) minor(row, col) = jac(tk[rk][row], ti[ri][col]);
      acc += c * minor.determinant();
    }
    out.coefficients()[ri] = acc;
  }
  return out;
}

double top_coefficient(const KForm& w) {
  if (w.degree() != w.dim()) throw std::invalid_argument("top_coefficient: degree != dim");
  return w.coefficients()[0];
}

KForm lift_leading_axis(const KForm& w) {
  KForm out(w.dim() + 1, w.degree());
  const auto& tuples = detail::combos(w.dim(), w.degree());
  std::vector<int> shifted(w.degree());
  for (size_t r = 0; r < tuples.size(); ++r) {
    const double c = w.coefficients()[r];
    if (c == 0.0) continue;
    for (int i = 0; i < w.degree(); ++i) shifted[i] = tuples[r][i] + 1;
    out.set_coefficient(shifted, c);
  }
  return out;
}

}  // namespace contactflow

