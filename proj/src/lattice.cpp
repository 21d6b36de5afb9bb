#include "amalgact/lattice.hpp"

#include <cstdlib>
#include <numeric>
#include <utility>

#include "amalgact/error.hpp"

namespace amalgact {

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw Error("integer overflow in lattice reduction");
  return r;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw Error("integer overflow in lattice reduction");
  return r;
}

// Returns g = gcd(a, b) >= 0 with s*a + t*b == g.
std::int64_t ext_gcd(std::int64_t a, std::int64_t b, std::int64_t& s, std::int64_t& t) {
  std::int64_t old_r = a, r = b, old_s = 1, cur_s = 0, old_t = 0, cur_t = 1;
  while (r != 0) {
    std::int64_t q = old_r / r;
    std::int64_t tmp = old_r - q * r;
    old_r = r;
    r = tmp;
    tmp = old_s - q * cur_s;
    old_s = cur_s;
    cur_s = tmp;
    tmp = old_t - q * cur_t;
    old_t = cur_t;
    cur_t = tmp;
  }
  if (old_r < 0) {
    old_r = -old_r;
    old_s = -old_s;
    old_t = -old_t;
  }
  s = old_s;
  t = old_t;
  return old_r;
}

// rows p, q  <-  (a*Rp + b*Rq, c*Rp + d*Rq)
void combine(IntVector& rp, IntVector& rq, std::int64_t a, std::int64_t b, std::int64_t c,
             std::int64_t d) {
  for (std::size_t k = 0; k < rp.size(); ++k) {
    std::int64_t x = rp[k], y = rq[k];
    rp[k] = checked_add(checked_mul(a, x), checked_mul(b, y));
    rq[k] = checked_add(checked_mul(c, x), checked_mul(d, y));
  }
}

void axpy(IntVector& dst, const IntVector& src, std::int64_t f) {
  for (std::size_t k = 0; k < dst.size(); ++k) dst[k] = checked_add(dst[k], checked_mul(f, src[k]));
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

IntegerLattice::IntegerLattice(std::size_t dimension, std::vector<IntVector> generators)
    : dim_(dimension), gens_(std::move(generators)) {
  const std::size_t m = gens_.size();
  for (const auto& g : gens_) {
    if (g.size() != dim_) throw Error("lattice generator has wrong dimension");
  }
  std::vector<IntVector> rows = gens_;
  std::vector<IntVector> u(m, IntVector(m, 0));
  for (std::size_t i = 0; i < m; ++i) u[i][i] = 1;

  std::size_t p = 0;
  for (std::size_t col = 0; col < dim_ && p < m; ++col) {
    for (std::size_t i = p + 1; i < m; ++i) {
      if (rows[i][col] == 0) continue;
      std::int64_t a = rows[p][col], b = rows[i][col], s, t;
      std::int64_t g = ext_gcd(a, b, s, t);
      // unimodular: [s t; -b/g a/g]
      combine(rows[p], rows[i], s, t, -b / g, a / g);
      combine(u[p], u[i], s, t, -b / g, a / g);
    }
    if (rows[p][col] == 0) continue;
    if (rows[p][col] < 0) {
      for (auto& x : rows[p]) x = -x;
      for (auto& x : u[p]) x = -x;
    }
    // reduce entries above the pivot into [0, pivot)
    for (std::size_t r = 0; r < p; ++r) {
      std::int64_t f = floor_div(rows[r][col], rows[p][col]);
      if (f != 0) {
        axpy(rows[r], rows[p], -f);
        axpy(u[r], u[p], -f);
      }
    }
    pivots_.push_back(col);
    ++p;
  }
  basis_.assign(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(p));
  transform_.assign(u.begin(), u.begin() + static_cast<std::ptrdiff_t>(p));
  relations_.assign(u.begin() + static_cast<std::ptrdiff_t>(p), u.end());
}

std::optional<IntVector> IntegerLattice::coefficients(std::span<const std::int64_t> v) const {
  if (v.size() != dim_) throw Error("lattice query has wrong dimension");
  IntVector residual(v.begin(), v.end());
  IntVector x(basis_.size(), 0);
  for (std::size_t r = 0; r < basis_.size(); ++r) {
    const std::size_t col = pivots_[r];
    // columns before the pivot must already be cleared
    for (std::size_t c = (r == 0 ? 0 : pivots_[r - 1] + 1); c < col; ++c) {
      if (residual[c] != 0) return std::nullopt;
    }
    if (residual[col] % basis_[r][col] != 0) return std::nullopt;
    x[r] = residual[col] / basis_[r][col];
    axpy(residual, basis_[r], -x[r]);
  }
  for (auto c : residual) {
    if (c != 0) return std::nullopt;
  }
  IntVector coeffs(gens_.size(), 0);
  for (std::size_t r = 0; r < basis_.size(); ++r) axpy(coeffs, transform_[r], x[r]);
  return coeffs;
}

std::optional<std::int64_t> IntegerLattice::index() const {
  if (basis_.size() != dim_) return std::nullopt;
  std::int64_t det = 1;
  for (std::size_t r = 0; r < basis_.size(); ++r) det = checked_mul(det, basis_[r][pivots_[r]]);
  return det;
}

}  // namespace amalgact
