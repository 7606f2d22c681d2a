#include "instamatte/sparse.hpp"

#include <algorithm>
#include <cmath>

#include "instamatte/error.hpp"

namespace instamatte {

double CsrMatrix::coeff(int i, int j) const {
  const auto begin = cols.begin() + row_ptr[i];
  const auto end = cols.begin() + row_ptr[i + 1];
  const auto it = std::lower_bound(begin, end, j);
  if (it == end || *it != j) return 0.0;
  return values[static_cast<std::size_t>(it - cols.begin())];
}

std::vector<double> CsrMatrix::diagonal() const {
  std::vector<double> d(static_cast<std::size_t>(rows));
  for (int i = 0; i < rows; ++i) d[i] = coeff(i, i);
  return d;
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> out) const {
  for (int i = 0; i < rows; ++i) {
    double acc = 0.0;
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) acc += values[k] * x[cols[k]];
    out[i] = acc;
  }
}

namespace {

// Residuals below this fraction of ||b|| are rounding noise.
constexpr double kResidualFloor = 1e-14;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double energy(const CsrMatrix& a, std::span<const double> b, std::span<const double> x,
              std::vector<double>& scratch) {
  a.multiply(x, scratch);
  return 0.5 * dot(x, scratch) - dot(b, x);
}

}  // namespace

CgResult conjugate_gradient(const CsrMatrix& a, std::span<const double> b, std::span<const double> x0,
                            const CgOptions& options) {
  const std::size_t n = static_cast<std::size_t>(a.rows);
  if (b.size() != n || x0.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "conjugate gradient operand sizes differ");
  }

  CgResult result;
  result.x.assign(x0.begin(), x0.end());
  std::vector<double> inv_diag = a.diagonal();
  for (double& d : inv_diag) d = d > 0.0 ? 1.0 / d : 1.0;

  std::vector<double> r(n), z(n), p(n), ap(n);
  a.multiply(result.x, ap);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];

  // Convergence is measured against the initial residual: the penalty rows
  // dominate ||b|| and are already satisfied by a trimap-derived start, so a
  // ||b||-relative test would stop before the Unknown pixels move at all.
  const double b_norm = std::sqrt(dot(b, b));
  const double r0_norm = std::sqrt(dot(r, r));
  const double scale = r0_norm > 0.0 ? r0_norm : 1.0;
  const double floor = kResidualFloor * (b_norm > 0.0 ? b_norm : 1.0) / scale;
  const double target = std::max(options.tolerance, floor);
  double residual = r0_norm > 0.0 ? 1.0 : 0.0;

  if (options.track_energy) result.energy.push_back(energy(a, b, result.x, ap));

  for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
  p = z;
  double rz = dot(r, z);

  int it = 0;
  while (residual > target && it < options.max_iterations) {
    a.multiply(p, ap);
    const double pap = dot(p, ap);
    if (!(pap > 0.0)) break;
    const double step = rz / pap;
    for (std::size_t i = 0; i < n; ++i) {
      result.x[i] += step * p[i];
      r[i] -= step * ap[i];
    }
    ++it;
    residual = std::sqrt(dot(r, r)) / scale;
    if (options.track_energy) result.energy.push_back(energy(a, b, result.x, ap));
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }

  result.iterations = it;
  result.relative_residual = residual;
  result.converged = residual <= target;
  return result;
}

}  // namespace instamatte
