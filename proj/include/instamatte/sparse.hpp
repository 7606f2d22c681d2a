#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace instamatte {

// Compressed sparse row matrix, square.
struct CsrMatrix {
  int rows = 0;
  std::vector<int> row_ptr;
  std::vector<int> cols;
  std::vector<double> values;

  std::size_t nonzeros() const noexcept { return values.size(); }
  double coeff(int i, int j) const;
  std::vector<double> diagonal() const;
  // out = A * x
  void multiply(std::span<const double> x, std::span<double> out) const;
};

struct CgOptions {
  // Stop once ||b - Ax|| <= tolerance * ||b - A x0||.
  double tolerance = 1e-6;
  int max_iterations = 2000;
  // Records 0.5 x'Ax - b'x after every iteration.
  bool track_energy = false;
};

struct CgResult {
  std::vector<double> x;
  int iterations = 0;
  // ||b - Ax|| / ||b - A x0||.
  double relative_residual = 0.0;
  bool converged = false;
  std::vector<double> energy;
};

// Jacobi-preconditioned conjugate gradient for symmetric positive definite A.
CgResult conjugate_gradient(const CsrMatrix& a, std::span<const double> b, std::span<const double> x0,
                            const CgOptions& options);

}  // namespace instamatte
