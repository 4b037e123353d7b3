#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace ssplab::detail {

// Gaussian elimination with partial pivoting on an n x n matrix with
// multiple right-hand sides (n x m, column-major by rhs index).
// Returns false if the matrix is numerically singular.
template <class T>
bool solve_dense(std::vector<T> m, int n, std::vector<T>& rhs, int nrhs) {
  auto mag = [](const T& v) {
    if constexpr (std::is_same_v<T, std::complex<double>>)
      return std::abs(v);
    else
      return std::abs(static_cast<double>(v));
  };
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (mag(m[static_cast<size_t>(r) * n + col]) > mag(m[static_cast<size_t>(piv) * n + col])) piv = r;
    if (mag(m[static_cast<size_t>(piv) * n + col]) < 1e-300) return false;
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(m[static_cast<size_t>(col) * n + j], m[static_cast<size_t>(piv) * n + j]);
      for (int k = 0; k < nrhs; ++k) std::swap(rhs[static_cast<size_t>(col) * nrhs + k], rhs[static_cast<size_t>(piv) * nrhs + k]);
    }
    const T d = m[static_cast<size_t>(col) * n + col];
    for (int r = col + 1; r < n; ++r) {
      const T f = m[static_cast<size_t>(r) * n + col] / d;
      if (f == T{}) continue;
      for (int j = col; j < n; ++j) m[static_cast<size_t>(r) * n + j] -= f * m[static_cast<size_t>(col) * n + j];
      for (int k = 0; k < nrhs; ++k) rhs[static_cast<size_t>(r) * nrhs + k] -= f * rhs[static_cast<size_t>(col) * nrhs + k];
    }
  }
  for (int col = n - 1; col >= 0; --col) {
    const T d = m[static_cast<size_t>(col) * n + col];
    for (int k = 0; k < nrhs; ++k) {
      T acc = rhs[static_cast<size_t>(col) * nrhs + k];
      for (int j = col + 1; j < n; ++j) acc -= m[static_cast<size_t>(col) * n + j] * rhs[static_cast<size_t>(j) * nrhs + k];
      rhs[static_cast<size_t>(col) * nrhs + k] = acc / d;
    }
  }
  return true;
}

}  // namespace ssplab::detail
