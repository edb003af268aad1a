#include "msd/library.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace msd {

namespace {

void enumerate_terms(int dim, int max_degree, std::vector<int>& current, int pos, int remaining,
                     std::vector<std::vector<int>>& out) {
  if (pos == dim) {
    out.push_back(current);
    return;
  }
  for (int e = 0; e <= remaining; ++e) {
    current[pos] = e;
    enumerate_terms(dim, max_degree, current, pos + 1, remaining - e, out);
  }
  current[pos] = 0;
}

}  // namespace

PolynomialLibrary PolynomialLibrary::make(int dim, int max_degree) {
  if (dim < 1 || max_degree < 1) throw std::invalid_argument("PolynomialLibrary: dim and max_degree must be positive");
  PolynomialLibrary lib;
  lib.dim = dim;
  lib.max_degree = max_degree;
  std::vector<int> current(static_cast<size_t>(dim), 0);
  enumerate_terms(dim, max_degree, current, 0, max_degree, lib.terms);
  std::sort(lib.terms.begin(), lib.terms.end(), [](const std::vector<int>& a, const std::vector<int>& b) {
    const int da = std::accumulate(a.begin(), a.end(), 0);
    const int db = std::accumulate(b.begin(), b.end(), 0);
    if (da != db) return da < db;
    return a > b;  // within a degree: higher leading exponents first
  });
  return lib;
}

Eigen::Index PolynomialLibrary::index_of(const std::vector<int>& exponents) const {
  for (size_t j = 0; j < terms.size(); ++j)
    if (terms[j] == exponents) return static_cast<Eigen::Index>(j);
  throw std::invalid_argument("PolynomialLibrary::index_of: term not in library");
}

std::string PolynomialLibrary::term_name(Eigen::Index j) const {
  if (j < 0 || j >= size()) throw std::invalid_argument("term_name: index out of range");
  const auto& e = terms[static_cast<size_t>(j)];
  std::string out;
  for (int i = 0; i < dim; ++i) {
    if (e[static_cast<size_t>(i)] == 0) continue;
    if (!out.empty()) out += " ";
    out += "x" + std::to_string(i + 1);
    if (e[static_cast<size_t>(i)] > 1) out += "^" + std::to_string(e[static_cast<size_t>(i)]);
  }
  return out.empty() ? "1" : out;
}

Eigen::MatrixXd evaluate_library(const PolynomialLibrary& lib, const Eigen::MatrixXd& X) {
  if (X.cols() != lib.dim) throw std::invalid_argument("evaluate_library: state dimension mismatch");
  const Eigen::Index m = X.rows();
  const Eigen::Index p = lib.size();
  Eigen::MatrixXd Theta(m, p);
#pragma omp parallel for schedule(static) if (m > 512)
  for (Eigen::Index k = 0; k < m; ++k) {
    for (Eigen::Index j = 0; j < p; ++j) {
      const auto& e = lib.terms[static_cast<size_t>(j)];
      double v = 1.0;
      for (int i = 0; i < lib.dim; ++i)
        for (int rep = 0; rep < e[static_cast<size_t>(i)]; ++rep) v *= X(k, i);
      Theta(k, j) = v;
    }
  }
  return Theta;
}

}  // namespace msd
