#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace msd {

/// Ordered monomial basis of total degree <= max_degree in `dim` variables.
/// Terms are graded: ascending total degree, and within a degree the
/// leading variable's exponent sorts first (1, x, y, x^2, xy, y^2, ...).
/// The constant term is always index 0.
struct PolynomialLibrary {
  int dim = 0;
  int max_degree = 0;
  std::vector<std::vector<int>> terms;  // exponent vectors of length dim

  static PolynomialLibrary make(int dim, int max_degree = 3);

  Eigen::Index size() const { return static_cast<Eigen::Index>(terms.size()); }

  /// Index of an exponent vector; throws if absent.
  Eigen::Index index_of(const std::vector<int>& exponents) const;

  /// Printable monomial, e.g. "x1^2 x3". Constant prints as "1".
  std::string term_name(Eigen::Index j) const;
};

/// Theta(X): column j is library term j evaluated on each row of X.
Eigen::MatrixXd evaluate_library(const PolynomialLibrary& lib, const Eigen::MatrixXd& X);

}  // namespace msd
