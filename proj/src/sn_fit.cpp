#include <cmath>
#include <string>

#include <Eigen/Dense>
#include <boost/math/constants/constants.hpp>

#include "levytree/coeffs.hpp"
#include "levytree/stablefn.hpp"

namespace levytree {

SnFit estimate_Sn(double gamma, int N, double b_lo, double b_hi, int points) {
  check_gamma(gamma);
  if (N < 1 || N > 3) throw DomainError("estimate_Sn: N must be 1, 2 or 3");
  if (!(b_lo > 0 && b_hi > b_lo && b_hi < 700)) throw DomainError("estimate_Sn: need 0 < b_lo < b_hi < 700");
  if (points < 4 * N) throw DomainError("estimate_Sn: too few grid points");
  const double g = gamma, pi = boost::math::constants::pi<double>();
  const double norm = std::sqrt(2 * pi * (1 - 1 / g));
  Eigen::MatrixXd A(points, N);
  Eigen::VectorXd y(points);
  for (int i = 0; i < points; ++i) {
    double b = b_lo * std::pow(b_hi / b_lo, i / (points - 1.0));
    double u = 1 / b;  // u = X^{gamma-1}, x = (gamma-1) X
    double X = std::pow(u, 1 / (g - 1));
    double lhs = norm * std::exp((g + 1) / 2 * std::log(X) + b) * s_gamma((g - 1) * X, g);
    y(i) = lhs - 1;
    double p = 1;
    for (int n = 0; n < N; ++n) A(i, n) = (p *= u);
  }
  Eigen::VectorXd scale = A.colwise().norm().transpose();
  Eigen::MatrixXd As = A * scale.cwiseInverse().asDiagonal();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(As, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  double cond = sv(0) / sv(sv.size() - 1);
  if (!(cond < 1e10))
    throw QuadratureError("estimate_Sn: ill-conditioned fit (condition " + std::to_string(cond) + ")", cond, cond);
  Eigen::VectorXd c = svd.solve(y).cwiseQuotient(scale);
  SnFit fit;
  fit.S.assign(1, 1.0);
  for (int n = 0; n < N; ++n) fit.S.push_back(c(n));
  fit.residual = std::sqrt((A * c - y).squaredNorm() / points);
  fit.condition = cond;
  return fit;
}

}  // namespace levytree
