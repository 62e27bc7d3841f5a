#include "levex/spd_solve.hpp"

#include "levex/error.hpp"

namespace levex {

namespace {
constexpr double kCollinearTolerance = 1e-10;
}

bool BQuantities::collinear() const {
  return discriminant() <= kCollinearTolerance * b0 * b2;
}

Eigen::VectorXd solve_spd(const CovarianceSystem& system, const Eigen::VectorXd& rhs) {
  if (static_cast<std::size_t>(rhs.size()) != system.size()) {
    fail(ErrorCode::InvalidArgument, "right-hand side length differs from system size");
  }
  if (!rhs.allFinite()) fail(ErrorCode::InvalidArgument, "right-hand side must be finite");
  return system.llt().solve(rhs);
}

BQuantities b_quantities(const CovarianceSystem& system, const Eigen::VectorXd& ct) {
  if (static_cast<std::size_t>(ct.size()) != system.size()) {
    fail(ErrorCode::InvalidArgument, "right-hand side length differs from system size");
  }
  if (!ct.allFinite()) fail(ErrorCode::InvalidArgument, "right-hand side must be finite");
  const auto L = system.llt().matrixL();
  BQuantities bq;
  bq.white_ct = L.solve(ct);
  bq.white_e = L.solve(Eigen::VectorXd::Ones(ct.size()));
  bq.sigma_inv_ct = system.llt().matrixU().solve(bq.white_ct);
  bq.sigma_inv_e = system.sigma_inv_e();
  bq.b0 = bq.white_ct.squaredNorm();
  bq.b1 = bq.white_ct.dot(bq.white_e);
  bq.b2 = bq.white_e.squaredNorm();
  bq.residual2 = (bq.white_ct - (bq.b1 / bq.b2) * bq.white_e).squaredNorm();
  return bq;
}

}  // namespace levex
