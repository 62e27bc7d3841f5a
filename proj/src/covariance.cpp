#include "levex/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "levex/error.hpp"
#include "levex/special_fn.hpp"

namespace levex {
namespace {

constexpr double kRidgeLadder[] = {0.0, 1e-12, 1e-10, 1e-8, 1e-6};

double unit_profile(CovarianceKind kind, double r) {
  switch (kind) {
    case CovarianceKind::Exponential:
      return std::exp(-r);
    case CovarianceKind::Gaussian:
      return std::exp(-0.5 * r * r);
    case CovarianceKind::BesselJ0:
      return bessel_j0(r);
    case CovarianceKind::Sinc:
      if (r < 1e-8) return 1.0 - r * r / 6.0;
      return std::sin(r) / r;
    case CovarianceKind::UserTable:
      break;
  }
  fail(ErrorCode::InvalidArgument, "unit profile requested for a tabulated model");
}

void require_positive(double v, const char* what) {
  if (!std::isfinite(v) || v <= 0.0) {
    fail(ErrorCode::InvalidArgument, std::string(what) + " must be positive");
  }
}

}  // namespace

std::string_view to_string(CovarianceKind kind) {
  switch (kind) {
    case CovarianceKind::Exponential: return "exponential";
    case CovarianceKind::Gaussian: return "gaussian";
    case CovarianceKind::BesselJ0: return "bessel_j0";
    case CovarianceKind::Sinc: return "sinc";
    case CovarianceKind::UserTable: return "user_table";
  }
  return "unknown";
}

CovarianceKind covariance_kind_from_string(std::string_view name) {
  for (auto kind : {CovarianceKind::Exponential, CovarianceKind::Gaussian,
                    CovarianceKind::BesselJ0, CovarianceKind::Sinc,
                    CovarianceKind::UserTable}) {
    if (to_string(kind) == name) return kind;
  }
  fail(ErrorCode::Config, "unknown covariance kind '" + std::string(name) + "'");
}

CovarianceModel::CovarianceModel(CovarianceKind kind, double sigma2, double length_scale)
    : kind_(kind), sigma2_(sigma2), length_scale_(length_scale) {
  if (kind == CovarianceKind::UserTable) {
    fail(ErrorCode::InvalidArgument, "use CovarianceModel::from_table for tabulated models");
  }
  require_positive(sigma2, "sigma2");
  require_positive(length_scale, "length_scale");
  set_default_holder();
}

CovarianceModel CovarianceModel::from_table(Table knots, double length_scale) {
  require_positive(length_scale, "length_scale");
  if (knots.empty()) fail(ErrorCode::InvalidArgument, "covariance table is empty");
  if (knots.front().first != 0.0) {
    fail(ErrorCode::InvalidArgument, "covariance table must start at lag 0");
  }
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (!std::isfinite(knots[i].first) || !std::isfinite(knots[i].second)) {
      fail(ErrorCode::InvalidArgument, "covariance table entries must be finite");
    }
    if (i > 0 && knots[i].first <= knots[i - 1].first) {
      fail(ErrorCode::InvalidArgument, "covariance table lags must increase strictly");
    }
  }
  require_positive(knots.front().second, "table value at lag 0");
  CovarianceModel model;
  model.kind_ = CovarianceKind::UserTable;
  model.sigma2_ = knots.front().second;
  model.length_scale_ = length_scale;
  model.table_ = std::move(knots);
  model.set_default_holder();
  return model;
}

void CovarianceModel::set_default_holder() {
  double unit_k = 1.0;
  double alpha = 2.0;
  switch (kind_) {
    case CovarianceKind::Exponential: unit_k = 1.0; alpha = 1.0; break;
    case CovarianceKind::Gaussian: unit_k = 1.0; alpha = 2.0; break;
    case CovarianceKind::BesselJ0: unit_k = 0.25; alpha = 2.0; break;
    case CovarianceKind::Sinc: unit_k = 1.0 / 6.0; alpha = 2.0; break;
    case CovarianceKind::UserTable: {
      // For a piecewise-linear profile (C0 - C(h)) / h peaks at a knot.
      alpha = 1.0;
      double k = 0.0;
      for (std::size_t i = 1; i < table_.size(); ++i) {
        k = std::max(k, std::abs(sigma2_ - table_[i].second) / table_[i].first);
      }
      holder_k_ = k / length_scale_;
      holder_alpha_ = alpha;
      return;
    }
  }
  holder_k_ = unit_k * sigma2_ / std::pow(length_scale_, alpha);
  holder_alpha_ = alpha;
}

void CovarianceModel::set_holder(double k, double alpha) {
  require_positive(k, "holder K");
  if (!(alpha > 0.0 && alpha <= 2.0)) {
    fail(ErrorCode::InvalidArgument, "holder alpha must lie in (0, 2]");
  }
  holder_k_ = k;
  holder_alpha_ = alpha;
}

double CovarianceModel::at_distance(double r) const {
  if (!std::isfinite(r)) fail(ErrorCode::InvalidArgument, "lag must be finite");
  const double s = std::abs(r) / length_scale_;
  if (kind_ != CovarianceKind::UserTable) return sigma2_ * unit_profile(kind_, s);

  if (s >= table_.back().first) return table_.back().second;
  auto upper = std::upper_bound(table_.begin(), table_.end(), s,
                                [](double v, const auto& knot) { return v < knot.first; });
  auto lower = upper - 1;
  const double w = (s - lower->first) / (upper->first - lower->first);
  return (1.0 - w) * lower->second + w * upper->second;
}

double CovarianceModel::operator()(std::span<const double> lag) const {
  double sq = 0.0;
  for (double h : lag) {
    if (!std::isfinite(h)) fail(ErrorCode::InvalidArgument, "lag must be finite");
    sq += h * h;
  }
  return at_distance(std::sqrt(sq));
}

double evaluate(const CovarianceModel& model, std::span<const double> lag) {
  return model(lag);
}

Window::Window(std::vector<double> lo_in, std::vector<double> hi_in)
    : lo(std::move(lo_in)), hi(std::move(hi_in)) {
  if (lo.empty() || lo.size() != hi.size()) {
    fail(ErrorCode::InvalidArgument, "window bounds must be non-empty and of equal length");
  }
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]) || !(lo[i] < hi[i])) {
      fail(ErrorCode::InvalidArgument, "window requires finite bounds with lo < hi");
    }
  }
}

double Window::volume() const {
  double v = 1.0;
  for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
  return v;
}

bool Window::contains(std::span<const double> point, double tolerance) const {
  if (point.size() != dim()) return false;
  for (std::size_t i = 0; i < point.size(); ++i) {
    if (point[i] < lo[i] - tolerance || point[i] > hi[i] + tolerance) return false;
  }
  return true;
}

ObservationSet::ObservationSet(PointMatrix locations, Eigen::VectorXd values)
    : locations_(std::move(locations)), values_(std::move(values)) {
  if (locations_.rows() == 0 || locations_.cols() == 0) {
    fail(ErrorCode::InvalidArgument, "observation set must be non-empty");
  }
  if (locations_.rows() != values_.size()) {
    fail(ErrorCode::InvalidArgument, "observation locations and values differ in count");
  }
  if (!locations_.allFinite() || !values_.allFinite()) {
    fail(ErrorCode::InvalidArgument, "observations must be finite");
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(locations_.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  auto row_less = [this](Eigen::Index a, Eigen::Index b) {
    auto ra = row_span(locations_, a);
    auto rb = row_span(locations_, b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  };
  std::sort(order.begin(), order.end(), row_less);
  for (std::size_t i = 1; i < order.size(); ++i) {
    auto ra = row_span(locations_, order[i - 1]);
    auto rb = row_span(locations_, order[i]);
    if (std::equal(ra.begin(), ra.end(), rb.begin())) {
      fail(ErrorCode::DuplicateLocation,
           "observation location repeats (rows " + std::to_string(order[i - 1]) +
               " and " + std::to_string(order[i]) + ")");
    }
  }
}

std::span<const double> ObservationSet::location(std::size_t j) const {
  return row_span(locations_, static_cast<Eigen::Index>(j));
}

void ObservationSet::check_inside(const Window& window) const {
  if (window.dim() != dim()) {
    fail(ErrorCode::InvalidArgument, "observation dimension differs from window dimension");
  }
  for (std::size_t j = 0; j < size(); ++j) {
    if (!window.contains(location(j), 1e-9)) {
      fail(ErrorCode::InvalidArgument, "observation " + std::to_string(j) + " lies outside the window");
    }
  }
}

std::size_t ObservationSet::nearest(std::span<const double> t) const {
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < size(); ++j) {
    auto loc = location(j);
    double d2 = 0.0;
    for (std::size_t i = 0; i < loc.size(); ++i) {
      const double diff = t[i] - loc[i];
      d2 += diff * diff;
    }
    if (d2 < best_d2) {
      best_d2 = d2;
      best = j;
    }
  }
  return best;
}

CovarianceSystem CovarianceSystem::factorize(Eigen::MatrixXd sigma) {
  if (sigma.rows() == 0 || sigma.rows() != sigma.cols()) {
    fail(ErrorCode::InvalidArgument, "covariance matrix must be square and non-empty");
  }
  if (!sigma.allFinite()) fail(ErrorCode::Numerical, "covariance matrix has non-finite entries");
  CovarianceSystem system;
  system.sigma2_ = sigma.diagonal().maxCoeff();
  if (!(system.sigma2_ > 0.0)) {
    fail(ErrorCode::Numerical, "covariance matrix has a non-positive diagonal");
  }
  const Eigen::Index n = sigma.rows();
  for (double eps : kRidgeLadder) {
    const double ridge = eps * system.sigma2_;
    Eigen::MatrixXd shifted = sigma;
    shifted.diagonal().array() += ridge;
    system.llt_.compute(shifted);
    if (system.llt_.info() == Eigen::Success) {
      system.ridge_ = ridge;
      system.sigma_ = std::move(sigma);
      system.sigma_inv_e_ = system.llt_.solve(Eigen::VectorXd::Ones(n));
      return system;
    }
  }
  fail(ErrorCode::Numerical, "covariance matrix numerically singular");
}

Eigen::MatrixXd covariance_matrix(const CovarianceModel& model, const PointMatrix& points) {
  const Eigen::Index n = points.rows();
  const Eigen::Index d = points.cols();
  Eigen::MatrixXd sigma(n, n);
  std::vector<double> lag(static_cast<std::size_t>(d));
  for (Eigen::Index j = 0; j < n; ++j) {
    sigma(j, j) = model.sigma2();
    for (Eigen::Index l = j + 1; l < n; ++l) {
      for (Eigen::Index i = 0; i < d; ++i) lag[i] = points(l, i) - points(j, i);
      const double c = model(lag);
      sigma(l, j) = c;
      sigma(j, l) = c;
    }
  }
  return sigma;
}

CovarianceSystem build_sigma(const CovarianceModel& model, const ObservationSet& obs) {
  return CovarianceSystem::factorize(covariance_matrix(model, obs.locations()));
}

Eigen::VectorXd build_ct(const CovarianceModel& model, const ObservationSet& obs,
                         std::span<const double> t) {
  if (t.size() != obs.dim()) {
    fail(ErrorCode::InvalidArgument, "prediction point dimension differs from observations");
  }
  Eigen::VectorXd ct(static_cast<Eigen::Index>(obs.size()));
  std::vector<double> lag(t.size());
  for (std::size_t j = 0; j < obs.size(); ++j) {
    auto loc = obs.location(j);
    for (std::size_t i = 0; i < t.size(); ++i) lag[i] = t[i] - loc[i];
    ct[static_cast<Eigen::Index>(j)] = model(lag);
  }
  return ct;
}

}  // namespace levex
