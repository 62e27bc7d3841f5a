#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace levex {

/// Points stored one per row, contiguous so a row can be viewed as a span.
using PointMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline std::span<const double> row_span(const PointMatrix& points, Eigen::Index i) {
  return {points.data() + i * points.cols(), static_cast<std::size_t>(points.cols())};
}

enum class CovarianceKind { Exponential, Gaussian, BesselJ0, Sinc, UserTable };

std::string_view to_string(CovarianceKind kind);
CovarianceKind covariance_kind_from_string(std::string_view name);

/// Stationary isotropic covariance C(h) = sigma2 * c(|h| / length_scale).
///
/// Unit profiles: exp(-r), exp(-r^2/2), J0(r), sin(r)/r. A user table holds
/// (lag, covariance) knots starting at lag 0; it is interpolated linearly,
/// mirrored to negative lags and held constant past the last knot. Hoelder
/// constants (|C(0) - C(h)| <= K |h|^alpha) default to the values matching
/// each profile, rescaled by sigma2 and length_scale.
class CovarianceModel {
 public:
  using Table = std::vector<std::pair<double, double>>;

  CovarianceModel(CovarianceKind kind, double sigma2, double length_scale = 1.0);

  static CovarianceModel from_table(Table knots, double length_scale = 1.0);

  CovarianceKind kind() const { return kind_; }
  double sigma2() const { return sigma2_; }
  double length_scale() const { return length_scale_; }
  double holder_k() const { return holder_k_; }
  double holder_alpha() const { return holder_alpha_; }
  const Table& table() const { return table_; }

  void set_holder(double k, double alpha);

  /// C at Euclidean distance r >= 0.
  double at_distance(double r) const;

  double operator()(std::span<const double> lag) const;

 private:
  CovarianceModel() = default;
  void set_default_holder();

  CovarianceKind kind_ = CovarianceKind::Exponential;
  double sigma2_ = 1.0;
  double length_scale_ = 1.0;
  double holder_k_ = 1.0;
  double holder_alpha_ = 1.0;
  Table table_;
};

double evaluate(const CovarianceModel& model, std::span<const double> lag);

/// Axis-aligned box W = prod [lo_i, hi_i].
struct Window {
  std::vector<double> lo;
  std::vector<double> hi;

  Window() = default;
  Window(std::vector<double> lo, std::vector<double> hi);
  static Window interval(double lo, double hi) { return Window({lo}, {hi}); }

  std::size_t dim() const { return lo.size(); }
  double volume() const;
  bool contains(std::span<const double> point, double tolerance = 0.0) const;
};

/// Observation locations (one row per point) and observed values.
class ObservationSet {
 public:
  /// Throws ErrorCode::DuplicateLocation if two rows coincide.
  ObservationSet(PointMatrix locations, Eigen::VectorXd values);

  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  std::size_t dim() const { return static_cast<std::size_t>(locations_.cols()); }
  const PointMatrix& locations() const { return locations_; }
  const Eigen::VectorXd& values() const { return values_; }
  std::span<const double> location(std::size_t j) const;

  /// Throws ErrorCode::InvalidArgument when a location lies outside.
  void check_inside(const Window& window) const;

  /// Index of the location closest to t; ties resolve to the lowest index.
  std::size_t nearest(std::span<const double> t) const;

 private:
  PointMatrix locations_;
  Eigen::VectorXd values_;
};

/// Sigma = (C(t_l - t_j)) with its Cholesky factor.
///
/// Factorization escalates a ridge eps * sigma2 * I through
/// eps in {0, 1e-12, 1e-10, 1e-8, 1e-6}; the first success is kept and
/// reported by ridge().
class CovarianceSystem {
 public:
  static CovarianceSystem factorize(Eigen::MatrixXd sigma);

  std::size_t size() const { return static_cast<std::size_t>(sigma_.rows()); }
  const Eigen::MatrixXd& sigma() const { return sigma_; }
  Eigen::MatrixXd chol() const { return llt_.matrixL(); }
  const Eigen::LLT<Eigen::MatrixXd>& llt() const { return llt_; }
  double ridge() const { return ridge_; }
  /// Reference variance: the common diagonal of Sigma.
  double sigma2() const { return sigma2_; }
  /// Sigma^{-1} e, cached at construction.
  const Eigen::VectorXd& sigma_inv_e() const { return sigma_inv_e_; }

 private:
  CovarianceSystem() = default;

  Eigen::MatrixXd sigma_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double ridge_ = 0.0;
  double sigma2_ = 0.0;
  Eigen::VectorXd sigma_inv_e_;
};

/// Covariance matrix of the model at arbitrary points (one row per point).
Eigen::MatrixXd covariance_matrix(const CovarianceModel& model,
                                  const PointMatrix& points);

CovarianceSystem build_sigma(const CovarianceModel& model,
                             const ObservationSet& obs);

/// c_t = (C(t - t_1), ..., C(t - t_n)).
Eigen::VectorXd build_ct(const CovarianceModel& model, const ObservationSet& obs,
                         std::span<const double> t);

}  // namespace levex
