#pragma once

#include <cstdint>
#include <functional>

#include "ntp/model.hpp"

namespace ntp {

struct GradCheckReport {
  double max_rel_error = 0.0;
  int worst_row = 0;
  int worst_col = 0;
  double epsilon = 0.0;
};

/// Gradient of loss0: sum_x (T0(x) - e_{In(x)}) x^T.
Eigen::MatrixXd grad_ov(const Eigen::MatrixXd& w_ov, const Collocation& colloc,
                        const Vocabulary& vocab);

/// Gradient of the corpus loss in w_kq at fixed w_ov:
///   sum_n pi_n X (diag(phi) - phi phi^T) X^T w_ov^T (T(X) - e_label) x_L^T.
Eigen::MatrixXd grad_kq(const ModelParams& params, const Corpus& corpus);

/// Central-difference probe of `analytic` at `probes` seeded random entries
/// of `point`; relative error uses the denominator max(1, |analytic entry|).
GradCheckReport fd_check(const std::function<double(const Eigen::MatrixXd&)>& loss_fn,
                         const Eigen::MatrixXd& analytic, const Eigen::MatrixXd& point,
                         double epsilon, int probes, std::uint64_t seed);

}  // namespace ntp
