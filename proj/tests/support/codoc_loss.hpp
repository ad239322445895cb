#pragma once

// Reference loss and logit gradient for finite-difference checks of the
// dual-branch classifier.

#include <vector>

#include "apisift/codoc.hpp"
#include "apisift/rng.hpp"

namespace oracle {

inline double dual_loss(const apisift::codoc::CodocModel& m, const apisift::nn::Matrix& doc,
                        const apisift::nn::Matrix& code, const std::vector<int>& y) {
  const auto logits = apisift::codoc::forward(m, doc, code).head.output();
  double total = 0;
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const apisift::nn::Vector z = logits.row(r).transpose();
    total += apisift::nn::softmax_cross_entropy({z.data(), 3}, static_cast<std::size_t>(y[r])).loss;
  }
  return total;
}

inline apisift::nn::Matrix logit_grad(const apisift::nn::Matrix& logits, const std::vector<int>& y) {
  apisift::nn::Matrix g(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const apisift::nn::Vector z = logits.row(r).transpose();
    apisift::nn::Vector p = apisift::nn::softmax({z.data(), 3});
    p[y[r]] -= 1;
    g.row(r) = p.transpose();
  }
  return g;
}

inline apisift::nn::Matrix random_matrix(apisift::Rng& rng, Eigen::Index r, Eigen::Index c) {
  apisift::nn::Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

/// Finite-difference check of the full backward pass on one random batch.
inline apisift::nn::GradCheckResult check_dual_gradients(apisift::codoc::CodocModel& m, std::uint64_t seed,
                                                         Eigen::Index batch,
                                                         const apisift::nn::GradCheckOptions& opt = {}) {
  apisift::Rng rng(seed);
  const auto doc = random_matrix(rng, batch, static_cast<Eigen::Index>(m.config.doc_dim));
  const auto code = random_matrix(rng, batch, static_cast<Eigen::Index>(m.config.code_dim));
  std::vector<int> y;
  for (Eigen::Index i = 0; i < batch; ++i) y.push_back(static_cast<int>(rng.below(3)));
  const auto t = apisift::codoc::forward(m, doc, code);
  const auto g = apisift::codoc::backward(m, t, logit_grad(t.head.output(), y));
  return apisift::nn::check_gradients(
      apisift::codoc::param_slots(m, g), [&] { return dual_loss(m, doc, code, y); },
      [&] { return apisift::codoc::relu_pattern(m, apisift::codoc::forward(m, doc, code)); }, opt);
}

}  // namespace oracle
