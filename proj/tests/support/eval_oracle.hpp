#pragma once

// High-precision reference implementations of the evaluation metrics,
// written from the textbook definitions.

#include <array>
#include <cstdint>
#include <vector>

#include "support/hp.hpp"

namespace oracle {

struct HPClass {
  HP precision, recall, f1;
};

struct HPMetrics {
  std::array<HPClass, 3> cls;
  HP accuracy, macro_f1, weighted_f1, weighted_precision, weighted_recall, kappa;
};

inline HPMetrics hp_metrics(const std::array<std::array<std::uint64_t, 3>, 3>& cm) {
  HPMetrics m;
  HP total = 0, diag = 0;
  std::array<HP, 3> row{}, col{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      total += cm[i][j];
      row[i] += cm[i][j];
      col[j] += cm[i][j];
      if (i == j) diag += cm[i][j];
    }
  m.macro_f1 = m.weighted_f1 = m.weighted_precision = m.weighted_recall = 0;
  for (int k = 0; k < 3; ++k) {
    const HP tp = cm[k][k];
    const HP fp = col[k] - tp;
    const HP fn = row[k] - tp;
    HPClass c;
    c.precision = tp + fp == 0 ? HP(0) : tp / (tp + fp);
    c.recall = tp + fn == 0 ? HP(0) : tp / (tp + fn);
    c.f1 = c.precision + c.recall == 0 ? HP(0) : 2 * c.precision * c.recall / (c.precision + c.recall);
    m.cls[k] = c;
    m.macro_f1 += c.f1 / 3;
    if (total > 0) {
      m.weighted_f1 += row[k] / total * c.f1;
      m.weighted_precision += row[k] / total * c.precision;
      m.weighted_recall += row[k] / total * c.recall;
    }
  }
  m.accuracy = total == 0 ? HP(0) : diag / total;
  HP pe = 0;
  for (int k = 0; k < 3; ++k) pe += total == 0 ? HP(0) : (row[k] / total) * (col[k] / total);
  m.kappa = pe == 1 ? HP(m.accuracy == 1 ? 1 : 0) : (m.accuracy - pe) / (1 - pe);
  return m;
}

inline HP hp_kappa(const std::vector<int>& a, const std::vector<int>& b, int categories) {
  const HP n = static_cast<double>(a.size());
  HP agree = 0;
  std::vector<HP> ca(categories, HP(0)), cb(categories, HP(0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) agree += 1;
    ca[a[i]] += 1;
    cb[b[i]] += 1;
  }
  const HP po = agree / n;
  HP pe = 0;
  for (int k = 0; k < categories; ++k) pe += (ca[k] / n) * (cb[k] / n);
  if (pe == 1) return po == 1 ? HP(1) : HP(0);
  return (po - pe) / (1 - pe);
}

}  // namespace oracle
