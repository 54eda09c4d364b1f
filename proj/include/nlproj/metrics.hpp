#pragma once

/// @file metrics.hpp Evaluation metrics: average optimality gap against a
/// reference solver, constraint-violation summaries, and active-set
/// agreement between two solution batches.

#include "nlproj/types.hpp"

#include <vector>

namespace nlproj {

/// Percent gap between mean objectives,
///   (mean(model) - mean(reference)) / |mean(model)| * 100.
/// NaN when the model mean vanishes (flagged rather than thrown).
inline double average_optimality_gap(const std::vector<double>& model_obj,
                                     const std::vector<double>& reference_obj) {
  require(model_obj.size() == reference_obj.size() && !model_obj.empty(),
          "average_optimality_gap: batch size mismatch");
  double mm = 0.0, mr = 0.0;
  for (size_t i = 0; i < model_obj.size(); ++i) {
    mm += model_obj[i];
    mr += reference_obj[i];
  }
  mm /= static_cast<double>(model_obj.size());
  mr /= static_cast<double>(model_obj.size());
  if (mm == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (mm - mr) / std::abs(mm) * 100.0;
}

/// Violation summary over a batch: max and mean of |h| entries, max and
/// mean of the positive parts of g (satisfied rows contribute zero to the
/// mean, not their slack).
struct ViolationSummary {
  double max_eq = 0.0;
  double mean_eq = 0.0;
  double max_ineq = 0.0;
  double mean_ineq = 0.0;
};

inline ViolationSummary compute_violations(const std::vector<Vec>& h_batch,
                                           const std::vector<Vec>& g_batch) {
  ViolationSummary s;
  long n_eq = 0, n_ineq = 0;
  for (const Vec& h : h_batch)
    for (Eigen::Index i = 0; i < h.size(); ++i) {
      const double v = std::abs(h[i]);
      s.max_eq = std::max(s.max_eq, v);
      s.mean_eq += v;
      ++n_eq;
    }
  for (const Vec& g : g_batch)
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      const double v = std::max(g[i], 0.0);
      s.max_ineq = std::max(s.max_ineq, v);
      s.mean_ineq += v;
      ++n_ineq;
    }
  if (n_eq > 0) s.mean_eq /= static_cast<double>(n_eq);
  if (n_ineq > 0) s.mean_ineq /= static_cast<double>(n_ineq);
  return s;
}

/// Fraction of (instance, constraint) pairs on which two multiplier batches
/// agree about activity at the threshold.
inline double active_set_agreement(const std::vector<Vec>& mu_a,
                                   const std::vector<Vec>& mu_b,
                                   double threshold = 1e-6) {
  require(mu_a.size() == mu_b.size(), "active_set_agreement: batch size mismatch");
  long total = 0, agree = 0;
  for (size_t k = 0; k < mu_a.size(); ++k) {
    require(mu_a[k].size() == mu_b[k].size(), "active_set_agreement: row count mismatch");
    for (Eigen::Index i = 0; i < mu_a[k].size(); ++i) {
      ++total;
      if ((mu_a[k][i] > threshold) == (mu_b[k][i] > threshold)) ++agree;
    }
  }
  if (total == 0) return 1.0;
  return static_cast<double>(agree) / static_cast<double>(total);
}

}  // namespace nlproj
