#pragma once

#include <cstdint>
#include <string>

namespace dyad {

struct GradCheckResult {
  double max_rel_err = 0.0;
  size_t checked = 0;  // number of scalar derivatives compared
};

// Central finite differences against the analytic backward passes. The
// relative error of one derivative pair (a, n) is |a-n| / max(1, |a|, |n|).
// Each trial draws a fresh random configuration from `seed`.
GradCheckResult check_dense_gradients(uint64_t seed, int trials, double h);
GradCheckResult check_softmax_ce_gradients(uint64_t seed, int trials, double h);
GradCheckResult check_dropout_gradients(uint64_t seed, int trials, double h);
GradCheckResult check_lstm_gradients(uint64_t seed, int trials, double h);

// Gradient checks plus the numeric invariant suite (softmax normalization,
// ReLU idempotence, ln C initial loss, SGD fixed point, dropout statistics).
// Appends one line per check to `log`; returns false if any check fails.
bool run_selftest(std::string* log);

}  // namespace dyad
