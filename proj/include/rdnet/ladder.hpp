#pragma once

#include <vector>

namespace rdnet {

struct LadderQuery {
  int n = 2;
  double r = 2.0;
  double p0 = 2.1;
};

enum class LadderVerdict { Terminal, Stalls, Decreases, Capped };
const char* to_string(LadderVerdict v);

struct LadderResult {
  /// p_0, ..., p_{N0}; for stalls and decreases only the first two terms.
  std::vector<double> sequence;
  int N0 = 0;
  LadderVerdict verdict = LadderVerdict::Terminal;
  bool terminal() const { return verdict == LadderVerdict::Terminal; }
};

inline constexpr int kMaxLadderIterations = 10000;

/// Threshold (n+2)(r-1)/2 below which the recursion does not grow.
double ladder_threshold(int n, double r);

/// Iterates p_{N+1} = (n+2)(p_N/r) / (n+2 - 2 p_N/r) until p_N >= r(n+2)/2.
/// A p0 within 1e-12 (relative) of the threshold is reported as a fixed
/// point.
LadderResult ladder(const LadderQuery& q);

/// (n+2) / (r(n+2) - 2 p0). Requires threshold < p0 < r(n+2)/2.
double ladder_ratio_bound(const LadderQuery& q);

}  // namespace rdnet
