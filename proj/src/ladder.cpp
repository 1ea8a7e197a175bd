#include "rdnet/ladder.hpp"

#include <cmath>

#include "rdnet/error.hpp"

namespace rdnet {

namespace {

void validate(const LadderQuery& q) {
  if (q.n < 1) throw PreconditionError("ladder: n must be at least 1");
  if (!(q.r >= 1.0) || !std::isfinite(q.r)) throw PreconditionError("ladder: r must be at least 1");
  if (!(q.p0 > 1.0) || !std::isfinite(q.p0)) throw PreconditionError("ladder: p0 must exceed 1");
}

double step(int n, double r, double p) {
  const double s = p / r;
  const double den = n + 2 - 2.0 * s;
  if (den <= 0.0) return INFINITY;  // 1/0 = infinity
  return (n + 2) * s / den;
}

}  // namespace

const char* to_string(LadderVerdict v) {
  switch (v) {
    case LadderVerdict::Terminal: return "terminal";
    case LadderVerdict::Stalls: return "stalls";
    case LadderVerdict::Decreases: return "decreases";
    case LadderVerdict::Capped: return "capped";
  }
  return "?";
}

double ladder_threshold(int n, double r) { return (n + 2) * (r - 1.0) / 2.0; }

LadderResult ladder(const LadderQuery& q) {
  validate(q);
  LadderResult res;
  const double target = q.r * (q.n + 2) / 2.0;
  const double threshold = ladder_threshold(q.n, q.r);
  res.sequence.push_back(q.p0);
  if (q.p0 >= target) return res;
  if (std::abs(q.p0 - threshold) <= 1e-12 * std::max(1.0, threshold)) {
    res.verdict = LadderVerdict::Stalls;
    res.sequence.push_back(step(q.n, q.r, q.p0));
    return res;
  }
  if (q.p0 < threshold) {
    res.verdict = LadderVerdict::Decreases;
    res.sequence.push_back(step(q.n, q.r, q.p0));
    return res;
  }
  double p = q.p0;
  for (int it = 1; it <= kMaxLadderIterations; ++it) {
    p = step(q.n, q.r, p);
    res.sequence.push_back(p);
    res.N0 = it;
    if (p >= target) return res;
  }
  res.verdict = LadderVerdict::Capped;
  return res;
}

double ladder_ratio_bound(const LadderQuery& q) {
  validate(q);
  const double threshold = ladder_threshold(q.n, q.r);
  const double target = q.r * (q.n + 2) / 2.0;
  if (!(q.p0 > threshold && q.p0 < target))
    throw PreconditionError("ladder_ratio_bound: p0 must lie strictly between the threshold and r(n+2)/2");
  return (q.n + 2) / (q.r * (q.n + 2) - 2.0 * q.p0);
}

}  // namespace rdnet
