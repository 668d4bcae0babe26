#include "mcglm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mcglm {

double acceptance_rate(const ChainTrace& trace, std::size_t first,
                       std::size_t last) {
  if (first >= last || last > trace.length()) {
    throw std::invalid_argument("acceptance_rate: empty or out-of-range window");
  }
  const bool componentwise = !trace.accepted0.empty();
  double hits = 0.0;
  for (std::size_t t = first; t < last; ++t) {
    if (componentwise) {
      hits += trace.accepted0[t] + trace.accepted1[t];
    } else {
      hits += trace.accepted[t];
    }
  }
  double total = static_cast<double>(last - first) * (componentwise ? 2.0 : 1.0);
  return hits / total;
}

double acceptance_rate(const ChainTrace& trace) {
  return acceptance_rate(trace, 0, trace.length());
}

double CumulativeMeanSeries::at(std::size_t start_idx, std::size_t coord,
                                std::size_t iteration) const {
  std::size_t start = starts.at(start_idx);
  if (iteration < start || iteration > length) {
    throw std::out_of_range("cumulative mean: iteration before start or past end");
  }
  return values[start_idx][coord][iteration - start];
}

CumulativeMeanSeries cumulative_mean(const ChainTrace& trace,
                                     const std::vector<std::size_t>& starts) {
  const std::size_t T = trace.length();
  CumulativeMeanSeries out;
  out.starts = starts;
  out.length = T;
  out.values.resize(starts.size());
  for (std::size_t s = 0; s < starts.size(); ++s) {
    std::size_t start = starts[s];
    if (start == 0 || start > T) {
      throw std::invalid_argument("cumulative_mean: start offsets are 1-based and must not pass the trace end");
    }
    auto& coord0 = out.values[s][0];
    auto& coord1 = out.values[s][1];
    coord0.reserve(T - start + 1);
    coord1.reserve(T - start + 1);
    double sum0 = 0.0, comp0 = 0.0, sum1 = 0.0, comp1 = 0.0;
    for (std::size_t t = start; t <= T; ++t) {
      double y = trace.draws[t - 1].beta0 - comp0;
      double acc = sum0 + y;
      comp0 = (acc - sum0) - y;
      sum0 = acc;
      y = trace.draws[t - 1].beta1 - comp1;
      acc = sum1 + y;
      comp1 = (acc - sum1) - y;
      sum1 = acc;
      double n = static_cast<double>(t - start + 1);
      coord0.push_back(sum0 / n);
      coord1.push_back(sum1 / n);
    }
  }
  return out;
}

DualStartResult dual_start_check(const CumulativeMeanSeries& series,
                                 double tol) {
  if (series.starts.size() < 2) {
    throw std::invalid_argument("dual_start_check: need at least two starts");
  }
  std::size_t t_min = *std::max_element(series.starts.begin(), series.starts.end());
  const std::size_t T = series.length;

  DualStartResult result;
  if (t_min > T) {
    return result;  // no iteration where all series exist
  }

  // Scan backwards: the crossing is the first iteration after the last
  // time the gap exceeded tol.
  std::size_t crossing = t_min;
  bool beyond = false;
  for (std::size_t t = T; t >= t_min; --t) {
    double gap = 0.0;
    for (std::size_t a = 0; a < series.starts.size(); ++a) {
      for (std::size_t b = a + 1; b < series.starts.size(); ++b) {
        for (std::size_t coord = 0; coord < 2; ++coord) {
          gap = std::max(gap, std::fabs(series.at(a, coord, t) -
                                        series.at(b, coord, t)));
        }
      }
    }
    if (t == T) {
      result.final_gap = gap;
    }
    if (gap > tol) {
      crossing = t + 1;
      beyond = true;
      break;
    }
    if (t == t_min) {
      break;  // size_t cannot go below zero
    }
  }
  if (beyond && crossing > T) {
    return result;  // gap still open at the end
  }
  result.converged = true;
  result.crossing_iteration = crossing;
  return result;
}

Matrix2 sample_covariance(const ChainTrace& trace, std::size_t burn_in) {
  const std::size_t T = trace.length();
  if (burn_in + 2 > T) {
    throw std::invalid_argument("sample_covariance: need at least two post-burn-in draws");
  }
  ParamVector mean = chain_mean(trace, burn_in);
  double c00 = 0.0, c01 = 0.0, c11 = 0.0;
  for (std::size_t t = burn_in; t < T; ++t) {
    double d0 = trace.draws[t].beta0 - mean.beta0;
    double d1 = trace.draws[t].beta1 - mean.beta1;
    c00 += d0 * d0;
    c01 += d0 * d1;
    c11 += d1 * d1;
  }
  double denom = static_cast<double>(T - burn_in) - 1.0;
  return {c00 / denom, c01 / denom, c01 / denom, c11 / denom};
}

ReplicationSummary replicate_summary(const std::vector<ParamVector>& estimates) {
  if (estimates.size() < 2) {
    throw std::invalid_argument("replicate_summary: need at least two estimates");
  }
  ReplicationSummary s;
  s.count = estimates.size();
  double n = static_cast<double>(s.count);
  double m0 = 0.0, m1 = 0.0;
  for (const auto& e : estimates) {
    m0 += e.beta0;
    m1 += e.beta1;
  }
  s.mean = {m0 / n, m1 / n};
  double v0 = 0.0, v1 = 0.0;
  for (const auto& e : estimates) {
    v0 += (e.beta0 - s.mean.beta0) * (e.beta0 - s.mean.beta0);
    v1 += (e.beta1 - s.mean.beta1) * (e.beta1 - s.mean.beta1);
  }
  s.variance = {v0 / (n - 1.0), v1 / (n - 1.0)};
  return s;
}

}  // namespace mcglm
