#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "mcglm/mh.hpp"

namespace mcglm {

//! Fraction of accepted flags in [first, last) (iteration indices,
//! 0-based, half-open). For componentwise traces both per-iteration
//! sub-decisions count. Throws on an empty or out-of-range window.
double acceptance_rate(const ChainTrace& trace, std::size_t first,
                       std::size_t last);
double acceptance_rate(const ChainTrace& trace);

//! Running means per coordinate, one series per start offset. Start
//! offsets are 1-based iteration numbers; entry k of a series started at
//! s is the mean of draws s..s+k. Sums are compensated so a direct
//! recomputation agrees to full precision.
struct CumulativeMeanSeries {
  std::vector<std::size_t> starts;
  // values[s][coord][k]
  std::vector<std::array<std::vector<double>, 2>> values;
  std::size_t length = 0;

  //! Mean of draws start..iteration (both 1-based) for one start/coord.
  double at(std::size_t start_idx, std::size_t coord, std::size_t iteration) const;
};

CumulativeMeanSeries cumulative_mean(const ChainTrace& trace,
                                     const std::vector<std::size_t>& starts);

struct DualStartResult {
  bool converged = false;
  std::optional<std::size_t> crossing_iteration;  // 1-based
  double final_gap = 0.0;
};

//! The visual overlap criterion made explicit: converged when the
//! max per-coordinate gap between all start series stays within tol from
//! some iteration through the end; crossing_iteration is the first such
//! iteration.
DualStartResult dual_start_check(const CumulativeMeanSeries& series, double tol);

//! Unbiased sample covariance of post-burn-in draws.
Matrix2 sample_covariance(const ChainTrace& trace, std::size_t burn_in);

//! Mean and unbiased variance per coordinate across replication estimates.
struct ReplicationSummary {
  ParamVector mean;
  Vec2 variance = {0.0, 0.0};
  std::size_t count = 0;
};

ReplicationSummary replicate_summary(const std::vector<ParamVector>& estimates);

}  // namespace mcglm
