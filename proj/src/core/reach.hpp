#pragma once

#include <span>
#include <vector>

#include "expr.hpp"
#include "interval.hpp"

namespace symctl {

/* Finite union of boxes; overlaps allowed. */
struct Paving {
  std::vector<Box> boxes;
  /* True iff some box is not contained in the model's state domain X. */
  bool escapes_domain = false;
  std::size_t leaves = 0;
};

struct ReachOptions {
  InclusionKind inclusion = InclusionKind::Natural;
  /* Coalesce boxes whose union is itself a box. The union is unchanged. */
  bool merge = false;
};

/*
 * Over-approximation of f(cell, u) + delta*B. The cell is bisected until every
 * piece has width at most eps / (2 L); each piece contributes
 * [f](piece, u) inflated by delta.
 */
Paving over_reach(const SystemModel& model, const Box& cell, std::span<const double> u, double delta, double eps,
                  double lipschitz, const ReachOptions& options = {});

/* Merges pairs of boxes that agree on all but one side and touch or overlap on it. */
void merge_boxes(std::vector<Box>& boxes);

}  // namespace symctl
