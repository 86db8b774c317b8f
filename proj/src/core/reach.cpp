#include "reach.hpp"

#include <cmath>
#include <limits>

namespace symctl {

Paving over_reach(const SystemModel& model, const Box& cell, std::span<const double> u, double delta, double eps,
                  double lipschitz, const ReachOptions& options) {
  if (!(eps > 0) || !std::isfinite(eps)) throw Error(ErrorKind::InvalidArgument, "reach slack eps must be positive");
  if (!(delta >= 0) || !std::isfinite(delta)) throw Error(ErrorKind::InvalidArgument, "disturbance radius must be nonnegative");
  if (!(lipschitz >= 0) || !std::isfinite(lipschitz)) throw Error(ErrorKind::InvalidArgument, "Lipschitz bound must be finite");
  if (cell.dims() != model.state_dim() || u.size() != model.input_dim())
    throw Error(ErrorKind::Dimension, "over_reach: dimension mismatch");
  if (cell.is_empty()) throw Error(ErrorKind::EmptyInput, "over_reach: empty cell");

  const double threshold = lipschitz > 0 ? eps / (2 * lipschitz) : std::numeric_limits<double>::infinity();
  const Box ubox = Box::point(u);
  Paving out;
  std::vector<Box> work{cell};
  while (!work.empty()) {
    Box y = std::move(work.back());
    work.pop_back();
    if (width(y) <= threshold) {
      out.boxes.push_back(inflate(model.enclose(y, ubox, options.inclusion), delta));
      ++out.leaves;
      continue;
    }
    auto [l, r] = bisect(y);
    work.push_back(std::move(r));
    work.push_back(std::move(l));
  }
  if (options.merge) merge_boxes(out.boxes);
  for (const auto& b : out.boxes)
    if (!contains(model.X(), b)) {
      out.escapes_domain = true;
      break;
    }
  return out;
}

namespace {

// Index of the single side on which a and b differ, if their union is a box.
int mergeable(const Box& a, const Box& b) {
  int diff = -1;
  for (std::size_t i = 0; i < a.dims(); ++i) {
    if (a[i] == b[i]) continue;
    if (diff >= 0) return -1;
    if (!a[i].intersects(b[i])) return -1;
    diff = static_cast<int>(i);
  }
  return diff < 0 ? 0 : diff;
}

}  // namespace

void merge_boxes(std::vector<Box>& boxes) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < boxes.size() && !changed; ++i) {
      for (std::size_t j = i + 1; j < boxes.size(); ++j) {
        if (mergeable(boxes[i], boxes[j]) < 0) continue;
        boxes[i] = hull(boxes[i], boxes[j]);
        boxes.erase(boxes.begin() + static_cast<std::ptrdiff_t>(j));
        changed = true;
        break;
      }
    }
  }
}

}  // namespace symctl
