#include "pcqa/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "pcqa/error.hpp"
#include "pcqa/simd/kernels.hpp"

namespace pcqa::spatial {

namespace {

struct Candidate {
  double d2;
  std::size_t index;
};

// Strict order used everywhere: distance first, then point index.
inline bool closer(const Candidate& a, const Candidate& b) {
  return a.d2 < b.d2 || (a.d2 == b.d2 && a.index < b.index);
}

struct CloserCmp {
  bool operator()(const Candidate& a, const Candidate& b) const { return closer(a, b); }
};

std::vector<Neighbor> finish(std::vector<Candidate>& found) {
  std::sort(found.begin(), found.end(), CloserCmp{});
  std::vector<Neighbor> out;
  out.reserve(found.size());
  for (const Candidate& c : found) out.push_back({c.index, std::sqrt(c.d2)});
  return out;
}

std::vector<double>& scratch() {
  thread_local std::vector<double> buffer;
  return buffer;
}

}  // namespace

KdTree::KdTree(std::span<const Vec3> points, std::size_t leaf_size)
    : source_count_(points.size()), leaf_size_(std::max<std::size_t>(leaf_size, 1)) {
  if (points.empty()) throw DomainError("cannot index an empty cloud");
  if (points.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw DomainError("cloud too large for the spatial index");
  }
  order_.resize(points.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  xs_.resize(points.size());
  ys_.resize(points.size());
  zs_.resize(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    xs_[i] = points[i].x();
    ys_[i] = points[i].y();
    zs_[i] = points[i].z();
  }
  // Build over source-order coordinates, then permute into tree order.
  nodes_.reserve(2 * points.size() / leaf_size_ + 1);
  build(0, static_cast<std::uint32_t>(points.size()));
  std::vector<double> px(points.size()), py(points.size()), pz(points.size());
  for (std::size_t i = 0; i < order_.size(); ++i) {
    px[i] = xs_[order_[i]];
    py[i] = ys_[order_[i]];
    pz[i] = zs_[order_[i]];
  }
  xs_ = std::move(px);
  ys_ = std::move(py);
  zs_ = std::move(pz);
}

std::uint32_t KdTree::build(std::uint32_t begin, std::uint32_t end) {
  const auto id = static_cast<std::uint32_t>(nodes_.size());
  nodes_.push_back(Node{begin, end});
  if (end - begin <= leaf_size_) return id;

  const std::vector<double>* coords[3] = {&xs_, &ys_, &zs_};
  double best_spread = -1.0;
  int axis = 0;
  for (int a = 0; a < 3; ++a) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::uint32_t i = begin; i < end; ++i) {
      const double v = (*coords[a])[order_[i]];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > best_spread) {
      best_spread = hi - lo;
      axis = a;
    }
  }
  if (best_spread <= 0.0) return id;  // all coincident: keep as one leaf

  const std::vector<double>& c = *coords[axis];
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&c](std::size_t a, std::size_t b) { return c[a] < c[b] || (c[a] == c[b] && a < b); });
  const double split = c[order_[mid]];

  const std::uint32_t left = build(begin, mid);
  const std::uint32_t right = build(mid, end);
  Node& node = nodes_[id];
  node.split_axis = axis;
  node.split_value = split;
  node.left = left;
  node.right = right;
  return id;
}

// Visitor protocol: bound() gives the current pruning radius (squared),
// visit(d2, index) offers a candidate.
template <typename Visitor>
void KdTree::search(const Vec3& query, Visitor& visitor) const {
  std::vector<double>& d2 = scratch();
  struct Frame {
    std::uint32_t node;
    double min_d2;
  };
  Frame stack[128];
  int top = 0;
  stack[top++] = {0, 0.0};
  while (top > 0) {
    const Frame frame = stack[--top];
    if (frame.min_d2 > visitor.bound()) continue;
    const Node& node = nodes_[frame.node];
    if (node.split_axis < 0) {
      const std::size_t n = node.end - node.begin;
      if (d2.size() < n) d2.resize(n);
      simd::squared_distances(std::span(xs_).subspan(node.begin, n),
                              std::span(ys_).subspan(node.begin, n),
                              std::span(zs_).subspan(node.begin, n), query.x(), query.y(),
                              query.z(), std::span(d2).first(n));
      for (std::size_t i = 0; i < n; ++i) visitor.visit(d2[i], order_[node.begin + i]);
      continue;
    }
    const double diff = query[node.split_axis] - node.split_value;
    const double plane_d2 = std::max(frame.min_d2, diff * diff);
    const std::uint32_t near = diff <= 0.0 ? node.left : node.right;
    const std::uint32_t far = diff <= 0.0 ? node.right : node.left;
    // Far side first on the stack so the near side is explored first.
    stack[top++] = {far, plane_d2};
    stack[top++] = {near, frame.min_d2};
  }
}

std::vector<Neighbor> KdTree::knn(const Vec3& query, std::size_t k) const {
  if (k == 0) throw DomainError("knn requires k >= 1");
  struct Visitor {
    std::size_t k;
    std::priority_queue<Candidate, std::vector<Candidate>, CloserCmp> heap;
    double bound() const {
      return heap.size() < k ? std::numeric_limits<double>::infinity() : heap.top().d2;
    }
    void visit(double d2, std::size_t index) {
      const Candidate c{d2, index};
      if (heap.size() < k) {
        heap.push(c);
      } else if (closer(c, heap.top())) {
        heap.pop();
        heap.push(c);
      }
    }
  } visitor{std::min(k, source_count_), {}};
  search(query, visitor);
  std::vector<Candidate> found;
  found.reserve(visitor.heap.size());
  while (!visitor.heap.empty()) {
    found.push_back(visitor.heap.top());
    visitor.heap.pop();
  }
  return finish(found);
}

std::vector<Neighbor> KdTree::radius_query(const Vec3& query, double radius) const {
  if (!(radius >= 0.0)) throw DomainError("radius must be non-negative");
  struct Visitor {
    double r2;
    std::vector<Candidate> found;
    double bound() const { return r2; }
    void visit(double d2, std::size_t index) {
      if (d2 <= r2) found.push_back({d2, index});
    }
  } visitor{radius * radius, {}};
  search(query, visitor);
  return finish(visitor.found);
}

Neighbor KdTree::nearest(const Vec3& query) const { return knn(query, 1).front(); }

std::vector<std::size_t> match_points(const PointCloud& from, const KdTree& to) {
  if (from.empty()) throw DomainError("cannot match an empty cloud");
  std::vector<std::size_t> out(from.size());
  for (std::size_t i = 0; i < from.size(); ++i) out[i] = to.nearest(from.position(i)).index;
  return out;
}

}  // namespace pcqa::spatial
