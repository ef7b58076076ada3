#include "trail/kdtree.hpp"

#include <algorithm>
#include <numeric>

namespace trail {

KdTree3::KdTree3(std::vector<Eigen::Vector3d> points) : points_(std::move(points)) {
    if (points_.empty()) return;
    std::vector<int> ids(points_.size());
    std::iota(ids.begin(), ids.end(), 0);
    nodes_.reserve(points_.size());
    root_ = build(ids, 0, static_cast<int>(ids.size()), 0);
}

int KdTree3::build(std::vector<int>& ids, int begin, int end, int depth) {
    if (begin >= end) return -1;
    int axis = depth % 3;
    int mid = (begin + end) / 2;
    // Sort by (coordinate, index) so the tree shape does not depend on the
    // nth_element tie order of the standard library.
    std::nth_element(ids.begin() + begin, ids.begin() + mid, ids.begin() + end,
                     [&](int a, int b) {
                         double ca = points_[a](axis), cb = points_[b](axis);
                         if (ca != cb) return ca < cb;
                         return a < b;
                     });
    Node node;
    node.point_index = ids[mid];
    node.axis = axis;
    int self = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    int left = build(ids, begin, mid, depth + 1);
    int right = build(ids, mid + 1, end, depth + 1);
    nodes_[self].left = left;
    nodes_[self].right = right;
    return self;
}

void KdTree3::knn_recurse(int node_id, const Eigen::Vector3d& q, int k, int exclude,
                          std::vector<std::pair<double, int>>& heap) const {
    if (node_id < 0) return;
    const Node& node = nodes_[node_id];
    const Eigen::Vector3d& p = points_[node.point_index];
    if (node.point_index != exclude) {
        double d2 = (p - q).squaredNorm();
        std::pair<double, int> entry{d2, node.point_index};
        if (static_cast<int>(heap.size()) < k) {
            heap.push_back(entry);
            std::push_heap(heap.begin(), heap.end());
        } else if (entry < heap.front()) {
            std::pop_heap(heap.begin(), heap.end());
            heap.back() = entry;
            std::push_heap(heap.begin(), heap.end());
        }
    }
    double diff = q(node.axis) - p(node.axis);
    int near = diff <= 0.0 ? node.left : node.right;
    int far = diff <= 0.0 ? node.right : node.left;
    knn_recurse(near, q, k, exclude, heap);
    if (static_cast<int>(heap.size()) < k || diff * diff <= heap.front().first) {
        knn_recurse(far, q, k, exclude, heap);
    }
}

std::vector<int> KdTree3::knn(const Eigen::Vector3d& query, int k, int exclude_index) const {
    std::vector<std::pair<double, int>> heap;
    if (k > 0) {
        heap.reserve(static_cast<size_t>(k) + 1);
        knn_recurse(root_, query, k, exclude_index, heap);
    }
    std::sort(heap.begin(), heap.end());
    std::vector<int> out;
    out.reserve(heap.size());
    for (const auto& [d2, idx] : heap) out.push_back(idx);
    return out;
}

void KdTree3::radius_recurse(int node_id, const Eigen::Vector3d& q, double r2, double r,
                             std::vector<int>& out) const {
    if (node_id < 0) return;
    const Node& node = nodes_[node_id];
    const Eigen::Vector3d& p = points_[node.point_index];
    if ((p - q).squaredNorm() <= r2) out.push_back(node.point_index);
    double diff = q(node.axis) - p(node.axis);
    int near = diff <= 0.0 ? node.left : node.right;
    int far = diff <= 0.0 ? node.right : node.left;
    radius_recurse(near, q, r2, r, out);
    if (std::abs(diff) <= r) radius_recurse(far, q, r2, r, out);
}

std::vector<int> KdTree3::radius_search(const Eigen::Vector3d& query, double radius) const {
    std::vector<int> out;
    radius_recurse(root_, query, radius * radius, radius, out);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace trail
