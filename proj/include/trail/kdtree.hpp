#pragma once

#include <Eigen/Dense>

#include <vector>

namespace trail {

/// Static 3-D kd-tree over a point set, built once at construction.
/// Query results are deterministic for a given input order.
class KdTree3 {
public:
    explicit KdTree3(std::vector<Eigen::Vector3d> points);

    /// Indices of the k nearest points to `query`, excluding `exclude_index`
    /// (pass -1 to exclude nothing). Fewer than k are returned when the tree
    /// is smaller. Result sorted by (distance, index).
    std::vector<int> knn(const Eigen::Vector3d& query, int k, int exclude_index = -1) const;

    /// Indices of all points within `radius` of `query` (inclusive),
    /// sorted ascending by index.
    std::vector<int> radius_search(const Eigen::Vector3d& query, double radius) const;

    size_t size() const { return points_.size(); }
    const Eigen::Vector3d& point(int i) const { return points_[i]; }

private:
    struct Node {
        int point_index = -1;
        int axis = 0;
        int left = -1;
        int right = -1;
    };

    int build(std::vector<int>& ids, int begin, int end, int depth);
    void knn_recurse(int node, const Eigen::Vector3d& q, int k, int exclude,
                     std::vector<std::pair<double, int>>& heap) const;
    void radius_recurse(int node, const Eigen::Vector3d& q, double r2, double r,
                        std::vector<int>& out) const;

    std::vector<Eigen::Vector3d> points_;
    std::vector<Node> nodes_;
    int root_ = -1;
};

}  // namespace trail
