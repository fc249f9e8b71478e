#pragma once

#include <array>
#include <stdexcept>
#include <utility>
#include <vector>

// Internal: incremental (Bowyer-Watson) Delaunay triangulation with long
// double predicates. Callers are expected to perturb and retry on
// DelaunayDegenerate (collinear inputs, duplicate points, cocircular ties).
namespace bamg::detail {

struct DelaunayDegenerate : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Triangles as CCW index triples into pts.
std::vector<std::array<int, 3>> delaunay_triangulate(
    const std::vector<std::array<double, 2>>& pts);

// Unique undirected edges (a < b), sorted.
std::vector<std::pair<int, int>> delaunay_edges(const std::vector<std::array<double, 2>>& pts);

}  // namespace bamg::detail
