#pragma once

#include <compare>
#include <cstddef>
#include <set>
#include <vector>

namespace ddag {

using Label = int;
using Labels = std::vector<Label>;

// Directed edge `child <- parent`, written (i, j) with i = child.
struct Edge {
  Label child;
  Label parent;

  auto operator<=>(const Edge&) const = default;
};

// A set of directed edges over labeled vertices. The edge set is kept
// acyclic and every endpoint must be a known vertex.
class DagEdgeSet {
 public:
  DagEdgeSet() = default;
  explicit DagEdgeSet(std::set<Label> vertices);
  DagEdgeSet(std::set<Label> vertices, const std::set<Edge>& edges);

  const std::set<Label>& vertices() const { return vertices_; }
  const std::set<Edge>& edges() const { return edges_; }

  std::size_t size() const { return edges_.size(); }
  bool empty() const { return edges_.empty(); }
  bool contains(const Edge& e) const { return edges_.count(e) != 0; }
  bool contains(Label child, Label parent) const { return contains(Edge{child, parent}); }

  // Throws InvariantError on unknown endpoints, self loops, or a cycle.
  void insert(const Edge& e);
  bool erase(const Edge& e) { return edges_.erase(e) != 0; }

  Labels parents(Label v) const;
  Labels children(Label v) const;
  // In-degree plus out-degree.
  std::size_t degree(Label v) const;
  std::size_t max_degree() const;

  // Edges sorted lexicographically by (child, parent).
  std::vector<Edge> sorted_edges() const { return {edges_.begin(), edges_.end()}; }

  friend bool operator==(const DagEdgeSet&, const DagEdgeSet&) = default;

 private:
  bool reaches(Label from, Label to) const;

  std::set<Label> vertices_;
  std::set<Edge> edges_;
};

// Directed symmetric difference |a △ b|. Vertex sets must agree.
std::size_t hamming_distance(const DagEdgeSet& a, const DagEdgeSet& b);

}  // namespace ddag
