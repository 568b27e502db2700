#include "ddag/edge_set.hpp"

#include "ddag/errors.hpp"

#include <algorithm>
#include <string>

namespace ddag {

DagEdgeSet::DagEdgeSet(std::set<Label> vertices) : vertices_(std::move(vertices)) {}

DagEdgeSet::DagEdgeSet(std::set<Label> vertices, const std::set<Edge>& edges)
    : vertices_(std::move(vertices)) {
  for (const Edge& e : edges) insert(e);
}

void DagEdgeSet::insert(const Edge& e) {
  if (!vertices_.count(e.child) || !vertices_.count(e.parent)) {
    throw InvariantError("edge (" + std::to_string(e.child) + "," + std::to_string(e.parent) +
                         ") has an endpoint outside the vertex set");
  }
  if (e.child == e.parent) {
    throw InvariantError("self loop on vertex " + std::to_string(e.child));
  }
  if (contains(e)) return;
  // parent -> child closes a cycle iff child already reaches parent.
  if (reaches(e.child, e.parent)) {
    throw InvariantError("edge (" + std::to_string(e.child) + "," + std::to_string(e.parent) +
                         ") would create a cycle");
  }
  edges_.insert(e);
}

// Follows parent -> child direction starting at `from`.
bool DagEdgeSet::reaches(Label from, Label to) const {
  std::vector<Label> stack{from};
  std::set<Label> seen{from};
  while (!stack.empty()) {
    Label v = stack.back();
    stack.pop_back();
    if (v == to) return true;
    for (const Edge& e : edges_) {
      if (e.parent == v && seen.insert(e.child).second) stack.push_back(e.child);
    }
  }
  return false;
}

Labels DagEdgeSet::parents(Label v) const {
  Labels out;
  for (const Edge& e : edges_)
    if (e.child == v) out.push_back(e.parent);
  return out;
}

Labels DagEdgeSet::children(Label v) const {
  Labels out;
  for (const Edge& e : edges_)
    if (e.parent == v) out.push_back(e.child);
  return out;
}

std::size_t DagEdgeSet::degree(Label v) const {
  return static_cast<std::size_t>(std::count_if(edges_.begin(), edges_.end(), [v](const Edge& e) {
    return e.child == v || e.parent == v;
  }));
}

std::size_t DagEdgeSet::max_degree() const {
  std::size_t best = 0;
  for (Label v : vertices_) best = std::max(best, degree(v));
  return best;
}

std::size_t hamming_distance(const DagEdgeSet& a, const DagEdgeSet& b) {
  if (a.vertices() != b.vertices()) {
    throw VertexMismatchError("hamming distance needs edge sets over the same vertices");
  }
  std::vector<Edge> diff;
  std::set_symmetric_difference(a.edges().begin(), a.edges().end(), b.edges().begin(),
                                b.edges().end(), std::back_inserter(diff));
  return diff.size();
}

}  // namespace ddag
