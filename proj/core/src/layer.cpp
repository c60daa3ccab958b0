#include "traderisk/layer.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace traderisk {

Layer::Layer(std::size_t node_count, std::vector<Edge> edges)
    : node_count_(node_count) {
  std::erase_if(edges, [](const Edge& e) { return e.weight == 0.0; });
  for (const Edge& e : edges) {
    if (e.source >= node_count || e.target >= node_count) {
      throw std::invalid_argument("edge endpoint out of range: " +
                                  std::to_string(e.source) + "->" +
                                  std::to_string(e.target));
    }
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.source != b.source ? a.source < b.source : a.target < b.target;
  });
  auto dup = std::adjacent_find(edges.begin(), edges.end(),
                                [](const Edge& a, const Edge& b) {
                                  return a.source == b.source &&
                                         a.target == b.target;
                                });
  if (dup != edges.end()) {
    throw std::invalid_argument("duplicate edge " +
                                std::to_string(dup->source) + "->" +
                                std::to_string(dup->target));
  }
  edges_ = std::move(edges);
}

double Layer::weight(std::size_t source, std::size_t target) const {
  auto it = std::lower_bound(
      edges_.begin(), edges_.end(), std::pair{source, target},
      [](const Edge& e, const std::pair<std::size_t, std::size_t>& key) {
        return e.source != key.first ? e.source < key.first
                                     : e.target < key.second;
      });
  if (it != edges_.end() && it->source == source && it->target == target) {
    return it->weight;
  }
  return 0.0;
}

double Layer::total_weight() const {
  double sum = 0.0;
  for (const Edge& e : edges_) sum += e.weight;
  return sum;
}

std::vector<double> Layer::to_dense() const {
  std::vector<double> dense(node_count_ * node_count_, 0.0);
  for (const Edge& e : edges_) dense[e.source * node_count_ + e.target] = e.weight;
  return dense;
}

}  // namespace traderisk
