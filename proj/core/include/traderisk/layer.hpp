#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace traderisk {

/// Directed link source -> target. For trade layers source is the exporter
/// and target the importer.
struct Edge {
  std::size_t source = 0;
  std::size_t target = 0;
  double weight = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Sparse directed weighted network over a fixed node index space.
///
/// Edges are kept sorted by (source, target) and unique; exact-zero weights
/// are not stored. Negative weights and self-loops are representable so that
/// validation can report them; the algorithms in graph.hpp assume they are
/// absent.
class Layer {
 public:
  Layer() = default;
  explicit Layer(std::size_t node_count) : node_count_(node_count) {}

  /// Throws std::invalid_argument on out-of-range endpoints or duplicate
  /// (source, target) pairs.
  Layer(std::size_t node_count, std::vector<Edge> edges);

  std::size_t node_count() const noexcept { return node_count_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  bool empty() const noexcept { return edges_.empty(); }
  std::span<const Edge> edges() const noexcept { return edges_; }

  /// Weight of source -> target, 0 when absent.
  double weight(std::size_t source, std::size_t target) const;
  double total_weight() const;

  /// Dense row-major copy, entry [source * n + target].
  std::vector<double> to_dense() const;

  friend bool operator==(const Layer&, const Layer&) = default;

 private:
  std::size_t node_count_ = 0;
  std::vector<Edge> edges_;
};

}  // namespace traderisk
