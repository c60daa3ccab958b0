#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "traderisk/layer.hpp"

namespace traderisk::graph {

/// Structural summary of one layer. Edges count as links irrespective of
/// weight, so callers pass the layer whose nonzero pattern is the adjacency.
struct LayerMetrics {
  double avg_degree = 0.0;  // links / nodes
  std::vector<std::size_t> in_degree;
  std::vector<std::size_t> out_degree;
  std::vector<double> in_strength;
  double scc_fraction = 0.0;
  double lambda = 0.0;
};

/// Fills degrees, strengths and avg_degree; scc_fraction and lambda stay 0.
LayerMetrics degrees_and_strengths(const Layer& layer);

/// Tarjan's algorithm (iterative). Components come out in reverse
/// topological order of the condensation.
std::vector<std::vector<std::size_t>> strongly_connected_components(const Layer& layer);

/// |largest SCC| / node count. Isolated nodes count as singleton components.
/// Throws std::invalid_argument on an empty node set.
double largest_scc_fraction(const Layer& layer);

struct EigenOptions {
  double tol = 1e-10;
  std::size_t max_iter = 100000;
};

/// Perron root of a nonnegative weight matrix.
///
/// The matrix is split into strongly connected blocks; the spectrum of a
/// reducible matrix is the union of its diagonal blocks', so the root is the
/// largest block root. Each irreducible block is power-iterated on
/// (A + eps I), eps being the block's mean row sum, which makes the Perron
/// root strictly dominant even for periodic blocks. Iteration stops when the
/// Collatz-Wielandt bounds min/max (Ax)_i / x_i, taken relative to eps, are
/// less than `tol` apart; the midpoint is returned.
///
/// Throws ConvergenceError after `max_iter` iterations on any block.
double leading_eigenvalue(const Layer& layer, const EigenOptions& options = {});

/// Direction in which a shock travels along a link i -> j of V.
enum class PageRankFlow {
  downstream,  // exporter to importer: PR_i sums V_ji PR_j / kout_j
  upstream,    // importer to exporter: PR_i sums V_ij PR_j / kout_j
};
std::string_view to_string(PageRankFlow flow);
std::optional<PageRankFlow> parse_pagerank_flow(std::string_view text);

struct PageRankOptions {
  double alpha_factor = 0.85;
  PageRankFlow flow = PageRankFlow::downstream;
  double tol = 1e-10;
  std::size_t max_iter = 100000;
};

struct PageRankResult {
  std::vector<double> scores;
  double lambda = 0.0;
  double alpha = 0.0;
  bool degenerate = false;  // lambda < tol, scores are all 1
  std::size_t iterations = 0;
};

/// Fixed point of PR_i = alpha * sum_j V_ji PR_j / kout_j + (1 - alpha)
/// (downstream) or the same with V_ij (upstream), alpha = alpha_factor /
/// lambda(V), iterated from PR = 1 until the max-norm change drops below
/// `tol`. Upstream, terms whose j has no out-links contribute nothing.
PageRankResult pagerank(const Layer& vulnerability, const PageRankOptions& options = {});

}  // namespace traderisk::graph
