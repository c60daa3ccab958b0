#include "traderisk/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "traderisk/error.hpp"

namespace traderisk::graph {

LayerMetrics degrees_and_strengths(const Layer& layer) {
  const std::size_t n = layer.node_count();
  LayerMetrics m;
  m.in_degree.assign(n, 0);
  m.out_degree.assign(n, 0);
  m.in_strength.assign(n, 0.0);
  for (const Edge& e : layer.edges()) {
    ++m.out_degree[e.source];
    ++m.in_degree[e.target];
    m.in_strength[e.target] += e.weight;
  }
  m.avg_degree = n == 0 ? 0.0 : static_cast<double>(layer.edge_count()) / static_cast<double>(n);
  return m;
}

namespace {

/// Adjacency lists (successor indices) in CSR form.
struct Successors {
  std::vector<std::size_t> offsets;
  std::vector<std::size_t> targets;

  explicit Successors(const Layer& layer) : offsets(layer.node_count() + 1, 0) {
    for (const Edge& e : layer.edges()) ++offsets[e.source + 1];
    for (std::size_t i = 0; i < layer.node_count(); ++i) offsets[i + 1] += offsets[i];
    targets.reserve(layer.edge_count());
    // edges are sorted by source, so appending keeps each row contiguous
    for (const Edge& e : layer.edges()) targets.push_back(e.target);
  }
};

}  // namespace

std::vector<std::vector<std::size_t>> strongly_connected_components(const Layer& layer) {
  constexpr std::size_t kUnvisited = std::numeric_limits<std::size_t>::max();
  const std::size_t n = layer.node_count();
  const Successors succ(layer);

  std::vector<std::size_t> index(n, kUnvisited);
  std::vector<std::size_t> lowlink(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> components;
  // (node, next successor position)
  std::vector<std::pair<std::size_t, std::size_t>> call_stack;
  std::size_t counter = 0;

  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    call_stack.emplace_back(root, succ.offsets[root]);
    index[root] = lowlink[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;

    while (!call_stack.empty()) {
      auto& [v, pos] = call_stack.back();
      if (pos < succ.offsets[v + 1]) {
        const std::size_t w = succ.targets[pos++];
        if (index[w] == kUnvisited) {
          index[w] = lowlink[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call_stack.emplace_back(w, succ.offsets[w]);
        } else if (on_stack[w]) {
          lowlink[v] = std::min(lowlink[v], index[w]);
        }
        continue;
      }
      const std::size_t done = v;
      call_stack.pop_back();
      if (!call_stack.empty()) {
        const std::size_t parent = call_stack.back().first;
        lowlink[parent] = std::min(lowlink[parent], lowlink[done]);
      }
      if (lowlink[done] == index[done]) {
        std::vector<std::size_t> component;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          component.push_back(w);
        } while (w != done);
        std::sort(component.begin(), component.end());
        components.push_back(std::move(component));
      }
    }
  }
  return components;
}

double largest_scc_fraction(const Layer& layer) {
  if (layer.node_count() == 0) {
    throw std::invalid_argument("largest_scc_fraction: layer has no nodes");
  }
  std::size_t largest = 0;
  for (const auto& c : strongly_connected_components(layer)) {
    largest = std::max(largest, c.size());
  }
  return static_cast<double>(largest) / static_cast<double>(layer.node_count());
}

namespace {

struct BlockEdge {
  std::size_t source;
  std::size_t target;
  double weight;
};

double block_perron_root(std::size_t size, const std::vector<BlockEdge>& edges,
                         const EigenOptions& options) {
  // Iterate B = A / s + I with s the mean row sum. B is primitive, so a
  // positive start stays positive and min/max of (Bx)_i / x_i bracket the
  // root of B. Working on A / s keeps the result homogeneous in A.
  double total = 0.0;
  for (const BlockEdge& e : edges) total += e.weight;
  const double scale = total / static_cast<double>(size);

  std::vector<double> x(size, 1.0);
  std::vector<double> y(size);
  double lo = 0.0;
  double hi = 0.0;
  // Once the bracket is within tol, keep going while it still shrinks (for
  // at most as many steps again): PageRank's alpha = factor / lambda
  // amplifies any error left in lambda.
  std::size_t converged_at = 0;
  double best_gap = std::numeric_limits<double>::infinity();
  double best = 0.0;
  for (std::size_t iter = 0; iter < options.max_iter; ++iter) {
    y = x;
    for (const BlockEdge& e : edges) y[e.source] += e.weight / scale * x[e.target];
    lo = std::numeric_limits<double>::infinity();
    hi = 0.0;
    double top = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
      const double ratio = y[i] / x[i];
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      top = std::max(top, y[i]);
    }
    const double gap = hi - lo;
    if (converged_at == 0 && gap < options.tol) converged_at = iter + 1;
    if (converged_at > 0) {
      if (!(gap < best_gap) || iter >= 2 * converged_at) break;
      best_gap = gap;
      best = 0.5 * (lo + hi);
    }
    for (std::size_t i = 0; i < size; ++i) x[i] = y[i] / top;
  }
  if (converged_at > 0) return std::max(scale * (best - 1.0), 0.0);

  const double estimate = scale * (0.5 * (lo + hi) - 1.0);
  throw ConvergenceError("leading_eigenvalue: no convergence after " +
                             std::to_string(options.max_iter) + " iterations",
                         estimate, scale * (hi - lo), options.max_iter);
}

}  // namespace

double leading_eigenvalue(const Layer& layer, const EigenOptions& options) {
  const std::size_t n = layer.node_count();
  if (layer.empty()) return 0.0;

  const auto components = strongly_connected_components(layer);
  std::vector<std::size_t> component_of(n), local_index(n);
  for (std::size_t c = 0; c < components.size(); ++c) {
    for (std::size_t k = 0; k < components[c].size(); ++k) {
      component_of[components[c][k]] = c;
      local_index[components[c][k]] = k;
    }
  }
  std::vector<std::vector<BlockEdge>> block_edges(components.size());
  for (const Edge& e : layer.edges()) {
    if (component_of[e.source] == component_of[e.target]) {
      block_edges[component_of[e.source]].push_back(
          {local_index[e.source], local_index[e.target], e.weight});
    }
  }

  double root = 0.0;
  for (std::size_t c = 0; c < components.size(); ++c) {
    const auto& edges = block_edges[c];
    if (edges.empty()) continue;  // singleton without self-loop
    if (components[c].size() == 1) {
      root = std::max(root, edges.front().weight);
      continue;
    }
    root = std::max(root, block_perron_root(components[c].size(), edges, options));
  }
  return root;
}

std::string_view to_string(PageRankFlow flow) {
  return flow == PageRankFlow::downstream ? "downstream" : "upstream";
}

std::optional<PageRankFlow> parse_pagerank_flow(std::string_view text) {
  if (text == "downstream") return PageRankFlow::downstream;
  if (text == "upstream") return PageRankFlow::upstream;
  return std::nullopt;
}

PageRankResult pagerank(const Layer& vulnerability, const PageRankOptions& options) {
  if (!(options.alpha_factor > 0.0 && options.alpha_factor < 1.0)) {
    throw std::invalid_argument("pagerank: alpha_factor must lie in (0, 1)");
  }
  const std::size_t n = vulnerability.node_count();
  PageRankResult result;
  result.lambda = leading_eigenvalue(vulnerability, {options.tol, options.max_iter});
  result.scores.assign(n, 1.0);
  if (result.lambda < options.tol) {
    result.degenerate = true;
    return result;
  }
  const double alpha = options.alpha_factor / result.lambda;
  result.alpha = alpha;

  std::vector<std::size_t> out_degree(n, 0);
  for (const Edge& e : vulnerability.edges()) ++out_degree[e.source];

  // next[i] += coefficient * pr[j]
  struct Term {
    std::size_t i;
    std::size_t j;
    double coefficient;
  };
  std::vector<Term> terms;
  terms.reserve(vulnerability.edge_count());
  for (const Edge& e : vulnerability.edges()) {
    if (options.flow == PageRankFlow::downstream) {
      terms.push_back({e.target, e.source, alpha * e.weight / static_cast<double>(out_degree[e.source])});
    } else if (out_degree[e.target] > 0) {
      terms.push_back({e.source, e.target, alpha * e.weight / static_cast<double>(out_degree[e.target])});
    }
  }

  std::vector<double>& pr = result.scores;
  std::vector<double> next(n);
  double change = 0.0;
  for (std::size_t iter = 1; iter <= options.max_iter; ++iter) {
    std::fill(next.begin(), next.end(), 1.0 - alpha);
    for (const Term& t : terms) next[t.i] += t.coefficient * pr[t.j];
    change = 0.0;
    for (std::size_t i = 0; i < n; ++i) change = std::max(change, std::abs(next[i] - pr[i]));
    pr.swap(next);
    if (change < options.tol) {
      result.iterations = iter;
      return result;
    }
  }
  throw ConvergenceError("pagerank: no convergence after " + std::to_string(options.max_iter) +
                             " iterations",
                         pr.empty() ? 0.0 : pr.front(), change, options.max_iter);
}

}  // namespace traderisk::graph
