#include "traderisk/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace traderisk::stats {

namespace {

// Continued fraction for I_x(a, b), modified Lentz.
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) return h;
  }
  throw std::runtime_error("incomplete_beta: continued fraction did not converge");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("incomplete_beta: a, b must be > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("incomplete_beta: x outside [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double dof) {
  if (std::isinf(t)) return 0.0;
  return incomplete_beta(dof / 2.0, 0.5, dof / (dof + t * t));
}

namespace {

struct Moments {
  std::size_t n = 0;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
};

Moments centered_moments(const std::vector<double>& x, const std::vector<double>& y) {
  Moments m;
  m.n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < m.n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(m.n);
  my /= static_cast<double>(m.n);
  for (std::size_t i = 0; i < m.n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    m.sxx += dx * dx;
    m.syy += dy * dy;
    m.sxy += dx * dy;
  }
  return m;
}

std::optional<double> correlation_of(const Moments& m) {
  if (!(m.sxx > 0.0 && m.syy > 0.0)) return std::nullopt;
  double r = m.sxy / std::sqrt(m.sxx * m.syy);
  return std::clamp(r, -1.0, 1.0);
}

double p_value_for(double rho, double dof) {
  if (std::abs(rho) >= 1.0) return 0.0;
  const double t = rho * std::sqrt(dof / (1.0 - rho * rho));
  return student_t_two_sided_p(t, dof);
}

Correlation pearson_complete(const std::vector<double>& x, const std::vector<double>& y) {
  Correlation c;
  c.n = x.size();
  if (c.n < 3) return c;
  c.rho = correlation_of(centered_moments(x, y));
  if (c.rho) c.p_value = p_value_for(*c.rho, static_cast<double>(c.n - 2));
  return c;
}

Correlation partial_complete(const std::vector<double>& x, const std::vector<double>& y,
                             const std::vector<double>& z) {
  Correlation c;
  c.n = x.size();
  if (c.n < 4) return c;
  const auto rxy = correlation_of(centered_moments(x, y));
  const auto rxz = correlation_of(centered_moments(x, z));
  const auto ryz = correlation_of(centered_moments(y, z));
  if (!rxy || !rxz || !ryz) return c;
  const double denom = (1.0 - *rxz * *rxz) * (1.0 - *ryz * *ryz);
  if (!(denom > 0.0)) return c;
  c.rho = std::clamp((*rxy - *rxz * *ryz) / std::sqrt(denom), -1.0, 1.0);
  c.p_value = p_value_for(*c.rho, static_cast<double>(c.n - 3));
  return c;
}

}  // namespace

Correlation pearson(const Series& x, const Series& y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] && y[i]) {
      xs.push_back(*x[i]);
      ys.push_back(*y[i]);
    }
  }
  return pearson_complete(xs, ys);
}

Correlation pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
  return pearson_complete({x.begin(), x.end()}, {y.begin(), y.end()});
}

Correlation partial_pearson(const Series& x, const Series& y, const Series& z) {
  if (x.size() != y.size() || x.size() != z.size()) {
    throw std::invalid_argument("partial_pearson: length mismatch");
  }
  std::vector<double> xs, ys, zs;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] && y[i] && z[i]) {
      xs.push_back(*x[i]);
      ys.push_back(*y[i]);
      zs.push_back(*z[i]);
    }
  }
  return partial_complete(xs, ys, zs);
}

Correlation partial_pearson(std::span<const double> x, std::span<const double> y,
                            std::span<const double> z) {
  if (x.size() != y.size() || x.size() != z.size()) {
    throw std::invalid_argument("partial_pearson: length mismatch");
  }
  return partial_complete({x.begin(), x.end()}, {y.begin(), y.end()}, {z.begin(), z.end()});
}

std::string significance_stars(const std::optional<double>& p) {
  if (!p) return "";
  if (*p < 0.001) return "***";
  if (*p < 0.01) return "**";
  if (*p < 0.05) return "*";
  return "";
}

Series column(const IndicatorTable& table, const std::string& name) {
  Series out;
  const auto at = name.find('@');
  if (at == std::string::npos) {
    using Getter = std::optional<double> (*)(const GlobalIndicators&);
    Getter get = nullptr;
    if (name == "avg_degree") {
      get = [](const GlobalIndicators& g) { return g.avg_degree; };
    } else if (name == "log_avg_degree") {
      get = [](const GlobalIndicators& g) -> std::optional<double> {
        if (!g.avg_degree || *g.avg_degree <= 0.0) return std::nullopt;
        return std::log(*g.avg_degree);
      };
    } else if (name == "lambda") {
      get = [](const GlobalIndicators& g) { return g.largest_eigenvalue; };
    } else if (name == "scc") {
      get = [](const GlobalIndicators& g) { return g.scc_fraction; };
    } else if (name == "scarcity") {
      get = [](const GlobalIndicators& g) { return g.scarcity; };
    } else if (name == "ttv") {
      get = [](const GlobalIndicators& g) { return g.total_trade_volume; };
    } else if (name == "csr") {
      get = [](const GlobalIndicators& g) { return g.csr; };
    } else {
      throw std::invalid_argument("unknown variable '" + name + "'");
    }
    for (const auto& [resource, g] : table.global) out.push_back(get(g));
    return out;
  }

  const std::string field = name.substr(0, at);
  const std::string region = name.substr(at + 1);
  using Getter = std::optional<double> (*)(const RegionalIndicators&);
  Getter get = nullptr;
  if (field == "pagerank") {
    get = [](const RegionalIndicators& r) { return r.pagerank; };
  } else if (field == "in_strength") {
    get = [](const RegionalIndicators& r) { return r.in_strength; };
  } else if (field == "in_degree") {
    get = [](const RegionalIndicators& r) { return r.in_degree; };
  } else if (field == "traderisk") {
    get = [](const RegionalIndicators& r) { return r.traderisk; };
  } else if (field == "instrength_traderisk") {
    get = [](const RegionalIndicators& r) { return r.instrength_traderisk; };
  } else if (field == "import_reliance") {
    get = [](const RegionalIndicators& r) { return r.import_reliance; };
  } else if (field == "volatility") {
    get = [](const RegionalIndicators& r) { return r.volatility; };
  } else if (field == "trade_barrier") {
    get = [](const RegionalIndicators& r) { return r.trade_barrier; };
  } else {
    throw std::invalid_argument("unknown variable '" + name + "'");
  }
  // One row per resource in the global table, so columns line up.
  for (const auto& [resource, g] : table.global) {
    auto it = table.regional.find(RegionKey{resource, region});
    out.push_back(it == table.regional.end() ? std::nullopt : get(it->second));
  }
  return out;
}

CorrelationReport correlation_suite(const IndicatorTable& table,
                                    const std::vector<CorrelationSpec>& spec) {
  CorrelationReport report;
  for (const CorrelationSpec& item : spec) {
    CorrelationEntry entry;
    entry.x_name = item.x;
    entry.y_name = item.y;
    entry.controlling_for = item.control;
    Series x, y;
    try {
      x = column(table, item.x);
      y = column(table, item.y);
    } catch (const std::invalid_argument&) {
      report.entries.push_back(std::move(entry));
      continue;
    }
    const Correlation plain = pearson(x, y);
    entry.n = plain.n;
    entry.rho = plain.rho;
    entry.p_value = plain.p_value;
    if (item.control) {
      try {
        const Correlation partial = partial_pearson(x, y, column(table, *item.control));
        entry.partial_n = partial.n;
        entry.partial_rho = partial.rho;
        entry.partial_p = partial.p_value;
      } catch (const std::invalid_argument&) {
      }
    }
    report.entries.push_back(std::move(entry));
  }
  return report;
}

std::vector<CorrelationSpec> global_correlation_spec() {
  std::vector<CorrelationSpec> spec;
  for (const char* x : {"lambda", "scc"}) {
    for (const char* y : {"csr", "scarcity", "ttv"}) spec.push_back({x, y, std::nullopt});
  }
  return spec;
}

std::vector<CorrelationSpec> regional_correlation_spec(const std::vector<std::string>& regions) {
  std::vector<CorrelationSpec> spec;
  for (const char* x : {"traderisk", "import_reliance", "pagerank", "instrength_traderisk"}) {
    for (const char* y : {"volatility", "trade_barrier"}) {
      for (const std::string& region : regions) {
        spec.push_back({std::string(x) + "@" + region, std::string(y) + "@" + region, std::nullopt});
      }
    }
  }
  return spec;
}

std::vector<CorrelationSpec> partial_correlation_spec(const std::vector<std::string>& regions) {
  std::vector<CorrelationSpec> spec;
  for (const std::string& region : regions) {
    spec.push_back({"traderisk@" + region, "volatility@" + region,
                    "instrength_traderisk@" + region});
  }
  return spec;
}

std::vector<CorrelationSpec> default_correlation_spec(const std::vector<std::string>& regions) {
  auto spec = global_correlation_spec();
  for (auto& s : regional_correlation_spec(regions)) spec.push_back(std::move(s));
  for (auto& s : partial_correlation_spec(regions)) spec.push_back(std::move(s));
  return spec;
}

}  // namespace traderisk::stats
