#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "traderisk/model.hpp"

namespace traderisk::stats {

using Series = std::vector<std::optional<double>>;

/// Regularized incomplete beta I_x(a, b) via Lentz's continued fraction.
double incomplete_beta(double a, double b, double x);

/// Two-sided p-value of a Student-t statistic with `dof` degrees of freedom.
double student_t_two_sided_p(double t, double dof);

struct Correlation {
  std::size_t n = 0;  // complete observations used
  std::optional<double> rho;
  std::optional<double> p_value;
};

/// Pearson correlation over pairs where both values are present, with the
/// two-sided t-test p-value on n - 2 degrees of freedom. Unavailable for
/// n < 3 or zero variance.
Correlation pearson(const Series& x, const Series& y);
Correlation pearson(std::span<const double> x, std::span<const double> y);

/// First-order partial correlation of x and y controlling for z, on
/// triple-complete observations, p-value on n - 3 degrees of freedom.
/// Unavailable for n < 4 or |rho_xz| = 1 or |rho_yz| = 1.
Correlation partial_pearson(const Series& x, const Series& y, const Series& z);
Correlation partial_pearson(std::span<const double> x, std::span<const double> y,
                            std::span<const double> z);

/// "***" for p < 0.001, "**" for p < 0.01, "*" for p < 0.05.
std::string significance_stars(const std::optional<double>& p);

struct CorrelationSpec {
  std::string x;
  std::string y;
  std::optional<std::string> control;
};

/// Column of `table` by variable name, one value per resource in id order.
///
/// Global names: avg_degree, log_avg_degree, lambda, scc, scarcity, ttv, csr.
/// Regional names take an @REGION suffix: pagerank, in_strength, in_degree,
/// traderisk, instrength_traderisk, import_reliance, volatility,
/// trade_barrier. Throws std::invalid_argument for unknown names.
Series column(const IndicatorTable& table, const std::string& name);

/// One entry per spec item; unavailable results are recorded, never thrown.
CorrelationReport correlation_suite(const IndicatorTable& table,
                                    const std::vector<CorrelationSpec>& spec);

/// lambda and scc against csr, scarcity and ttv.
std::vector<CorrelationSpec> global_correlation_spec();
/// traderisk, import_reliance, pagerank, instrength_traderisk against
/// volatility and trade_barrier of every region.
std::vector<CorrelationSpec> regional_correlation_spec(const std::vector<std::string>& regions);
/// traderisk against volatility controlling for instrength_traderisk.
std::vector<CorrelationSpec> partial_correlation_spec(const std::vector<std::string>& regions);
std::vector<CorrelationSpec> default_correlation_spec(const std::vector<std::string>& regions);

}  // namespace traderisk::stats
