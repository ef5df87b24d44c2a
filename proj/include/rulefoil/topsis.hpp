#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "rulefoil/errors.hpp"

namespace rulefoil::topsis {

// m alternatives scored against n benefit-type criteria.
struct DecisionMatrix {
  std::vector<std::string> alternatives;
  std::vector<std::string> criteria;
  std::vector<std::vector<double>> values;  // rows follow `alternatives`

  std::size_t rows() const { return values.size(); }
  std::size_t cols() const { return criteria.size(); }

  void check() const {
    if (values.empty() || alternatives.empty()) {
      throw ContractError("a decision matrix needs at least one alternative");
    }
    if (alternatives.size() != values.size()) {
      throw ContractError("one row per alternative required");
    }
    if (criteria.empty()) {
      throw ContractError("a decision matrix needs at least one criterion");
    }
    for (const auto& row : values) {
      if (row.size() != criteria.size()) {
        throw ContractError("all rows must match the criteria count");
      }
      for (const double v : row) {
        if (!std::isfinite(v) || v < 0.0) {
          throw ValidationError("matrix entries must be finite and >= 0");
        }
      }
    }
  }

  nlohmann::json to_json() const {
    return nlohmann::json{{"alternatives", alternatives},
                          {"criteria", criteria},
                          {"values", values}};
  }

  static DecisionMatrix from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("alternatives") ||
        !j.contains("criteria") || !j.contains("values")) {
      throw ValidationError(
          "a matrix needs 'alternatives', 'criteria' and 'values'");
    }
    DecisionMatrix m;
    try {
      m.alternatives = j.at("alternatives").get<std::vector<std::string>>();
      m.criteria = j.at("criteria").get<std::vector<std::string>>();
      m.values = j.at("values").get<std::vector<std::vector<double>>>();
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(std::string("malformed matrix: ") + e.what());
    }
    m.check();
    return m;
  }
};

// Non-negative criterion weights summing to one.
struct Weights {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }

  static Weights uniform(std::size_t n) {
    if (n == 0) throw ContractError("cannot weight zero criteria");
    return Weights{std::vector<double>(n, 1.0 / static_cast<double>(n))};
  }

  static Weights of(std::vector<double> values) {
    if (values.empty()) throw ValidationError("weights must be non-empty");
    double sum = 0.0;
    for (const double w : values) {
      if (!std::isfinite(w) || w < 0.0) {
        throw ValidationError("weights must be finite and >= 0");
      }
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw ValidationError("weights must sum to 1");
    }
    return Weights{std::move(values)};
  }
};

// Everything the ranking computed, kept for auditability.
struct RankingResult {
  std::vector<std::vector<double>> normalized;  // r_ij
  std::vector<std::vector<double>> weighted;    // t_ij = w_j * r_ij
  std::vector<double> ideal;                    // column maxima of t
  std::vector<double> anti_ideal;               // column minima of t
  std::vector<double> d_best;                   // L2 distance to ideal
  std::vector<double> d_worst;                  // L2 distance to anti-ideal
  std::vector<double> closeness;                // d_worst / (d_worst + d_best)
  std::size_t winner{0};

  nlohmann::json to_json() const {
    return nlohmann::json{
        {"normalized", normalized}, {"weighted", weighted},
        {"ideal", ideal},           {"anti_ideal", anti_ideal},
        {"d_best", d_best},         {"d_worst", d_worst},
        {"closeness", closeness},   {"winner", winner}};
  }
};

// Column-wise vector normalization: each entry divided by its column's
// Euclidean norm. An all-zero column stays all zero and is inert for the
// rest of the ranking.
inline std::vector<std::vector<double>> normalize(
    const std::vector<std::vector<double>>& values) {
  if (values.empty()) {
    throw ContractError("cannot normalize an empty matrix");
  }
  const std::size_t m = values.size();
  const std::size_t n = values.front().size();
  std::vector<double> norms(n, 0.0);
  for (const auto& row : values) {
    if (row.size() != n) throw ContractError("ragged matrix");
    for (std::size_t j = 0; j < n; ++j) norms[j] += row[j] * row[j];
  }
  for (double& norm : norms) norm = std::sqrt(norm);

  std::vector<std::vector<double>> out(m, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out[i][j] = norms[j] == 0.0 ? 0.0 : values[i][j] / norms[j];
    }
  }
  return out;
}

// Ranks the alternatives by relative closeness to the ideal solution and
// picks the winner. Ties on closeness resolve to the lexicographically
// smallest alternative label, keeping the result deterministic across
// platforms. When ideal and anti-ideal coincide every alternative is
// simultaneously best; closeness is then defined as 1.
inline RankingResult rank(const DecisionMatrix& matrix,
                          const Weights& weights) {
  matrix.check();
  const std::size_t m = matrix.rows();
  const std::size_t n = matrix.cols();
  if (weights.size() != n) {
    throw ContractError("weight count must match the criteria count");
  }

  RankingResult r;
  r.normalized = normalize(matrix.values);

  r.weighted.assign(m, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      r.weighted[i][j] = weights.values[j] * r.normalized[i][j];
    }
  }

  r.ideal.assign(n, 0.0);
  r.anti_ideal.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double best = r.weighted[0][j];
    double worst = r.weighted[0][j];
    for (std::size_t i = 1; i < m; ++i) {
      best = std::max(best, r.weighted[i][j]);
      worst = std::min(worst, r.weighted[i][j]);
    }
    r.ideal[j] = best;
    r.anti_ideal[j] = worst;
  }

  r.d_best.assign(m, 0.0);
  r.d_worst.assign(m, 0.0);
  r.closeness.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double sq_best = 0.0;
    double sq_worst = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double db = r.weighted[i][j] - r.ideal[j];
      const double dw = r.weighted[i][j] - r.anti_ideal[j];
      sq_best += db * db;
      sq_worst += dw * dw;
    }
    r.d_best[i] = std::sqrt(sq_best);
    r.d_worst[i] = std::sqrt(sq_worst);
    const double total = r.d_best[i] + r.d_worst[i];
    r.closeness[i] = total == 0.0 ? 1.0 : r.d_worst[i] / total;
  }

  r.winner = 0;
  for (std::size_t i = 1; i < m; ++i) {
    if (r.closeness[i] > r.closeness[r.winner] ||
        (r.closeness[i] == r.closeness[r.winner] &&
         matrix.alternatives[i] < matrix.alternatives[r.winner])) {
      r.winner = i;
    }
  }
  return r;
}

}  // namespace rulefoil::topsis
