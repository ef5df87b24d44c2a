#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rulefoil/domain.hpp"
#include "rulefoil/fact.hpp"
#include "rulefoil/history.hpp"
#include "rulefoil/topsis.hpp"

namespace rulefoil {

// Per-candidate expectation factors. Similarity only exists when the fact
// is a fired rule to compare against.
struct FactorVector {
  std::optional<double> similarity;
  int ownership{0};
  std::int64_t frequency{0};
  std::int64_t occurrence{0};
};

// Rules eligible to be the expected rule: enabled, with at least one
// action on the device. When the fact is a fired rule, that rule and
// every rule setting the same state on the device are ruled out -- the
// user would not mistake them for an alternative.
inline std::vector<Rule> candidate_rules(const RuleSet& rules,
                                         const std::string& device,
                                         const HappenedEvent& fact) {
  if (fact.variant == HappenedEvent::Variant::Error) {
    throw ContractError("candidate filtering does not apply to error facts");
  }

  std::set<std::string> excluded_states;
  std::string happened_id;
  if (fact.variant == HappenedEvent::Variant::RuleFired) {
    happened_id = fact.rule->id;
    for (const auto& a : fact.rule->actions) {
      if (a.device == device) {
        excluded_states.insert(detail::lower(a.state));
      }
    }
  }

  std::vector<Rule> candidates;
  for (const auto& rule : rules.rules()) {
    if (!rule.enabled) continue;
    const Action* action = rule.action_on(device);
    if (!action) continue;
    if (rule.id == happened_id) continue;
    if (excluded_states.count(detail::lower(action->state)) > 0) {
      continue;
    }
    candidates.push_back(rule);
  }
  if (candidates.empty()) {
    throw NoCandidateError("no candidate rule acts on device '" + device +
                           "'");
  }
  return candidates;
}

// Jaccard index over the two rules' flattened condition sets. Two empty
// sets share no expectation and score 0 rather than dividing 0 by 0.
inline double precondition_similarity(const Rule& candidate,
                                      const Rule& happened) {
  const std::set<AtomicCondition> a = candidate.condition_set();
  const std::set<AtomicCondition> b = happened.condition_set();
  if (a.empty() && b.empty()) return 0.0;

  std::size_t shared = 0;
  for (const auto& cond : a) {
    if (b.count(cond) > 0) ++shared;
  }
  const std::size_t total = a.size() + b.size() - shared;
  return static_cast<double>(shared) / static_cast<double>(total);
}

// 1 iff the user created the rule.
inline int ownership(const Rule& candidate, const std::string& user) {
  return candidate.owner == user ? 1 : 0;
}

// Inputs the factor columns are computed from.
struct ScoringContext {
  const EventLog& log;
  std::string user;
  TimeWindow window;
  std::optional<Rule> happened_rule;  // required for CC1, absent otherwise
  bool occurrence_per_user{true};
};

inline FactorVector score_factors(const Rule& candidate, ConfusingCase cc,
                                  const ScoringContext& ctx) {
  FactorVector f;
  if (cc == ConfusingCase::CC1) {
    f.similarity = precondition_similarity(candidate, *ctx.happened_rule);
  }
  f.ownership = ownership(candidate, ctx.user);
  f.frequency = ctx.log.count_fired(candidate.id, ctx.window);
  const std::optional<std::string> scope =
      ctx.occurrence_per_user ? std::optional<std::string>(ctx.user)
                              : std::nullopt;
  f.occurrence = ctx.log.count_explained(candidate.id, scope, ctx.window);
  return f;
}

// Assembles the decision matrix for TOPSIS. CC1 uses all four factors,
// CC2 drops precondition similarity; rows follow candidate order and
// carry full-precision values.
inline topsis::DecisionMatrix build_matrix(const std::vector<Rule>& candidates,
                                           ConfusingCase cc,
                                           const ScoringContext& ctx) {
  if (cc == ConfusingCase::CC3) {
    throw ContractError("no decision matrix is built for error facts");
  }
  if ((cc == ConfusingCase::CC1) != ctx.happened_rule.has_value()) {
    throw ContractError("a happened rule is required exactly for CC1");
  }
  if (candidates.empty()) {
    throw NoCandidateError("cannot build a matrix without candidates");
  }

  topsis::DecisionMatrix m;
  if (cc == ConfusingCase::CC1) {
    m.criteria = {"similarity", "ownership", "frequency", "occurrence"};
  } else {
    m.criteria = {"ownership", "frequency", "occurrence"};
  }
  m.alternatives.reserve(candidates.size());
  m.values.reserve(candidates.size());
  for (const auto& rule : candidates) {
    const FactorVector f = score_factors(rule, cc, ctx);
    std::vector<double> row;
    row.reserve(m.criteria.size());
    if (cc == ConfusingCase::CC1) row.push_back(*f.similarity);
    row.push_back(static_cast<double>(f.ownership));
    row.push_back(static_cast<double>(f.frequency));
    row.push_back(static_cast<double>(f.occurrence));
    m.alternatives.push_back(rule.id);
    m.values.push_back(std::move(row));
  }
  m.check();
  return m;
}

}  // namespace rulefoil
