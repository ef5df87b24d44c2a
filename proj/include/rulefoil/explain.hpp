#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rulefoil/domain.hpp"
#include "rulefoil/fact.hpp"
#include "rulefoil/topsis.hpp"

namespace rulefoil {

// Full negation of a condition tree: De Morgan push-down with double
// negations removed and leaf operators inverted. The result contains no
// NOT nodes.
inline ConditionTree negate(const ConditionTree& t) {
  return detail::to_negation_normal_form(t, true, 0);
}

// Scenario-provided wording for individual conditions, keyed by the
// canonical atom. Rendering falls back to a mechanical phrase when an
// atom has no entry.
class PhraseBook {
 public:
  void add(const AtomicCondition& atom, std::string text) {
    phrases_[canonicalize(atom).key()] = std::move(text);
  }

  std::optional<std::string> lookup(const AtomicCondition& atom) const {
    const auto it = phrases_.find(canonicalize(atom).key());
    if (it == phrases_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t size() const { return phrases_.size(); }

 private:
  std::map<std::string, std::string> phrases_;
};

// Display names and phrasing used while instantiating a pattern.
struct RenderContext {
  const PhraseBook* phrases{nullptr};
  std::map<std::string, std::string> device_names;

  std::string device_display(const std::string& device) const {
    const auto it = device_names.find(device);
    return it == device_names.end() ? device : it->second;
  }
};

namespace detail {

inline std::string atom_clause(const AtomicCondition& atom,
                               const RenderContext& ctx) {
  if (ctx.phrases) {
    if (const auto phrase = ctx.phrases->lookup(atom)) return *phrase;
  }
  std::string s = atom.entity;
  s += ' ';
  s += op_phrase(atom.op);
  s += ' ';
  s += scalar_text(atom.value);
  return s;
}

inline std::string condition_clause(const ConditionTree& t,
                                    const RenderContext& ctx, bool nested) {
  switch (t.kind) {
    case ConditionTree::Kind::Atom:
      return atom_clause(t.atom, ctx);
    case ConditionTree::Kind::Not: {
      const ConditionTree& child = t.children.front();
      if (child.kind == ConditionTree::Kind::Atom) {
        AtomicCondition a = canonicalize(child.atom);
        a.op = inverted(a.op);
        return atom_clause(a, ctx);
      }
      return "not (" + condition_clause(child, ctx, false) + ")";
    }
    case ConditionTree::Kind::And:
    case ConditionTree::Kind::Or: {
      const char* joiner =
          t.kind == ConditionTree::Kind::And ? " and " : " or ";
      std::string s;
      for (std::size_t i = 0; i < t.children.size(); ++i) {
        if (i > 0) s += joiner;
        s += condition_clause(t.children[i], ctx, true);
      }
      if (nested) return "(" + s + ")";
      return s;
    }
  }
  throw ContractError("unreachable condition node kind");
}

inline std::string error_words(const std::string& code) {
  std::string words = code;
  for (char& c : words) {
    if (c == '_' || c == '-') c = ' ';
  }
  return words;
}

}  // namespace detail

// Wording for what a rule does to the device: the action's description
// when one was authored, otherwise "<state> on <device>".
inline std::string action_phrase(const Rule& rule, const std::string& device,
                                 const RenderContext& ctx) {
  const Action* action = rule.action_on(device);
  if (!action) {
    throw ContractError("rule '" + rule.id + "' has no action on device '" +
                        device + "'");
  }
  if (!action->description.empty()) return action->description;
  return action->state + " on " + ctx.device_display(device);
}

// Instantiates the explanation pattern for the case:
//   CC1: "<fact action> occurred instead of <foil action> because <P_HR>."
//   CC2: "<foil action> did not occur because <negated P_ER>."
//   CC3: "<foil action> did not occur because error <HE> occurred in <device>."
// Deterministic: identical inputs produce identical text.
inline std::string render(ConfusingCase cc, const HappenedEvent& fact,
                          const Rule& foil, const std::string& device,
                          const RenderContext& ctx) {
  switch (cc) {
    case ConfusingCase::CC1: {
      if (fact.variant != HappenedEvent::Variant::RuleFired) {
        throw ContractError("CC1 requires a rule-fired fact");
      }
      const std::string fact_action = action_phrase(*fact.rule, device, ctx);
      const std::string foil_action = action_phrase(foil, device, ctx);
      const Action* fact_on = fact.rule->action_on(device);
      const Action* foil_on = foil.action_on(device);
      if (fact_on && foil_on &&
          detail::lower(fact_on->state) == detail::lower(foil_on->state)) {
        throw ContractError(
            "foil and fact set the same state; candidate filtering should"
            " have excluded it");
      }
      std::string because = "its preconditions were met";
      if (fact.rule->precondition) {
        because = detail::condition_clause(
            negation_normal_form(*fact.rule->precondition), ctx, false);
      }
      return fact_action + " occurred instead of " + foil_action +
             " because " + because + ".";
    }
    case ConfusingCase::CC2: {
      if (fact.variant != HappenedEvent::Variant::Nothing) {
        throw ContractError("CC2 requires a nothing-happened fact");
      }
      const std::string foil_action = action_phrase(foil, device, ctx);
      std::string because = "its precondition was not satisfied";
      if (foil.precondition) {
        because =
            detail::condition_clause(negate(*foil.precondition), ctx, false);
      }
      return foil_action + " did not occur because " + because + ".";
    }
    case ConfusingCase::CC3: {
      if (fact.variant != HappenedEvent::Variant::Error) {
        throw ContractError("CC3 requires an error fact");
      }
      const std::string foil_action = action_phrase(foil, device, ctx);
      return foil_action + " did not occur because error " +
             detail::error_words(fact.error_code) + " occurred in " +
             ctx.device_display(fact.error_device) + ".";
    }
  }
  throw ContractError("unreachable confusing case");
}

// A finished contrastive explanation plus everything needed to audit it.
struct Explanation {
  std::string text;          // polished when a rephraser ran, else the fill
  ConfusingCase cc{ConfusingCase::CC1};
  HappenedEvent fact;
  Rule foil;
  std::string pattern_fill;  // raw pattern instantiation, always kept
  bool polished{false};
  // Ranking evidence; absent for CC3, which selects the foil from the log.
  std::optional<topsis::DecisionMatrix> matrix;
  std::optional<topsis::RankingResult> ranking;
};

}  // namespace rulefoil
