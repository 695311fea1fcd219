// Ordered guard rules with missing-value semantics.
//
// A rule is a list of guards evaluated top to bottom; the first guard whose
// conditions all hold selects its label, otherwise the default applies.
// A condition that compares a missing value never holds, so a missing input
// can only ever move evaluation to a later guard or to the default.
#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oobr/schema.hpp"

namespace oobr {

struct Condition {
    enum class Op : std::uint8_t { Eq, Ne, Le, Ge };

    /// Either a raw integer field or a previously derived variable.
    std::optional<IntField> field;
    std::optional<DerivedVar> var;
    Op op = Op::Eq;
    int value = 0;
    std::string label;  // for derived-variable comparisons (Eq/Ne only)

    static Condition on(IntField f, Op op, int value) { return {f, std::nullopt, op, value, {}}; }
    static Condition on(DerivedVar v, Op op, std::string label) { return {std::nullopt, v, op, 0, std::move(label)}; }

    std::string describe() const;
};

struct Guard {
    std::vector<Condition> all_of;
    std::string label;
};

/// Values a rule may read.
struct RuleInputs {
    std::span<const std::optional<int>, kIntFieldCount> ints;
    const DerivedValues* derived = nullptr;
};

struct RecodeRule {
    DerivedVar target;
    std::vector<Guard> guards;
    /// nullopt means the default output is missing.
    std::optional<std::string> default_label;
    /// Category order for tables; empty means natural order.
    std::vector<std::string> levels;

    /// Label of the first matching guard (or the default). The returned view
    /// points into this rule.
    std::optional<std::string_view> evaluate(const RuleInputs& in) const;

    /// Raw fields the guards read, in first-use order.
    std::vector<IntField> source_fields() const;
    std::vector<DerivedVar> source_vars() const;
};

/// Three-valued evaluation of one condition: nullopt when an operand is missing.
std::optional<bool> evaluate_condition(const Condition& c, const RuleInputs& in);

/// Human-readable listing: one block per rule, guards in evaluation order.
std::string render_rules(std::span<const RecodeRule> rules);

}  // namespace oobr
