#include "oobr/rules.hpp"

#include <algorithm>
#include <sstream>

namespace oobr {

namespace {

std::string_view op_text(Condition::Op op) {
    switch (op) {
        case Condition::Op::Eq: return "==";
        case Condition::Op::Ne: return "!=";
        case Condition::Op::Le: return "<=";
        case Condition::Op::Ge: return ">=";
    }
    return "?";
}

}  // namespace

std::string Condition::describe() const {
    std::ostringstream os;
    if (field) os << field_name(*field) << ' ' << op_text(op) << ' ' << value;
    else os << derived_name(*var) << ' ' << op_text(op) << " \"" << label << '"';
    return os.str();
}

std::optional<bool> evaluate_condition(const Condition& c, const RuleInputs& in) {
    if (c.field) {
        const auto& v = in.ints[static_cast<std::size_t>(*c.field)];
        if (!v) return std::nullopt;
        switch (c.op) {
            case Condition::Op::Eq: return *v == c.value;
            case Condition::Op::Ne: return *v != c.value;
            case Condition::Op::Le: return *v <= c.value;
            case Condition::Op::Ge: return *v >= c.value;
        }
        return std::nullopt;
    }
    if (!in.derived) throw ConfigError("rule reads derived variable " + std::string(derived_name(*c.var)) +
                                       " but none were supplied");
    const auto& v = (*in.derived)[static_cast<std::size_t>(*c.var)];
    if (!v) return std::nullopt;
    switch (c.op) {
        case Condition::Op::Eq: return *v == c.label;
        case Condition::Op::Ne: return *v != c.label;
        default: throw ConfigError("ordering comparison on a categorical variable");
    }
}

std::optional<std::string_view> RecodeRule::evaluate(const RuleInputs& in) const {
    for (const auto& g : guards) {
        // A guard holds only when every condition is definitely true.
        bool holds = std::ranges::all_of(g.all_of, [&](const Condition& c) {
            auto r = evaluate_condition(c, in);
            return r.has_value() && *r;
        });
        if (holds) return std::string_view(g.label);
    }
    if (default_label) return std::string_view(*default_label);
    return std::nullopt;
}

std::vector<IntField> RecodeRule::source_fields() const {
    std::vector<IntField> out;
    for (const auto& g : guards)
        for (const auto& c : g.all_of)
            if (c.field && std::ranges::find(out, *c.field) == out.end()) out.push_back(*c.field);
    return out;
}

std::vector<DerivedVar> RecodeRule::source_vars() const {
    std::vector<DerivedVar> out;
    for (const auto& g : guards)
        for (const auto& c : g.all_of)
            if (c.var && std::ranges::find(out, *c.var) == out.end()) out.push_back(*c.var);
    return out;
}

std::string render_rules(std::span<const RecodeRule> rules) {
    std::ostringstream os;
    for (const auto& r : rules) {
        os << derived_name(r.target) << "  <-  ";
        bool first = true;
        for (auto f : r.source_fields()) {
            os << (first ? "" : ", ") << field_name(f);
            first = false;
        }
        for (auto v : r.source_vars()) {
            os << (first ? "" : ", ") << derived_name(v);
            first = false;
        }
        os << '\n';
        int n = 1;
        for (const auto& g : r.guards) {
            os << "  " << n++ << ". ";
            for (std::size_t i = 0; i < g.all_of.size(); ++i) os << (i ? " & " : "") << g.all_of[i].describe();
            os << "  ->  \"" << g.label << "\"\n";
        }
        os << "  otherwise  ->  " << (r.default_label ? "\"" + *r.default_label + "\"" : std::string("<missing>")) << '\n';
        if (!r.levels.empty()) {
            os << "  levels:";
            for (const auto& l : r.levels) os << " \"" << l << '"';
            os << '\n';
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace oobr
