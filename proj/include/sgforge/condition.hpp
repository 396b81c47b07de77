#pragma once

// Guard expression language.
//
//   cond := or
//   or   := and ("||" and)*
//   and  := atom ("&&" atom)*
//   atom := "!" atom | "(" cond ")" | "&" ident cmp number
//   cmp  := "<" | ">" | "<=" | ">=" | "==" | "!="
//
// Storyboard files only ever use a single `&ident cmp number` comparison; the
// boolean connectives are an extension so compound guards can be expressed.

#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sgforge/decimal.hpp"

namespace sgforge {

enum class CompareOp { Less, Greater, LessEqual, GreaterEqual, Equal, NotEqual };

std::string_view to_string(CompareOp op);

struct Comparison {
    std::string variable;
    CompareOp op = CompareOp::Equal;
    Decimal value;

    friend bool operator==(const Comparison&, const Comparison&) = default;
};

class Condition {
public:
    enum class Kind { Compare, Not, And, Or };

    static Condition compare(std::string variable, CompareOp op, Decimal value);
    static Condition negate(Condition operand);
    /// Conjunction; a single operand is returned unchanged.
    static Condition all_of(std::vector<Condition> operands);
    static Condition any_of(std::vector<Condition> operands);

    Kind kind() const { return kind_; }
    /// Only meaningful when kind() == Kind::Compare.
    const Comparison& comparison() const { return comparison_; }
    std::span<const Condition> operands() const { return operands_; }

    friend bool operator==(const Condition& a, const Condition& b);

private:
    Condition() = default;

    Kind kind_ = Kind::Compare;
    Comparison comparison_;
    std::vector<Condition> operands_;
};

using VariableEnv = std::map<std::string, Decimal, std::less<>>;
using RangeMap = std::map<std::string, Interval, std::less<>>;

/// Throws ConditionSyntaxError.
Condition parse_condition(std::string_view text);

/// Canonical text form; parse_condition(print_condition(c)) == c.
std::string print_condition(const Condition& expr);

/// Throws UnboundVariable when a free variable has no binding.
bool eval_condition(const Condition& expr, const VariableEnv& env);

std::set<std::string> free_vars(const Condition& expr);

enum class Satisfiability { Always, Never, Sometimes };

std::string_view to_string(Satisfiability s);

/// Decides whether `expr` holds for all, none, or some assignments drawn from
/// the declared real-valued ranges. Exact whenever the joint sample grid of
/// the free variables is small; otherwise combines sub-results and may answer
/// Sometimes conservatively. Never wrongly answers Always or Never.
///
/// Throws MissingRange when a free variable has no range.
Satisfiability satisfiable(const Condition& expr, const RangeMap& ranges);

}  // namespace sgforge
