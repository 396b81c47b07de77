#include "sgforge/condition.hpp"

#include <algorithm>
#include <cctype>

#include "sgforge/errors.hpp"

namespace sgforge {

std::string_view to_string(CompareOp op) {
    switch (op) {
        case CompareOp::Less: return "<";
        case CompareOp::Greater: return ">";
        case CompareOp::LessEqual: return "<=";
        case CompareOp::GreaterEqual: return ">=";
        case CompareOp::Equal: return "==";
        case CompareOp::NotEqual: return "!=";
    }
    return "?";
}

std::string_view to_string(Satisfiability s) {
    switch (s) {
        case Satisfiability::Always: return "always";
        case Satisfiability::Never: return "never";
        case Satisfiability::Sometimes: return "sometimes";
    }
    return "?";
}

Condition Condition::compare(std::string variable, CompareOp op, Decimal value) {
    Condition c;
    c.kind_ = Kind::Compare;
    c.comparison_ = Comparison{std::move(variable), op, value};
    return c;
}

Condition Condition::negate(Condition operand) {
    Condition c;
    c.kind_ = Kind::Not;
    c.operands_.push_back(std::move(operand));
    return c;
}

Condition Condition::all_of(std::vector<Condition> operands) {
    if (operands.size() == 1) return std::move(operands.front());
    Condition c;
    c.kind_ = Kind::And;
    c.operands_ = std::move(operands);
    return c;
}

Condition Condition::any_of(std::vector<Condition> operands) {
    if (operands.size() == 1) return std::move(operands.front());
    Condition c;
    c.kind_ = Kind::Or;
    c.operands_ = std::move(operands);
    return c;
}

bool operator==(const Condition& a, const Condition& b) {
    if (a.kind_ != b.kind_) return false;
    if (a.kind_ == Condition::Kind::Compare) return a.comparison_ == b.comparison_;
    return a.operands_ == b.operands_;
}

namespace {

constexpr int kMaxNesting = 256;

class ConditionParser {
public:
    explicit ConditionParser(std::string_view text) : text_(text) {}

    Condition parse() {
        skip_space();
        if (pos_ == text_.size()) throw ConditionSyntaxError(pos_, "empty condition");
        Condition result = parse_or(0);
        skip_space();
        if (pos_ != text_.size()) {
            throw ConditionSyntaxError(pos_, std::string("unexpected character '") + text_[pos_] + "'");
        }
        return result;
    }

private:
    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool consume(std::string_view token) {
        skip_space();
        if (text_.substr(pos_, token.size()) == token) {
            pos_ += token.size();
            return true;
        }
        return false;
    }

    Condition parse_or(int depth) {
        std::vector<Condition> terms;
        terms.push_back(parse_and(depth));
        while (consume("||")) terms.push_back(parse_and(depth));
        return Condition::any_of(std::move(terms));
    }

    Condition parse_and(int depth) {
        std::vector<Condition> terms;
        terms.push_back(parse_atom(depth));
        while (consume("&&")) terms.push_back(parse_atom(depth));
        return Condition::all_of(std::move(terms));
    }

    Condition parse_atom(int depth) {
        if (depth > kMaxNesting) throw ConditionSyntaxError(pos_, "nesting too deep");
        skip_space();
        if (pos_ == text_.size()) throw ConditionSyntaxError(pos_, "expected '&', '!' or '('");
        const char c = text_[pos_];
        if (c == '!') {
            ++pos_;
            return Condition::negate(parse_atom(depth + 1));
        }
        if (c == '(') {
            ++pos_;
            Condition inner = parse_or(depth + 1);
            skip_space();
            if (pos_ == text_.size() || text_[pos_] != ')') throw ConditionSyntaxError(pos_, "expected ')'");
            ++pos_;
            return inner;
        }
        if (c == '&') {
            ++pos_;
            return parse_comparison();
        }
        throw ConditionSyntaxError(pos_, std::string("unexpected character '") + c + "'");
    }

    Condition parse_comparison() {
        const std::size_t ident_start = pos_;
        auto is_ident_char = [](char ch, bool first) {
            const auto u = static_cast<unsigned char>(ch);
            return std::isalpha(u) || ch == '_' || (!first && std::isdigit(u));
        };
        while (pos_ < text_.size() && is_ident_char(text_[pos_], pos_ == ident_start)) ++pos_;
        if (pos_ == ident_start) throw ConditionSyntaxError(pos_, "expected identifier after '&'");
        std::string name(text_.substr(ident_start, pos_ - ident_start));

        skip_space();
        const std::size_t op_start = pos_;
        while (pos_ < text_.size() && std::string_view("<>=!").find(text_[pos_]) != std::string_view::npos) ++pos_;
        const std::string_view op_text = text_.substr(op_start, pos_ - op_start);
        CompareOp op;
        if (op_text.empty()) throw ConditionSyntaxError(op_start, "expected comparison operator");
        if (op_text == "<") op = CompareOp::Less;
        else if (op_text == ">") op = CompareOp::Greater;
        else if (op_text == "<=") op = CompareOp::LessEqual;
        else if (op_text == ">=") op = CompareOp::GreaterEqual;
        else if (op_text == "==") op = CompareOp::Equal;
        else if (op_text == "!=") op = CompareOp::NotEqual;
        else throw ConditionSyntaxError(op_start, "unknown comparison operator '" + std::string(op_text) + "'");

        skip_space();
        const std::size_t num_start = pos_;
        if (pos_ < text_.size() && text_[pos_] == '-') ++pos_;
        while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
            ++pos_;
        }
        if (pos_ == num_start) throw ConditionSyntaxError(num_start, "expected number");
        auto value = Decimal::parse(text_.substr(num_start, pos_ - num_start));
        if (!value) throw ConditionSyntaxError(num_start, "invalid number");
        return Condition::compare(std::move(name), op, *value);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

void print_into(const Condition& expr, std::string& out) {
    auto print_operand = [&out](const Condition& operand, bool wrap_compound) {
        const bool compound = operand.kind() == Condition::Kind::And || operand.kind() == Condition::Kind::Or;
        if (wrap_compound && compound) {
            out += '(';
            print_into(operand, out);
            out += ')';
        } else {
            print_into(operand, out);
        }
    };
    switch (expr.kind()) {
        case Condition::Kind::Compare: {
            const auto& c = expr.comparison();
            out += '&';
            out += c.variable;
            out += to_string(c.op);
            out += c.value.to_string();
            return;
        }
        case Condition::Kind::Not:
            out += '!';
            print_operand(expr.operands().front(), true);
            return;
        case Condition::Kind::And:
        case Condition::Kind::Or: {
            const std::string_view sep = expr.kind() == Condition::Kind::And ? " && " : " || ";
            bool first = true;
            for (const auto& operand : expr.operands()) {
                if (!first) out += sep;
                first = false;
                print_operand(operand, true);
            }
            return;
        }
    }
}

void collect_vars(const Condition& expr, std::set<std::string>& out) {
    if (expr.kind() == Condition::Kind::Compare) {
        out.insert(expr.comparison().variable);
        return;
    }
    for (const auto& operand : expr.operands()) collect_vars(operand, out);
}

// `lhs` and `rhs` share a common scale.
bool apply(CompareOp op, std::int64_t lhs, std::int64_t rhs) {
    switch (op) {
        case CompareOp::Less: return lhs < rhs;
        case CompareOp::Greater: return lhs > rhs;
        case CompareOp::LessEqual: return lhs <= rhs;
        case CompareOp::GreaterEqual: return lhs >= rhs;
        case CompareOp::Equal: return lhs == rhs;
        case CompareOp::NotEqual: return lhs != rhs;
    }
    return false;
}

// Evaluates with variable values expressed in half-units (2 * Decimal units),
// which lets midpoints between adjacent constants be represented exactly.
template <typename Lookup>
bool eval_half_units(const Condition& expr, const Lookup& lookup) {
    switch (expr.kind()) {
        case Condition::Kind::Compare: {
            const auto& c = expr.comparison();
            return apply(c.op, lookup(c.variable), 2 * c.value.units());
        }
        case Condition::Kind::Not:
            return !eval_half_units(expr.operands().front(), lookup);
        case Condition::Kind::And:
            return std::all_of(expr.operands().begin(), expr.operands().end(),
                               [&](const Condition& c) { return eval_half_units(c, lookup); });
        case Condition::Kind::Or:
            return std::any_of(expr.operands().begin(), expr.operands().end(),
                               [&](const Condition& c) { return eval_half_units(c, lookup); });
    }
    return false;
}

void collect_constants(const Condition& expr, const std::string& var, std::vector<std::int64_t>& out) {
    if (expr.kind() == Condition::Kind::Compare) {
        if (expr.comparison().variable == var) out.push_back(expr.comparison().value.units());
        return;
    }
    for (const auto& operand : expr.operands()) collect_constants(operand, var, out);
}

// Sample points (half-units) covering every truth-value cell of `var` within
// its range: range endpoints, constants inside the range, and one midpoint
// per open gap between consecutive points.
std::vector<std::int64_t> sample_points(const Condition& expr, const std::string& var, Interval range) {
    std::vector<std::int64_t> points{range.lo.units(), range.hi.units()};
    collect_constants(expr, var, points);
    std::erase_if(points, [&](std::int64_t p) { return p < range.lo.units() || p > range.hi.units(); });
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    std::vector<std::int64_t> samples;
    for (std::size_t i = 0; i < points.size(); ++i) {
        samples.push_back(2 * points[i]);
        if (i + 1 < points.size()) samples.push_back(points[i] + points[i + 1]);
    }
    return samples;
}

constexpr std::size_t kMaxGridPoints = 1 << 16;

Satisfiability analyze(const Condition& expr, const RangeMap& ranges) {
    const auto vars = free_vars(expr);
    std::vector<std::string> names(vars.begin(), vars.end());
    std::vector<std::vector<std::int64_t>> grids;
    std::size_t total = 1;
    bool exact = true;
    for (const auto& name : names) {
        auto it = ranges.find(name);
        if (it == ranges.end()) throw MissingRange(name);
        grids.push_back(sample_points(expr, name, it->second));
        total *= grids.back().size();
        if (total > kMaxGridPoints) {
            exact = false;
            break;
        }
    }

    if (exact) {
        std::vector<std::size_t> index(names.size(), 0);
        auto lookup = [&](const std::string& name) {
            const auto pos = std::lower_bound(names.begin(), names.end(), name) - names.begin();
            return grids[pos][index[pos]];
        };
        bool seen_true = false;
        bool seen_false = false;
        while (true) {
            (eval_half_units(expr, lookup) ? seen_true : seen_false) = true;
            if (seen_true && seen_false) return Satisfiability::Sometimes;
            std::size_t k = 0;
            while (k < index.size() && ++index[k] == grids[k].size()) index[k++] = 0;
            if (k == index.size()) break;
        }
        return seen_true ? Satisfiability::Always : Satisfiability::Never;
    }

    switch (expr.kind()) {
        case Condition::Kind::Compare:
            return Satisfiability::Sometimes;  // unreachable: one variable is always exact
        case Condition::Kind::Not: {
            const auto inner = analyze(expr.operands().front(), ranges);
            if (inner == Satisfiability::Always) return Satisfiability::Never;
            if (inner == Satisfiability::Never) return Satisfiability::Always;
            return Satisfiability::Sometimes;
        }
        case Condition::Kind::And:
        case Condition::Kind::Or: {
            const bool conj = expr.kind() == Condition::Kind::And;
            const auto absorbing = conj ? Satisfiability::Never : Satisfiability::Always;
            const auto neutral = conj ? Satisfiability::Always : Satisfiability::Never;
            bool all_neutral = true;
            for (const auto& operand : expr.operands()) {
                const auto r = analyze(operand, ranges);
                if (r == absorbing) return absorbing;
                if (r != neutral) all_neutral = false;
            }
            return all_neutral ? neutral : Satisfiability::Sometimes;
        }
    }
    return Satisfiability::Sometimes;
}

}  // namespace

Condition parse_condition(std::string_view text) { return ConditionParser(text).parse(); }

std::string print_condition(const Condition& expr) {
    std::string out;
    print_into(expr, out);
    return out;
}

bool eval_condition(const Condition& expr, const VariableEnv& env) {
    switch (expr.kind()) {
        case Condition::Kind::Compare: {
            const auto& c = expr.comparison();
            auto it = env.find(c.variable);
            if (it == env.end()) throw UnboundVariable(c.variable);
            return apply(c.op, it->second.units(), c.value.units());
        }
        case Condition::Kind::Not:
            return !eval_condition(expr.operands().front(), env);
        case Condition::Kind::And:
            for (const auto& operand : expr.operands()) {
                if (!eval_condition(operand, env)) return false;
            }
            return true;
        case Condition::Kind::Or:
            for (const auto& operand : expr.operands()) {
                if (eval_condition(operand, env)) return true;
            }
            return false;
    }
    return false;
}

std::set<std::string> free_vars(const Condition& expr) {
    std::set<std::string> out;
    collect_vars(expr, out);
    return out;
}

Satisfiability satisfiable(const Condition& expr, const RangeMap& ranges) { return analyze(expr, ranges); }

}  // namespace sgforge
