#include "doctest.h"

#include "../support/generators.hpp"
#include "sgforge/condition.hpp"
#include "sgforge/errors.hpp"

using namespace sgforge;

namespace {

Decimal D(long long v) { return Decimal::from_int(v); }
RangeMap score_range(long long lo, long long hi) { return {{"score", Interval{D(lo), D(hi)}}}; }

}  // namespace

TEST_CASE("decimal parse and shortest rendering") {
    CHECK(Decimal::parse("15")->to_string() == "15");
    CHECK(Decimal::parse("-3.50")->to_string() == "-3.5");
    CHECK(Decimal::parse("0.000001")->units() == 1);
    CHECK_FALSE(Decimal::parse("0.0000001"));
    CHECK_FALSE(Decimal::parse("1e3"));
    CHECK_FALSE(Decimal::parse(""));
    CHECK_FALSE(Decimal::parse("-"));
    CHECK_FALSE(Decimal::parse("1000000000001"));
    CHECK(Decimal::from_double(2.5).to_string() == "2.5");
    CHECK(D(2) + D(3) == D(5));
}

TEST_CASE("score guard parses to a single comparison") {
    const auto c = parse_condition("&score>15");
    CHECK(c == Condition::compare("score", CompareOp::Greater, D(15)));
    CHECK(c.kind() == Condition::Kind::Compare);
    CHECK(print_condition(c) == "&score>15");
}

TEST_CASE("idempotent conjunction") {
    const auto c = parse_condition("&score>15 && &score>15");
    REQUIRE(c.kind() == Condition::Kind::And);
    REQUIRE(c.operands().size() == 2);
    CHECK(c.operands()[0] == c.operands()[1]);
    const auto single = parse_condition("&score>15");
    for (long long h = 0; h <= 60; ++h) {
        const VariableEnv env{{"score", Decimal::from_units(h * Decimal::kScale / 2)}};
        CHECK(eval_condition(c, env) == eval_condition(single, env));
    }
    CHECK(satisfiable(c, score_range(0, 20)) == satisfiable(single, score_range(0, 20)));
}

TEST_CASE("syntax errors carry the offset") {
    try {
        parse_condition("&score>");
        FAIL("expected a syntax error");
    } catch (const ConditionSyntaxError& e) {
        CHECK(e.offset() == 7);
    }
    CHECK_THROWS_AS(parse_condition(""), ConditionSyntaxError);
    CHECK_THROWS_AS(parse_condition("score>1"), ConditionSyntaxError);
    CHECK_THROWS_AS(parse_condition("&score=>1"), ConditionSyntaxError);
    CHECK_THROWS_AS(parse_condition("(&a>1"), ConditionSyntaxError);
    CHECK_THROWS_AS(parse_condition("&a>1 &&"), ConditionSyntaxError);
    CHECK_THROWS_AS(parse_condition("&a>1 extra"), ConditionSyntaxError);
    CHECK_THROWS_AS(parse_condition(std::string(300, '!') + "&a>1"), ConditionSyntaxError);
}

TEST_CASE("negative and fractional constants") {
    const auto c = parse_condition("&x>=-2.5");
    CHECK(c.comparison().value == Decimal::from_units(-2'500'000));
    CHECK(print_condition(c) == "&x>=-2.5");
}

TEST_CASE("evaluation") {
    const auto gt = parse_condition("&score>15");
    CHECK(eval_condition(gt, {{"score", D(20)}}));
    CHECK_FALSE(eval_condition(gt, {{"score", D(15)}}));
    const auto contradiction = parse_condition("&score<10 && &score>15");
    for (long long v = -5; v <= 30; ++v) CHECK_FALSE(eval_condition(contradiction, {{"score", D(v)}}));
    CHECK_THROWS_AS(eval_condition(gt, {{"lives", D(1)}}), UnboundVariable);
}

TEST_CASE("free variables") {
    CHECK(free_vars(parse_condition("&score>15")) == std::set<std::string>{"score"});
    CHECK(free_vars(parse_condition("&score>0 && &lives==3")) == std::set<std::string>{"score", "lives"});
}

TEST_CASE("satisfiability examples") {
    CHECK(satisfiable(parse_condition("&score>15"), score_range(0, 20)) == Satisfiability::Sometimes);
    CHECK(satisfiable(parse_condition("&score>15"), score_range(0, 10)) == Satisfiability::Never);
    CHECK(satisfiable(parse_condition("&score<10 && &score>15"), score_range(0, 20)) == Satisfiability::Never);
    CHECK(satisfiable(parse_condition("&score>=0"), score_range(0, 20)) == Satisfiability::Always);
    CHECK(satisfiable(parse_condition("&score>3 && &score<4"), score_range(0, 20)) == Satisfiability::Sometimes);
    CHECK(satisfiable(parse_condition("&score==7"), score_range(7, 7)) == Satisfiability::Always);
    CHECK_THROWS_AS(satisfiable(parse_condition("&lives>1"), score_range(0, 1)), MissingRange);
}

TEST_CASE("satisfiability over two variables") {
    const RangeMap ranges{{"a", Interval{D(0), D(10)}}, {"b", Interval{D(0), D(10)}}};
    CHECK(satisfiable(parse_condition("&a>5 && &b<3"), ranges) == Satisfiability::Sometimes);
    CHECK(satisfiable(parse_condition("(&a>5 || &a<=5) && (&b>=0)"), ranges) == Satisfiability::Always);
    CHECK(satisfiable(parse_condition("&a>11 || &b<-1"), ranges) == Satisfiability::Never);
}

TEST_CASE("negation flips evaluation on random guards") {
    gen::Rng rng(11);
    for (int i = 0; i < 300; ++i) {
        const auto e = gen::random_expr(rng, {"x", "y"}, 3, -5, 25);
        const auto c = gen::to_condition(e);
        const auto n = Condition::negate(c);
        for (int k = 0; k < 10; ++k) {
            const VariableEnv env{{"x", D(gen::uniform_int(rng, -6, 26))}, {"y", D(gen::uniform_int(rng, -6, 26))}};
            CHECK(eval_condition(n, env) == !eval_condition(c, env));
        }
    }
}

TEST_CASE("print then parse is a fixpoint") {
    gen::Rng rng(12);
    for (int i = 0; i < 300; ++i) {
        const auto c = gen::to_condition(gen::random_expr(rng, {"x", "score", "v_2"}, 4, -50, 50));
        const auto text = print_condition(c);
        const auto again = parse_condition(text);
        CHECK(again == c);
        CHECK(print_condition(again) == text);
    }
}

TEST_CASE("evaluation agrees with the oracle evaluator") {
    gen::Rng rng(13);
    for (int i = 0; i < 200; ++i) {
        const auto e = gen::random_expr(rng, {"x"}, 3, 0, 10);
        const auto c = gen::to_condition(e);
        for (long long h = -2; h <= 24; ++h) {
            const auto v = Decimal::from_units(h * Decimal::kScale / 2);
            CHECK(eval_condition(c, {{"x", v}}) == oracle::eval(e, {{"x", v}}));
        }
    }
}
