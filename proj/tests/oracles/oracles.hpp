#pragma once

// Brute-force reference implementations. Deliberately naive and independent
// of the library algorithms: guards are kept in their own tree type and
// evaluated point by point, reachability is a transitive closure, paths are
// enumerated with an explicit stack.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sgforge/decimal.hpp"

namespace oracle {

using sgforge::Decimal;

// Guard expressions

struct Expr {
    enum Kind { Cmp, Not, And, Or } kind = Cmp;
    std::string var;
    int op = 0;  // index into kOps
    Decimal constant;
    std::vector<Expr> kids;
};

inline const char* const kOps[] = {"<", ">", "<=", ">=", "==", "!="};

inline bool compare(Decimal x, int op, Decimal c) {
    switch (op) {
        case 0: return x < c;
        case 1: return x > c;
        case 2: return x <= c;
        case 3: return x >= c;
        case 4: return x == c;
        default: return x != c;
    }
}

inline bool eval(const Expr& e, const std::map<std::string, Decimal>& env) {
    switch (e.kind) {
        case Expr::Cmp: return compare(env.at(e.var), e.op, e.constant);
        case Expr::Not: return !eval(e.kids[0], env);
        case Expr::And:
            for (const auto& k : e.kids) {
                if (!eval(k, env)) return false;
            }
            return true;
        case Expr::Or:
            for (const auto& k : e.kids) {
                if (eval(k, env)) return true;
            }
            return false;
    }
    return false;
}

// Fully parenthesized text in the guard language.
inline std::string text(const Expr& e) {
    switch (e.kind) {
        case Expr::Cmp: return "&" + e.var + kOps[e.op] + e.constant.to_string();
        case Expr::Not: return "!(" + text(e.kids[0]) + ")";
        case Expr::And:
        case Expr::Or: {
            std::string out = "(";
            for (std::size_t i = 0; i < e.kids.size(); ++i) {
                if (i) out += e.kind == Expr::And ? " && " : " || ";
                out += text(e.kids[i]);
            }
            return out + ")";
        }
    }
    return {};
}

// Truth values of a single-variable guard at every integer of [lo, hi].
struct IntegerVerdict {
    bool any_true = false;
    bool any_false = false;
};

inline IntegerVerdict integer_sweep(const Expr& e, const std::string& var, long long lo, long long hi) {
    IntegerVerdict v;
    for (long long x = lo; x <= hi; ++x) {
        (eval(e, {{var, Decimal::from_int(x)}}) ? v.any_true : v.any_false) = true;
    }
    return v;
}

// Same sweep over every half-integer of [lo, hi]. With integer constants and
// integer bounds this decides truth over all reals of the range exactly.
inline IntegerVerdict half_sweep(const Expr& e, const std::string& var, long long lo, long long hi) {
    IntegerVerdict v;
    for (long long h = 2 * lo; h <= 2 * hi; ++h) {
        (eval(e, {{var, Decimal::from_units(h * Decimal::kScale / 2)}}) ? v.any_true : v.any_false) = true;
    }
    return v;
}

// Scene graphs

struct Graph {
    std::vector<long long> nodes;        // index -> scene num
    std::size_t start = 0;               // index
    std::vector<std::vector<std::size_t>> live;  // index -> live successor indices (may repeat)
    std::vector<bool> terminal;
};

inline std::vector<std::vector<bool>> closure(const Graph& g) {
    const auto n = g.nodes.size();
    std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
        r[i][i] = true;
        for (auto j : g.live[i]) r[i][j] = true;
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            if (r[i][k])
                for (std::size_t j = 0; j < n; ++j)
                    if (r[k][j]) r[i][j] = true;
    return r;
}

inline std::set<long long> unreachable(const Graph& g) {
    const auto r = closure(g);
    std::set<long long> out;
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        if (!r[g.start][i]) out.insert(g.nodes[i]);
    return out;
}

inline std::set<long long> dead_ends(const Graph& g) {
    const auto r = closure(g);
    std::set<long long> out;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        if (!r[g.start][i]) continue;
        bool reaches_terminal = false;
        for (std::size_t j = 0; j < g.nodes.size(); ++j)
            if (r[i][j] && g.terminal[j]) reaches_terminal = true;
        if (!reaches_terminal) out.insert(g.nodes[i]);
    }
    return out;
}

// All start-to-terminal walks visiting each scene at most 1 + unrolls times.
// Stops once `cap` distinct paths are known; `complete` tells whether the set
// is exhaustive.
struct PathSet {
    std::set<std::vector<long long>> paths;
    bool complete = true;
};

inline PathSet paths(const Graph& g, std::size_t unrolls, std::size_t cap) {
    PathSet out;
    struct Frame {
        std::vector<std::size_t> walk;
    };
    std::vector<Frame> stack{{{g.start}}};
    while (!stack.empty()) {
        auto frame = std::move(stack.back());
        stack.pop_back();
        const auto here = frame.walk.back();
        if (g.terminal[here]) {
            std::vector<long long> nums;
            for (auto i : frame.walk) nums.push_back(g.nodes[i]);
            out.paths.insert(std::move(nums));
            if (out.paths.size() >= cap) {
                out.complete = false;
                return out;
            }
            continue;
        }
        for (auto next : g.live[here]) {
            const auto visits = static_cast<std::size_t>(std::count(frame.walk.begin(), frame.walk.end(), next));
            if (visits >= 1 + unrolls) continue;
            Frame f = frame;
            f.walk.push_back(next);
            stack.push_back(std::move(f));
        }
    }
    return out;
}

// Objective coverage

struct ScoreStep {
    Decimal lo;
    Decimal hi;
};

enum class Mechanism { Sum, Max, Last };

// Pessimistic and optimistic totals of one path, given the per-visit score
// intervals (visits without an effect on the objective are omitted).
inline std::pair<Decimal, Decimal> fold(const std::vector<ScoreStep>& steps, Mechanism m) {
    if (steps.empty()) return {Decimal{}, Decimal{}};
    Decimal lo = steps.front().lo;
    Decimal hi = steps.front().hi;
    for (std::size_t i = 1; i < steps.size(); ++i) {
        switch (m) {
            case Mechanism::Sum:
                lo = lo + steps[i].lo;
                hi = hi + steps[i].hi;
                break;
            case Mechanism::Max:
                lo = std::max(lo, steps[i].lo);
                hi = std::max(hi, steps[i].hi);
                break;
            case Mechanism::Last:
                lo = steps[i].lo;
                hi = steps[i].hi;
                break;
        }
    }
    return {lo, hi};
}

enum class Verdict { None, Warning, Error };

// Verdict for one principal objective across an exhaustive path set.
inline Verdict coverage_verdict(const std::vector<std::pair<Decimal, Decimal>>& per_path, Decimal threshold) {
    bool warn = false;
    for (const auto& [lo, hi] : per_path) {
        if (hi < threshold) return Verdict::Error;
        if (lo < threshold) warn = true;
    }
    return warn ? Verdict::Warning : Verdict::None;
}

// Binomial bounds

inline bool within_sigma(std::size_t hits, std::size_t n, double p, double sigmas) {
    const double mean = static_cast<double>(n) * p;
    const double sd = std::sqrt(static_cast<double>(n) * p * (1.0 - p));
    return std::abs(static_cast<double>(hits) - mean) <= sigmas * sd;
}

}  // namespace oracle
