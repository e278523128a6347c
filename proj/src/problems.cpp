#include "causeval/problems.hpp"

#include <numeric>

namespace causeval::problems {

namespace {

using scm::CausalModel;
using scm::ConditionNode;
using scm::Expr;
using scm::ExogenousVar;
using scm::ExogenousValues;
using scm::Term;

std::vector<long> range(long lo, long hi) {
    std::vector<long> out(static_cast<std::size_t>(hi - lo + 1));
    std::iota(out.begin(), out.end(), lo);
    return out;
}

void validate(const Problem& p) {
    if (!p.model.is_ancestor(p.treatment, p.outcome))
        throw scm::ModelError(p.name + ": treatment " + p.treatment +
                              " is not an ancestor of outcome " + p.outcome);
}

}  // namespace

Problem build_div6(long range_max) {
    if (range_max < 6)
        throw scm::ModelError("Div6 needs range_max >= 6; the contingency table is "
                              "degenerate below that");
    auto n = Term::var("N");
    auto zero = Term::constant(0);
    CausalModel model(
        {{"N", range(1, range_max)}},
        {
            {"C2", eq(n.mod(2), zero)},
            {"C3", eq(n.mod(3), zero)},
            {"C6", Expr::node("C2") && Expr::node("C3")},
        });

    Problem p{
        "Div6",
        std::move(model),
        "C3",
        "C6",
        {"Does 6 divide {X}? Use the factor method to answer this question. Be as "
         "concise as possible.",
         "", ""},
        {"Imagine that {X} {branch} 3 as prime factor while retaining all its other "
         "prime factors. With this assumption does 6 divide {X}? Use the factor method "
         "to answer this question. Be as concise as possible.",
         "has", "has not"},
        {{"X", "N"}},
        {}};
    validate(p);
    return p;
}

Problem build_evensum(long range_max) {
    if (range_max < 2) throw scm::ModelError("EvenSum needs range_max >= 2");
    auto zero = Term::constant(0);
    auto even = [&](const char* var) { return eq(Term::var(var).mod(2), zero); };
    Expr cn = Expr::node("C_n");
    Expr cm = Expr::node("C_m");
    Expr ct = Expr::node("C_t");
    // even count in {1, 3}: all three even, or exactly one even
    Expr exactly_one = Expr::any_of({cn && !cm && !ct, !cn && cm && !ct, !cn && !cm && ct});
    CausalModel model(
        {{"N", range(1, range_max)}, {"M", range(1, range_max)}, {"T", range(1, range_max)}},
        {
            {"C_n", even("N")},
            {"C_m", even("M")},
            {"C_t", even("T")},
            {"C_nmt", (cn && cm && ct) || exactly_one},
        });

    Problem p{
        "EvenSum",
        std::move(model),
        "C_m",
        "C_nmt",
        {"Let N, M and T be three integers. Then N+M+T is even if the three numbers are "
         "even or if only one is even and the remaining two are odd. Consider the "
         "numbers N={N}, M={M} and T={T}. Is N+M+T even? Be as concise as possible.",
         "", ""},
        {"Let N, M and T be three integers. Then N+M+T is even if the three numbers are "
         "even or if only one is even and the remaining two are odd. Consider the "
         "numbers N={N}, M={M} and T={T} and imagine that N {branch} even. With this "
         "assumption, is N+M+T even? Be as concise as possible.",
         "is", "is not"},
        {{"N", "N"}, {"M", "M"}, {"T", "T"}},
        {}};
    validate(p);
    return p;
}

Problem build_conpref(long range_max) {
    if (range_max < 2) throw scm::ModelError("ConPref needs range_max >= 2");
    CausalModel model(
        {{"N", range(1, range_max)}, {"M", range(1, range_max)}, {"T", range(1, range_max)}},
        {
            {"C_nm", le(Term::var("N"), Term::var("M"))},
            {"C_mt", le(Term::var("M"), Term::var("T"))},
            {"C_nmt", Expr::node("C_nm") && Expr::node("C_mt")},
        });

    Problem p{
        "ConPref",
        std::move(model),
        "C_nm",
        "C_nmt",
        {"Let N, M and T be three integers. We know that if N is smaller or equal that "
         "M and M is smaller or equal than T then N is smaller or equal than "
         "T.Consider the numbers N={N}, M={M} and T={T}. By only looking at the "
         "relationships (N={N} vs. M={M}) and (M={M} vs. T={T}), can we know if N is "
         "smaller or equal that T? Be as concise as possible.",
         "", ""},
        {"Let N, M and T be three integers. We know that if N is smaller or equal that "
         "M and M is smaller or equal than T then N is smaller or equal than T. "
         "Consider the numbers N={N}, M={M} and T={T}. Now imagine that the number N "
         "{branch} than M. Even if this contradict the values of the numbers X and Y, "
         "use this assumption and the relationships between and M={M} and T={T}, to "
         "decide if can we tell if N is smaller or equal that T? Don't make any "
         "conclusion or comment based on the values, just based on the assumption and "
         "the relationships. Be as concise as possible.",
         "is smaller or equal", "is not smaller or equal"},
        {{"N", "N"}, {"M", "M"}, {"T", "T"}},
        {}};
    validate(p);
    return p;
}

Problem build_candyparty(long total_candies) {
    if (total_candies < 3) throw scm::ModelError("CandyParty needs total_candies >= 3");
    auto r = Term::var("R");
    auto l = Term::var("L");
    auto e = Term::var("E");
    auto two = Term::constant(2);
    auto one = Term::constant(1);
    CausalModel model(
        {{"R", range(0, total_candies)},
         {"L", range(0, total_candies)},
         {"E", range(0, total_candies)}},
        {
            {"C_all2", Expr::all_of({ge(r, two), ge(l, two), ge(e, two)})},
            {"C_le", eq(l, e)},
            {"C_le1", ge(l, one) && ge(e, one)},
            {"C_rgt", gt(r, l) && gt(r, e)},
            {"C_h", Expr::node("C_all2") ||
                        Expr::all_of({Expr::node("C_le"), Expr::node("C_le1"),
                                      Expr::node("C_rgt")})},
        },
        [total_candies](const ExogenousValues& values) {
            return values.at("R") + values.at("L") + values.at("E") == total_candies;
        });

    Problem p{
        "CandyParty",
        std::move(model),
        "C_le",
        "C_h",
        {"Rafa has invited Lara and Emma to his birthday party. He has {num candies} to "
         "distribute among them. They all will be happy in the party in one of the "
         "following cases: 1) Each of them gets at least 2 candies or 2) Lara and Emma "
         "get the same number of candies, but at least one candy each, and Rafa gets "
         "more than them. After distributing the candies, Lara gets {L}, Emma gets {E} "
         "and Raphael gets {R} candies. With this candies distribution, will they all "
         "be happy in the party? Be as concise as possible.",
         "", ""},
        {"Rafa has invited Lara and Emma to his birthday party. He has {num candies} "
         "candies to distribute among them. They all will be happy in the party in one "
         "of the following cases: 1) Each of them gets at least 2 candies or 2) Lara "
         "and Emma get the same number of candies, but at least one candy each, and "
         "Rafa gets more than them After distributing the candies. After distributing "
         "the candies, Lara gets {L}, Emma gets {E} and Rafa gets {R} candies. Consider "
         "the number of candies distributed to each of them and imagine that they "
         "think that {branch}. With this assumption, will they all be happy in the "
         "party? Be as concise as possible.",
         "Lara and Emma have the same number of candies",
         "Lara and Emma have different number of candies"},
        {{"L", "L"}, {"E", "E"}, {"R", "R"}},
        {{"num candies", std::to_string(total_candies)}}};
    validate(p);
    return p;
}

std::vector<Problem> registry() {
    return {build_div6(), build_evensum(), build_conpref(), build_candyparty()};
}

std::vector<std::string> problem_names() {
    return {"Div6", "EvenSum", "ConPref", "CandyParty"};
}

Problem lookup(const std::string& name, std::optional<long> range_max,
               std::optional<long> total_candies) {
    if (name == "Div6") return build_div6(range_max.value_or(400));
    if (name == "EvenSum") return build_evensum(range_max.value_or(8));
    if (name == "ConPref") return build_conpref(range_max.value_or(8));
    if (name == "CandyParty") return build_candyparty(total_candies.value_or(20));
    throw scm::ModelError("unknown problem: " + name +
                          " (expected Div6, EvenSum, ConPref or CandyParty)");
}

}  // namespace causeval::problems
