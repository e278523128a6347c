#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace causeval::scm {

// Boolean structural causal models over small, fully enumerable exogenous
// domains. Condition nodes form a DAG by construction: an equation may only
// reference exogenous variables and nodes declared before it, so forward
// references (and therefore cycles) are rejected when the model is built.
// Models are immutable values; interventions produce modified copies.

class ModelError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

using ExogenousValues = std::map<std::string, long>;
using ConditionValues = std::map<std::string, bool>;

struct Assignment {
    ExogenousValues exogenous;
    ConditionValues conditions;

    bool condition(const std::string& name) const;
    long value(const std::string& name) const;
};

// Integer term: constant, exogenous variable reference, or term mod constant.
class Term {
  public:
    static Term constant(long value);
    static Term var(std::string name);
    Term mod(long divisor) const;  // divisor must be positive

    long eval(const ExogenousValues& exogenous) const;
    void collect_vars(std::set<std::string>& out) const;

    struct Node;  // defined in the implementation

  private:
    explicit Term(std::shared_ptr<const Node> node);
    std::shared_ptr<const Node> node_;
};

enum class CmpOp { eq, ne, lt, le, gt, ge };

// Boolean structural equation: comparisons of integer terms, references to
// earlier condition nodes, and the usual connectives.
class Expr {
  public:
    static Expr constant(bool value);
    static Expr node(std::string name);
    static Expr cmp(Term lhs, CmpOp op, Term rhs);
    static Expr all_of(std::vector<Expr> terms);
    static Expr any_of(std::vector<Expr> terms);

    bool eval(const ExogenousValues& exogenous, const ConditionValues& conditions) const;
    void collect_refs(std::set<std::string>& vars, std::set<std::string>& nodes) const;

    friend Expr operator&&(const Expr& a, const Expr& b);
    friend Expr operator||(const Expr& a, const Expr& b);
    friend Expr operator!(const Expr& a);

    struct Node;  // defined in the implementation

  private:
    explicit Expr(std::shared_ptr<const Node> node);
    std::shared_ptr<const Node> node_;
};

// Comparison helpers so equations read like the rules they encode.
Expr eq(Term lhs, Term rhs);
Expr ne(Term lhs, Term rhs);
Expr lt(Term lhs, Term rhs);
Expr le(Term lhs, Term rhs);
Expr gt(Term lhs, Term rhs);
Expr ge(Term lhs, Term rhs);

struct ExogenousVar {
    std::string name;
    std::vector<long> domain;  // finite, non-empty
};

struct ConditionNode {
    std::string name;
    Expr equation;
};

struct Intervention {
    std::string node;  // must name a condition node, never an exogenous variable
    bool value = true;
};

// Optional filter restricting the exogenous product domain (e.g. compositions
// summing to a fixed total). Applied by enumerate_domain / sample_domain.
using AdmissibilityFn = std::function<bool(const ExogenousValues&)>;

class CausalModel {
  public:
    CausalModel(std::vector<ExogenousVar> exogenous, std::vector<ConditionNode> conditions,
                AdmissibilityFn admissible = nullptr);

    const std::vector<ExogenousVar>& exogenous() const { return exogenous_; }
    const std::vector<ConditionNode>& conditions() const { return conditions_; }

    bool has_condition(const std::string& name) const;
    bool has_exogenous(const std::string& name) const;
    const std::vector<long>& domain_of(const std::string& exogenous_name) const;

    // true when `ancestor` can influence `node` through the equations
    bool is_ancestor(const std::string& ancestor, const std::string& node) const;

    bool admissible(const ExogenousValues& values) const;
    const AdmissibilityFn& admissibility() const { return admissible_; }

  private:
    std::vector<ExogenousVar> exogenous_;
    std::vector<ConditionNode> conditions_;
    AdmissibilityFn admissible_;
    std::map<std::string, std::set<std::string>> parents_;  // node -> condition parents
};

// Evaluates every condition node in declaration (topological) order.
// Rejects unknown or missing variables and out-of-domain values.
Assignment evaluate(const CausalModel& model, const ExogenousValues& exogenous);

// Returns the submodel in which the intervened node's equation is replaced by
// a constant; the input model is unchanged.
CausalModel intervene(const CausalModel& model, const Intervention& iv);

// Value of `query_node` in the intervened submodel at the given exogenous
// setting: evaluate(intervene(model, iv), exogenous) at query_node.
bool counterfactual(const CausalModel& model, const ExogenousValues& exogenous,
                    const Intervention& iv, const std::string& query_node);

// Every admissible exogenous combination exactly once, in row-major order
// over the declared variables (last variable varies fastest).
std::vector<ExogenousValues> enumerate_domain(const CausalModel& model);

// Seeded uniform draws from the admissible domain, for domains too large to
// use exhaustively downstream. Deterministic in (model, count, seed).
std::vector<ExogenousValues> sample_domain(const CausalModel& model, std::size_t count,
                                           std::uint64_t seed);

// True iff forcing x_node true never lowers y_node relative to forcing it
// false, over the whole admissible domain. Precondition: x_node must not be
// downstream of y_node.
bool check_monotonicity(const CausalModel& model, const std::string& x_node,
                        const std::string& y_node);

}  // namespace causeval::scm
