#include "causeval/scm.hpp"

#include <algorithm>
#include <utility>
#include <variant>

#include "causeval/rng.hpp"

namespace causeval::scm {

bool Assignment::condition(const std::string& name) const {
    auto it = conditions.find(name);
    if (it == conditions.end()) throw ModelError("unknown condition node: " + name);
    return it->second;
}

long Assignment::value(const std::string& name) const {
    auto it = exogenous.find(name);
    if (it == exogenous.end()) throw ModelError("unknown exogenous variable: " + name);
    return it->second;
}

// ---------------------------------------------------------------------------
// Term

struct Term::Node {
    struct Constant { long value; };
    struct Var { std::string name; };
    struct Mod { std::shared_ptr<const Node> operand; long divisor; };
    std::variant<Constant, Var, Mod> body;
};

Term::Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Term Term::constant(long value) {
    return Term(std::make_shared<Node>(Node{Node::Constant{value}}));
}

Term Term::var(std::string name) {
    if (name.empty()) throw ModelError("exogenous variable name must be non-empty");
    return Term(std::make_shared<Node>(Node{Node::Var{std::move(name)}}));
}

Term Term::mod(long divisor) const {
    if (divisor <= 0) throw ModelError("modulo divisor must be positive");
    return Term(std::make_shared<Node>(Node{Node::Mod{node_, divisor}}));
}

namespace {

long eval_term(const Term::Node& node, const ExogenousValues& exogenous);

}  // namespace

long Term::eval(const ExogenousValues& exogenous) const {
    return eval_term(*node_, exogenous);
}

namespace {

long eval_term(const Term::Node& node, const ExogenousValues& exogenous) {
    if (auto* c = std::get_if<Term::Node::Constant>(&node.body)) return c->value;
    if (auto* v = std::get_if<Term::Node::Var>(&node.body)) {
        auto it = exogenous.find(v->name);
        if (it == exogenous.end())
            throw ModelError("unknown exogenous variable: " + v->name);
        return it->second;
    }
    const auto& m = std::get<Term::Node::Mod>(node.body);
    long value = eval_term(*m.operand, exogenous) % m.divisor;
    if (value < 0) value += m.divisor;  // mathematical modulo for negative inputs
    return value;
}

void collect_term_vars(const Term::Node& node, std::set<std::string>& out) {
    if (auto* v = std::get_if<Term::Node::Var>(&node.body)) {
        out.insert(v->name);
    } else if (auto* m = std::get_if<Term::Node::Mod>(&node.body)) {
        collect_term_vars(*m->operand, out);
    }
}

}  // namespace

void Term::collect_vars(std::set<std::string>& out) const {
    collect_term_vars(*node_, out);
}

// ---------------------------------------------------------------------------
// Expr

struct Expr::Node {
    struct Constant { bool value; };
    struct NodeRef { std::string name; };
    struct Cmp { Term lhs; CmpOp op; Term rhs; };
    struct All { std::vector<Expr> terms; };
    struct Any { std::vector<Expr> terms; };
    struct Not { Expr operand; };
    std::variant<Constant, NodeRef, Cmp, All, Any, Not> body;
};

Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expr Expr::constant(bool value) {
    return Expr(std::make_shared<Node>(Node{Node::Constant{value}}));
}

Expr Expr::node(std::string name) {
    if (name.empty()) throw ModelError("condition node name must be non-empty");
    return Expr(std::make_shared<Node>(Node{Node::NodeRef{std::move(name)}}));
}

Expr Expr::cmp(Term lhs, CmpOp op, Term rhs) {
    return Expr(std::make_shared<Node>(Node{Node::Cmp{std::move(lhs), op, std::move(rhs)}}));
}

Expr Expr::all_of(std::vector<Expr> terms) {
    if (terms.empty()) throw ModelError("all_of requires at least one term");
    return Expr(std::make_shared<Node>(Node{Node::All{std::move(terms)}}));
}

Expr Expr::any_of(std::vector<Expr> terms) {
    if (terms.empty()) throw ModelError("any_of requires at least one term");
    return Expr(std::make_shared<Node>(Node{Node::Any{std::move(terms)}}));
}

Expr operator&&(const Expr& a, const Expr& b) { return Expr::all_of({a, b}); }
Expr operator||(const Expr& a, const Expr& b) { return Expr::any_of({a, b}); }
Expr operator!(const Expr& a) {
    return Expr(std::make_shared<Expr::Node>(Expr::Node{Expr::Node::Not{a}}));
}

bool Expr::eval(const ExogenousValues& exogenous, const ConditionValues& conditions) const {
    const Node& n = *node_;
    if (auto* c = std::get_if<Node::Constant>(&n.body)) return c->value;
    if (auto* r = std::get_if<Node::NodeRef>(&n.body)) {
        auto it = conditions.find(r->name);
        if (it == conditions.end()) throw ModelError("unknown condition node: " + r->name);
        return it->second;
    }
    if (auto* cmp = std::get_if<Node::Cmp>(&n.body)) {
        long lhs = cmp->lhs.eval(exogenous);
        long rhs = cmp->rhs.eval(exogenous);
        switch (cmp->op) {
            case CmpOp::eq: return lhs == rhs;
            case CmpOp::ne: return lhs != rhs;
            case CmpOp::lt: return lhs < rhs;
            case CmpOp::le: return lhs <= rhs;
            case CmpOp::gt: return lhs > rhs;
            case CmpOp::ge: return lhs >= rhs;
        }
        throw ModelError("invalid comparison operator");
    }
    if (auto* all = std::get_if<Node::All>(&n.body)) {
        for (const Expr& t : all->terms)
            if (!t.eval(exogenous, conditions)) return false;
        return true;
    }
    if (auto* any = std::get_if<Node::Any>(&n.body)) {
        for (const Expr& t : any->terms)
            if (t.eval(exogenous, conditions)) return true;
        return false;
    }
    return !std::get<Node::Not>(n.body).operand.eval(exogenous, conditions);
}

void Expr::collect_refs(std::set<std::string>& vars, std::set<std::string>& nodes) const {
    const Node& n = *node_;
    if (std::get_if<Node::Constant>(&n.body)) return;
    if (auto* r = std::get_if<Node::NodeRef>(&n.body)) {
        nodes.insert(r->name);
        return;
    }
    if (auto* cmp = std::get_if<Node::Cmp>(&n.body)) {
        cmp->lhs.collect_vars(vars);
        cmp->rhs.collect_vars(vars);
        return;
    }
    if (auto* all = std::get_if<Node::All>(&n.body)) {
        for (const Expr& t : all->terms) t.collect_refs(vars, nodes);
        return;
    }
    if (auto* any = std::get_if<Node::Any>(&n.body)) {
        for (const Expr& t : any->terms) t.collect_refs(vars, nodes);
        return;
    }
    std::get<Node::Not>(n.body).operand.collect_refs(vars, nodes);
}

Expr eq(Term lhs, Term rhs) { return Expr::cmp(std::move(lhs), CmpOp::eq, std::move(rhs)); }
Expr ne(Term lhs, Term rhs) { return Expr::cmp(std::move(lhs), CmpOp::ne, std::move(rhs)); }
Expr lt(Term lhs, Term rhs) { return Expr::cmp(std::move(lhs), CmpOp::lt, std::move(rhs)); }
Expr le(Term lhs, Term rhs) { return Expr::cmp(std::move(lhs), CmpOp::le, std::move(rhs)); }
Expr gt(Term lhs, Term rhs) { return Expr::cmp(std::move(lhs), CmpOp::gt, std::move(rhs)); }
Expr ge(Term lhs, Term rhs) { return Expr::cmp(std::move(lhs), CmpOp::ge, std::move(rhs)); }

// ---------------------------------------------------------------------------
// CausalModel

CausalModel::CausalModel(std::vector<ExogenousVar> exogenous,
                         std::vector<ConditionNode> conditions, AdmissibilityFn admissible)
    : exogenous_(std::move(exogenous)),
      conditions_(std::move(conditions)),
      admissible_(std::move(admissible)) {
    std::set<std::string> exo_names;
    for (const auto& var : exogenous_) {
        if (var.name.empty()) throw ModelError("exogenous variable name must be non-empty");
        if (var.domain.empty())
            throw ModelError("exogenous domain of " + var.name + " is empty");
        if (!exo_names.insert(var.name).second)
            throw ModelError("duplicate exogenous variable: " + var.name);
    }

    std::set<std::string> seen_nodes;
    for (const auto& node : conditions_) {
        if (node.name.empty()) throw ModelError("condition node name must be non-empty");
        if (exo_names.count(node.name))
            throw ModelError("condition node collides with exogenous variable: " + node.name);
        if (seen_nodes.count(node.name))
            throw ModelError("duplicate condition node: " + node.name);

        std::set<std::string> vars, refs;
        node.equation.collect_refs(vars, refs);
        for (const auto& v : vars)
            if (!exo_names.count(v))
                throw ModelError("equation of " + node.name +
                                 " references unknown exogenous variable: " + v);
        for (const auto& r : refs)
            if (!seen_nodes.count(r))
                throw ModelError("equation of " + node.name + " references " + r +
                                 ", which is not an earlier condition node (the "
                                 "dependency graph must be acyclic)");
        parents_[node.name] = refs;
        seen_nodes.insert(node.name);
    }
}

bool CausalModel::has_condition(const std::string& name) const {
    return parents_.count(name) > 0;
}

bool CausalModel::has_exogenous(const std::string& name) const {
    return std::any_of(exogenous_.begin(), exogenous_.end(),
                       [&](const ExogenousVar& v) { return v.name == name; });
}

const std::vector<long>& CausalModel::domain_of(const std::string& exogenous_name) const {
    for (const auto& var : exogenous_)
        if (var.name == exogenous_name) return var.domain;
    throw ModelError("unknown exogenous variable: " + exogenous_name);
}

bool CausalModel::is_ancestor(const std::string& ancestor, const std::string& node) const {
    if (!has_condition(ancestor)) throw ModelError("unknown condition node: " + ancestor);
    if (!has_condition(node)) throw ModelError("unknown condition node: " + node);
    // walk condition parents transitively
    std::vector<std::string> frontier{node};
    std::set<std::string> visited;
    while (!frontier.empty()) {
        std::string current = frontier.back();
        frontier.pop_back();
        for (const auto& parent : parents_.at(current)) {
            if (parent == ancestor) return true;
            if (visited.insert(parent).second) frontier.push_back(parent);
        }
    }
    return false;
}

bool CausalModel::admissible(const ExogenousValues& values) const {
    return !admissible_ || admissible_(values);
}

Assignment evaluate(const CausalModel& model, const ExogenousValues& exogenous) {
    if (exogenous.size() != model.exogenous().size())
        throw ModelError("exogenous assignment does not cover the declared variables");
    for (const auto& var : model.exogenous()) {
        auto it = exogenous.find(var.name);
        if (it == exogenous.end())
            throw ModelError("missing exogenous variable: " + var.name);
        if (std::find(var.domain.begin(), var.domain.end(), it->second) == var.domain.end())
            throw ModelError("value " + std::to_string(it->second) + " of " + var.name +
                             " is outside its domain");
    }

    Assignment out;
    out.exogenous = exogenous;
    for (const auto& node : model.conditions())
        out.conditions[node.name] = node.equation.eval(exogenous, out.conditions);
    return out;
}

CausalModel intervene(const CausalModel& model, const Intervention& iv) {
    if (!model.has_condition(iv.node)) {
        if (model.has_exogenous(iv.node))
            throw ModelError("interventions target condition nodes, not exogenous variable " +
                             iv.node);
        throw ModelError("unknown condition node: " + iv.node);
    }
    std::vector<ConditionNode> conditions = model.conditions();
    for (auto& node : conditions)
        if (node.name == iv.node) node.equation = Expr::constant(iv.value);
    return CausalModel(model.exogenous(), std::move(conditions), model.admissibility());
}

bool counterfactual(const CausalModel& model, const ExogenousValues& exogenous,
                    const Intervention& iv, const std::string& query_node) {
    return evaluate(intervene(model, iv), exogenous).condition(query_node);
}

std::vector<ExogenousValues> enumerate_domain(const CausalModel& model) {
    const auto& vars = model.exogenous();
    std::vector<std::size_t> index(vars.size(), 0);
    std::vector<ExogenousValues> out;
    for (;;) {
        ExogenousValues values;
        for (std::size_t i = 0; i < vars.size(); ++i)
            values[vars[i].name] = vars[i].domain[index[i]];
        if (model.admissible(values)) out.push_back(std::move(values));

        // odometer increment, last variable fastest
        std::size_t pos = vars.size();
        while (pos > 0) {
            --pos;
            if (++index[pos] < vars[pos].domain.size()) break;
            index[pos] = 0;
            if (pos == 0) return out;
        }
        if (vars.empty()) return out;
    }
}

std::vector<ExogenousValues> sample_domain(const CausalModel& model, std::size_t count,
                                           std::uint64_t seed) {
    const auto domain = enumerate_domain(model);
    if (domain.empty()) throw ModelError("admissible domain is empty");
    rng::Stream stream = rng::Stream(seed).derive("sample_domain");
    std::vector<ExogenousValues> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(domain[stream.below(domain.size())]);
    return out;
}

bool check_monotonicity(const CausalModel& model, const std::string& x_node,
                        const std::string& y_node) {
    if (!model.has_condition(x_node)) throw ModelError("unknown condition node: " + x_node);
    if (!model.has_condition(y_node)) throw ModelError("unknown condition node: " + y_node);
    if (model.is_ancestor(y_node, x_node))
        throw ModelError(x_node + " is a descendant of " + y_node);

    const CausalModel forced_true = intervene(model, {x_node, true});
    const CausalModel forced_false = intervene(model, {x_node, false});
    for (const auto& values : enumerate_domain(model)) {
        bool with = evaluate(forced_true, values).condition(y_node);
        bool without = evaluate(forced_false, values).condition(y_node);
        if (without && !with) return false;
    }
    return true;
}

}  // namespace causeval::scm
