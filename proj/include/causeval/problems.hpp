#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "causeval/scm.hpp"

namespace causeval::problems {

// Text template with {slot} placeholders. Counterfactual templates carry a
// {branch} slot whose phrasing depends on the assumed truth value.
struct PromptTemplate {
    std::string text;
    std::string branch_true;   // substituted for {branch} when assuming true
    std::string branch_false;  // when assuming false
};

// One benchmark reasoning problem: a causal model plus the treatment/outcome
// pair under study and the prompt templates used to query an answer agent.
struct Problem {
    std::string name;
    scm::CausalModel model;
    std::string treatment;  // X: the intervened condition node
    std::string outcome;    // Y: the queried condition node
    PromptTemplate factual;
    PromptTemplate counterfactual;
    // slot name -> exogenous variable it is filled from
    std::map<std::string, std::string> slot_bindings;
    // slot name -> fixed text (e.g. the candy total)
    std::map<std::string, std::string> constant_slots;
};

// Divisibility by 6: does divisibility by 3 cause divisibility by 6?
// Nodes C2 = (N mod 2 = 0), C3 = (N mod 3 = 0), C6 = C2 and C3; N in [1, range_max].
Problem build_div6(long range_max = 400);

// Even sum of three integers. Parity nodes are true when the number is even;
// the sum is even when all three are even or exactly one is. Treatment C_m.
Problem build_evensum(long range_max = 8);

// Transitivity of <=: C_nm = (N <= M), C_mt = (M <= T), C_nmt = both.
// Treatment C_nm.
Problem build_conpref(long range_max = 8);

// Candy distribution: R + L + E = total_candies, all nonnegative. The party
// is happy when everyone gets at least 2 candies, or Lara and Emma get the
// same positive amount and Rafa gets more than both. Treatment C_le = (L = E).
Problem build_candyparty(long total_candies = 20);

// The four problems with default domains, in a stable order.
std::vector<Problem> registry();

// Problem by name with optional domain overrides; throws scm::ModelError for
// unknown names.
Problem lookup(const std::string& name, std::optional<long> range_max = std::nullopt,
               std::optional<long> total_candies = std::nullopt);

std::vector<std::string> problem_names();

}  // namespace causeval::problems
