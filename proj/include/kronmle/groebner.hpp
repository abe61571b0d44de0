#pragma once

#include <optional>
#include <ostream>
#include <variant>
#include <vector>

#include "kronmle/polynomial.hpp"

namespace kronmle {

inline constexpr std::size_t kDefaultPairBudget = 200000;

struct PolyIdeal {
  RingPtr ring;
  std::vector<Polynomial> generators;

  // Throws std::invalid_argument if a generator lives in another ring.
  PolyIdeal(RingPtr ring, std::vector<Polynomial> generators);
};

struct GroebnerBasis {
  RingPtr ring;  // carries the term order of the basis
  std::vector<Polynomial> basis;
  bool reduced = false;

  TermOrder order() const { return ring->order(); }
};

struct Timeout {
  std::size_t pairs_processed = 0;
};

using GroebnerOutcome = std::variant<GroebnerBasis, Timeout>;

// Reduced Groebner basis of I with respect to `order`. Integer-coefficient
// fraction-free reduction with content removal internally; the returned basis
// is monic over Q and sorted by increasing leading monomial. Uses the
// coprime-leading-term and chain criteria in the Gebauer-Moeller update and
// selects pairs with the smallest lcm first. More than `pair_budget` reduced
// S-pairs yields Timeout.
GroebnerOutcome buchberger(const PolyIdeal& ideal, TermOrder order,
                           std::size_t pair_budget = kDefaultPairBudget);

// Full normal form of f modulo the basis (f is moved into the basis ring).
Polynomial normal_form(const Polynomial& f, const GroebnerBasis& g);

Polynomial s_polynomial(const Polynomial& f, const Polynomial& g);

// Adjoins `fresh` as the first variable of the ring, and the generator
// fresh*f - 1.
PolyIdeal saturate_rabinowitsch(const PolyIdeal& ideal, const Polynomial& f,
                                const std::string& fresh = "y");

struct DimDegree {
  bool zero_dimensional = false;
  std::optional<std::size_t> degree;  // standard monomial count
  bool unit_ideal = false;
};

// A basis containing a nonzero constant is reported as unit_ideal with no
// degree and zero_dimensional = false.
DimDegree dim_and_degree(const GroebnerBasis& g);

// Ring header line "ring <vars...> <order>", then one polynomial per line.
void write_ideal(std::ostream& out, const RingPtr& ring,
                 const std::vector<Polynomial>& polys);

}  // namespace kronmle
