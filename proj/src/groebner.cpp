#include "kronmle/groebner.hpp"

#include <algorithm>
#include <stdexcept>

namespace kronmle {

PolyIdeal::PolyIdeal(RingPtr r, std::vector<Polynomial> gens)
    : ring(std::move(r)), generators(std::move(gens)) {
  for (const auto& g : generators) {
    if (!(*g.ring() == *ring)) throw std::invalid_argument("ideal generator in a different ring");
  }
}

namespace {

struct ITerm {
  Monomial m;
  Integer c;
};

using IPoly = std::vector<ITerm>;

IPoly to_ipoly(const Polynomial& p) {
  const Polynomial q = p.primitive();
  IPoly out;
  out.reserve(q.size());
  for (const auto& t : q.terms()) out.push_back({t.monomial, t.coeff.get_num()});
  return out;
}

Polynomial to_monic(const IPoly& p, const RingPtr& ring) {
  std::vector<Polynomial::Term> terms;
  terms.reserve(p.size());
  for (const auto& t : p) {
    Rational c(t.c, p.front().c);
    c.canonicalize();
    terms.push_back({t.m, std::move(c)});
  }
  return Polynomial(ring, std::move(terms));
}

void remove_content(IPoly& p) {
  if (p.empty()) return;
  Integer g = 0;
  for (const auto& t : p) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), t.c.get_mpz_t());
    if (g == 1) break;
  }
  const bool negate = p.front().c < 0;
  if (g != 1) {
    for (auto& t : p) mpz_divexact(t.c.get_mpz_t(), t.c.get_mpz_t(), g.get_mpz_t());
  }
  if (negate) {
    for (auto& t : p) t.c = -t.c;
  }
}

// a * p[from..] - b * m * g, assuming the leading terms cancel.
IPoly combine(const IPoly& p, std::size_t from, const Integer& a, const IPoly& g,
              const Monomial& m, const Integer& b, TermOrder order) {
  IPoly out;
  out.reserve(p.size() - from + g.size());
  std::size_t i = from, j = 0;
  const bool scale_p = a != 1;
  while (i < p.size() || j < g.size()) {
    int cmp;
    Monomial gm;
    if (j < g.size()) gm = g[j].m * m;
    if (i == p.size()) {
      cmp = -1;
    } else if (j == g.size()) {
      cmp = 1;
    } else {
      cmp = compare(p[i].m, gm, order);
    }
    if (cmp > 0) {
      out.push_back({p[i].m, scale_p ? Integer(p[i].c * a) : p[i].c});
      ++i;
    } else if (cmp < 0) {
      out.push_back({gm, -(g[j].c * b)});
      ++j;
    } else {
      Integer c = p[i].c * a - g[j].c * b;
      if (c != 0) out.push_back({gm, std::move(c)});
      ++i;
      ++j;
    }
  }
  return out;
}

const IPoly* find_reducer(const Monomial& m, const std::vector<const IPoly*>& reducers) {
  const IPoly* best = nullptr;
  for (const IPoly* g : reducers) {
    if (g->front().m.divides(m) && (!best || g->size() < best->size())) best = g;
  }
  return best;
}

// Fraction-free reduction; returns a primitive multiple of the remainder.
// With full = false only the leading term is reduced away.
IPoly reduce(IPoly p, const std::vector<const IPoly*>& reducers, bool full, TermOrder order) {
  IPoly done;
  std::size_t head = 0;
  std::size_t steps = 0;
  while (head < p.size()) {
    const IPoly* g = find_reducer(p[head].m, reducers);
    if (!g) {
      if (!full) break;
      done.push_back(std::move(p[head]));
      ++head;
      continue;
    }
    const Integer& lp = p[head].c;
    const Integer& lg = g->front().c;
    Integer d;
    mpz_gcd(d.get_mpz_t(), lp.get_mpz_t(), lg.get_mpz_t());
    Integer a, b;
    mpz_divexact(a.get_mpz_t(), lg.get_mpz_t(), d.get_mpz_t());
    mpz_divexact(b.get_mpz_t(), lp.get_mpz_t(), d.get_mpz_t());
    const Monomial m = p[head].m / g->front().m;
    p = combine(p, head, a, *g, m, b, order);
    head = 0;
    if (a != 1) {
      for (auto& t : done) t.c *= a;
    }
    if (++steps % 8 == 0 && !p.empty()) {
      Integer c = 0;
      for (const auto& t : p) mpz_gcd(c.get_mpz_t(), c.get_mpz_t(), t.c.get_mpz_t());
      for (const auto& t : done) mpz_gcd(c.get_mpz_t(), c.get_mpz_t(), t.c.get_mpz_t());
      if (c > 1) {
        for (auto& t : p) mpz_divexact(t.c.get_mpz_t(), t.c.get_mpz_t(), c.get_mpz_t());
        for (auto& t : done) mpz_divexact(t.c.get_mpz_t(), t.c.get_mpz_t(), c.get_mpz_t());
      }
    }
  }
  if (full) {
    for (std::size_t i = head; i < p.size(); ++i) done.push_back(std::move(p[i]));
    remove_content(done);
    return done;
  }
  p.erase(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(head));
  remove_content(p);
  return p;
}

IPoly spoly(const IPoly& f, const IPoly& g, TermOrder order) {
  const Monomial l = lcm(f.front().m, g.front().m);
  const Monomial mf = l / f.front().m;
  const Monomial mg = l / g.front().m;
  IPoly shifted;
  shifted.reserve(f.size());
  for (const auto& t : f) shifted.push_back({t.m * mf, t.c});
  Integer d;
  mpz_gcd(d.get_mpz_t(), f.front().c.get_mpz_t(), g.front().c.get_mpz_t());
  const Integer a = g.front().c / d;
  const Integer b = f.front().c / d;
  IPoly s = combine(shifted, 0, a, g, mg, b, order);
  remove_content(s);
  return s;
}

struct Pair {
  std::size_t i;
  std::size_t j;
  Monomial lcm;
};

class Engine {
 public:
  explicit Engine(TermOrder order) : order_(order) {}

  // Returns false when a nonzero constant was produced.
  bool add(IPoly h) {
    if (h.front().m.is_one()) return false;
    const std::size_t idx = polys_.size();
    polys_.push_back(std::move(h));
    active_.push_back(false);
    update(idx);
    return true;
  }

  bool next_pair(Pair& out) {
    if (pairs_.empty()) return false;
    std::size_t best = 0;
    for (std::size_t p = 1; p < pairs_.size(); ++p) {
      const int cmp = compare(pairs_[p].lcm, pairs_[best].lcm, order_);
      if (cmp < 0 || (cmp == 0 && pairs_[p].j < pairs_[best].j)) best = p;
    }
    out = pairs_[best];
    pairs_[best] = pairs_.back();
    pairs_.pop_back();
    return true;
  }

  std::vector<const IPoly*> reducers() const {
    std::vector<const IPoly*> out;
    for (std::size_t i = 0; i < polys_.size(); ++i)
      if (active_[i]) out.push_back(&polys_[i]);
    return out;
  }

  const IPoly& poly(std::size_t i) const { return polys_[i]; }
  TermOrder order() const { return order_; }

  std::vector<IPoly> active_polys() const {
    std::vector<IPoly> out;
    for (std::size_t i = 0; i < polys_.size(); ++i)
      if (active_[i]) out.push_back(polys_[i]);
    return out;
  }

 private:
  // Gebauer-Moeller installation of polys_[h].
  void update(std::size_t h) {
    const Monomial& lh = polys_[h].front().m;
    std::vector<Pair> candidates;
    for (std::size_t g = 0; g < polys_.size(); ++g) {
      if (active_[g]) candidates.push_back({g, h, lcm(polys_[g].front().m, lh)});
    }
    std::vector<Pair> kept;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const Pair& p = candidates[c];
      bool keep = polys_[p.i].front().m.coprime(lh);
      if (!keep) {
        keep = true;
        for (std::size_t o = c + 1; o < candidates.size() && keep; ++o)
          if (candidates[o].lcm.divides(p.lcm)) keep = false;
        for (std::size_t o = 0; o < kept.size() && keep; ++o)
          if (kept[o].lcm.divides(p.lcm)) keep = false;
      }
      if (keep) kept.push_back(p);
    }
    std::vector<Pair> survivors;
    for (const Pair& p : pairs_) {
      const bool chain = lh.divides(p.lcm) &&
                         !(lcm(polys_[p.i].front().m, lh) == p.lcm) &&
                         !(lcm(polys_[p.j].front().m, lh) == p.lcm);
      if (!chain) survivors.push_back(p);
    }
    for (const Pair& p : kept)
      if (!polys_[p.i].front().m.coprime(lh)) survivors.push_back(p);
    pairs_ = std::move(survivors);
    for (std::size_t g = 0; g < polys_.size(); ++g)
      if (active_[g] && lh.divides(polys_[g].front().m)) active_[g] = false;
    active_[h] = true;
  }

  TermOrder order_;
  std::vector<IPoly> polys_;
  std::vector<bool> active_;
  std::vector<Pair> pairs_;
};

GroebnerBasis unit_basis(const RingPtr& ring) {
  GroebnerBasis g;
  g.ring = ring;
  g.basis.push_back(Polynomial::constant(ring, Rational(1)));
  g.reduced = true;
  return g;
}

}  // namespace

GroebnerOutcome buchberger(const PolyIdeal& ideal, TermOrder order, std::size_t pair_budget) {
  const RingPtr ring = ideal.ring->order() == order
                           ? ideal.ring
                           : make_ring(ideal.ring->variables(), order);
  Engine engine(order);
  for (const auto& f : ideal.generators) {
    if (f.is_zero()) continue;
    IPoly h = reduce(to_ipoly(f.in_ring(ring)), engine.reducers(), true, order);
    if (h.empty()) continue;
    if (!engine.add(std::move(h))) return unit_basis(ring);
  }

  std::size_t processed = 0;
  Pair pair{};
  while (engine.next_pair(pair)) {
    if (processed == pair_budget) return Timeout{processed};
    ++processed;
    IPoly s = spoly(engine.poly(pair.i), engine.poly(pair.j), order);
    if (s.empty()) continue;
    IPoly h = reduce(std::move(s), engine.reducers(), true, order);
    if (h.empty()) continue;
    if (!engine.add(std::move(h))) return unit_basis(ring);
  }

  std::vector<IPoly> minimal = engine.active_polys();
  std::sort(minimal.begin(), minimal.end(), [order](const IPoly& a, const IPoly& b) {
    return compare(a.front().m, b.front().m, order) < 0;
  });

  GroebnerBasis result;
  result.ring = ring;
  result.reduced = true;
  for (std::size_t i = 0; i < minimal.size(); ++i) {
    std::vector<const IPoly*> others;
    for (std::size_t j = 0; j < minimal.size(); ++j)
      if (j != i) others.push_back(&minimal[j]);
    const IPoly tail_reduced = reduce(minimal[i], others, true, order);
    result.basis.push_back(to_monic(tail_reduced, ring));
  }
  return result;
}

Polynomial normal_form(const Polynomial& f, const GroebnerBasis& g) {
  Polynomial p = f.in_ring(g.ring);
  std::vector<Polynomial::Term> remainder;
  while (!p.is_zero()) {
    const auto head = p.leading_term();
    const Polynomial* divisor = nullptr;
    for (const auto& b : g.basis) {
      if (b.leading_monomial().divides(head.monomial)) {
        divisor = &b;
        break;
      }
    }
    if (divisor) {
      p -= divisor->times_monomial(head.monomial / divisor->leading_monomial(),
                                   head.coeff / divisor->leading_coeff());
    } else {
      remainder.push_back(head);
      p -= Polynomial(g.ring, {head});
    }
  }
  return Polynomial(g.ring, std::move(remainder));
}

Polynomial s_polynomial(const Polynomial& f, const Polynomial& g) {
  const Monomial l = lcm(f.leading_monomial(), g.leading_monomial());
  return f.times_monomial(l / f.leading_monomial(), Rational(1) / f.leading_coeff()) -
         g.times_monomial(l / g.leading_monomial(), Rational(1) / g.leading_coeff());
}

PolyIdeal saturate_rabinowitsch(const PolyIdeal& ideal, const Polynomial& f,
                                const std::string& fresh) {
  if (f.is_zero()) throw std::invalid_argument("saturate_rabinowitsch: f must be nonzero");
  if (ideal.ring->index_of(fresh)) {
    throw std::invalid_argument("saturate_rabinowitsch: variable '" + fresh + "' already in ring");
  }
  std::vector<std::string> vars{fresh};
  for (const auto& v : ideal.ring->variables()) vars.push_back(v);
  const RingPtr ring = make_ring(std::move(vars), ideal.ring->order());
  std::vector<Polynomial> gens;
  for (const auto& g : ideal.generators) gens.push_back(g.in_ring(ring));
  const Polynomial y = Polynomial::variable(ring, 0);
  gens.push_back(y * f.in_ring(ring) - Polynomial::constant(ring, Rational(1)));
  return PolyIdeal(ring, std::move(gens));
}

namespace {

// Standard monomials below the pure-power bounds, pruning on the first
// exponent that makes the monomial divisible by a leading term.
void count_standard(const std::vector<Monomial>& leads, const std::vector<unsigned>& bound,
                    std::size_t var, Monomial& current, std::size_t& count) {
  if (var == bound.size()) {
    ++count;
    return;
  }
  const std::uint32_t base = current.degree;
  for (unsigned e = 0; e < bound[var]; ++e) {
    current.exp[var] = static_cast<std::uint16_t>(e);
    current.degree = base + e;
    const bool blocked = std::any_of(leads.begin(), leads.end(),
                                     [&](const Monomial& l) { return l.divides(current); });
    if (blocked) break;
    count_standard(leads, bound, var + 1, current, count);
  }
  current.exp[var] = 0;
  current.degree = base;
}

}  // namespace

DimDegree dim_and_degree(const GroebnerBasis& g) {
  DimDegree out;
  std::vector<Monomial> leads;
  for (const auto& p : g.basis) {
    if (p.is_zero()) continue;
    if (p.leading_monomial().is_one()) {
      out.unit_ideal = true;
      return out;
    }
    leads.push_back(p.leading_monomial());
  }
  const std::size_t nvars = g.ring->size();
  std::vector<unsigned> bound(nvars, 0);
  for (const auto& l : leads) {
    std::size_t var = 0;
    if (l.is_pure_power(var)) {
      bound[var] = bound[var] == 0 ? l.degree : std::min<unsigned>(bound[var], l.degree);
    }
  }
  for (unsigned b : bound)
    if (b == 0) return out;
  out.zero_dimensional = true;
  std::size_t count = 0;
  Monomial current;
  count_standard(leads, bound, 0, current, count);
  out.degree = count;
  return out;
}

void write_ideal(std::ostream& out, const RingPtr& ring, const std::vector<Polynomial>& polys) {
  out << "ring";
  for (const auto& v : ring->variables()) out << ' ' << v;
  out << ' ' << to_string(ring->order()) << '\n';
  for (const auto& p : polys) out << to_string(p) << '\n';
}

}  // namespace kronmle
