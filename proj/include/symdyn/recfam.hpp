#pragma once

// Recurrence machinery on finite integer windows: N(U,V) visit sets,
// syndetic/thick/IP evidence, difference and SIP sets, Bohr sets, Weyl
// averages along sequences, return-mass sequences, SFT mixing classification,
// correlation coefficients, and two-element-cover entropy witnesses.
// Every family-style claim is relative to an explicit horizon H.

#include "symdyn/cylinder.hpp"
#include "symdyn/entropy.hpp"
#include "symdyn/errors.hpp"
#include "symdyn/markers.hpp"
#include "symdyn/markov.hpp"
#include "symdyn/rational.hpp"
#include "symdyn/subshift.hpp"
#include "symdyn/word.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace symdyn {

// ---------------------------------------------------------------------------
// Windowed integer sets.

enum class WindowProvenance { Explicit, NSet, DifferenceSet, Bohr, IpGenerated, SipGenerated };

struct IntegerWindowSet {
  long H = 0;              // horizon
  bool two_sided = false;  // domain [-H, H] if set, else [0, H]
  std::vector<char> member;
  WindowProvenance provenance = WindowProvenance::Explicit;

  static IntegerWindowSet empty(long H, bool two_sided, WindowProvenance p) {
    IntegerWindowSet s;
    s.H = H;
    s.two_sided = two_sided;
    s.provenance = p;
    s.member.assign(two_sided ? 2 * H + 1 : H + 1, 0);
    return s;
  }
  long lo() const { return two_sided ? -H : 0; }
  bool in_window(long n) const { return n >= lo() && n <= H; }
  bool contains(long n) const { return in_window(n) && member[n - lo()]; }
  void insert(long n) {
    if (!in_window(n)) throw ValidationError("integer outside the window");
    member[n - lo()] = 1;
  }
  std::vector<long> elements() const {
    std::vector<long> out;
    for (long n = lo(); n <= H; ++n)
      if (member[n - lo()]) out.push_back(n);
    return out;
  }
};

// ---------------------------------------------------------------------------
// N(U,V) = {n : T^n U ∩ V ≠ ∅} on [-H, H], by admissible-word existence.

inline IntegerWindowSet n_set(const Subshift& X, const CylinderUnion& U,
                              const CylinderUnion& V, long H) {
  if (U.empty() || V.empty()) throw ValidationError("n_set: empty cylinder union");
  auto s = IntegerWindowSet::empty(H, true, WindowProvenance::NSet);
  for (long n = -H; n <= H; ++n) {
    bool hit = false;
    // x ∈ T^n U places a U-block at anchor-n; x ∈ V places a V-block at anchor
    for (const Word& bu : U.blocks) {
      for (const Word& bv : V.blocks)
        if (constrained_word_exists(X, {{U.anchor - n, bu}, {V.anchor, bv}})) {
          hit = true;
          break;
        }
      if (hit) break;
    }
    if (hit) s.insert(n);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Window-relative family evidence.

struct WindowClassification {
  bool empty = true;
  long syndetic_gap = 0;  // largest gap between consecutive members (and ends)
  long thick_run = 0;     // longest run of consecutive members
  int ip_depth = 0;       // largest d with IP{n_1..n_d} inside the set
  long H = 0;
};

namespace detail {

inline int ip_depth_search(const IntegerWindowSet& s, const std::vector<long>& elems,
                           long budget = 200000) {
  // DFS over increasing generator tuples; all nonempty subset sums must lie
  // in the set. Depth capped by the node budget; evidence only.
  int best = 0;
  long nodes = 0;
  std::vector<long> sums;  // all subset sums of the current generators
  auto rec = [&](auto&& self, std::size_t from, int depth) -> void {
    best = std::max(best, depth);
    if (nodes >= budget) return;
    for (std::size_t i = from; i < elems.size(); ++i) {
      long g = elems[i];
      if (g <= 0) continue;
      if (++nodes >= budget) return;
      bool ok = true;
      for (long t : sums)
        if (t + g > s.H || !s.contains(t + g)) {
          ok = false;
          break;
        }
      if (!ok) continue;
      std::size_t base = sums.size();
      sums.push_back(g);
      for (std::size_t t = 0; t < base; ++t) sums.push_back(sums[t] + g);
      self(self, i + 1, depth + 1);
      sums.resize(base);
      if (nodes >= budget) return;
    }
  };
  rec(rec, 0, 0);
  return best;
}

}  // namespace detail

inline WindowClassification classify_window(const IntegerWindowSet& s) {
  WindowClassification c;
  c.H = s.H;
  std::vector<long> elems = s.elements();
  if (elems.empty()) return c;
  c.empty = false;
  c.syndetic_gap = elems.front() - s.lo();
  for (std::size_t i = 1; i < elems.size(); ++i)
    c.syndetic_gap = std::max(c.syndetic_gap, elems[i] - elems[i - 1]);
  c.syndetic_gap = std::max(c.syndetic_gap, s.H - elems.back());
  long run = 1;
  c.thick_run = 1;
  for (std::size_t i = 1; i < elems.size(); ++i) {
    run = (elems[i] == elems[i - 1] + 1) ? run + 1 : 1;
    c.thick_run = std::max(c.thick_run, run);
  }
  std::vector<long> pos;
  for (long e : elems)
    if (e > 0) pos.push_back(e);
  c.ip_depth = detail::ip_depth_search(s, pos);
  return c;
}

// Positive pairwise differences of a strictly increasing list.
inline IntegerWindowSet difference_set(const std::vector<long>& A) {
  for (std::size_t i = 1; i < A.size(); ++i)
    if (A[i] <= A[i - 1]) throw ValidationError("difference_set: list must increase");
  long H = A.empty() ? 0 : A.back() - A.front();
  auto s = IntegerWindowSet::empty(H, false, WindowProvenance::DifferenceSet);
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t j = i + 1; j < A.size(); ++j) s.insert(A[j] - A[i]);
  return s;
}

// All finite sums of distinct generators.
inline IntegerWindowSet ip_set(const std::vector<long>& gens) {
  if (gens.size() > 20) throw ResourceCapError("ip_set: too many generators");
  long total = 0;
  for (long g : gens) {
    if (g <= 0) throw ValidationError("ip_set: generators must be positive");
    total += g;
  }
  auto s = IntegerWindowSet::empty(total, false, WindowProvenance::IpGenerated);
  const std::size_t d = gens.size();
  for (std::uint64_t mask = 1; mask < (std::uint64_t(1) << d); ++mask) {
    long sum = 0;
    for (std::size_t i = 0; i < d; ++i)
      if (mask & (std::uint64_t(1) << i)) sum += gens[i];
    s.insert(sum);
  }
  return s;
}

// Positive differences of IP{gens} ∪ {0}.
inline IntegerWindowSet sip_set(const std::vector<long>& gens) {
  IntegerWindowSet ip = ip_set(gens);
  std::vector<long> pts{0};
  for (long e : ip.elements()) pts.push_back(e);
  auto s = IntegerWindowSet::empty(ip.H, false, WindowProvenance::SipGenerated);
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j)
      if (pts[i] - pts[j] > 0) s.insert(pts[i] - pts[j]);
  return s;
}

// ---------------------------------------------------------------------------
// Bohr sets: {n : max_j ||n λ_j|| < ε}, with ||·|| evaluated in fixed-point
// arithmetic at a declared bit precision (the doubles are taken at their
// exact binary values).

struct BohrSpec {
  std::vector<double> lambdas;
  double eps = 0.1;
};

namespace detail {

// exact fixed-point representation of a double at 2^-bits resolution
inline BigInt dyadic_scaled(double x, int bits) {
  int e = 0;
  double m = std::frexp(x, &e);
  long long mi = std::llround(std::ldexp(m, 53));
  BigInt v(mi);
  int shift = bits + e - 53;
  if (shift >= 0)
    v <<= shift;
  else
    v >>= -shift;
  return v;
}

// ||y / 2^bits|| as a rational in [0, 1/2]
inline Rational circle_distance(BigInt y, int bits) {
  BigInt one = BigInt(1) << bits;
  y %= one;
  if (y < 0) y += one;
  BigInt flip = one - y;
  BigInt d = y < flip ? y : flip;
  return Rational(d, one);
}

}  // namespace detail

inline IntegerWindowSet bohr_membership(const BohrSpec& spec, long H, int precision_bits = 192) {
  if (spec.lambdas.empty()) throw ValidationError("bohr_membership: no frequencies");
  if (spec.eps <= 0) throw ValidationError("bohr_membership: eps must be positive");
  auto s = IntegerWindowSet::empty(H, true, WindowProvenance::Bohr);
  std::vector<BigInt> scaled;
  for (double l : spec.lambdas) scaled.push_back(detail::dyadic_scaled(l, precision_bits));
  for (long n = -H; n <= H; ++n) {
    bool in = true;
    for (const BigInt& lam : scaled) {
      Rational d = detail::circle_distance(BigInt(n) * lam, precision_bits);
      if (!(to_double(d) < spec.eps)) {
        in = false;
        break;
      }
    }
    if (in) s.insert(n);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Sequences s_1 < s_2 < ...

struct SequenceSpec {
  enum class Kind { Squares, Arithmetic, Lacunary, Explicit };
  Kind kind = Kind::Squares;
  long start = 1, step = 1;   // arithmetic: start + (j-1) step
  long base = 2;              // lacunary: base^j
  std::vector<long> list;
  long cap = 1L << 40;        // largest term allowed

  static SequenceSpec squares() { return SequenceSpec{}; }
  static SequenceSpec arithmetic(long start, long step) {
    SequenceSpec s;
    s.kind = Kind::Arithmetic;
    s.start = start;
    s.step = step;
    if (step < 1) throw ValidationError("arithmetic sequence needs step >= 1");
    return s;
  }
  static SequenceSpec lacunary(long base) {
    SequenceSpec s;
    s.kind = Kind::Lacunary;
    s.base = base;
    if (base < 2) throw ValidationError("lacunary sequence needs base >= 2");
    return s;
  }
  static SequenceSpec explicit_list(std::vector<long> v) {
    for (std::size_t i = 1; i < v.size(); ++i)
      if (v[i] <= v[i - 1]) throw ValidationError("explicit sequence must increase");
    SequenceSpec s;
    s.kind = Kind::Explicit;
    s.list = std::move(v);
    return s;
  }

  long term(long j) const {  // 1-based
    if (j < 1) throw ValidationError("sequence index starts at 1");
    long t = 0;
    switch (kind) {
      case Kind::Squares: t = j * j; break;
      case Kind::Arithmetic: t = start + (j - 1) * step; break;
      case Kind::Lacunary: {
        t = 1;
        for (long i = 0; i < j; ++i) {
          if (t > cap / base) throw ResourceCapError("lacunary term exceeds cap");
          t *= base;
        }
        break;
      }
      case Kind::Explicit:
        if (j > static_cast<long>(list.size()))
          throw ValidationError("explicit sequence exhausted");
        t = list[j - 1];
        break;
    }
    if (t > cap) throw ResourceCapError("sequence term exceeds cap");
    return t;
  }
};

// ---------------------------------------------------------------------------
// Weyl averages |(1/n) Σ e^{i α s_k}| with compensated summation.

struct WeylResult {
  double magnitude = 0.0;
  double error_bound = 0.0;
  long n = 0;
};

inline WeylResult weyl_average(const SequenceSpec& s, double alpha, long n) {
  if (n < 1) throw ValidationError("weyl_average: n must be >= 1");
  double re = 0.0, im = 0.0, cre = 0.0, cim = 0.0;  // Kahan compensation
  const long double two_pi = 6.283185307179586476925286766559L;
  for (long j = 1; j <= n; ++j) {
    long double theta = std::fmod(static_cast<long double>(alpha) * s.term(j), two_pi);
    double x = static_cast<double>(std::cos(theta));
    double y = static_cast<double>(std::sin(theta));
    double t = re + (x - cre);
    cre = (t - re) - (x - cre);
    re = t;
    t = im + (y - cim);
    cim = (t - im) - (y - cim);
    im = t;
  }
  WeylResult r;
  r.n = n;
  r.magnitude = std::hypot(re, im) / n;
  // per-term phase + summation rounding, divided by n
  r.error_bound = (4.0 * std::numeric_limits<double>::epsilon() * n + 1e-10) / n;
  return r;
}

// Least d in the sequence with ||d α|| < eps.
struct RotationRecurrence {
  bool found = false;
  long d = 0;
  long index = 0;
  double distance = 0.0;
};

inline RotationRecurrence rotation_recurrence(double alpha, double eps, const SequenceSpec& s,
                                              long j_max = 10000, int precision_bits = 192) {
  RotationRecurrence r;
  BigInt lam = detail::dyadic_scaled(alpha, precision_bits);
  for (long j = 1; j <= j_max; ++j) {
    long d;
    try {
      d = s.term(j);
    } catch (const ValidationError&) {
      break;  // explicit sequence exhausted
    }
    Rational dist = detail::circle_distance(BigInt(d) * lam, precision_bits);
    if (to_double(dist) < eps) {
      r.found = true;
      r.d = d;
      r.index = j;
      r.distance = to_double(dist);
      return r;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Return masses mu(B ∩ T^{-s_j} B) along a sequence.

template <typename S>
struct ReturnMassSequence {
  std::vector<long> times;
  std::vector<S> masses;
  std::vector<double> running_average;
  bool positive_found = false;
};

template <typename S>
inline ReturnMassSequence<S> poincare_return_masses(const Subshift& X,
                                                    const MarkovMeasure<S>& mu,
                                                    const CylinderUnion& B,
                                                    const SequenceSpec& s, long j_max) {
  if (mu.mass(B) == S(0)) throw ValidationError("poincare_return_masses: base has measure zero");
  ReturnMassSequence<S> out;
  double acc = 0.0;
  for (long j = 1; j <= j_max; ++j) {
    long t = s.term(j);
    S m = mass_intersection(X, mu, B, B, t);
    out.times.push_back(t);
    out.masses.push_back(m);
    if (m > S(0)) out.positive_found = true;
    acc += to_double_scalar(m);
    out.running_average.push_back(acc / j);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Transitivity / mixing classification of an SFT.

struct SftClassification {
  bool transitive = false;
  long period = 0;  // gcd of cycle lengths on the (irreducible) graph; 0 if reducible
  bool mixing = false;
  bool weak_mixing = false;
  bool product_irreducible = false;  // the certificate behind weak_mixing
  std::vector<std::pair<Symbol, long>> te_evidence;  // syndetic gap of N([a],[a]) at H
  long H = 64;
};

inline SftClassification classify_sft(const Subshift& X, long H = 64) {
  SftClassification c;
  c.H = H;
  const VertexShift& vs = X.vertex_shift();
  c.transitive = graph_irreducible(vs.out);
  c.period = c.transitive ? graph_period(vs.out) : 0;
  c.mixing = c.transitive && c.period == 1;
  // product system on vertex pairs
  const std::size_t nv = vs.states.size();
  std::vector<std::vector<int>> prod(nv * nv);
  for (std::size_t a = 0; a < nv; ++a)
    for (std::size_t b = 0; b < nv; ++b)
      for (int ap : vs.out[a])
        for (int bp : vs.out[b])
          prod[a * nv + b].push_back(static_cast<int>(ap * nv + bp));
  c.product_irreducible = graph_irreducible(prod);
  c.weak_mixing = c.transitive && c.product_irreducible;
  for (int a = 0; a < X.alphabet_size(); ++a) {
    Word w{static_cast<Symbol>(a)};
    if (!X.admissible(w)) continue;
    auto cls = classify_window(n_set(X, cylinder(X, w), cylinder(X, w), H));
    c.te_evidence.push_back({static_cast<Symbol>(a), cls.empty ? H : cls.syndetic_gap});
  }
  return c;
}

// ---------------------------------------------------------------------------
// Normalized correlation of a cylinder indicator:
// phi(n) = (mu(f ∩ T^{-n} f) - mu(f)^2) / (mu(f) - mu(f)^2).

template <typename S>
struct CorrelationReport {
  std::vector<S> values;  // phi(1) .. phi(n_max)
  double limsup_tail = 0.0;  // max |phi| over the second half of the window
  bool rigidity_evidence = false;  // some |phi(n)|, n >= 1, returns near 1
};

template <typename S>
inline CorrelationReport<S> matrix_coefficient(const Subshift& X, const MarkovMeasure<S>& mu,
                                               const CylinderUnion& f, long n_max) {
  S p = mu.mass(f);
  S var = p * (S(1) - p);
  if (var == S(0)) throw ValidationError("matrix_coefficient: indicator is trivial");
  CorrelationReport<S> rep;
  for (long n = 1; n <= n_max; ++n) {
    S phi = (mass_intersection(X, mu, f, f, n) - p * p) / var;
    rep.values.push_back(phi);
    double a = std::abs(to_double_scalar(phi));
    if (n > n_max / 2) rep.limsup_tail = std::max(rep.limsup_tail, a);
    if (a > 1.0 - 1e-9) rep.rigidity_evidence = true;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Two-element-cover entropy witness: minimum growth rate over the canonical
// covers {X \ [b1], X \ [b2]} by complements of distinct resolution-L
// cylinders.

struct UpeWitness {
  double min_entropy = 0.0;
  Word block1, block2;  // the minimizing pair
  int resolution = 1;
  int n_max = 8;
};

inline UpeWitness upe_witness(const Subshift& X, int L, int n_max = 8) {
  std::vector<Word> blocks = X.language(L);
  if (blocks.size() < 2)
    throw PreconditionError("upe_witness: fewer than two cylinders at this resolution");
  if (blocks.size() > 64) throw ResourceCapError("upe_witness: too many cylinder pairs");
  UpeWitness w;
  w.resolution = L;
  w.n_max = n_max;
  w.min_entropy = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < blocks.size(); ++i)
    for (std::size_t j = i + 1; j < blocks.size(); ++j) {
      CylinderUnion u = complement(X, cylinder(X, blocks[i]));
      CylinderUnion v = complement(X, cylinder(X, blocks[j]));
      CoverSpec cover = make_cover(X, {u, v});
      double h = cover_entropy(X, cover, n_max).diff_estimate;
      if (h < w.min_entropy) {
        w.min_entropy = h;
        w.block1 = blocks[i];
        w.block2 = blocks[j];
      }
    }
  return w;
}

}  // namespace symdyn
