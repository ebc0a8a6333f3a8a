#pragma once

// Shift-invariant Markov measures over a subshift. The scalar type is a
// template parameter: exact rationals whenever the measure data is rational,
// doubles for spectral constructions (Parry measure). States are admissible
// m-blocks for a memory m >= 1; Bernoulli measures are memory-1 chains with
// identical rows.

#include "symdyn/cylinder.hpp"
#include "symdyn/errors.hpp"
#include "symdyn/rational.hpp"
#include "symdyn/subshift.hpp"
#include "symdyn/word.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace symdyn {

inline double to_double_scalar(const Rational& r) { return to_double(r); }
inline double to_double_scalar(double x) { return x; }

template <class S>
struct MarkovMeasure {
  int memory = 1;                      // states are memory-blocks
  int ell = 2;                         // alphabet size
  std::vector<Word> states;            // sorted admissible memory-blocks
  std::vector<std::vector<S>> P;       // row-stochastic transition matrix
  std::vector<S> pi;                   // stationary vector, pi P = pi
  std::string name;                    // human-readable tag for reports

  int find_state(const Word& b) const {
    auto it = std::lower_bound(states.begin(), states.end(), b);
    if (it == states.end() || *it != b) return -1;
    return static_cast<int>(it - states.begin());
  }

  // chain successor: state of b shifted one step with new symbol a appended
  static Word advance(const Word& b, Symbol a) {
    Word nxt(b.begin() + 1, b.end());
    nxt.push_back(a);
    return nxt;
  }

  // Exact measure of the cylinder [w] (anchor irrelevant by invariance).
  S cylinder_mass(const Word& w) const {
    const int m = memory;
    if (static_cast<int>(w.size()) >= m) {
      int s = find_state(subword(w, 0, m));
      if (s == -1) return S(0);
      S mass = pi[s];
      for (std::size_t i = 1; i + m <= w.size(); ++i) {
        int t = find_state(subword(w, i, m));
        if (t == -1) return S(0);
        mass *= P[s][t];
        if (mass == S(0)) return S(0);
        s = t;
      }
      return mass;
    }
    // short word: sum of stationary masses of states extending it
    S mass(0);
    for (std::size_t i = 0; i < states.size(); ++i)
      if (occurs_at(states[i], w, 0)) mass += pi[i];
    return mass;
  }

  S mass(const CylinderUnion& u) const {
    S total(0);
    for (const Word& b : u.blocks) total += cylinder_mass(b);
    return total;
  }

  std::vector<std::vector<int>> support_graph() const {
    std::vector<std::vector<int>> out(states.size());
    for (std::size_t i = 0; i < states.size(); ++i)
      for (std::size_t j = 0; j < states.size(); ++j)
        if (P[i][j] != S(0)) out[i].push_back(static_cast<int>(j));
    return out;
  }

  bool irreducible() const { return graph_irreducible(support_graph()); }
  long period() const { return graph_period(support_graph()); }
  bool aperiodic() const { return irreducible() && period() == 1; }
};

// -Σ_i π_i Σ_j P_ij log P_ij, in nats.
template <class S>
inline double markov_entropy(const MarkovMeasure<S>& mu) {
  double h = 0.0;
  for (std::size_t i = 0; i < mu.states.size(); ++i) {
    double pii = static_cast<double>(to_double_scalar(mu.pi[i]));
    for (std::size_t j = 0; j < mu.states.size(); ++j) {
      double p = to_double_scalar(mu.P[i][j]);
      if (p > 0.0) h -= pii * p * std::log(p);
    }
  }
  return h;
}

namespace detail {

template <class S>
inline void check_stochastic(const MarkovMeasure<S>& mu) {
  const std::size_t n = mu.states.size();
  if (mu.P.size() != n || mu.pi.size() != n)
    throw ValidationError("markov measure: dimension mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    S row(0);
    for (std::size_t j = 0; j < n; ++j) {
      if (to_double_scalar(mu.P[i][j]) < 0) throw ValidationError("negative transition probability");
      row += mu.P[i][j];
    }
    if constexpr (std::is_same_v<S, Rational>) {
      if (row != S(1)) throw ValidationError("transition row does not sum to 1");
    } else {
      if (std::abs(row - 1.0) > 1e-9) throw ValidationError("transition row does not sum to 1");
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    S acc(0);
    for (std::size_t i = 0; i < n; ++i) acc += mu.pi[i] * mu.P[i][j];
    if constexpr (std::is_same_v<S, Rational>) {
      if (acc != mu.pi[j]) throw ValidationError("pi is not stationary for P");
    } else {
      if (std::abs(acc - mu.pi[j]) > 1e-9) throw ValidationError("pi is not stationary for P");
    }
  }
}

template <class S>
inline void check_support(const Subshift& X, const MarkovMeasure<S>& mu) {
  // supported transitions must correspond to admissible (m+1)-blocks
  for (std::size_t i = 0; i < mu.states.size(); ++i)
    for (std::size_t j = 0; j < mu.states.size(); ++j) {
      if (mu.P[i][j] == S(0)) continue;
      Word joined = mu.states[i];
      // overlap consistency for memory >= 2
      if (mu.memory >= 2) {
        Word suff = subword(mu.states[i], 1, mu.memory - 1);
        Word pref = subword(mu.states[j], 0, mu.memory - 1);
        if (suff != pref) throw ValidationError("transition between non-overlapping blocks");
      }
      joined.push_back(mu.states[j].back());
      if (!X.admissible(joined))
        throw ValidationError("transition supported on forbidden block " + word_to_string(joined));
    }
}

}  // namespace detail

// Exact stationary vector of an irreducible rational chain.
inline std::vector<Rational> stationary_vector(const std::vector<std::vector<Rational>>& P) {
  const std::size_t n = P.size();
  // solve (P^T - I) x = 0 with the last equation replaced by Σ x = 1
  std::vector<std::vector<Rational>> A(n, std::vector<Rational>(n));
  std::vector<Rational> b(n, 0);
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = 0; j < n; ++j) A[i][j] = P[j][i] - (i == j ? Rational(1) : Rational(0));
  for (std::size_t j = 0; j < n; ++j) A[n - 1][j] = 1;
  b[n - 1] = 1;
  return solve_linear(A, b);
}

// Memory-1 chain from a transition matrix over the alphabet; pi computed exactly.
inline MarkovMeasure<Rational> markov_measure(const Subshift& X,
                                              std::vector<std::vector<Rational>> P,
                                              std::string name = "markov") {
  MarkovMeasure<Rational> mu;
  mu.memory = 1;
  mu.ell = X.alphabet_size();
  for (int a = 0; a < mu.ell; ++a) mu.states.push_back(Word{static_cast<Symbol>(a)});
  if (static_cast<int>(P.size()) != mu.ell) throw ValidationError("transition matrix size mismatch");
  mu.P = std::move(P);
  mu.pi = stationary_vector(mu.P);
  mu.name = std::move(name);
  detail::check_stochastic(mu);
  detail::check_support(X, mu);
  return mu;
}

// Memory-1 chain with an explicitly supplied stationary vector; needed for
// reducible chains, where the stationary vector is not unique.
inline MarkovMeasure<Rational> markov_measure_with_pi(const Subshift& X,
                                                      std::vector<std::vector<Rational>> P,
                                                      std::vector<Rational> pi,
                                                      std::string name = "markov") {
  MarkovMeasure<Rational> mu;
  mu.memory = 1;
  mu.ell = X.alphabet_size();
  for (int a = 0; a < mu.ell; ++a) mu.states.push_back(Word{static_cast<Symbol>(a)});
  mu.P = std::move(P);
  mu.pi = std::move(pi);
  mu.name = std::move(name);
  detail::check_stochastic(mu);
  detail::check_support(X, mu);
  return mu;
}

inline MarkovMeasure<Rational> bernoulli_measure(const Subshift& X, std::vector<Rational> p,
                                                 std::string name = "") {
  if (static_cast<int>(p.size()) != X.alphabet_size())
    throw ValidationError("bernoulli vector size mismatch");
  if (name.empty()) {
    name = "bernoulli(";
    for (std::size_t i = 0; i < p.size(); ++i)
      name += (i ? "," : "") + rational_to_string(p[i]);
    name += ")";
  }
  std::vector<std::vector<Rational>> P(p.size(), p);
  return markov_measure(X, std::move(P), std::move(name));
}

// Memory-m rational chain with explicitly supplied states and rows.
inline MarkovMeasure<Rational> markov_measure_blocks(const Subshift& X, int memory,
                                                     std::vector<Word> states,
                                                     std::vector<std::vector<Rational>> P,
                                                     std::string name = "markov-blocks") {
  MarkovMeasure<Rational> mu;
  mu.memory = memory;
  mu.ell = X.alphabet_size();
  mu.states = std::move(states);
  if (!std::is_sorted(mu.states.begin(), mu.states.end()))
    throw ValidationError("markov states must be sorted");
  mu.P = std::move(P);
  mu.pi = stationary_vector(mu.P);
  mu.name = std::move(name);
  detail::check_stochastic(mu);
  detail::check_support(X, mu);
  return mu;
}

// ---------------------------------------------------------------------------
// Spectral data of the vertex-shift adjacency matrix (power iteration).

struct SpectralData {
  double lambda = 0.0;
  std::vector<double> right;  // Av = lambda v
  std::vector<double> left;   // u A = lambda u
  int block_len = 1;
  std::vector<Word> states;
};

inline SpectralData dominant_eigendata(const Subshift& X) {
  const VertexShift& vs = X.vertex_shift();
  const std::size_t n = vs.states.size();
  std::vector<std::vector<int>> in(n);
  for (std::size_t i = 0; i < n; ++i)
    for (int j : vs.out[i]) in[j].push_back(static_cast<int>(i));
  if (!graph_irreducible(vs.out))
    throw PreconditionError("dominant eigendata requires an irreducible vertex shift");
  auto iterate = [&](const std::vector<std::vector<int>>& adj) {
    std::vector<double> v(n, 1.0), w(n);
    double lambda = 0.0;
    // power iteration on A + I keeps convergence for periodic matrices
    for (int it = 0; it < 200000; ++it) {
      for (std::size_t i = 0; i < n; ++i) {
        double acc = v[i];
        for (int j : adj[i]) acc += v[j];
        w[i] = acc;
      }
      double norm = 0.0;
      for (double x : w) norm = std::max(norm, x);
      for (std::size_t i = 0; i < n; ++i) w[i] /= norm;
      double resid = 0.0;
      for (std::size_t i = 0; i < n; ++i) resid = std::max(resid, std::abs(w[i] - v[i]));
      v = w;
      lambda = norm - 1.0;
      if (resid < 1e-15 && it > 16) break;
    }
    return std::pair{lambda, v};
  };
  auto [lr, right] = iterate(vs.out);
  auto [ll, left] = iterate(in);
  SpectralData sd;
  sd.lambda = (lr + ll) / 2.0;
  sd.right = right;
  sd.left = left;
  sd.block_len = vs.block_len;
  sd.states = vs.states;
  return sd;
}

// Measure of maximal entropy of an irreducible SFT, from the dominant eigendata.
// Floating-point copy of an exact chain, for mixing families with the
// (irrational) maximal-entropy measure.
inline MarkovMeasure<double> to_double_measure(const MarkovMeasure<Rational>& mu) {
  MarkovMeasure<double> out;
  out.memory = mu.memory;
  out.ell = mu.ell;
  out.states = mu.states;
  out.name = mu.name;
  out.P.assign(mu.states.size(), std::vector<double>(mu.states.size(), 0.0));
  out.pi.assign(mu.states.size(), 0.0);
  for (std::size_t i = 0; i < mu.states.size(); ++i) {
    out.pi[i] = to_double_scalar(mu.pi[i]);
    for (std::size_t j = 0; j < mu.states.size(); ++j)
      out.P[i][j] = to_double_scalar(mu.P[i][j]);
  }
  return out;
}

inline MarkovMeasure<double> parry_measure(const Subshift& X) {
  SpectralData sd = dominant_eigendata(X);
  const VertexShift& vs = X.vertex_shift();
  const std::size_t n = vs.states.size();
  MarkovMeasure<double> mu;
  mu.memory = vs.block_len;
  mu.ell = X.alphabet_size();
  mu.states = vs.states;
  mu.name = "parry";
  mu.P.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (int j : vs.out[i]) mu.P[i][j] = sd.right[j] / (sd.lambda * sd.right[i]);
  double dot = 0.0;
  for (std::size_t i = 0; i < n; ++i) dot += sd.left[i] * sd.right[i];
  mu.pi.resize(n);
  for (std::size_t i = 0; i < n; ++i) mu.pi[i] = sd.left[i] * sd.right[i] / dot;
  detail::check_stochastic(mu);
  return mu;
}

// ---------------------------------------------------------------------------
// Transfer products: mu(A ∩ T^{-n} B) for cylinder unions A, B.

template <class S>
inline std::vector<std::vector<S>> matrix_multiply(const std::vector<std::vector<S>>& a,
                                                   const std::vector<std::vector<S>>& b) {
  const std::size_t n = a.size();
  std::vector<std::vector<S>> c(n, std::vector<S>(n, S(0)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      if (a[i][k] == S(0)) continue;
      for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
    }
  return c;
}

template <class S>
inline std::vector<std::vector<S>> matrix_power(std::vector<std::vector<S>> a, long e) {
  const std::size_t n = a.size();
  std::vector<std::vector<S>> r(n, std::vector<S>(n, S(0)));
  for (std::size_t i = 0; i < n; ++i) r[i][i] = S(1);
  while (e > 0) {
    if (e & 1) r = matrix_multiply(r, a);
    a = matrix_multiply(a, a);
    e >>= 1;
  }
  return r;
}

// mu(A ∩ T^{-n} B) where both unions are read at their own anchors; by
// invariance only the relative displacement matters, so we use displacement
// n + (anchor_B - anchor_A) on the block windows.
template <class S>
inline S mass_intersection(const Subshift& X, const MarkovMeasure<S>& mu,
                           const CylinderUnion& A, const CylinderUnion& B, long n) {
  long shift = n + (B.anchor - A.anchor);
  if (shift < 0) return mass_intersection(X, mu, B, A, -shift);
  const int LA = A.extent, LB = B.extent;
  const int m = mu.memory;
  if (shift <= LA + m) {
    // overlapping or nearly overlapping windows: expand to one window
    int len = static_cast<int>(std::max<long>(LA, shift + LB));
    S total(0);
    for (const Word& w : X.language(len)) {
      if (!A.contains_block(subword(w, 0, LA))) continue;
      if (!B.contains_block(subword(w, shift, LB))) continue;
      total += mu.cylinder_mass(w);
    }
    return total;
  }
  // far apart: condition on the chain state, bridge with a matrix power
  const std::size_t ns = mu.states.size();
  // entry mass of A ending in state s: mu over blocks of A extended to carry
  // a trailing m-block
  const int extA = std::max(LA, m);
  std::vector<S> enter(ns, S(0));
  for (const Word& w : X.language(extA)) {
    if (!A.contains_block(subword(w, 0, LA))) continue;
    int s = mu.find_state(subword(w, extA - m, m));
    if (s != -1) enter[s] += mu.cylinder_mass(w);
  }
  // conditional mass of B given entering m-block state t
  const int extB = std::max(LB, m);
  const int pad = extB - LB;  // B read at offset `pad` inside its window
  std::vector<S> leave(ns, S(0));
  for (const Word& w : X.language(extB)) {
    if (!B.contains_block(subword(w, pad, LB))) continue;
    int t = mu.find_state(subword(w, 0, m));
    if (t == -1) continue;
    S cond(1);
    int s = t;
    for (std::size_t i = 1; i + m <= w.size(); ++i) {
      int u = mu.find_state(subword(w, i, m));
      if (u == -1) {
        cond = S(0);
        break;
      }
      cond *= mu.P[s][u];
      s = u;
    }
    leave[t] += cond;
  }
  long steps = shift - (extA - m) - pad;
  if (steps < 0) throw std::logic_error("mass_intersection: negative bridge");
  auto Pn = matrix_power(mu.P, steps);
  S total(0);
  for (std::size_t s = 0; s < ns; ++s) {
    if (enter[s] == S(0)) continue;
    for (std::size_t t = 0; t < ns; ++t) total += enter[s] * Pn[s][t] * leave[t];
  }
  return total;
}

// ---------------------------------------------------------------------------
// Ergodic decomposition of a (possibly reducible) rational chain: restrict to
// closed communicating classes; weights are the stationary masses.

struct ErgodicComponent {
  Rational weight;
  MarkovMeasure<Rational> measure;
};

inline std::vector<ErgodicComponent> ergodic_components(const Subshift& X,
                                                        const MarkovMeasure<Rational>& mu) {
  auto out = mu.support_graph();
  std::vector<int> comp = strongly_connected_components(out);
  int ncomp = 0;
  for (int c : comp) ncomp = std::max(ncomp, c + 1);
  std::vector<bool> closed(ncomp, true);
  for (std::size_t i = 0; i < out.size(); ++i)
    for (int j : out[i])
      if (comp[j] != comp[static_cast<int>(i)]) closed[comp[i]] = false;
  std::vector<ErgodicComponent> comps;
  for (int c = 0; c < ncomp; ++c) {
    if (!closed[c]) continue;
    std::vector<int> idx;
    Rational w(0);
    for (std::size_t i = 0; i < mu.states.size(); ++i)
      if (comp[i] == c) {
        idx.push_back(static_cast<int>(i));
        w += mu.pi[i];
      }
    if (w == 0) continue;
    MarkovMeasure<Rational> sub;
    sub.memory = mu.memory;
    sub.ell = mu.ell;
    sub.name = mu.name + "/component" + std::to_string(comps.size());
    for (int i : idx) sub.states.push_back(mu.states[i]);
    sub.P.assign(idx.size(), std::vector<Rational>(idx.size(), 0));
    sub.pi.resize(idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a) {
      sub.pi[a] = mu.pi[idx[a]] / w;
      for (std::size_t b = 0; b < idx.size(); ++b) sub.P[a][b] = mu.P[idx[a]][idx[b]];
    }
    detail::check_stochastic(sub);
    comps.push_back({w, std::move(sub)});
  }
  // mass not in closed classes must vanish under stationarity
  Rational total(0);
  for (const auto& ec : comps) total += ec.weight;
  if (total != 1) throw ValidationError("stationary mass outside closed classes");
  (void)X;
  return comps;
}

}  // namespace symdyn
