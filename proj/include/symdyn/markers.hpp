#pragma once

// Marker words and first-return statistics. A marker for gap N is an
// admissible word with no admissible self-reoccurrence at any distance
// 1..N-1, so its cylinder has N pairwise disjoint forward iterates. Return
// times to a marker cylinder are analyzed exactly with an absorbing chain
// over (pattern-automaton state, Markov state) pairs.

#include "symdyn/errors.hpp"
#include "symdyn/markov.hpp"
#include "symdyn/rational.hpp"
#include "symdyn/subshift.hpp"
#include "symdyn/word.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace symdyn {

// Does any admissible configuration satisfy all (position, word) constraints?
// Decided by a forward DP over vertex-shift states on the hull window.
inline bool constrained_word_exists(const Subshift& X,
                                    const std::vector<std::pair<long, Word>>& constraints) {
  const VertexShift& vs = X.vertex_shift();
  long lo = constraints[0].first, hi = constraints[0].first;
  for (const auto& [pos, w] : constraints) {
    lo = std::min(lo, pos);
    hi = std::max(hi, pos + static_cast<long>(w.size()));
  }
  const long len = hi - lo;
  // fixed[i] = required symbol at offset i, or -1; -2 marks a conflict
  std::vector<int> fixed(len, -1);
  for (const auto& [pos, w] : constraints)
    for (std::size_t i = 0; i < w.size(); ++i) {
      long off = pos - lo + static_cast<long>(i);
      if (fixed[off] != -1 && fixed[off] != w[i]) return false;
      fixed[off] = w[i];
    }
  const int bl = vs.block_len;
  if (len <= bl) {
    for (const Word& b : X.language(static_cast<int>(len))) {
      bool ok = true;
      for (long i = 0; i < len && ok; ++i) ok = fixed[i] == -1 || fixed[i] == b[i];
      if (ok) return true;
    }
    return false;
  }
  auto state_matches = [&](int s, long start) {
    for (int i = 0; i < bl; ++i) {
      long off = start + i;
      if (off >= 0 && off < len && fixed[off] != -1 && fixed[off] != vs.states[s][i])
        return false;
    }
    return true;
  };
  std::vector<char> reach(vs.states.size(), 0);
  for (std::size_t s = 0; s < vs.states.size(); ++s)
    reach[s] = state_matches(static_cast<int>(s), 0);
  for (long pos = 1; pos + bl <= len; ++pos) {
    std::vector<char> nxt(vs.states.size(), 0);
    for (std::size_t s = 0; s < vs.states.size(); ++s) {
      if (!reach[s]) continue;
      for (int t : vs.out[s])
        if (!nxt[t] && state_matches(t, pos)) nxt[t] = 1;
    }
    reach = std::move(nxt);
  }
  for (char r : reach)
    if (r) return true;
  return false;
}

// ---------------------------------------------------------------------------
// KMP pattern automaton.

struct PatternAutomaton {
  Word w;
  int ell = 2;
  std::vector<int> fail;                 // border lengths, fail[0..m]
  std::vector<std::vector<int>> delta;   // delta[s][a], s in 0..m-1; m = match

  explicit PatternAutomaton(const Word& pattern, int alphabet) : w(pattern), ell(alphabet) {
    const int m = static_cast<int>(w.size());
    fail.assign(m + 1, 0);
    for (int i = 1; i < m; ++i) {
      int b = fail[i];
      while (b > 0 && w[i] != w[b]) b = fail[b];
      fail[i + 1] = (w[i] == w[b]) ? b + 1 : 0;
    }
    delta.assign(m, std::vector<int>(ell, 0));
    for (int s = 0; s < m; ++s)
      for (int a = 0; a < ell; ++a) {
        int b = s;
        while (b > 0 && w[b] != a) b = fail[b];
        delta[s][a] = (w[b] == a) ? b + 1 : 0;
      }
  }

  int match_state() const { return static_cast<int>(w.size()); }
  // automaton state just after a full match (scanning continues)
  int restart_state() const { return fail[w.size()]; }
};

inline constexpr long kInfiniteGap = std::numeric_limits<long>::max();

// Smallest d >= 1 such that some admissible point sees w both at 0 and at d;
// kInfiniteGap if no reoccurrence is possible at all. BFS over (pattern
// automaton state, vertex state) pairs starting just after a full match.
inline long min_marker_gap(const Subshift& X, const Word& w) {
  const VertexShift& vs = X.vertex_shift();
  if (!X.admissible(w)) throw ValidationError("marker word is not admissible");
  const int m = static_cast<int>(w.size());
  if (m < vs.block_len)
    throw ValidationError("marker shorter than the vertex-shift block length");
  PatternAutomaton pa(w, X.alphabet_size());
  const int v0 = vs.find_state(subword(w, m - vs.block_len, vs.block_len),
                               X.alphabet_size());
  const std::size_t nv = vs.states.size();
  std::vector<long> dist(static_cast<std::size_t>(m) * nv, -1);
  std::vector<std::size_t> queue;
  std::size_t start = static_cast<std::size_t>(pa.restart_state()) * nv + v0;
  dist[start] = 0;
  queue.push_back(start);
  long best = kInfiniteGap;
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    std::size_t id = queue[qi];
    std::size_t s = id / nv, v = id % nv;
    if (dist[id] + 1 >= best) continue;
    for (int vp : vs.out[v]) {
      int a = vs.states[vp].back();
      int sp = pa.delta[static_cast<int>(s)][a];
      if (sp == pa.match_state()) {
        best = std::min(best, dist[id] + 1);
        continue;
      }
      std::size_t nid = static_cast<std::size_t>(sp) * nv + vp;
      if (dist[nid] == -1) {
        dist[nid] = dist[id] + 1;
        queue.push_back(nid);
      }
    }
  }
  return best;
}

// True iff no admissible point sees w starting both at 0 and at d for any
// 0 < d < N. This is the exact symbolic fact behind tower disjointness.
inline bool marker_gap_at_least(const Subshift& X, const Word& w, long N) {
  return min_marker_gap(X, w) >= N;
}

// Shortest-then-lexicographically-least marker with gap >= N, found by
// enumeration for small lengths and by loop-based candidates beyond.
inline Word find_marker(const Subshift& X, long N, long max_len = 0) {
  if (max_len == 0) max_len = 2 * N + 4;
  const VertexShift& vs = X.vertex_shift();
  if (graph_irreducible(vs.out) && graph_period(vs.out) >= 2)
    throw PreconditionError("periodic SFT: every word reoccurs at the period distance");
  const long enum_len = std::min<long>(max_len, 18);
  for (long m = 1; m <= enum_len; ++m) {
    for (const Word& w : X.language(static_cast<int>(m)))
      if (marker_gap_at_least(X, w, N)) return w;
  }
  // long markers: a^{G-1} b for a self-loop symbol a and a successor b != a
  // has gap >= G whenever admissible (the lone b cannot land on an a)
  for (int a = 0; a < X.alphabet_size(); ++a) {
    Word aa{static_cast<Symbol>(a), static_cast<Symbol>(a)};
    if (!X.admissible(aa)) continue;
    for (int b = 0; b < X.alphabet_size(); ++b) {
      if (b == a) continue;
      for (long len = N; len <= max_len; ++len) {
        Word w(len, static_cast<Symbol>(a));
        w.back() = static_cast<Symbol>(b);
        if (X.admissible(w) && marker_gap_at_least(X, w, N)) return w;
      }
    }
  }
  throw PreconditionError("no marker word with gap " + std::to_string(N) +
                          " up to length " + std::to_string(max_len) +
                          " (resolution too coarse or system periodic)");
}

// ---------------------------------------------------------------------------

// ---------------------------------------------------------------------------
// Exact first-return statistics of the marker cylinder A = [w] under an
// irreducible rational Markov measure: mass of A, mean return time E[R]
// (Kac: mass * E[R] = 1), and the distribution of R mod n.

struct MarkerReturnStats {
  Rational mass_a;
  Rational mean_return;
  std::vector<Rational> residue_mass;  // P(R ≡ j mod n), j = 0..n-1
  Rational expected_mod;               // E[R mod n]
  bool kac_ok = false;
};

inline MarkerReturnStats marker_return_stats(const Subshift& X,
                                             const MarkovMeasure<Rational>& mu, const Word& w,
                                             long n) {
  if (static_cast<int>(w.size()) < mu.memory)
    throw ValidationError("marker shorter than the measure memory");
  if (!mu.irreducible()) throw PreconditionError("return statistics need an irreducible chain");
  MarkerReturnStats st;
  st.mass_a = mu.cylinder_mass(w);
  if (st.mass_a == 0) throw PreconditionError("marker cylinder has measure zero");
  PatternAutomaton pa(w, X.alphabet_size());
  const int m = static_cast<int>(w.size());
  const std::size_t nc = mu.states.size();
  const std::size_t nq = static_cast<std::size_t>(m) * nc;  // (kmp state, chain state)
  auto qid = [&](int s, std::size_t c) { return static_cast<std::size_t>(s) * nc + c; };
  // chain state after reading w; kmp state restarts at the border
  int c0 = mu.find_state(subword(w, w.size() - mu.memory, mu.memory));
  int s0 = pa.restart_state();
  // mean return: e(q) = sum_c' P (1 + [no match] e(q'))
  {
    std::vector<std::vector<Rational>> A(nq, std::vector<Rational>(nq, 0));
    std::vector<Rational> b(nq, 0);
    for (int s = 0; s < m; ++s)
      for (std::size_t c = 0; c < nc; ++c) {
        std::size_t q = qid(s, c);
        A[q][q] += 1;
        for (std::size_t cp = 0; cp < nc; ++cp) {
          if (mu.P[c][cp] == 0) continue;
          b[q] += mu.P[c][cp];
          int sp = pa.delta[s][mu.states[cp].back()];
          if (sp != pa.match_state()) A[q][qid(sp, cp)] -= mu.P[c][cp];
        }
      }
    std::vector<Rational> e = solve_linear(A, b);
    st.mean_return = e[qid(s0, c0)];
  }
  st.kac_ok = (st.mass_a * st.mean_return == 1);
  // residue distribution: v_j(q) = P(remaining steps ≡ j mod n | q)
  {
    const std::size_t dim = static_cast<std::size_t>(n) * nq;
    auto vid = [&](long j, std::size_t q) { return static_cast<std::size_t>(j) * nq + q; };
    std::vector<std::vector<Rational>> A(dim, std::vector<Rational>(dim, 0));
    std::vector<Rational> b(dim, 0);
    for (long j = 0; j < n; ++j)
      for (int s = 0; s < m; ++s)
        for (std::size_t c = 0; c < nc; ++c) {
          std::size_t row = vid(j, qid(s, c));
          A[row][row] += 1;
          for (std::size_t cp = 0; cp < nc; ++cp) {
            if (mu.P[c][cp] == 0) continue;
            int sp = pa.delta[s][mu.states[cp].back()];
            if (sp == pa.match_state()) {
              if (j == 1 % n) b[row] += mu.P[c][cp];
            } else {
              A[row][vid((j - 1 + n) % n, qid(sp, cp))] -= mu.P[c][cp];
            }
          }
        }
    std::vector<Rational> v = solve_linear(A, b);
    st.residue_mass.resize(n);
    Rational total(0);
    st.expected_mod = 0;
    for (long j = 0; j < n; ++j) {
      st.residue_mass[j] = v[vid(j, qid(s0, c0))];
      total += st.residue_mass[j];
      st.expected_mod += Rational(j) * st.residue_mass[j];
    }
    if (total != 1) throw std::logic_error("residue masses do not sum to 1");
  }
  return st;
}

// Occurrence positions of w in y (starting indices).
inline std::vector<long> occurrences(const Word& y, const Word& w) {
  std::vector<long> pos;
  for (std::size_t i = 0; i + w.size() <= y.size(); ++i)
    if (occurs_at(y, w, i)) pos.push_back(static_cast<long>(i));
  return pos;
}

}  // namespace symdyn
