#pragma once

// Entropy computations: block-frequency entropies of finite words, exhaustive
// low-entropy word counts, exact minimum subcovers of iterated covers (branch
// and bound), cover entropy estimates, SFT entropy via the adjacency spectral
// radius, and partition entropy under Markov measures via exact cylinder
// masses.

#include "symdyn/cylinder.hpp"
#include "symdyn/errors.hpp"
#include "symdyn/markov.hpp"
#include "symdyn/rational.hpp"
#include "symdyn/subshift.hpp"
#include "symdyn/word.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace symdyn {

// phi(t) = -t log t, phi(0) = 0 (natural log)
inline double phi(double t) {
  if (t <= 0.0) return 0.0;
  return -t * std::log(t);
}

inline double nats_to_bits(double nats) { return nats / std::log(2.0); }

struct BlockDistribution {
  int order = 1;
  std::map<Word, Rational> freq;  // exact frequencies, sum to 1

  Rational total() const {
    Rational s(0);
    for (const auto& [w, p] : freq) s += p;
    return s;
  }
};

inline double distribution_entropy(const BlockDistribution& d) {
  double h = 0.0;
  for (const auto& [w, p] : d.freq) h += phi(to_double(p));
  return h;
}

// p(theta | omega) over the |omega| - k + 1 sliding windows
inline BlockDistribution block_frequencies(const Word& omega, int k) {
  if (k < 1 || k > static_cast<int>(omega.size()))
    throw ValidationError("block_frequencies: need 1 <= k <= |word|");
  const long windows = static_cast<long>(omega.size()) - k + 1;
  BlockDistribution d;
  d.order = k;
  for (long i = 0; i < windows; ++i) d.freq[subword(omega, i, k)] += Rational(1, windows);
  return d;
}

// H_k(omega) = sum of phi over the order-k frequencies, in nats
inline double block_entropy(const Word& omega, int k) {
  return distribution_entropy(block_frequencies(omega, k));
}

// ---------------------------------------------------------------------------
// Exhaustive count of words with H_k <= k h.

struct LemmaRow {
  int n = 0;
  std::uint64_t count = 0;
  double bound = 0.0;  // exp(n (h + eps))
  bool holds = false;
};

inline std::uint64_t count_low_entropy_words(int ell, int n, int k, double h,
                                             std::uint64_t cap = std::uint64_t(1) << 24) {
  Alphabet a(ell);
  if (k < 1 || k > n) throw ValidationError("count_low_entropy_words: need 1 <= k <= n");
  if (h < 0) throw ValidationError("count_low_entropy_words: h must be >= 0");
  const std::uint64_t total = pow_u64(ell, n);
  if (total > cap) throw ResourceCapError("enumeration of alphabet^n exceeds cap " +
                                          std::to_string(cap));
  std::uint64_t count = 0;
  for (std::uint64_t code = 0; code < total; ++code) {
    Word w = decode_word(code, n, ell);
    if (block_entropy(w, k) <= k * h + 1e-9) ++count;
  }
  return count;
}

// Per-n table for the count-versus-exp(n(h+eps)) comparison, plus the first
// threshold n0 in range from which the inequality holds for all larger n.
struct LemmaTable {
  std::vector<LemmaRow> rows;
  int threshold = -1;  // -1 if never holds from some point on within the window
};

inline LemmaTable lemma_table(int ell, int n_min, int n_max, int k, double h, double eps,
                              std::uint64_t cap = std::uint64_t(1) << 24) {
  LemmaTable t;
  for (int n = std::max(n_min, k); n <= n_max; ++n) {
    LemmaRow row;
    row.n = n;
    row.count = count_low_entropy_words(ell, n, k, h, cap);
    row.bound = std::exp(n * (h + eps));
    row.holds = static_cast<double>(row.count) <= row.bound;
    t.rows.push_back(row);
  }
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    bool all = true;
    for (std::size_t j = i; j < t.rows.size(); ++j) all = all && t.rows[j].holds;
    if (all) {
      t.threshold = t.rows[i].n;
      break;
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Exact minimum set cover (branch and bound) over a block universe.

namespace detail {

struct BitRows {
  std::size_t nbits = 0;
  std::vector<std::vector<std::uint64_t>> rows;

  static std::size_t nwords(std::size_t nbits) { return (nbits + 63) / 64; }
  void add_row() { rows.emplace_back(nwords(nbits), 0); }
  void set(std::size_t r, std::size_t b) { rows[r][b >> 6] |= std::uint64_t(1) << (b & 63); }
  bool get(std::size_t r, std::size_t b) const {
    return (rows[r][b >> 6] >> (b & 63)) & 1;
  }
};

inline int popcount_vec(const std::vector<std::uint64_t>& v) {
  int c = 0;
  for (std::uint64_t w : v) c += __builtin_popcountll(w);
  return c;
}

// exact minimum cover of `universe_size` elements by the given sets
inline int min_set_cover(const std::vector<std::vector<std::uint64_t>>& sets,
                         std::size_t universe_size) {
  const std::size_t nw = (universe_size + 63) / 64;
  std::vector<std::uint64_t> full(nw, 0);
  for (std::size_t b = 0; b < universe_size; ++b) full[b >> 6] |= std::uint64_t(1) << (b & 63);
  // feasibility
  {
    std::vector<std::uint64_t> acc(nw, 0);
    for (const auto& s : sets)
      for (std::size_t i = 0; i < nw; ++i) acc[i] |= s[i];
    if (acc != full) throw ValidationError("cover does not cover the block universe");
  }
  // greedy upper bound
  auto greedy = [&]() {
    std::vector<std::uint64_t> unc = full;
    int used = 0;
    while (popcount_vec(unc) > 0) {
      int best = -1, gain = -1;
      for (std::size_t s = 0; s < sets.size(); ++s) {
        int g = 0;
        for (std::size_t i = 0; i < nw; ++i) g += __builtin_popcountll(sets[s][i] & unc[i]);
        if (g > gain) {
          gain = g;
          best = static_cast<int>(s);
        }
      }
      for (std::size_t i = 0; i < nw; ++i) unc[i] &= ~sets[best][i];
      ++used;
    }
    return used;
  };
  int best = greedy();
  int max_set = 1;
  for (const auto& s : sets) max_set = std::max(max_set, popcount_vec(s));
  // branch on the least-covered uncovered element
  std::vector<std::vector<int>> covering(universe_size);
  for (std::size_t s = 0; s < sets.size(); ++s)
    for (std::size_t b = 0; b < universe_size; ++b)
      if ((sets[s][b >> 6] >> (b & 63)) & 1) covering[b].push_back(static_cast<int>(s));
  struct Rec {
    const std::vector<std::vector<std::uint64_t>>& sets;
    const std::vector<std::vector<int>>& covering;
    std::size_t universe_size, nw;
    int max_set;
    int best;
    void go(std::vector<std::uint64_t>& unc, int used) {
      int remaining = popcount_vec(unc);
      if (remaining == 0) {
        best = std::min(best, used);
        return;
      }
      if (used + (remaining + max_set - 1) / max_set >= best) return;
      // pick uncovered element with fewest covering sets
      std::size_t pick = universe_size;
      std::size_t fewest = SIZE_MAX;
      for (std::size_t b = 0; b < universe_size; ++b) {
        if (!((unc[b >> 6] >> (b & 63)) & 1)) continue;
        if (covering[b].size() < fewest) {
          fewest = covering[b].size();
          pick = b;
        }
      }
      for (int s : covering[pick]) {
        std::vector<std::uint64_t> nu(nw);
        for (std::size_t i = 0; i < nw; ++i) nu[i] = unc[i] & ~sets[s][i];
        go(nu, used + 1);
      }
    }
  } rec{sets, covering, universe_size, nw, max_set, best};
  std::vector<std::uint64_t> unc = full;
  rec.go(unc, 0);
  return rec.best;
}

}  // namespace detail

// Minimum cardinality of a subcover of the n-fold iterated cover, restricted
// to the subshift: a minimum set cover over the admissible (n+L-1)-blocks.
inline std::uint64_t min_subcover_count(const Subshift& X, const CoverSpec& U, int n) {
  if (n < 1) throw ValidationError("min_subcover_count: n must be >= 1");
  const int L = U.resolution;
  const int span = n + L - 1;
  const std::size_t E = U.elements.size();
  // detect partitions: pairwise disjoint elements at resolution
  bool disjoint_elems = true;
  {
    std::vector<Word> l = X.language(L);
    for (const Word& b : l) {
      int hits = 0;
      for (const CylinderUnion& u : U.elements)
        if (u.contains_block(b)) ++hits;
      if (hits == 0)
        throw ValidationError("cover misses admissible block " + word_to_string(b));
      if (hits > 1) disjoint_elems = false;
    }
  }
  if (disjoint_elems && X.has_vertex_shift()) {
    // Each block lies in exactly one join cell, so the minimum subcover is the
    // number of distinct coding words. Counted without enumerating blocks:
    // determinize the labeled m-block automaton and count its label words.
    const int m = std::max(X.vertex_shift().block_len, L);
    VertexShift vs = vertex_shift_at(X, m);
    std::vector<int> label(vs.states.size(), -1);
    for (std::size_t i = 0; i < vs.states.size(); ++i) {
      Word win = subword(vs.states[i], 0, L);
      for (std::size_t e = 0; e < E; ++e)
        if (U.elements[e].contains_block(win)) {
          label[i] = static_cast<int>(e);
          break;
        }
    }
    std::map<std::vector<int>, int> subset_id;
    std::vector<std::vector<int>> subsets;            // sorted state lists
    std::vector<std::vector<int>> trans;              // successor subset ids
    auto intern = [&](std::vector<int> s) {
      auto it = subset_id.find(s);
      if (it != subset_id.end()) return it->second;
      int id = static_cast<int>(subsets.size());
      subset_id.emplace(s, id);
      subsets.push_back(std::move(s));
      trans.emplace_back();
      return id;
    };
    std::map<int, std::vector<int>> by_label;
    for (std::size_t i = 0; i < vs.states.size(); ++i)
      by_label[label[i]].push_back(static_cast<int>(i));
    std::vector<int> frontier_init;
    for (auto& [lab, sts] : by_label) frontier_init.push_back(intern(sts));
    for (std::size_t cur = 0; cur < subsets.size(); ++cur) {
      if (subsets.size() > X.cap()) throw ResourceCapError("coding determinization exceeds cap");
      std::map<int, std::set<int>> succ;
      for (int s : subsets[cur])
        for (int t : vs.out[s]) succ[label[t]].insert(t);
      for (auto& [lab, sts] : succ)
        trans[cur].push_back(intern(std::vector<int>(sts.begin(), sts.end())));
    }
    std::map<int, BigInt> weight;
    for (int id : frontier_init) weight[id] += 1;
    for (int step = 1; step < n; ++step) {
      std::map<int, BigInt> nxt;
      for (const auto& [id, w] : weight)
        for (int t : trans[id]) nxt[t] += w;
      weight = std::move(nxt);
    }
    BigInt total = 0;
    for (const auto& [id, w] : weight) total += w;
    return total.convert_to<std::uint64_t>();
  }
  // general cover: enumerate realizable join elements by prefix pruning
  std::vector<Word> universe = X.language(span);
  if (universe.size() > X.cap()) throw ResourceCapError("block universe exceeds cap");
  const std::size_t nwords = (universe.size() + 63) / 64;
  // windows[j][e]: bitset of universe blocks whose j-th window lies in element e
  std::vector<std::vector<std::vector<std::uint64_t>>> windows(
      n, std::vector<std::vector<std::uint64_t>>(E, std::vector<std::uint64_t>(nwords, 0)));
  for (std::size_t b = 0; b < universe.size(); ++b)
    for (int j = 0; j < n; ++j) {
      Word win = subword(universe[b], j, L);
      for (std::size_t e = 0; e < E; ++e)
        if (U.elements[e].contains_block(win))
          windows[j][e][b >> 6] |= std::uint64_t(1) << (b & 63);
    }
  std::vector<std::vector<std::uint64_t>> sets;
  std::set<std::vector<std::uint64_t>> seen;
  std::vector<std::uint64_t> cur(nwords, ~std::uint64_t(0));
  std::uint64_t visited = 0;
  struct DFS {
    int n;
    std::size_t E, nwords;
    const std::vector<std::vector<std::vector<std::uint64_t>>>& windows;
    std::vector<std::vector<std::uint64_t>>& sets;
    std::set<std::vector<std::uint64_t>>& seen;
    std::uint64_t cap;
    std::uint64_t* visited;
    void go(int j, const std::vector<std::uint64_t>& cur) {
      if (++*visited > cap) throw ResourceCapError("join-element enumeration exceeds cap");
      if (j == n) {
        if (seen.insert(cur).second) sets.push_back(cur);
        return;
      }
      for (std::size_t e = 0; e < E; ++e) {
        std::vector<std::uint64_t> nxt(nwords);
        bool nonempty = false;
        for (std::size_t i = 0; i < nwords; ++i) {
          nxt[i] = cur[i] & windows[j][e][i];
          nonempty = nonempty || nxt[i];
        }
        if (nonempty) go(j + 1, nxt);
      }
    }
  } dfs{n, E, nwords, windows, sets, seen, X.cap(), &visited};
  dfs.go(0, cur);
  return static_cast<std::uint64_t>(detail::min_set_cover(sets, universe.size()));
}

// ---------------------------------------------------------------------------

struct CoverEntropyReport {
  std::vector<double> per_n;    // (1/n) log r(n), n = 1..n_max
  double estimate = 0.0;        // value at n_max
  double upper_bound = 0.0;     // min over n of the subadditive bound
  double diff_estimate = 0.0;   // log r(n_max) - log r(n_max - 1)
};

inline CoverEntropyReport cover_entropy(const Subshift& X, const CoverSpec& U, int n_max) {
  if (n_max < 1) throw ValidationError("cover_entropy: n_max must be >= 1");
  CoverEntropyReport rep;
  double prev_log_r = 0.0;
  rep.upper_bound = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= n_max; ++n) {
    double log_r = std::log(static_cast<double>(min_subcover_count(X, U, n)));
    rep.per_n.push_back(log_r / n);
    rep.upper_bound = std::min(rep.upper_bound, log_r / n);
    if (n == n_max) {
      rep.estimate = log_r / n;
      rep.diff_estimate = n_max >= 2 ? log_r - prev_log_r : log_r;
    }
    prev_log_r = log_r;
  }
  return rep;
}

// log of the spectral radius of the vertex-shift adjacency matrix; reducible
// presentations are handled per strongly connected component (max taken).
inline double sft_entropy(const Subshift& X) {
  const VertexShift& vs = X.vertex_shift();
  std::vector<int> comp = strongly_connected_components(vs.out);
  int ncomp = 0;
  for (int c : comp) ncomp = std::max(ncomp, c + 1);
  double best = 0.0;
  for (int c = 0; c < ncomp; ++c) {
    std::vector<int> idx, pos(vs.states.size(), -1);
    for (std::size_t i = 0; i < vs.states.size(); ++i)
      if (comp[i] == c) {
        pos[i] = static_cast<int>(idx.size());
        idx.push_back(static_cast<int>(i));
      }
    std::vector<std::vector<int>> sub(idx.size());
    bool has_edge = false;
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (int j : vs.out[idx[a]])
        if (pos[j] != -1) {
          sub[a].push_back(pos[j]);
          has_edge = true;
        }
    if (!has_edge) continue;
    // power iteration on A + I (residual 1e-12 target)
    const std::size_t m = sub.size();
    std::vector<double> v(m, 1.0), w(m);
    double lambda = 1.0;
    for (int it = 0; it < 500000; ++it) {
      for (std::size_t i = 0; i < m; ++i) {
        double acc = v[i];
        for (int j : sub[i]) acc += v[j];
        w[i] = acc;
      }
      double norm = 0.0;
      for (double x : w) norm = std::max(norm, x);
      double resid = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        w[i] /= norm;
        resid = std::max(resid, std::abs(w[i] - v[i]));
      }
      v = w;
      lambda = norm - 1.0;
      if (resid < 1e-13 && it > 16) break;
    }
    best = std::max(best, std::log(lambda));
  }
  return best;
}

// ---------------------------------------------------------------------------

struct PartitionEntropyReport {
  std::vector<double> per_n;   // (1/n) H(alpha_0^{n-1}), n = 1..n_max
  double cesaro = 0.0;         // value at n_max (non-increasing in n)
  double conditional = 0.0;    // H(n_max) - H(n_max - 1), sharper rate estimate
};

// H_mu of the n-fold iterated partition from exact cylinder masses; the
// per-n averages are checked to be non-increasing. Works for both exact
// rational and floating-point (Parry) measures.
template <class S>
inline PartitionEntropyReport partition_entropy_under_markov(const Subshift& X,
                                                             const PartitionSpec& alpha,
                                                             const MarkovMeasure<S>& mu,
                                                             int n_max) {
  if (n_max < 1) throw ValidationError("partition entropy: n_max must be >= 1");
  const int L = alpha.resolution;
  PartitionEntropyReport rep;
  double prev_H = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    const int span = n + L - 1;
    std::map<Word, S> cellmass;
    for (const Word& b : X.language(span)) {
      Word code(n);
      for (int j = 0; j < n; ++j) {
        Word win = subword(b, j, L);
        int cell = -1;
        for (std::size_t i = 0; i < alpha.cells.size(); ++i)
          if (alpha.cells[i].contains_block(win)) {
            cell = static_cast<int>(i);
            break;
          }
        if (cell == -1) throw ValidationError("partition misses a block during iteration");
        code[j] = cell;
      }
      cellmass[code] += mu.cylinder_mass(b);
    }
    double H = 0.0;
    for (const auto& [c, p] : cellmass) H += phi(to_double_scalar(p));
    rep.per_n.push_back(H / n);
    if (n >= 2 && H / n > rep.per_n[n - 2] + 1e-9)
      throw std::logic_error("partition entropy averages failed to be non-increasing");
    if (n == n_max) {
      rep.cesaro = H / n;
      rep.conditional = n_max >= 2 ? H - prev_H : H;
    }
    prev_H = H;
  }
  return rep;
}

}  // namespace symdyn
