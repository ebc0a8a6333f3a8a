#pragma once

// Tower machinery at finite scale: Kakutani skyscrapers over marker cylinders,
// first-return profiles, two-height tower decompositions (heights N and N+1),
// nesting with snapped block edges, good-fiber mass statistics, and uniformity
// defects of partitions.

#include "symdyn/cylinder.hpp"
#include "symdyn/errors.hpp"
#include "symdyn/markers.hpp"
#include "symdyn/markov.hpp"
#include "symdyn/rational.hpp"
#include "symdyn/subshift.hpp"
#include "symdyn/word.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace symdyn {

struct TowerColumn {
  long height = 0;
  CylinderUnion piece;
};

struct TowerDescription {
  CylinderUnion base;
  std::vector<TowerColumn> columns;
  int working_resolution = 0;
  bool exact = false;  // set when the column list is complete (not truncated)
};

// ---------------------------------------------------------------------------
// Uniform random admissible words (seeded walks on the vertex shift).

inline Word random_admissible_word(const Subshift& X, long len, std::mt19937_64& rng) {
  const VertexShift& vs = X.vertex_shift();
  if (len < vs.block_len) {
    auto lang = X.language(static_cast<int>(len));
    return lang[rng() % lang.size()];
  }
  int s = static_cast<int>(rng() % vs.states.size());
  Word w = vs.states[s];
  while (static_cast<long>(w.size()) < len) {
    const auto& succ = vs.out[s];
    s = succ[rng() % succ.size()];
    w.push_back(vs.states[s].back());
  }
  return w;
}

// A word u such that left + u + right is admissible (uniform over the DP
// paths is not required; any valid bridge will do). Throws if none exists.
inline Word bridge_word(const Subshift& X, const Word& left, const Word& right, long len,
                        std::mt19937_64& rng) {
  const VertexShift& vs = X.vertex_shift();
  const int bl = vs.block_len;
  const long total = static_cast<long>(left.size()) + len + static_cast<long>(right.size());
  // backward reachability: ok[t][v] = can finish the word from state v at window t
  const long nwin = total - bl + 1;
  auto matches = [&](int v, long start) {
    for (int i = 0; i < bl; ++i) {
      long p = start + i;
      int need = -1;
      if (p < static_cast<long>(left.size()))
        need = left[p];
      else if (p >= static_cast<long>(left.size()) + len)
        need = right[p - left.size() - len];
      if (need != -1 && vs.states[v][i] != need) return false;
    }
    return true;
  };
  std::vector<std::vector<char>> ok(nwin, std::vector<char>(vs.states.size(), 0));
  for (std::size_t v = 0; v < vs.states.size(); ++v)
    ok[nwin - 1][v] = matches(static_cast<int>(v), nwin - 1);
  for (long t = nwin - 2; t >= 0; --t)
    for (std::size_t v = 0; v < vs.states.size(); ++v) {
      if (!matches(static_cast<int>(v), t)) continue;
      for (int vp : vs.out[v])
        if (ok[t + 1][vp]) {
          ok[t][v] = 1;
          break;
        }
    }
  std::vector<int> starts;
  for (std::size_t v = 0; v < vs.states.size(); ++v)
    if (ok[0][v]) starts.push_back(static_cast<int>(v));
  if (starts.empty()) throw PreconditionError("no admissible bridge of the requested length");
  int v = starts[rng() % starts.size()];
  Word word = vs.states[v];
  for (long t = 1; t < nwin; ++t) {
    std::vector<int> nexts;
    for (int vp : vs.out[v])
      if (ok[t][vp]) nexts.push_back(vp);
    v = nexts[rng() % nexts.size()];
    word.push_back(vs.states[v].back());
  }
  return subword(word, left.size(), len);
}

// ---------------------------------------------------------------------------
// First-return profile of a cylinder-union base under a rational chain.

template <typename S>
struct ReturnTimeProfile {
  S base_mass;
  std::map<long, S> masses;  // height -> mu(B_height), heights <= l_max
  S residual;                // mass of returns beyond l_max
};

namespace detail {
inline bool scalar_near(const Rational& a, const Rational& b) { return a == b; }
inline bool scalar_near(double a, double b) { return std::abs(a - b) <= 1e-9; }
}  // namespace detail

template <typename S>
inline ReturnTimeProfile<S> return_times(const Subshift& X, const CylinderUnion& B,
                                         const MarkovMeasure<S>& mu, long l_max) {
  if (l_max < 1) throw ValidationError("return_times: l_max must be >= 1");
  const int L = B.extent;
  const int W = std::max(L, mu.memory);
  std::vector<Word> states = X.language(W);
  const std::size_t ns = states.size();
  std::vector<char> in_b(ns, 0);
  std::vector<S> mass0(ns);
  for (std::size_t i = 0; i < ns; ++i) {
    in_b[i] = B.contains_block(subword(states[i], W - L, L));
    mass0[i] = mu.cylinder_mass(states[i]);
  }
  // W-block chain transitions (memory <= W makes this exact)
  std::vector<std::vector<std::pair<int, S>>> trans(ns);
  {
    std::map<Word, int> idx;
    for (std::size_t i = 0; i < ns; ++i) idx[states[i]] = static_cast<int>(i);
    for (const Word& e : X.language(W + 1)) {
      int a = idx.at(subword(e, 0, W));
      int b = idx.at(subword(e, 1, W));
      S p = mu.P[mu.find_state(subword(e, W - mu.memory, mu.memory))]
                [mu.find_state(subword(e, W + 1 - mu.memory, mu.memory))];
      if (p != 0) trans[a].push_back({b, p});
    }
  }
  ReturnTimeProfile<S> prof;
  prof.base_mass = 0;
  std::vector<S> alive(ns, 0);
  for (std::size_t i = 0; i < ns; ++i)
    if (in_b[i]) {
      alive[i] = mass0[i];
      prof.base_mass += mass0[i];
    }
  if (prof.base_mass == 0) throw ValidationError("return_times: base has measure zero");
  for (long l = 1; l <= l_max; ++l) {
    std::vector<S> nxt(ns, 0);
    for (std::size_t i = 0; i < ns; ++i) {
      if (alive[i] == 0) continue;
      for (const auto& [j, p] : trans[i]) nxt[j] += alive[i] * p;
    }
    S returned(0);
    for (std::size_t j = 0; j < ns; ++j)
      if (in_b[j] && nxt[j] != 0) {
        returned += nxt[j];
        nxt[j] = 0;
      }
    if (returned != 0) prof.masses[l] = returned;
    alive = std::move(nxt);
  }
  prof.residual = 0;
  for (const S& q : alive) prof.residual += q;
  S check = prof.residual;
  for (const auto& [l, q] : prof.masses) check += q;
  if (!detail::scalar_near(check, prof.base_mass))
    throw std::logic_error("return-time masses do not add up");
  return prof;
}

// ---------------------------------------------------------------------------
// Two-height decomposition: a column of height k is cut into u blocks of N
// followed by v blocks of N+1, with N u + (N+1) v = k exactly.

struct TwoHeightSplit {
  long u = 0, v = 0;
};

inline TwoHeightSplit two_height_split(long k, long N) {
  if (N < 1) throw ValidationError("two_height_split: N must be >= 1");
  TwoHeightSplit s;
  s.v = k % N;
  s.u = (k - (N + 1) * s.v) / N;
  if (s.u < 0)
    throw PreconditionError("column of height " + std::to_string(k) +
                            " too short for heights {" + std::to_string(N) + "," +
                            std::to_string(N + 1) + "}");
  if (N * s.u + (N + 1) * s.v != k) throw std::logic_error("two-height identity failed");
  return s;
}

// Cut offsets within [0, k): starts of the N-blocks then of the (N+1)-blocks.
inline std::vector<long> two_height_offsets(long k, long N) {
  TwoHeightSplit s = two_height_split(k, N);
  std::vector<long> off;
  long pos = 0;
  for (long i = 0; i < s.u; ++i, pos += N) off.push_back(pos);
  for (long i = 0; i < s.v; ++i, pos += N + 1) off.push_back(pos);
  if (pos != k) throw std::logic_error("two-height offsets do not exhaust the column");
  return off;
}

struct TwoHeightTower {
  Word marker;       // base B = [marker]
  long N = 2;
  long gap = 0;      // verified minimal reoccurrence distance, > 10 N^2
  double base_mass = 0.0;
};

// Construct the two-height tower data: a marker base with return times
// > 10 N^2, from which every column splits into blocks of N and N+1.
template <typename S>
inline TwoHeightTower kr_two_heights(const Subshift& X, const MarkovMeasure<S>& mu, long N) {
  if (N < 1) throw ValidationError("kr_two_heights: N must be >= 1");
  if (!mu.irreducible() || !mu.aperiodic())
    throw PreconditionError("kr_two_heights: measure is not aperiodic");
  const long need = 10 * N * N + 1;
  TwoHeightTower t;
  t.N = N;
  t.marker = find_marker(X, need, need + 64);
  t.gap = min_marker_gap(X, t.marker);
  if (t.gap < need) throw std::logic_error("marker gap below requirement");
  t.base_mass = to_double_scalar(mu.cylinder_mass(t.marker));
  if (t.base_mass == 0)
    throw PreconditionError("kr_two_heights: marker cylinder has measure zero");
  return t;
}

// C-level positions inside an admissible word delimited by marker occurrences:
// positions of the two-height cut points of every full column seen in y.
inline std::vector<long> c_level_positions(const Word& y, const Word& w, long N) {
  std::vector<long> occ = occurrences(y, w);
  if (occ.size() < 2)
    throw ValidationError("word does not contain two marker occurrences");
  std::vector<long> S;
  for (std::size_t i = 0; i + 1 < occ.size(); ++i) {
    for (long off : two_height_offsets(occ[i + 1] - occ[i], N)) S.push_back(occ[i] + off);
  }
  S.push_back(occ.back());
  return S;
}

// ---------------------------------------------------------------------------
// Nesting: cut a tall column into blocks of ideal sizes t, t+1 (t = n + 2N)
// and snap every edge to the nearest C-level, so that all resulting heights
// lie in [n, n + 4N] and every block starts on a C-level.

struct NestedTower {
  Word marker;   // extends the two-height tower's marker, so D ⊆ B ⊆ C
  long n = 0, N = 0, t = 0;
  long gap = 0;  // > 10 t^2
};

inline NestedTower nest_tower(const Subshift& X, const TwoHeightTower& C, long n) {
  if (C.N < 2) throw ValidationError("nest_tower: needs N >= 2");
  if (n < 4 * C.N) throw ValidationError("nest_tower: needs n >= 4 N");
  NestedTower D;
  D.n = n;
  D.N = C.N;
  D.t = n + 2 * C.N;
  const long need = 10 * D.t * D.t + 1;
  // extend the marker so the new base sits inside the old one
  for (int a = 0; a < X.alphabet_size() && D.marker.empty(); ++a) {
    Word aa{static_cast<Symbol>(a), static_cast<Symbol>(a)};
    if (!X.admissible(aa)) continue;
    for (int b = 0; b < X.alphabet_size() && D.marker.empty(); ++b) {
      if (b == a) continue;
      for (long extra : {need, need + 1, need + 2}) {
        Word w2 = C.marker;
        w2.insert(w2.end(), extra, static_cast<Symbol>(a));
        w2.push_back(static_cast<Symbol>(b));
        if (!X.admissible(w2)) continue;
        long g = min_marker_gap(X, w2);
        if (g >= need) {
          D.marker = w2;
          D.gap = g;
          break;
        }
      }
    }
  }
  if (D.marker.empty())
    throw PreconditionError("nest_tower: could not extend the marker to gap " +
                            std::to_string(need));
  return D;
}

// Snap the ideal {t, t+1} edges of a column to the nearest C-levels.
// S: sorted C-level positions covering [S.front(), S.back()] with gaps in
// {N, N+1}. Returns cut positions including both endpoints.
inline std::vector<long> nest_cut_positions(const std::vector<long>& S, long n, long N) {
  if (S.size() < 2) throw ValidationError("nest_cut_positions: degenerate level set");
  const long t = n + 2 * N;
  const long h = S.back() - S.front();
  TwoHeightSplit sp = two_height_split(h, t);
  std::vector<long> cuts{S.front()};
  long ideal = S.front();
  auto snap = [&](long x) {
    auto it = std::lower_bound(S.begin(), S.end(), x);
    long best = *std::prev(it == S.begin() ? S.end() : it);
    if (it != S.end() && (*it - x) < (x - best)) best = *it;
    return best;
  };
  for (long i = 0; i < sp.u + sp.v; ++i) {
    ideal += (i < sp.u) ? t : t + 1;
    cuts.push_back(i + 1 == sp.u + sp.v ? S.back() : snap(ideal));
  }
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    long height = cuts[i + 1] - cuts[i];
    if (height < n || height > n + 4 * N)
      throw std::logic_error("nested column height " + std::to_string(height) +
                             " escapes [n, n+4N]");
    if (!std::binary_search(S.begin(), S.end(), cuts[i]))
      throw std::logic_error("nested cut is not a C-level");
  }
  return cuts;
}

// ---------------------------------------------------------------------------
// Exact mass of the fibers (skyscraper columns over the marker base) whose
// average of the indicator f is within eps of mu(f). Masses are classified
// per column length up to l_cap; columns beyond l_cap count as residual.

struct FiberFractionReport {
  Rational good, bad, residual;  // good + bad + residual = 1
  Rational mass_f;
  long l_cap = 0;
};

inline FiberFractionReport good_fiber_fraction(const Subshift& X, const Word& marker,
                                               const CylinderUnion& f,
                                               const MarkovMeasure<Rational>& mu,
                                               const Rational& eps, long l_cap) {
  const int m = static_cast<int>(marker.size());
  const int Lf = f.extent;
  if (Lf > m) throw ValidationError("good_fiber_fraction: indicator window exceeds the marker");
  const int W = std::max(Lf, mu.memory);
  if (W > m) throw ValidationError("good_fiber_fraction: marker shorter than the state window");
  FiberFractionReport rep;
  rep.l_cap = l_cap;
  rep.mass_f = mu.mass(f);
  rep.good = rep.bad = 0;
  PatternAutomaton pa(marker, X.alphabet_size());
  // W-block states and transitions, as in return_times
  std::vector<Word> states = X.language(W);
  const std::size_t ns = states.size();
  std::map<Word, int> idx;
  for (std::size_t i = 0; i < ns; ++i) idx[states[i]] = static_cast<int>(i);
  std::vector<std::vector<std::pair<int, Rational>>> trans(ns);
  for (const Word& e : X.language(W + 1)) {
    int a = idx.at(subword(e, 0, W));
    int b = idx.at(subword(e, 1, W));
    Rational p = mu.P[mu.find_state(subword(e, W - mu.memory, mu.memory))]
                     [mu.find_state(subword(e, W + 1 - mu.memory, mu.memory))];
    if (p != 0) trans[a].push_back({b, p});
  }
  std::vector<char> hit(ns, 0);
  for (std::size_t i = 0; i < ns; ++i)
    hit[i] = f.contains_block(subword(states[i], W - Lf, Lf));
  // hits contributed by windows lying entirely inside a marker occurrence
  long cw = 0;
  for (int j = 0; j + Lf <= m; ++j)
    if (f.contains_block(subword(marker, j, Lf))) ++cw;
  // DP over (kmp state, W-block, running hit count); step l = fiber offset
  std::map<std::tuple<int, int, long>, Rational> cur;
  cur[{pa.restart_state(), idx.at(subword(marker, m - W, W)), cw}] =
      mu.cylinder_mass(marker);
  auto classify = [&](long k, long hits, const Rational& mass) {
    // fiber of height k with `hits` f-visits; compare |hits/k - mu(f)| to eps
    Rational dev = Rational(hits, k) - rep.mass_f;
    if (dev < 0) dev = -dev;
    if (dev <= eps)
      rep.good += Rational(k) * mass;
    else
      rep.bad += Rational(k) * mass;
  };
  for (long step = 1; step <= l_cap + m; ++step) {
    std::map<std::tuple<int, int, long>, Rational> nxt;
    for (const auto& [key, mass] : cur) {
      auto [s, b, h] = key;
      for (const auto& [bp, p] : trans[b]) {
        int a = states[bp].back();
        int sp = pa.delta[s][a];
        long hp = h + (hit[bp] ? 1 : 0);
        if (sp == pa.match_state()) {
          long k = step;  // return time: match completes k symbols after the base
          if (k <= l_cap) classify(k, hp - cw, mass * p);
          // beyond the cap the column is residual; drop it
        } else {
          nxt[{sp, bp, hp}] += mass * p;
        }
      }
    }
    cur = std::move(nxt);
  }
  rep.residual = Rational(1) - rep.good - rep.bad;
  if (rep.residual < 0) throw std::logic_error("fiber masses exceed total mass");
  return rep;
}

// ---------------------------------------------------------------------------
// Uniformity defect: worst deviation of window averages from the cell masses,
// over all admissible windows (exhaustive) or a declared deterministic sample.

enum class ScanMode { Exhaustive, Sampled };

struct UniformityReport {
  std::vector<long> n_values;
  std::vector<double> deviations;  // per N, max over windows and cells
  ScanMode mode = ScanMode::Exhaustive;
  long sample_count = 0;
  std::uint64_t seed = 0;
};

inline UniformityReport uniformity_defect(const Subshift& X, const PartitionSpec& P,
                                          const std::vector<double>& cell_masses,
                                          const std::vector<long>& n_list, ScanMode mode,
                                          std::uint64_t seed = 1, long samples = 64) {
  if (cell_masses.size() != P.cells.size())
    throw ValidationError("uniformity_defect: one mass per cell required");
  const int L = P.resolution;
  UniformityReport rep;
  rep.mode = mode;
  rep.seed = seed;
  rep.sample_count = mode == ScanMode::Sampled ? samples : 0;
  auto window_dev = [&](const Word& y, long N) {
    std::vector<long> counts(P.cells.size(), 0);
    for (long i = 0; i < N; ++i) {
      Word win = subword(y, i, L);
      for (std::size_t c = 0; c < P.cells.size(); ++c)
        if (P.cells[c].contains_block(win)) {
          ++counts[c];
          break;
        }
    }
    double dev = 0.0;
    for (std::size_t c = 0; c < P.cells.size(); ++c)
      dev = std::max(dev, std::abs(static_cast<double>(counts[c]) / N - cell_masses[c]));
    return dev;
  };
  for (long N : n_list) {
    const long span = N + L - 1;
    double worst = 0.0;
    if (mode == ScanMode::Exhaustive) {
      for (const Word& y : X.language(static_cast<int>(span)))
        worst = std::max(worst, window_dev(y, N));
    } else {
      std::mt19937_64 rng(seed);
      // declared sample: every admissible constant word, then seeded walks
      for (int a = 0; a < X.alphabet_size(); ++a) {
        Word y(span, static_cast<Symbol>(a));
        if (X.admissible(y)) worst = std::max(worst, window_dev(y, N));
      }
      for (long s = 0; s < samples; ++s)
        worst = std::max(worst, window_dev(random_admissible_word(X, span, rng), N));
    }
    rep.n_values.push_back(N);
    rep.deviations.push_back(worst);
  }
  return rep;
}

// Symbol masses of a primitive substitution system (Perron frequencies of the
// incidence matrix), for resolution-1 partitions.
inline std::vector<double> substitution_symbol_masses(const Subshift& X) {
  if (X.kind() != SubshiftKind::Substitution)
    throw ValidationError("symbol masses via incidence matrix need a substitution system");
  const auto& rules = X.substitution_rules();
  const int ell = X.alphabet_size();
  // left Perron vector of M[a][b] = #occurrences of b in rules[a]
  std::vector<std::vector<double>> M(ell, std::vector<double>(ell, 0.0));
  for (int a = 0; a < ell; ++a)
    for (Symbol b : rules[a]) M[a][b] += 1.0;
  std::vector<double> v(ell, 1.0 / ell);
  for (int it = 0; it < 20000; ++it) {
    std::vector<double> nv(ell, 0.0);
    for (int a = 0; a < ell; ++a)
      for (int b = 0; b < ell; ++b) nv[b] += v[a] * M[a][b];
    double sum = 0.0;
    for (double x : nv) sum += x;
    for (double& x : nv) x /= sum;
    double resid = 0.0;
    for (int i = 0; i < ell; ++i) resid = std::max(resid, std::abs(nv[i] - v[i]));
    v = nv;
    if (resid < 1e-15 && it > 8) break;
  }
  return v;
}

// Masses of the cells of a resolution-1 partition under the substitution
// system's unique invariant measure.
inline std::vector<double> substitution_cell_masses(const Subshift& X,
                                                    const PartitionSpec& P) {
  if (P.resolution != 1)
    throw ValidationError("substitution cell masses support resolution-1 partitions only");
  std::vector<double> sym = substitution_symbol_masses(X);
  std::vector<double> out(P.cells.size(), 0.0);
  for (int a = 0; a < X.alphabet_size(); ++a) {
    Word b{static_cast<Symbol>(a)};
    for (std::size_t c = 0; c < P.cells.size(); ++c)
      if (P.cells[c].contains_block(b)) out[c] += sym[a];
  }
  return out;
}

}  // namespace symdyn
