#pragma once

// Variational machinery for open covers: enumeration of the cylinder
// partitions finer than a cover, good-point search with entropy certificates,
// empirical measures along orbit segments, the max-min / min-max entropy
// estimates against the cover entropy, and the universal Rohlin tower.

#include "symdyn/cylinder.hpp"
#include "symdyn/entropy.hpp"
#include "symdyn/errors.hpp"
#include "symdyn/markers.hpp"
#include "symdyn/markov.hpp"
#include "symdyn/rational.hpp"
#include "symdyn/subshift.hpp"
#include "symdyn/towers.hpp"
#include "symdyn/word.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace symdyn {

// Recoverable failure of the good-point search: the proof is existential and
// only guarantees success for large enough windows.
struct GoodPointNotFound : PreconditionError {
  using PreconditionError::PreconditionError;
};

// ---------------------------------------------------------------------------
// All cylinder partitions at resolution R whose cells each fit inside a
// single cover element, enumerated deterministically (restricted-growth
// order). Coarser resolutions embed into R, so one resolution suffices.

inline std::vector<PartitionSpec> enumerate_finer_partitions(const Subshift& X,
                                                             const CoverSpec& U, int R,
                                                             std::size_t cap = 4096) {
  if (R < 1) throw ValidationError("enumerate_finer_partitions: resolution must be >= 1");
  if (U.anchor != 0) throw ValidationError("enumerate_finer_partitions: cover must be anchored at 0");
  if (U.resolution > R)
    throw ValidationError("enumerate_finer_partitions: resolution below the cover's");
  std::vector<Word> blocks = X.language(R);
  const std::size_t nb = blocks.size();
  if (U.elements.size() > 63) throw ResourceCapError("too many cover elements");
  // fit[b] = bitmask of cover elements whose window-R re-expression contains b
  std::vector<std::uint64_t> fit(nb, 0);
  for (std::size_t e = 0; e < U.elements.size(); ++e) {
    CylinderUnion re = at_resolution(X, U.elements[e], 0, R);
    for (std::size_t b = 0; b < nb; ++b)
      if (re.contains_block(blocks[b])) fit[b] |= std::uint64_t(1) << e;
  }
  for (std::size_t b = 0; b < nb; ++b)
    if (fit[b] == 0)
      throw ValidationError("block " + word_to_string(blocks[b]) +
                            " lies in no cover element");
  std::vector<PartitionSpec> out;
  std::vector<int> assign(nb, -1);
  std::vector<std::uint64_t> cell_fit;
  auto emit = [&]() {
    int ncells = *std::max_element(assign.begin(), assign.end()) + 1;
    std::vector<CylinderUnion> cells(ncells);
    for (int c = 0; c < ncells; ++c) {
      cells[c].anchor = 0;
      cells[c].extent = R;
    }
    for (std::size_t b = 0; b < nb; ++b) cells[assign[b]].blocks.push_back(blocks[b]);
    out.push_back(make_partition(X, cells));
  };
  // restricted-growth enumeration with per-cell feasibility pruning
  auto rec = [&](auto&& self, std::size_t b) -> void {
    if (b == nb) {
      if (out.size() >= cap) throw ResourceCapError("partition enumeration exceeds cap");
      emit();
      return;
    }
    int used = static_cast<int>(cell_fit.size());
    for (int c = 0; c <= used && c < static_cast<int>(nb); ++c) {
      std::uint64_t mask = (c < used ? cell_fit[c] : ~std::uint64_t(0)) & fit[b];
      if (mask == 0) continue;
      assign[b] = c;
      if (c < used) {
        std::uint64_t save = cell_fit[c];
        cell_fit[c] = mask;
        self(self, b + 1);
        cell_fit[c] = save;
      } else {
        cell_fit.push_back(mask);
        self(self, b + 1);
        cell_fit.pop_back();
      }
    }
    assign[b] = -1;
  };
  rec(rec, 0);
  return out;
}

// ---------------------------------------------------------------------------
// Empirical measures along an orbit segment.

struct EmpiricalMeasure {
  BlockDistribution dist;  // order-k distribution over N windows
  long N = 0;
  int k = 1;
  Rational defect;         // shift-consistency gap between the two (k-1)-marginals
};

inline EmpiricalMeasure empirical_measure(const Subshift& X, const Word& x, long N, int k) {
  if (k < 1 || N < 1) throw ValidationError("empirical_measure: need k >= 1 and N >= 1");
  if (static_cast<long>(x.size()) < N + k)
    throw ValidationError("empirical_measure: orbit segment too short");
  if (!X.admissible(x)) throw ValidationError("empirical_measure: segment not admissible");
  EmpiricalMeasure em;
  em.N = N;
  em.k = k;
  em.dist.order = k;
  for (long i = 0; i < N; ++i) em.dist.freq[subword(x, i, k)] += Rational(1, N);
  em.defect = 0;
  if (k > 1) {
    std::map<Word, Rational> left, right;
    for (long i = 0; i < N; ++i) {
      left[subword(x, i, k - 1)] += Rational(1, N);
      right[subword(x, i + 1, k - 1)] += Rational(1, N);
    }
    for (const auto& [w, p] : left) {
      Rational d = p - right[w];
      em.defect += (d < 0 ? -d : d);
    }
    for (const auto& [w, p] : right)
      if (!left.count(w)) em.defect += p;
  }
  if (em.defect > Rational(2 * k, N))
    throw std::logic_error("empirical shift-consistency defect exceeds 2k/N");
  return em;
}

// ---------------------------------------------------------------------------
// Good points: orbit segments whose codings under every enumerated finer
// partition carry at least k (h - 1/K) bits of order-k block entropy.

struct GoodPointCertificate {
  Word point;             // admissible block standing in for the point
  long N = 0;
  int K = 1;
  double h_estimate = 0.0;
  std::vector<PartitionSpec> family;
  std::vector<std::vector<double>> achieved;  // achieved[l][k-1] = H_k(coding)/k
};

inline GoodPointCertificate find_good_point(const Subshift& X, const CoverSpec& U, int K,
                                            long N, std::uint64_t seed = 1,
                                            long candidates = 128) {
  if (K < 1 || N < 1) throw ValidationError("find_good_point: need K >= 1 and N >= 1");
  GoodPointCertificate cert;
  cert.N = N;
  cert.K = K;
  cert.family = enumerate_finer_partitions(X, U, K);
  cert.h_estimate = cover_entropy(X, U, std::min<long>(10, N)).estimate;
  const double floor_rate = cert.h_estimate - 1.0 / K;
  const long len = N + K;  // room for resolution-K codings and order-K blocks
  std::mt19937_64 rng(seed);
  // measure-weighted candidate generation when a maximal-entropy chain exists
  MarkovMeasure<double> guide;
  bool guided = X.has_vertex_shift() && graph_irreducible(X.vertex_shift().out);
  if (guided) guide = parry_measure(X);
  Word best;
  std::vector<std::vector<double>> best_achieved;
  for (long c = 0; c < candidates; ++c) {
    Word x;
    if (guided) {
      const int m = guide.memory;
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      // weighted start
      double r = unif(rng), acc = 0.0;
      int s = 0;
      for (std::size_t i = 0; i < guide.states.size(); ++i) {
        acc += guide.pi[i];
        if (r <= acc || i + 1 == guide.states.size()) {
          s = static_cast<int>(i);
          break;
        }
      }
      x = guide.states[s];
      while (static_cast<long>(x.size()) < len) {
        double rr = unif(rng), a2 = 0.0;
        int t = s;
        for (std::size_t j = 0; j < guide.states.size(); ++j) {
          if (guide.P[s][j] <= 0) continue;
          a2 += guide.P[s][j];
          if (rr <= a2) {
            t = static_cast<int>(j);
            break;
          }
          t = static_cast<int>(j);
        }
        s = t;
        x.push_back(guide.states[t].back());
      }
      (void)m;
    } else {
      x = random_admissible_word(X, len, rng);
    }
    bool ok = true;
    std::vector<std::vector<double>> achieved(cert.family.size());
    for (std::size_t l = 0; l < cert.family.size() && ok; ++l) {
      Word code = code_partition(X, cert.family[l], x, N);
      for (int k = 1; k <= K && ok; ++k) {
        double rate = block_entropy(code, k) / k;
        achieved[l].push_back(rate);
        ok = rate >= floor_rate - 1e-12;
      }
    }
    if (ok && (best.empty() || x < best)) {
      best = x;
      best_achieved = achieved;
    }
  }
  if (best.empty())
    throw GoodPointNotFound("no good point among " + std::to_string(candidates) +
                            " candidates at N = " + std::to_string(N) +
                            "; retry with a larger window");
  cert.point = best;
  cert.achieved = best_achieved;
  return cert;
}

// ---------------------------------------------------------------------------
// Drive the good-point search along a schedule and certify that the final
// empirical measure nearly attains the cover entropy on every finer partition.

struct AttainStage {
  int K = 1;
  long N = 0;
  GoodPointCertificate cert;
  EmpiricalMeasure empirical;
};

struct AttainReport {
  std::vector<AttainStage> stages;
  double h_top_estimate = 0.0;
  std::vector<double> final_rates;  // per enumerated partition at K_max
  double final_lower_bound = 0.0;
  double tol = 0.05;
  bool attained = false;
};

inline AttainReport attain_cover_entropy(const Subshift& X, const CoverSpec& U,
                                         const std::vector<std::pair<int, long>>& schedule,
                                         double tol = 0.05, std::uint64_t seed = 1) {
  if (schedule.empty()) throw ValidationError("attain_cover_entropy: empty schedule");
  for (std::size_t i = 1; i < schedule.size(); ++i)
    if (schedule[i].first < schedule[i - 1].first || schedule[i].second <= schedule[i - 1].second)
      throw ValidationError("attain_cover_entropy: schedule must increase");
  AttainReport rep;
  rep.tol = tol;
  for (const auto& [K, N] : schedule) {
    AttainStage st;
    st.K = K;
    st.N = N;
    st.cert = find_good_point(X, U, K, N, seed);
    st.empirical = empirical_measure(X, st.cert.point, N, K);
    rep.stages.push_back(std::move(st));
  }
  const AttainStage& last = rep.stages.back();
  rep.h_top_estimate = last.cert.h_estimate;
  const int k = last.K;
  rep.final_lower_bound = std::numeric_limits<double>::infinity();
  for (const PartitionSpec& alpha : last.cert.family) {
    Word code = code_partition(X, alpha, last.cert.point, last.N);
    double rate = block_entropy(code, k) / k;
    rep.final_rates.push_back(rate);
    rep.final_lower_bound = std::min(rep.final_lower_bound, rate);
  }
  rep.attained = rep.final_lower_bound >= rep.h_top_estimate - tol;
  return rep;
}

// ---------------------------------------------------------------------------
// Max-min and min-max partition entropies against the cover entropy.

struct VariationalReport {
  double h_top_estimate = 0.0;
  double h_check = 0.0;  // max over measures of min over partitions
  double h_hat = 0.0;    // min over partitions of max over measures
  std::vector<std::vector<double>> matrix;  // matrix[m][l] = h_{mu_m}(alpha_l)
  std::vector<std::string> family_names;
  std::size_t partition_count = 0;
  int resolution = 0;
  double tol = 1e-9;
};

template <typename S>
inline VariationalReport evaluate_h_check(const Subshift& X, const CoverSpec& U,
                                          const std::vector<MarkovMeasure<S>>& family,
                                          int R, int n_max_cover = 12, int n_max_part = 6) {
  if (family.empty()) throw ValidationError("evaluate_h_check: empty measure family");
  VariationalReport rep;
  rep.resolution = R;
  std::vector<PartitionSpec> parts = enumerate_finer_partitions(X, U, R);
  rep.partition_count = parts.size();
  rep.h_top_estimate = cover_entropy(X, U, n_max_cover).estimate;
  rep.matrix.assign(family.size(), std::vector<double>(parts.size(), 0.0));
  for (std::size_t m = 0; m < family.size(); ++m) {
    rep.family_names.push_back(family[m].name.empty() ? "measure-" + std::to_string(m)
                                                      : family[m].name);
    for (std::size_t l = 0; l < parts.size(); ++l)
      rep.matrix[m][l] =
          partition_entropy_under_markov(X, parts[l], family[m], n_max_part).conditional;
  }
  rep.h_check = -std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < family.size(); ++m)
    rep.h_check = std::max(rep.h_check,
                           *std::min_element(rep.matrix[m].begin(), rep.matrix[m].end()));
  rep.h_hat = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < parts.size(); ++l) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < family.size(); ++m) worst = std::max(worst, rep.matrix[m][l]);
    rep.h_hat = std::min(rep.h_hat, worst);
  }
  if (rep.h_check > rep.h_hat + rep.tol)
    throw std::logic_error("max-min exceeds min-max");
  if (rep.h_hat > rep.h_top_estimate + rep.tol)
    throw std::logic_error("min-max exceeds the cover entropy estimate");
  return rep;
}

// ---------------------------------------------------------------------------
// Universal Rohlin tower: a base B whose first n translates are pairwise
// disjoint and cover more than 1 - delta under every supplied aperiodic
// rational chain simultaneously.

struct RohlinPiece {
  long column_height = 0;  // first-return time of the marker cylinder
  long level = 0;          // B-level offset within the column (multiple of n)
  CylinderUnion set;       // explicit representation, anchored at -level
};

struct RohlinTower {
  Word marker;
  long n = 0;
  Rational delta;
  long N = 0;    // required number of disjoint marker iterates, ceil(n/delta)
  long gap = 0;  // verified minimal marker reoccurrence distance (>= N)
  std::vector<RohlinPiece> pieces;  // truncated explicit B-levels
  long column_cap = 0;              // pieces listed for heights <= column_cap
  bool disjoint_verified = false;
  std::vector<std::pair<std::string, Rational>> coverage;  // per measure, exact
};

inline RohlinTower universal_rohlin(const Subshift& X, long n, const Rational& delta,
                                    const std::vector<MarkovMeasure<Rational>>& measures,
                                    long explicit_width = 4) {
  if (n < 2) throw ValidationError("universal_rohlin: n must be >= 2");
  if (delta <= 0 || delta >= 1) throw ValidationError("universal_rohlin: need 0 < delta < 1");
  if (measures.empty()) throw ValidationError("universal_rohlin: no measures supplied");
  RohlinTower tw;
  tw.n = n;
  tw.delta = delta;
  tw.N = static_cast<long>(ceil_rational(Rational(n) / delta));
  tw.marker = find_marker(X, tw.N);
  tw.gap = min_marker_gap(X, tw.marker);
  for (const auto& mu : measures) {
    if (!mu.irreducible() || !mu.aperiodic())
      throw PreconditionError("universal_rohlin: measure " + mu.name + " is not aperiodic");
    auto st = marker_return_stats(X, mu, tw.marker, n);
    if (!st.kac_ok) throw std::logic_error("mean return time violates the mass identity");
    // levels 0..n*floor(r/n)-1 of a column of height r are covered; the
    // uncovered remainder has exactly r mod n levels
    Rational cov = Rational(1) - st.mass_a * st.expected_mod;
    if (cov <= Rational(1) - delta)
      throw std::logic_error("coverage bound fails under " + mu.name);
    tw.coverage.push_back({mu.name.empty() ? "measure" : mu.name, cov});
  }
  // explicit truncated columns: admissible words with the marker at both ends
  // and nowhere in between, for the shortest range of return heights
  const int m = static_cast<int>(tw.marker.size());
  const long k_lo = tw.gap;
  tw.column_cap = tw.gap + explicit_width;
  for (long k = k_lo; k <= tw.column_cap; ++k) {
    std::vector<Word> cols;
    Word y(k + m, -1);
    for (int i = 0; i < m; ++i) {
      if (y[i] != -1 && y[i] != tw.marker[i])
        goto next_k;  // overlapping placements disagree
      y[i] = tw.marker[i];
    }
    for (int i = 0; i < m; ++i) {
      if (y[k + i] != -1 && y[k + i] != tw.marker[i]) goto next_k;
      y[k + i] = tw.marker[i];
    }
    {
      std::vector<long> free_pos;
      for (long i = 0; i < static_cast<long>(y.size()); ++i)
        if (y[i] == -1) free_pos.push_back(i);
      const long nf = static_cast<long>(free_pos.size());
      if (nf > 24) throw ResourceCapError("explicit column enumeration too wide");
      for (std::uint64_t bits = 0; bits < pow_u64(X.alphabet_size(), nf); ++bits) {
        std::uint64_t b = bits;
        for (long i = 0; i < nf; ++i) {
          y[free_pos[i]] = static_cast<Symbol>(b % X.alphabet_size());
          b /= X.alphabet_size();
        }
        if (!X.admissible(y)) continue;
        bool interior = false;
        for (long p = 1; p < k && !interior; ++p) interior = occurs_at(y, tw.marker, p);
        if (!interior) cols.push_back(y);
      }
    }
    for (long level = 0; level + n <= k; level += n) {
      if (cols.empty()) break;
      RohlinPiece piece;
      piece.column_height = k;
      piece.level = level;
      piece.set.anchor = -level;
      piece.set.extent = static_cast<int>(k + m);
      piece.set.blocks = cols;
      tw.pieces.push_back(std::move(piece));
    }
  next_k:;
  }
  if (tw.pieces.empty())
    throw PreconditionError("universal_rohlin: no explicit columns within the width cap");
  // exact pairwise disjointness of B, TB, ..., T^{n-1}B on the explicit part:
  // a point of (T^d B) ∩ B would realize two column placements offset by d
  for (long d = 1; d < n; ++d)
    for (const RohlinPiece& p : tw.pieces)
      for (const RohlinPiece& q : tw.pieces)
        for (const Word& yp : p.set.blocks)
          for (const Word& yq : q.set.blocks)
            if (constrained_word_exists(X, {{-p.level, yp}, {-q.level - d, yq}}))
              throw std::logic_error("tower levels intersect at shift " + std::to_string(d));
  tw.disjoint_verified = true;
  return tw;
}

}  // namespace symdyn
