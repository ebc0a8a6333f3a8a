#pragma once

// Finite presentations of symbolic dynamical systems: full shifts, subshifts
// of finite type, primitive substitution systems, and Sturmian systems given
// by a rational convergent. SFTs (and full shifts) are compiled once, at
// construction, to a higher-block vertex-shift presentation whose non-essential
// vertices have been trimmed, so that every admissible word is bi-extendable.

#include "symdyn/errors.hpp"
#include "symdyn/rational.hpp"
#include "symdyn/word.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace symdyn {

enum class SubshiftKind { Full, SFT, Substitution, Sturmian };

inline const char* kind_name(SubshiftKind k) {
  switch (k) {
    case SubshiftKind::Full: return "full";
    case SubshiftKind::SFT: return "sft";
    case SubshiftKind::Substitution: return "substitution";
    case SubshiftKind::Sturmian: return "sturmian";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Directed-graph helpers (used for the vertex-shift presentation).

inline std::vector<int> strongly_connected_components(
    const std::vector<std::vector<int>>& out) {
  // Tarjan, iterative. Returns component id per vertex (ids are arbitrary).
  const int n = static_cast<int>(out.size());
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<int> stack, call_state, call_vertex, call_child;
  std::vector<bool> on_stack(n, false);
  int next_index = 0, next_comp = 0;
  for (int root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    call_vertex = {root};
    call_child = {0};
    while (!call_vertex.empty()) {
      int v = call_vertex.back();
      if (call_child.back() == 0) {
        index[v] = low[v] = next_index++;
        stack.push_back(v);
        on_stack[v] = true;
      }
      bool descended = false;
      while (call_child.back() < static_cast<int>(out[v].size())) {
        int w = out[v][call_child.back()++];
        if (index[w] == -1) {
          call_vertex.push_back(w);
          call_child.push_back(0);
          descended = true;
          break;
        }
        if (on_stack[w]) low[v] = std::min(low[v], index[w]);
      }
      if (descended) continue;
      if (low[v] == index[v]) {
        while (true) {
          int w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = next_comp;
          if (w == v) break;
        }
        ++next_comp;
      }
      call_vertex.pop_back();
      call_child.pop_back();
      if (!call_vertex.empty()) {
        int parent = call_vertex.back();
        low[parent] = std::min(low[parent], low[v]);
      }
    }
  }
  return comp;
}

inline bool graph_irreducible(const std::vector<std::vector<int>>& out) {
  if (out.empty()) return false;
  std::vector<int> comp = strongly_connected_components(out);
  for (int c : comp)
    if (c != comp[0]) return false;
  // a single vertex with no self loop is not irreducible as a shift
  if (out.size() == 1 && out[0].empty()) return false;
  return true;
}

// gcd of cycle lengths of a strongly connected graph (0 if no cycles reachable).
inline long graph_period(const std::vector<std::vector<int>>& out) {
  const int n = static_cast<int>(out.size());
  if (n == 0) return 0;
  std::vector<long> level(n, -1);
  std::vector<int> queue = {0};
  level[0] = 0;
  long g = 0;
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    int v = queue[qi];
    for (int w : out[v]) {
      if (level[w] == -1) {
        level[w] = level[v] + 1;
        queue.push_back(w);
      } else {
        g = std::gcd(g, std::abs(level[v] + 1 - level[w]));
      }
    }
  }
  return g;
}

// ---------------------------------------------------------------------------

struct VertexShift {
  int block_len = 1;                  // states are admissible block_len-blocks
  std::vector<Word> states;           // sorted lexicographically
  std::vector<std::vector<int>> out;  // successor state indices
  std::unordered_map<std::uint64_t, int> state_index;  // encoded block -> index

  int find_state(const Word& b, int ell) const {
    auto it = state_index.find(encode_word(b, ell));
    return it == state_index.end() ? -1 : it->second;
  }
};

struct Seed {
  enum class Kind { PeriodicWord, SubstitutionFixedPoint, SturmianPoint };
  Kind kind = Kind::SubstitutionFixedPoint;
  Word periodic;  // for PeriodicWord

  static Seed periodic_word(Word w) {
    Seed s;
    s.kind = Kind::PeriodicWord;
    s.periodic = std::move(w);
    return s;
  }
  static Seed substitution_fixed_point() {
    Seed s;
    s.kind = Kind::SubstitutionFixedPoint;
    return s;
  }
  static Seed sturmian_point() {
    Seed s;
    s.kind = Kind::SturmianPoint;
    return s;
  }
};

class Subshift {
 public:
  static Subshift full_shift(int ell) {
    Subshift x;
    x.kind_ = SubshiftKind::Full;
    x.ell_ = Alphabet(ell).size;
    x.compile_vertex_shift({});
    return x;
  }

  static Subshift sft(int ell, std::vector<Word> forbidden) {
    Subshift x;
    x.kind_ = SubshiftKind::SFT;
    x.ell_ = Alphabet(ell).size;
    for (const Word& f : forbidden) {
      if (f.empty()) throw ValidationError("empty forbidden word");
      for (Symbol a : f)
        if (a < 0 || a >= ell) throw ValidationError("forbidden word symbol out of range");
    }
    x.forbidden_ = std::move(forbidden);
    x.compile_vertex_shift(x.forbidden_);
    return x;
  }

  // rules[a] is the image of symbol a; the substitution must be primitive.
  static Subshift substitution(std::vector<Word> rules) {
    Subshift x;
    x.kind_ = SubshiftKind::Substitution;
    x.ell_ = static_cast<int>(rules.size());
    if (x.ell_ < 2) throw ValidationError("substitution needs >= 2 symbols");
    for (const Word& r : rules) {
      if (r.empty()) throw ValidationError("substitution rule with empty image");
      for (Symbol a : r)
        if (a < 0 || a >= x.ell_) throw ValidationError("substitution image symbol out of range");
    }
    x.rules_ = std::move(rules);
    if (!x.substitution_primitive())
      throw ValidationError("substitution is not primitive");
    return x;
  }

  // Rotation by p/q coded against the split {[0, 1-p/q), [1-p/q, 1)}.
  static Subshift sturmian(long p, long q, Rational intercept) {
    Subshift x;
    x.kind_ = SubshiftKind::Sturmian;
    x.ell_ = 2;
    if (q < 2 || p < 1 || p >= q || std::gcd(p, q) != 1)
      throw ValidationError("sturmian convergent must satisfy q >= 2, 1 <= p < q, gcd(p,q) = 1");
    x.sturmian_p_ = p;
    x.sturmian_q_ = q;
    Rational t = intercept - BigInt(floor_to_int(intercept));
    x.sturmian_intercept_ = t;
    return x;
  }

  SubshiftKind kind() const { return kind_; }
  int alphabet_size() const { return ell_; }
  const std::vector<Word>& forbidden_words() const { return forbidden_; }
  const std::vector<Word>& substitution_rules() const { return rules_; }
  long sturmian_p() const { return sturmian_p_; }
  long sturmian_q() const { return sturmian_q_; }

  std::uint64_t cap() const { return cap_; }
  void set_cap(std::uint64_t c) { cap_ = c; }

  bool has_vertex_shift() const {
    return kind_ == SubshiftKind::Full || kind_ == SubshiftKind::SFT;
  }
  const VertexShift& vertex_shift() const {
    if (!has_vertex_shift())
      throw PreconditionError("operation requires a vertex-shift presentation (full shift or SFT)");
    return vs_;
  }

  // Exactly the admissible n-blocks, sorted lexicographically.
  std::vector<Word> language(int n) const {
    if (n < 1) throw ValidationError("language: n must be >= 1");
    switch (kind_) {
      case SubshiftKind::Full:
      case SubshiftKind::SFT:
        return sft_language(n);
      case SubshiftKind::Substitution:
        return substitution_language(n);
      case SubshiftKind::Sturmian:
        return sturmian_language(n);
    }
    throw std::logic_error("unreachable");
  }

  bool admissible(const Word& w) const {
    if (w.empty()) return false;
    for (Symbol a : w)
      if (a < 0 || a >= ell_) return false;
    switch (kind_) {
      case SubshiftKind::Full:
        return true;
      case SubshiftKind::SFT:
        return sft_admissible(w);
      case SubshiftKind::Substitution:
      case SubshiftKind::Sturmian: {
        // desk-scale membership: compare against the enumerated language
        auto lang = language(static_cast<int>(w.size()));
        return std::binary_search(lang.begin(), lang.end(), w);
      }
    }
    return false;
  }

  // Length-N forward-orbit coding of the point selected by the seed.
  Word orbit_segment(const Seed& seed, long N) const {
    if (N < 1) throw ValidationError("orbit_segment: N must be >= 1");
    if (static_cast<std::uint64_t>(N) > cap_)
      throw ResourceCapError("orbit_segment: N exceeds cap " + std::to_string(cap_));
    switch (seed.kind) {
      case Seed::Kind::PeriodicWord: {
        if (!has_vertex_shift())
          throw ValidationError("periodic seeds are for full shifts and SFTs");
        const Word& p = seed.periodic;
        if (p.empty()) throw ValidationError("empty periodic seed");
        Word doubled = p;
        doubled.insert(doubled.end(), p.begin(), p.end());
        if (!sft_admissible(doubled))
          throw ValidationError("periodic seed word is not admissible under the SFT");
        Word w(N);
        for (long i = 0; i < N; ++i) w[i] = p[i % p.size()];
        return w;
      }
      case Seed::Kind::SubstitutionFixedPoint: {
        if (kind_ != SubshiftKind::Substitution)
          throw ValidationError("fixed-point seed is for substitution systems");
        return substitution_fixed_point_prefix(N);
      }
      case Seed::Kind::SturmianPoint: {
        if (kind_ != SubshiftKind::Sturmian)
          throw ValidationError("sturmian seed is for sturmian systems");
        Word w(N);
        for (long j = 0; j < N; ++j) w[j] = sturmian_symbol(j);
        return w;
      }
    }
    throw std::logic_error("unreachable");
  }

  // Prefix of the one-sided fixed point of (a power of) the substitution.
  Word substitution_fixed_point_prefix(long N) const {
    int a = -1, power = 1;
    for (int pw = 1; pw <= 8 && a == -1; ++pw) {
      for (int s = 0; s < ell_; ++s) {
        Word im = apply_substitution(Word{static_cast<Symbol>(s)}, pw);
        if (im.size() >= 2 && im[0] == s) {
          a = s;
          power = pw;
          break;
        }
      }
    }
    if (a == -1)
      throw PreconditionError("substitution has no expanding fixed point up to power 8");
    Word w{static_cast<Symbol>(a)};
    while (static_cast<long>(w.size()) < N) {
      w = apply_substitution(w, power);
      if (w.size() > cap_) throw ResourceCapError("substitution fixed point exceeds cap");
    }
    w.resize(N);
    return w;
  }

  Word apply_substitution(const Word& w, int times = 1) const {
    Word cur = w;
    for (int t = 0; t < times; ++t) {
      Word next;
      next.reserve(cur.size() * 2);
      for (Symbol a : cur) {
        const Word& im = rules_[a];
        next.insert(next.end(), im.begin(), im.end());
      }
      cur = std::move(next);
      if (cur.size() > cap_) throw ResourceCapError("substitution image exceeds cap");
    }
    return cur;
  }

  Symbol sturmian_symbol(long j) const {
    // {j p/q + t} in [0, 1 - p/q) -> 0, else 1
    Rational alpha(sturmian_p_, sturmian_q_);
    Rational v = alpha * j + sturmian_intercept_;
    v -= BigInt(floor_to_int(v));
    return v < Rational(sturmian_q_ - sturmian_p_, sturmian_q_) ? 0 : 1;
  }

 private:
  Subshift() = default;

  static long floor_to_int(const Rational& r) {
    BigInt n = numerator(r), d = denominator(r);
    BigInt q = n / d;
    if (q * d != n && n < 0) q -= 1;
    return q.convert_to<long>();
  }

  bool contains_forbidden_factor(const Word& w, const std::vector<Word>& forb) const {
    for (const Word& f : forb)
      for (std::size_t pos = 0; pos + f.size() <= w.size(); ++pos)
        if (occurs_at(w, f, pos)) return true;
    return false;
  }

  void compile_vertex_shift(const std::vector<Word>& forb) {
    std::size_t kmax = 2;
    for (const Word& f : forb) kmax = std::max(kmax, f.size());
    const int bl = static_cast<int>(kmax) - 1;
    const std::uint64_t nblocks = pow_u64(ell_, bl);
    if (nblocks > cap_)
      throw ResourceCapError("SFT compilation: alphabet^" + std::to_string(bl) +
                             " exceeds cap " + std::to_string(cap_));
    std::vector<Word> states;
    for (std::uint64_t c = 0; c < nblocks; ++c) {
      Word b = decode_word(c, bl, ell_);
      if (!contains_forbidden_factor(b, forb)) states.push_back(b);
    }
    // adjacency on (k-1)-blocks via admissible k-blocks
    std::vector<char> alive(states.size(), 1);
    auto build_out = [&](std::vector<std::vector<int>>& out) {
      std::unordered_map<std::uint64_t, int> idx;
      for (std::size_t i = 0; i < states.size(); ++i)
        if (alive[i]) idx[encode_word(states[i], ell_)] = static_cast<int>(i);
      out.assign(states.size(), {});
      for (std::size_t i = 0; i < states.size(); ++i) {
        if (!alive[i]) continue;
        for (int a = 0; a < ell_; ++a) {
          Word ext = states[i];
          ext.push_back(a);
          if (contains_forbidden_factor(ext, forb)) continue;
          Word nxt(ext.begin() + 1, ext.end());
          auto it = idx.find(encode_word(nxt, ell_));
          if (it != idx.end()) out[i].push_back(it->second);
        }
      }
    };
    // trim non-essential vertices until stable
    std::vector<std::vector<int>> out;
    bool changed = true;
    while (changed) {
      changed = false;
      build_out(out);
      std::vector<int> indeg(states.size(), 0);
      for (std::size_t i = 0; i < states.size(); ++i)
        for (int j : out[i]) ++indeg[j];
      for (std::size_t i = 0; i < states.size(); ++i) {
        if (alive[i] && (out[i].empty() || indeg[i] == 0)) {
          alive[i] = 0;
          changed = true;
        }
      }
    }
    std::vector<Word> live;
    std::vector<int> remap(states.size(), -1);
    for (std::size_t i = 0; i < states.size(); ++i)
      if (alive[i]) {
        remap[i] = static_cast<int>(live.size());
        live.push_back(states[i]);
      }
    if (live.empty()) throw ValidationError("SFT language is empty after trimming");
    vs_.block_len = bl;
    vs_.states = live;
    vs_.out.assign(live.size(), {});
    vs_.state_index.clear();
    for (std::size_t i = 0; i < states.size(); ++i) {
      if (!alive[i]) continue;
      for (int j : out[i])
        if (remap[j] != -1) vs_.out[remap[i]].push_back(remap[j]);
    }
    for (std::size_t i = 0; i < live.size(); ++i)
      vs_.state_index[encode_word(live[i], ell_)] = static_cast<int>(i);
  }

  bool sft_admissible(const Word& w) const {
    const int bl = vs_.block_len;
    if (static_cast<int>(w.size()) < bl) {
      // short words: factors of some live state
      for (const Word& s : vs_.states)
        for (std::size_t pos = 0; pos + w.size() <= s.size(); ++pos)
          if (occurs_at(s, w, pos)) return true;
      return false;
    }
    int cur = vs_.find_state(subword(w, 0, bl), ell_);
    if (cur == -1) return false;
    for (std::size_t pos = 1; pos + bl <= w.size(); ++pos) {
      int nxt = vs_.find_state(subword(w, pos, bl), ell_);
      if (nxt == -1) return false;
      bool edge = false;
      for (int j : vs_.out[cur])
        if (j == nxt) edge = true;
      if (!edge) return false;
      cur = nxt;
    }
    return true;
  }

  std::vector<Word> sft_language(int n) const {
    const int bl = vs_.block_len;
    std::set<Word> result;
    if (n <= bl) {
      for (const Word& s : vs_.states)
        for (std::size_t pos = 0; pos + n <= s.size(); ++pos)
          result.insert(subword(s, pos, n));
      return {result.begin(), result.end()};
    }
    // enumerate paths of length n - bl
    std::vector<Word> words;
    std::uint64_t count = 0;
    struct Frame {
      int state;
      std::size_t next;
    };
    for (std::size_t start = 0; start < vs_.states.size(); ++start) {
      std::vector<Frame> stack{{static_cast<int>(start), 0}};
      Word w = vs_.states[start];
      while (!stack.empty()) {
        if (static_cast<int>(w.size()) == n) {
          words.push_back(w);
          if (++count > cap_) throw ResourceCapError("language enumeration exceeds cap");
          w.pop_back();
          stack.pop_back();
          continue;
        }
        Frame& f = stack.back();
        if (f.next < vs_.out[f.state].size()) {
          int nxt = vs_.out[f.state][f.next++];
          stack.push_back({nxt, 0});
          w.push_back(vs_.states[nxt].back());
        } else {
          if (stack.size() > 1) w.pop_back();
          stack.pop_back();
        }
      }
    }
    std::sort(words.begin(), words.end());
    words.erase(std::unique(words.begin(), words.end()), words.end());
    return words;
  }

  bool substitution_primitive() const {
    // substitution matrix power strictly positive for some exponent
    std::vector<std::vector<bool>> reach(ell_, std::vector<bool>(ell_, false));
    for (int a = 0; a < ell_; ++a)
      for (Symbol b : rules_[a]) reach[a][b] = true;
    auto positive = [&](const std::vector<std::vector<bool>>& m) {
      for (int i = 0; i < ell_; ++i)
        for (int j = 0; j < ell_; ++j)
          if (!m[i][j]) return false;
      return true;
    };
    std::vector<std::vector<bool>> acc = reach;
    for (int t = 1; t <= 2 * ell_ * ell_ + 2; ++t) {
      if (positive(acc)) return true;
      std::vector<std::vector<bool>> nxt(ell_, std::vector<bool>(ell_, false));
      for (int i = 0; i < ell_; ++i)
        for (int k = 0; k < ell_; ++k)
          if (acc[i][k])
            for (int j = 0; j < ell_; ++j)
              if (reach[k][j]) nxt[i][j] = true;
      acc = std::move(nxt);
    }
    return false;
  }

  std::vector<Word> substitution_language(int n) const {
    if (static_cast<std::uint64_t>(n) > cap_)
      throw ResourceCapError("substitution language: n exceeds cap");
    // factor sets of sigma^k(a) over all symbols a, iterated to stabilization
    std::set<Word> prev, cur;
    std::vector<Word> images(ell_);
    for (int a = 0; a < ell_; ++a) images[a] = Word{static_cast<Symbol>(a)};
    int stable = 0;
    for (int k = 0; k < 64; ++k) {
      for (int a = 0; a < ell_; ++a) {
        images[a] = apply_substitution(images[a], 1);
        if (images[a].size() > 64 * static_cast<std::size_t>(n) + 64)
          images[a].resize(64 * n + 64);  // long prefixes carry all factors eventually
      }
      cur.clear();
      bool long_enough = true;
      for (int a = 0; a < ell_; ++a) {
        if (static_cast<int>(images[a].size()) < n) long_enough = false;
        for (std::size_t pos = 0; pos + n <= images[a].size(); ++pos)
          cur.insert(subword(images[a], pos, n));
      }
      if (long_enough && cur == prev) {
        if (++stable >= 3) return {cur.begin(), cur.end()};
      } else {
        stable = 0;
      }
      prev = cur;
    }
    return {cur.begin(), cur.end()};
  }

  std::vector<Word> sturmian_language(int n) const {
    if (static_cast<std::uint64_t>(n) > cap_)
      throw ResourceCapError("sturmian language: n exceeds cap");
    std::set<Word> result;
    long span = sturmian_q_ + n;
    Word w(span);
    for (long j = 0; j < span; ++j) w[j] = sturmian_symbol(j);
    for (long pos = 0; pos + n <= span; ++pos) result.insert(subword(w, pos, n));
    return {result.begin(), result.end()};
  }

  SubshiftKind kind_ = SubshiftKind::Full;
  int ell_ = 2;
  std::vector<Word> forbidden_;
  std::vector<Word> rules_;
  long sturmian_p_ = 0, sturmian_q_ = 0;
  Rational sturmian_intercept_ = 0;
  VertexShift vs_;
  std::uint64_t cap_ = std::uint64_t(1) << 24;
};

// Re-present a full shift or SFT on m-blocks (m at least the compiled block
// length): states are admissible m-blocks, edges the admissible (m+1)-blocks.
inline VertexShift vertex_shift_at(const Subshift& X, int m) {
  const VertexShift& base = X.vertex_shift();
  if (m < base.block_len)
    throw ValidationError("vertex_shift_at: block length below the compiled presentation");
  if (m == base.block_len) return base;
  VertexShift vs;
  vs.block_len = m;
  vs.states = X.language(m);
  const int ell = X.alphabet_size();
  for (std::size_t i = 0; i < vs.states.size(); ++i)
    vs.state_index[encode_word(vs.states[i], ell)] = static_cast<int>(i);
  vs.out.assign(vs.states.size(), {});
  for (const Word& e : X.language(m + 1)) {
    int a = vs.find_state(subword(e, 0, m), ell);
    int b = vs.find_state(subword(e, 1, m), ell);
    vs.out[a].push_back(b);
  }
  for (auto& row : vs.out) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
  return vs;
}

}  // namespace symdyn
