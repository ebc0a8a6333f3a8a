#pragma once

// Cylinder unions, open covers, and partitions over a subshift. A cylinder
// union is kept in a canonical reduced form: a window [anchor, anchor+extent)
// together with the sorted set of admissible extent-blocks whose points belong
// to the set. Membership of any point with a specified central block is then
// a single lookup.

#include "symdyn/errors.hpp"
#include "symdyn/subshift.hpp"
#include "symdyn/word.hpp"

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

namespace symdyn {

struct CylinderUnion {
  long anchor = 0;
  int extent = 0;
  std::vector<Word> blocks;  // sorted lexicographically, no duplicates

  bool contains_block(const Word& b) const {
    return std::binary_search(blocks.begin(), blocks.end(), b);
  }
  bool empty() const { return blocks.empty(); }
};

// Expand a list of (position, word) cylinders to canonical form on the hull
// window. Canonicalization is idempotent: re-expanding a canonical union on
// its own window is the identity.
inline CylinderUnion make_cylinder_union(const Subshift& X,
                                         const std::vector<std::pair<long, Word>>& cyls) {
  if (cyls.empty()) throw ValidationError("cylinder union needs at least one cylinder");
  long lo = cyls[0].first, hi = cyls[0].first;
  for (const auto& [pos, w] : cyls) {
    if (w.empty()) throw ValidationError("empty cylinder word");
    lo = std::min(lo, pos);
    hi = std::max(hi, pos + static_cast<long>(w.size()));
  }
  CylinderUnion u;
  u.anchor = lo;
  u.extent = static_cast<int>(hi - lo);
  for (const Word& b : X.language(u.extent)) {
    for (const auto& [pos, w] : cyls) {
      if (occurs_at(b, w, static_cast<std::size_t>(pos - lo))) {
        u.blocks.push_back(b);
        break;
      }
    }
  }
  return u;
}

inline CylinderUnion cylinder(const Subshift& X, const Word& w, long pos = 0) {
  return make_cylinder_union(X, {{pos, w}});
}

// Re-express the union on a larger window [anchor, anchor+extent); the new
// window must contain the old one so that membership is block-decidable.
inline CylinderUnion at_resolution(const Subshift& X, const CylinderUnion& u, long anchor,
                                   int extent) {
  if (anchor > u.anchor || anchor + extent < u.anchor + u.extent)
    throw ValidationError("at_resolution: new window must contain the old window");
  if (anchor == u.anchor && extent == u.extent) return u;
  CylinderUnion r;
  r.anchor = anchor;
  r.extent = extent;
  const std::size_t off = static_cast<std::size_t>(u.anchor - anchor);
  for (const Word& b : X.language(extent)) {
    if (u.contains_block(subword(b, off, u.extent))) r.blocks.push_back(b);
  }
  return r;
}

inline CylinderUnion whole_space(const Subshift& X, long anchor = 0, int extent = 1) {
  CylinderUnion u;
  u.anchor = anchor;
  u.extent = extent;
  u.blocks = X.language(extent);
  return u;
}

inline CylinderUnion complement(const Subshift& X, const CylinderUnion& u) {
  CylinderUnion r;
  r.anchor = u.anchor;
  r.extent = u.extent;
  for (const Word& b : X.language(u.extent))
    if (!u.contains_block(b)) r.blocks.push_back(b);
  return r;
}

namespace detail {
inline std::pair<long, int> common_window(const CylinderUnion& a, const CylinderUnion& b) {
  long lo = std::min(a.anchor, b.anchor);
  long hi = std::max(a.anchor + a.extent, b.anchor + b.extent);
  return {lo, static_cast<int>(hi - lo)};
}
}  // namespace detail

inline CylinderUnion intersect(const Subshift& X, const CylinderUnion& a,
                               const CylinderUnion& b) {
  auto [lo, len] = detail::common_window(a, b);
  CylinderUnion ra = at_resolution(X, a, lo, len), rb = at_resolution(X, b, lo, len);
  CylinderUnion r;
  r.anchor = lo;
  r.extent = len;
  std::set_intersection(ra.blocks.begin(), ra.blocks.end(), rb.blocks.begin(), rb.blocks.end(),
                        std::back_inserter(r.blocks));
  return r;
}

inline CylinderUnion unite(const Subshift& X, const CylinderUnion& a, const CylinderUnion& b) {
  auto [lo, len] = detail::common_window(a, b);
  CylinderUnion ra = at_resolution(X, a, lo, len), rb = at_resolution(X, b, lo, len);
  CylinderUnion r;
  r.anchor = lo;
  r.extent = len;
  std::set_union(ra.blocks.begin(), ra.blocks.end(), rb.blocks.begin(), rb.blocks.end(),
                 std::back_inserter(r.blocks));
  return r;
}

inline bool disjoint(const Subshift& X, const CylinderUnion& a, const CylinderUnion& b) {
  return intersect(X, a, b).empty();
}

inline bool subset_of(const Subshift& X, const CylinderUnion& a, const CylinderUnion& b) {
  auto [lo, len] = detail::common_window(a, b);
  CylinderUnion ra = at_resolution(X, a, lo, len), rb = at_resolution(X, b, lo, len);
  return std::includes(rb.blocks.begin(), rb.blocks.end(), ra.blocks.begin(), ra.blocks.end());
}

// The image T^{-j} of a cylinder union: the same block condition shifted so
// that a point x satisfies it iff T^j x lies in u.
inline CylinderUnion preimage(const CylinderUnion& u, long j) {
  CylinderUnion r = u;
  r.anchor += j;
  return r;
}

// ---------------------------------------------------------------------------

struct CoverSpec {
  std::vector<CylinderUnion> elements;
  long anchor = 0;
  int resolution = 0;  // common window length of the elements
};

struct PartitionSpec {
  std::vector<CylinderUnion> cells;
  long anchor = 0;
  int resolution = 0;
};

namespace detail {
template <class Family>
inline void normalize_family(const Subshift& X, Family& fam,
                             std::vector<CylinderUnion>& members) {
  if (members.empty()) throw ValidationError("empty cover/partition");
  long lo = members[0].anchor;
  long hi = members[0].anchor + members[0].extent;
  for (const CylinderUnion& u : members) {
    lo = std::min(lo, u.anchor);
    hi = std::max(hi, u.anchor + u.extent);
  }
  fam.anchor = lo;
  fam.resolution = static_cast<int>(hi - lo);
  for (CylinderUnion& u : members) u = at_resolution(X, u, lo, fam.resolution);
}
}  // namespace detail

// Verifies exhaustively that the elements cover every admissible block.
inline CoverSpec make_cover(const Subshift& X, std::vector<CylinderUnion> elements) {
  CoverSpec cov;
  detail::normalize_family(X, cov, elements);
  cov.elements = std::move(elements);
  for (const Word& b : X.language(cov.resolution)) {
    bool hit = false;
    for (const CylinderUnion& u : cov.elements)
      if (u.contains_block(b)) {
        hit = true;
        break;
      }
    if (!hit)
      throw ValidationError("cover misses admissible block " + word_to_string(b) +
                            " at resolution " + std::to_string(cov.resolution));
  }
  return cov;
}

// Verifies exhaustively that the cells are pairwise disjoint and cover.
inline PartitionSpec make_partition(const Subshift& X, std::vector<CylinderUnion> cells) {
  PartitionSpec part;
  detail::normalize_family(X, part, cells);
  part.cells = std::move(cells);
  for (const Word& b : X.language(part.resolution)) {
    int hits = 0;
    for (const CylinderUnion& u : part.cells)
      if (u.contains_block(b)) ++hits;
    if (hits != 1)
      throw ValidationError("partition cells " + std::string(hits ? "overlap on" : "miss") +
                            " block " + word_to_string(b));
  }
  return part;
}

inline CoverSpec cover_of_partition(const PartitionSpec& p) {
  CoverSpec c;
  c.elements = p.cells;
  c.anchor = p.anchor;
  c.resolution = p.resolution;
  return c;
}

// The generating cover/partition {[a] : a in alphabet} at time 0.
inline PartitionSpec generating_partition(const Subshift& X) {
  std::vector<CylinderUnion> cells;
  for (int a = 0; a < X.alphabet_size(); ++a)
    cells.push_back(cylinder(X, Word{static_cast<Symbol>(a)}));
  return make_partition(X, cells);
}

inline CoverSpec generating_cover(const Subshift& X) {
  return cover_of_partition(generating_partition(X));
}

inline CoverSpec trivial_cover(const Subshift& X) { return make_cover(X, {whole_space(X)}); }

// True iff every cell of alpha lies inside some element of U.
inline bool refines(const Subshift& X, const PartitionSpec& alpha, const CoverSpec& U) {
  for (const CylinderUnion& cell : alpha.cells) {
    bool inside = false;
    for (const CylinderUnion& u : U.elements)
      if (subset_of(X, cell, u)) {
        inside = true;
        break;
      }
    if (!inside) return false;
  }
  return true;
}

// The alpha-name of length N of the point determined by the admissible word x:
// output[n] = index of the cell containing T^n x. Requires the partition
// window to be nonnegative relative to each time step.
inline Word code_partition(const Subshift& X, const PartitionSpec& alpha, const Word& x,
                           long N) {
  if (N < 1) throw ValidationError("code_partition: N must be >= 1");
  if (alpha.anchor < 0)
    throw ValidationError("code_partition: partition window must start at a nonnegative offset");
  if (static_cast<long>(x.size()) < N + alpha.anchor + alpha.resolution - 1)
    throw ValidationError("code_partition: word too short for the requested coding length");
  if (!X.admissible(x)) throw ValidationError("code_partition: word is not admissible");
  Word name(N);
  for (long n = 0; n < N; ++n) {
    Word b = subword(x, static_cast<std::size_t>(n + alpha.anchor), alpha.resolution);
    int cell = -1;
    for (std::size_t i = 0; i < alpha.cells.size(); ++i)
      if (alpha.cells[i].contains_block(b)) {
        cell = static_cast<int>(i);
        break;
      }
    if (cell == -1) throw ValidationError("code_partition: block not covered by partition");
    name[n] = cell;
  }
  return name;
}

// Mini-syntax for covers/partitions: elements separated by ';', cylinders of
// one element separated by ',', each cylinder a word at position 0.
// Example: "00,01;10,11" or "0;1".
inline std::vector<CylinderUnion> parse_cylinder_family(const Subshift& X,
                                                        const std::string& text) {
  std::vector<CylinderUnion> members;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t semi = text.find(';', start);
    std::string elem = text.substr(start, semi == std::string::npos ? semi : semi - start);
    if (elem.empty()) throw ValidationError("empty element in cylinder family: " + text);
    std::vector<std::pair<long, Word>> cyls;
    std::size_t cs = 0;
    while (cs <= elem.size()) {
      std::size_t comma = elem.find(',', cs);
      std::string tok = elem.substr(cs, comma == std::string::npos ? comma : comma - cs);
      if (tok.empty()) throw ValidationError("empty cylinder in family: " + text);
      cyls.emplace_back(0, word_from_string(tok));
      if (comma == std::string::npos) break;
      cs = comma + 1;
    }
    members.push_back(make_cylinder_union(X, cyls));
    if (semi == std::string::npos) break;
    start = semi + 1;
  }
  return members;
}

}  // namespace symdyn
