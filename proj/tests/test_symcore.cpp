#include <catch2/catch_amalgamated.hpp>

#include "symdyn/cylinder.hpp"
#include "symdyn/subshift.hpp"
#include "symdyn/word.hpp"

using namespace symdyn;

namespace {

Subshift golden_mean() { return Subshift::sft(2, {word_from_string("11")}); }

Subshift morse() {
  return Subshift::substitution({word_from_string("01"), word_from_string("10")});
}

std::vector<std::string> lang_strings(const Subshift& x, int n) {
  std::vector<std::string> out;
  for (const Word& w : x.language(n)) out.push_back(word_to_string(w));
  return out;
}

}  // namespace

TEST_CASE("word encoding round-trips and preserves lexicographic order") {
  for (int ell : {2, 3}) {
    for (std::uint64_t c = 0; c < pow_u64(ell, 4); ++c) {
      Word w = decode_word(c, 4, ell);
      REQUIRE(encode_word(w, ell) == c);
    }
  }
  REQUIRE(word_to_string(word_from_string("0110")) == "0110");
  REQUIRE_THROWS(word_from_string(""));
  REQUIRE_THROWS(Alphabet(1));
}

TEST_CASE("full shift language") {
  auto x = Subshift::full_shift(2);
  REQUIRE(lang_strings(x, 2) == std::vector<std::string>{"00", "01", "10", "11"});
  REQUIRE(x.language(10).size() == 1024);
}

TEST_CASE("SFT language excludes forbidden factors") {
  auto x = golden_mean();
  REQUIRE(lang_strings(x, 2) == std::vector<std::string>{"00", "01", "10"});
  // Fibonacci counts: |L(n)| = F(n+2) with F(1)=F(2)=1
  std::vector<std::size_t> fib = {2, 3, 5, 8, 13, 21, 34, 55};
  for (int n = 1; n <= 8; ++n) REQUIRE(x.language(n).size() == fib[n - 1]);
  REQUIRE(x.admissible(word_from_string("01010")));
  REQUIRE_FALSE(x.admissible(word_from_string("0110")));
}

TEST_CASE("language consistency: prefixes and suffixes descend") {
  auto check = [](const Subshift& x) {
    for (int n = 1; n <= 5; ++n) {
      auto longer = x.language(n + 1);
      auto shorter = x.language(n);
      for (const Word& w : longer) {
        REQUIRE(std::binary_search(shorter.begin(), shorter.end(), subword(w, 0, n)));
        REQUIRE(std::binary_search(shorter.begin(), shorter.end(), subword(w, 1, n)));
      }
    }
  };
  check(Subshift::full_shift(2));
  check(golden_mean());
  check(Subshift::sft(3, {word_from_string("00"), word_from_string("121")}));
  check(morse());
}

TEST_CASE("SFT language size equals path counts of the vertex presentation") {
  auto count_paths = [](const VertexShift& vs, int steps) {
    std::vector<std::uint64_t> v(vs.states.size(), 1);
    for (int s = 0; s < steps; ++s) {
      std::vector<std::uint64_t> nxt(vs.states.size(), 0);
      for (std::size_t i = 0; i < vs.states.size(); ++i)
        for (int j : vs.out[i]) nxt[i] += v[j];
      v = nxt;
    }
    std::uint64_t total = 0;
    for (auto c : v) total += c;
    return total;
  };
  for (auto x : {Subshift::full_shift(2), golden_mean(),
                 Subshift::sft(2, {word_from_string("101")})}) {
    const VertexShift& vs = x.vertex_shift();
    for (int n = vs.block_len; n <= 12; ++n)
      REQUIRE(x.language(n).size() == count_paths(vs, n - vs.block_len));
  }
}

TEST_CASE("trimming removes non-essential vertices") {
  // forbidding 01 and 10 leaves the two fixed points; both 1-blocks stay,
  // but forbidding 0 entirely via 00 and 01 and 10 leaves only 1^infinity
  auto x = Subshift::sft(2, {word_from_string("00"), word_from_string("01"),
                             word_from_string("10")});
  REQUIRE(lang_strings(x, 3) == std::vector<std::string>{"111"});
  REQUIRE_THROWS_AS(Subshift::sft(2, {word_from_string("0"), word_from_string("1")}),
                    ValidationError);
}

TEST_CASE("Morse substitution language and fixed point") {
  auto x = morse();
  REQUIRE(lang_strings(x, 3) ==
          std::vector<std::string>{"001", "010", "011", "100", "101", "110"});
  REQUIRE(word_to_string(x.orbit_segment(Seed::substitution_fixed_point(), 8)) == "01101001");
  // no cube 000 or 111 ever appears
  for (const Word& w : x.language(4)) {
    REQUIRE(word_to_string(w).find("000") == std::string::npos);
    REQUIRE(word_to_string(w).find("111") == std::string::npos);
  }
  REQUIRE_THROWS_AS(Subshift::substitution({word_from_string("0"), word_from_string("1")}),
                    ValidationError);  // identity is not primitive
}

TEST_CASE("Sturmian coding of a rational convergent") {
  auto x = Subshift::sturmian(2, 3, Rational(0));
  // orbit {0, 2/3, 4/3 mod 1} against the split [0, 1/3) -> 0, [1/3, 1) -> 1
  REQUIRE(word_to_string(x.orbit_segment(Seed::sturmian_point(), 3)) == "011");
  // language is the factor set of the 3-periodic word 011011...
  REQUIRE(lang_strings(x, 2) == std::vector<std::string>{"01", "10", "11"});
  REQUIRE(x.language(5).size() == 3);
  REQUIRE_THROWS_AS(Subshift::sturmian(2, 4, Rational(0)), ValidationError);
}

TEST_CASE("orbit segments from periodic seeds") {
  auto x = Subshift::full_shift(2);
  REQUIRE(word_to_string(x.orbit_segment(Seed::periodic_word(word_from_string("0")), 4)) ==
          "0000");
  REQUIRE(word_to_string(x.orbit_segment(Seed::periodic_word(word_from_string("01")), 5)) ==
          "01010");
  auto gm = golden_mean();
  // periodic word must be admissible when wrapped
  REQUIRE_THROWS_AS(gm.orbit_segment(Seed::periodic_word(word_from_string("1")), 4),
                    ValidationError);
  REQUIRE(word_to_string(gm.orbit_segment(Seed::periodic_word(word_from_string("10")), 4)) ==
          "1010");
}

TEST_CASE("cylinder unions canonicalize and reduce") {
  auto x = Subshift::full_shift(2);
  auto u = make_cylinder_union(x, {{0, word_from_string("0")}, {0, word_from_string("1")}});
  REQUIRE(u.blocks.size() == 2);
  // canonicalization is idempotent: re-expressing on the same window is identity
  auto v = at_resolution(x, u, u.anchor, u.extent);
  REQUIRE(v.blocks == u.blocks);
  // membership invariant under refinement of the window
  auto w = at_resolution(x, cylinder(x, word_from_string("01")), 0, 3);
  for (const Word& b : x.language(3))
    REQUIRE(w.contains_block(b) == (b[0] == 0 && b[1] == 1));
}

TEST_CASE("cylinder set algebra") {
  auto x = golden_mean();
  auto c0 = cylinder(x, word_from_string("0"));
  auto c1 = cylinder(x, word_from_string("1"));
  REQUIRE(disjoint(x, c0, c1));
  REQUIRE(subset_of(x, cylinder(x, word_from_string("01")), c0));
  REQUIRE_FALSE(subset_of(x, c0, cylinder(x, word_from_string("01"))));
  auto uni = unite(x, c0, c1);
  REQUIRE(uni.blocks.size() == x.language(uni.extent).size());
  REQUIRE(complement(x, c0).blocks == c1.blocks);
  // [1] shifted by one cannot meet [1] (11 forbidden)
  REQUIRE(disjoint(x, c1, preimage(c1, 1)));
}

TEST_CASE("covers and partitions validate exhaustively") {
  auto x = Subshift::full_shift(2);
  REQUIRE_NOTHROW(make_partition(x, parse_cylinder_family(x, "0;1")));
  REQUIRE_NOTHROW(make_partition(x, parse_cylinder_family(x, "00,01;10,11")));
  // overlap -> invalid partition
  REQUIRE_THROWS_AS(make_partition(x, parse_cylinder_family(x, "0;1;01")), ValidationError);
  // missing blocks -> invalid cover
  REQUIRE_THROWS_AS(make_cover(x, parse_cylinder_family(x, "00;01")), ValidationError);
  // covers may overlap
  REQUIRE_NOTHROW(make_cover(x, parse_cylinder_family(x, "0,10;1")));
}

TEST_CASE("refines relation") {
  auto x = Subshift::full_shift(2);
  auto a1 = make_partition(x, parse_cylinder_family(x, "0;1"));
  auto a2 = make_partition(x, parse_cylinder_family(x, "00;01;10;11"));
  auto u = make_cover(x, parse_cylinder_family(x, "0;1"));
  REQUIRE(refines(x, a1, u));
  REQUIRE(refines(x, a2, u));
  auto pairs = make_cover(
      x, {make_cylinder_union(x, {{0, word_from_string("00")}, {0, word_from_string("11")}}),
          make_cylinder_union(x, {{0, word_from_string("01")}, {0, word_from_string("10")}})});
  REQUIRE_FALSE(refines(x, a1, pairs));
  REQUIRE(refines(x, a2, pairs));
}

TEST_CASE("code_partition computes partition names") {
  auto x = Subshift::full_shift(2);
  auto a = make_partition(x, parse_cylinder_family(x, "0;1"));
  // the time-0 symbol partition codes a word as itself
  Word w = word_from_string("0110");
  REQUIRE(code_partition(x, a, w, 4) == w);
  auto pairs = make_partition(x, parse_cylinder_family(x, "00,01;10,11"));
  REQUIRE(word_to_string(code_partition(x, pairs, word_from_string("01100"), 4)) == "0110");
  REQUIRE_THROWS_AS(code_partition(x, a, word_from_string("01"), 4), ValidationError);
}
