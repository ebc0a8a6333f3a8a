#include <catch2/catch_amalgamated.hpp>

#include "symdyn/entropy.hpp"
#include "symdyn/markov.hpp"

#include <cmath>
#include <random>

using namespace symdyn;

namespace {

const double LOG_PHI = std::log((1.0 + std::sqrt(5.0)) / 2.0);

Subshift golden_mean() { return Subshift::sft(2, {word_from_string("11")}); }
Subshift period2() {
  // only 0101... and 1010...: forbid 00 and 11
  return Subshift::sft(2, {word_from_string("00"), word_from_string("11")});
}

}  // namespace

TEST_CASE("block frequencies are exact and sum to one") {
  auto d = block_frequencies(word_from_string("0000"), 2);
  REQUIRE(d.freq.at(word_from_string("00")) == Rational(1));
  d = block_frequencies(word_from_string("0101"), 1);
  REQUIRE(d.freq.at(word_from_string("0")) == Rational(1, 2));
  REQUIRE(d.freq.at(word_from_string("1")) == Rational(1, 2));
  d = block_frequencies(word_from_string("0010"), 2);
  REQUIRE(d.freq.at(word_from_string("00")) == Rational(1, 3));
  REQUIRE(d.freq.at(word_from_string("01")) == Rational(1, 3));
  REQUIRE(d.freq.at(word_from_string("10")) == Rational(1, 3));
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    int n = 1 + static_cast<int>(rng() % 20);
    Word w(n);
    for (auto& s : w) s = static_cast<Symbol>(rng() % 3);
    int k = 1 + static_cast<int>(rng() % n);
    REQUIRE(block_frequencies(w, k).total() == Rational(1));
  }
  REQUIRE_THROWS_AS(block_frequencies(word_from_string("01"), 3), ValidationError);
}

TEST_CASE("block entropy values and range") {
  REQUIRE(block_entropy(word_from_string("0000"), 1) == 0.0);
  REQUIRE(block_entropy(word_from_string("0101"), 1) == Catch::Approx(std::log(2.0)));
  REQUIRE(block_entropy(word_from_string("0010"), 2) == Catch::Approx(std::log(3.0)));
  // 0 <= H_k <= k log ell, exhaustive over binary words
  for (int n : {6, 10, 14}) {
    for (std::uint64_t c = 0; c < pow_u64(2, n); ++c) {
      Word w = decode_word(c, n, 2);
      for (int k : {1, 2, 3}) {
        double h = block_entropy(w, k);
        REQUIRE(h >= -1e-12);
        REQUIRE(h <= k * std::log(2.0) + 1e-9);
      }
    }
  }
}

TEST_CASE("low-entropy word counts") {
  REQUIRE(count_low_entropy_words(2, 3, 1, 0.0) == 2);  // 000 and 111
  REQUIRE(count_low_entropy_words(2, 2, 1, std::log(2.0)) == 4);
  auto c = count_low_entropy_words(2, 12, 2, 0.3);
  REQUIRE(static_cast<double>(c) <= std::exp(12 * (0.3 + 0.2)));
  REQUIRE_THROWS_AS(count_low_entropy_words(2, 30, 1, 0.1), ResourceCapError);
}

TEST_CASE("lemma table reports a threshold") {
  auto t = lemma_table(2, 4, 16, 1, 0.4, 0.2);
  REQUIRE(t.rows.size() == 13);
  REQUIRE(t.threshold != -1);
  REQUIRE(t.threshold <= 12);
  for (const auto& r : t.rows)
    if (r.n >= t.threshold) REQUIRE(r.holds);
}

TEST_CASE("minimum subcover counts") {
  auto full = Subshift::full_shift(2);
  REQUIRE(min_subcover_count(full, trivial_cover(full), 5) == 1);
  REQUIRE(min_subcover_count(full, generating_cover(full), 3) == 8);
  auto gm = golden_mean();
  REQUIRE(min_subcover_count(gm, generating_cover(gm), 2) == 3);
  // Fibonacci counts under the generating partition
  REQUIRE(min_subcover_count(gm, generating_cover(gm), 8) == 55);
}

TEST_CASE("minimum subcover with genuinely overlapping covers") {
  auto full = Subshift::full_shift(2);
  // overlapping two-element cover: U = {[0] ∪ [10], [1]}
  auto U = make_cover(
      full, {make_cylinder_union(full, {{0, word_from_string("0")}, {0, word_from_string("10")}}),
             cylinder(full, word_from_string("1"))});
  // brute-force oracle on tiny n: elements of the join are tuple-sets
  for (int n = 1; n <= 4; ++n) {
    auto blocks = full.language(n + U.resolution - 1);
    std::vector<std::vector<std::uint64_t>> sets;
    const std::size_t nw = (blocks.size() + 63) / 64;
    for (std::uint64_t t = 0; t < pow_u64(U.elements.size(), n); ++t) {
      Word tup = decode_word(t, n, static_cast<int>(U.elements.size()));
      std::vector<std::uint64_t> row(nw, 0);
      bool nonempty = false;
      for (std::size_t b = 0; b < blocks.size(); ++b) {
        bool in = true;
        for (int j = 0; j < n && in; ++j)
          in = U.elements[tup[j]].contains_block(subword(blocks[b], j, U.resolution));
        if (in) {
          row[b >> 6] |= std::uint64_t(1) << (b & 63);
          nonempty = true;
        }
      }
      if (nonempty) sets.push_back(row);
    }
    // exhaustive minimum over subsets of candidate sets
    int best = static_cast<int>(sets.size());
    for (std::uint64_t mask = 1; mask < (std::uint64_t(1) << sets.size()); ++mask) {
      std::vector<std::uint64_t> acc(nw, 0);
      for (std::size_t s = 0; s < sets.size(); ++s)
        if ((mask >> s) & 1)
          for (std::size_t i = 0; i < nw; ++i) acc[i] |= sets[s][i];
      int bits = 0;
      for (auto wd : acc) bits += __builtin_popcountll(wd);
      if (bits == static_cast<int>(blocks.size()))
        best = std::min(best, __builtin_popcountll(mask));
    }
    REQUIRE(min_subcover_count(full, U, n) == static_cast<std::uint64_t>(best));
  }
}

TEST_CASE("cover monotonicity and subadditivity") {
  auto full = Subshift::full_shift(2);
  auto U = make_cover(
      full, {make_cylinder_union(full, {{0, word_from_string("0")}, {0, word_from_string("10")}}),
             cylinder(full, word_from_string("1"))});
  auto V = make_cover(full, parse_cylinder_family(full, "00;01;10;11"));
  // V refines U, so its subcovers are at least as large
  std::vector<std::uint64_t> rU, rV;
  for (int n = 1; n <= 6; ++n) {
    rU.push_back(min_subcover_count(full, U, n));
    rV.push_back(min_subcover_count(full, V, n));
    REQUIRE(rV.back() >= rU.back());
  }
  // r(m+n) <= r(m) r(n)
  for (int m = 1; m <= 3; ++m)
    for (int n = 1; m + n <= 6; ++n) REQUIRE(rU[m + n - 1] <= rU[m - 1] * rU[n - 1]);
  auto gm = golden_mean();
  std::vector<std::uint64_t> rg;
  for (int n = 1; n <= 8; ++n) rg.push_back(min_subcover_count(gm, generating_cover(gm), n));
  for (int m = 1; m <= 4; ++m)
    for (int n = 1; m + n <= 8; ++n) REQUIRE(rg[m + n - 1] <= rg[m - 1] * rg[n - 1]);
}

TEST_CASE("cover entropy") {
  auto full = Subshift::full_shift(2);
  auto rep = cover_entropy(full, generating_cover(full), 8);
  for (double v : rep.per_n) REQUIRE(v == Catch::Approx(std::log(2.0)));
  REQUIRE(cover_entropy(full, trivial_cover(full), 6).estimate == 0.0);
  auto gm = golden_mean();
  auto grep = cover_entropy(gm, generating_cover(gm), 12);
  REQUIRE(std::abs(grep.estimate - LOG_PHI) <= 0.05);
  REQUIRE(std::abs(grep.diff_estimate - LOG_PHI) <= 1e-3);
  REQUIRE(grep.upper_bound >= LOG_PHI - 1e-12);  // Fekete: every (1/n) log r is an upper bound
}

TEST_CASE("sft entropy") {
  REQUIRE(sft_entropy(Subshift::full_shift(2)) == Catch::Approx(std::log(2.0)).margin(1e-10));
  REQUIRE(sft_entropy(golden_mean()) == Catch::Approx(LOG_PHI).margin(1e-10));
  REQUIRE(sft_entropy(period2()) == Catch::Approx(0.0).margin(1e-10));
  REQUIRE(sft_entropy(Subshift::full_shift(3)) == Catch::Approx(std::log(3.0)).margin(1e-10));
}

TEST_CASE("markov measures: construction and cylinder masses") {
  auto full = Subshift::full_shift(2);
  auto b = bernoulli_measure(full, {Rational(1, 2), Rational(1, 2)});
  REQUIRE(b.cylinder_mass(word_from_string("0101")) == Rational(1, 16));
  auto m = markov_measure(full, {{Rational(1, 4), Rational(3, 4)},
                                 {Rational(2, 3), Rational(1, 3)}});
  // pi = (8/17, 9/17)
  REQUIRE(m.pi[0] == Rational(8, 17));
  REQUIRE(m.pi[1] == Rational(9, 17));
  REQUIRE(m.cylinder_mass(word_from_string("01")) == Rational(8, 17) * Rational(3, 4));
  // unsupported transition on the golden mean
  auto gm = golden_mean();
  REQUIRE_THROWS_AS(bernoulli_measure(gm, {Rational(1, 2), Rational(1, 2)}), ValidationError);
  auto gmu = markov_measure(gm, {{Rational(1, 2), Rational(1, 2)}, {Rational(1), Rational(0)}});
  REQUIRE(gmu.cylinder_mass(word_from_string("11")) == Rational(0));
  REQUIRE(gmu.mass(whole_space(gm, 0, 3)) == Rational(1));
}

TEST_CASE("markov entropy") {
  auto full = Subshift::full_shift(2);
  REQUIRE(markov_entropy(bernoulli_measure(full, {Rational(1, 2), Rational(1, 2)})) ==
          Catch::Approx(std::log(2.0)));
  auto perm = markov_measure(full, {{Rational(0), Rational(1)}, {Rational(1), Rational(0)}});
  REQUIRE(markov_entropy(perm) == 0.0);
  auto parry = parry_measure(golden_mean());
  REQUIRE(markov_entropy(parry) == Catch::Approx(LOG_PHI).margin(1e-9));
  // Parry stationary masses: pi(0) = phi^2 / (1 + phi^2)
  double phi_gr = (1.0 + std::sqrt(5.0)) / 2.0;
  REQUIRE(parry.pi[0] == Catch::Approx(phi_gr * phi_gr / (1 + phi_gr * phi_gr)).margin(1e-9));
}

TEST_CASE("partition entropy under markov measures") {
  auto full = Subshift::full_shift(2);
  auto alpha = generating_partition(full);
  auto b = bernoulli_measure(full, {Rational(1, 2), Rational(1, 2)});
  auto rep = partition_entropy_under_markov(full, alpha, b, 6);
  for (double v : rep.per_n) REQUIRE(v == Catch::Approx(std::log(2.0)));
  auto gm = golden_mean();
  auto prep = partition_entropy_under_markov(gm, generating_partition(gm), parry_measure(gm), 10);
  REQUIRE(std::abs(prep.conditional - LOG_PHI) <= 1e-6);
  // the per-n averages decrease towards the rate from above
  REQUIRE(prep.cesaro >= prep.conditional - 1e-9);
  // single-cell partition has zero entropy
  auto one = make_partition(full, {whole_space(full)});
  REQUIRE(partition_entropy_under_markov(full, one, b, 5).cesaro == 0.0);
}

TEST_CASE("variational inequality: markov rate never exceeds sft entropy") {
  auto gm = golden_mean();
  auto alpha = generating_partition(gm);
  double htop = sft_entropy(gm);
  std::vector<MarkovMeasure<Rational>> fam;
  for (auto a : {Rational(1, 2), Rational(1, 3), Rational(2, 5), Rational(3, 4)})
    fam.push_back(markov_measure(gm, {{a, 1 - a}, {Rational(1), Rational(0)}},
                                 "gm(" + rational_to_string(a) + ")"));
  for (const auto& mu : fam) {
    auto rep = partition_entropy_under_markov(gm, alpha, mu, 8);
    REQUIRE(rep.conditional <= htop + 1e-9);
    REQUIRE(rep.conditional == Catch::Approx(markov_entropy(mu)).margin(1e-9));
  }
}

TEST_CASE("transfer-product intersection masses") {
  auto full = Subshift::full_shift(2);
  auto b = bernoulli_measure(full, {Rational(1, 2), Rational(1, 2)});
  auto c0 = cylinder(full, word_from_string("0"));
  for (long n : {1L, 2L, 7L, 30L})
    REQUIRE(mass_intersection(full, b, c0, c0, n) == Rational(1, 4));
  REQUIRE(mass_intersection(full, b, c0, c0, 0) == Rational(1, 2));
  auto gm = golden_mean();
  auto gmu = markov_measure(gm, {{Rational(1, 2), Rational(1, 2)}, {Rational(1), Rational(0)}});
  auto c1 = cylinder(gm, word_from_string("1"));
  REQUIRE(mass_intersection(gm, gmu, c1, c1, 1) == Rational(0));
  // oracle: brute-force enumeration over (n+1)-blocks
  for (long n = 0; n <= 9; ++n) {
    Rational brute(0);
    for (const Word& w : gm.language(static_cast<int>(n) + 1))
      if (w.front() == 1 && w.back() == 1) brute += gmu.cylinder_mass(w);
    REQUIRE(mass_intersection(gm, gmu, c1, c1, n) == brute);
  }
}

TEST_CASE("ergodic components decompose reducible chains") {
  auto full = Subshift::full_shift(3);
  std::vector<std::vector<Rational>> P = {
      {Rational(1, 2), Rational(1, 2), Rational(0)},
      {Rational(1, 2), Rational(1, 2), Rational(0)},
      {Rational(0), Rational(0), Rational(1)}};
  auto mu = markov_measure_with_pi(full, P,
                                   {Rational(1, 4), Rational(1, 4), Rational(1, 2)});
  auto comps = ergodic_components(full, mu);
  REQUIRE(comps.size() == 2);
  Rational wsum(0);
  double avg = 0.0;
  for (const auto& c : comps) {
    wsum += c.weight;
    avg += to_double(c.weight) * markov_entropy(c.measure);
  }
  REQUIRE(wsum == Rational(1));
  // entropy averages over the decomposition
  REQUIRE(avg == Catch::Approx(markov_entropy(mu)).margin(1e-12));
}
