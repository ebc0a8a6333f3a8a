#include <catch2/catch_amalgamated.hpp>

#include "symdyn/varprin.hpp"

#include <cmath>

using namespace symdyn;

namespace {
Word W(const std::string& s) { return word_from_string(s); }
const double kLog2 = std::log(2.0);
const double kLogPhi = std::log((1.0 + std::sqrt(5.0)) / 2.0);
}

TEST_CASE("finer partition enumeration") {
  Subshift full = Subshift::full_shift(2);
  Subshift golden = Subshift::sft(2, {W("11")});
  CoverSpec genf = generating_cover(full);
  CoverSpec geng = generating_cover(golden);

  CHECK(enumerate_finer_partitions(full, genf, 1).size() == 1);
  auto p2 = enumerate_finer_partitions(full, genf, 2);
  CHECK(p2.size() == 4);  // {00,01} split or not, times {10,11} split or not
  for (const auto& alpha : p2) CHECK(refines(full, alpha, genf));

  auto g2 = enumerate_finer_partitions(golden, geng, 2);
  CHECK(g2.size() == 2);  // {00,01} together or apart; {10} forced alone
  for (const auto& alpha : g2) CHECK(refines(golden, alpha, geng));

  // trivial cover: all set partitions of the blocks qualify
  CHECK(enumerate_finer_partitions(full, trivial_cover(full), 1).size() == 2);
  CHECK(enumerate_finer_partitions(full, trivial_cover(full), 2).size() == 15);
  CHECK_THROWS_AS(enumerate_finer_partitions(full, trivial_cover(full), 3, 1000),
                  ResourceCapError);
  CHECK_THROWS_AS(enumerate_finer_partitions(full, genf, 0), ValidationError);
}

TEST_CASE("empirical measures") {
  Subshift full = Subshift::full_shift(2);
  Word alt;
  for (int i = 0; i < 104; ++i) alt.push_back(i % 2);
  auto em = empirical_measure(full, alt, 100, 1);
  CHECK(em.dist.freq.at(W("0")) == Rational(1, 2));
  CHECK(em.dist.freq.at(W("1")) == Rational(1, 2));
  CHECK(em.defect == 0);

  Word zeros(104, 0);
  auto ez = empirical_measure(full, zeros, 100, 2);
  CHECK(ez.dist.freq.at(W("00")) == 1);
  CHECK(ez.defect == 0);

  // Morse prefix: 2-block frequencies near (1/6, 1/3, 1/3, 1/6)
  Subshift morse = Subshift::substitution({W("01"), W("10")});
  Word mp = morse.orbit_segment(Seed::substitution_fixed_point(), 260);
  auto emm = empirical_measure(morse, mp, 256, 2);
  const double tol = 2.0 * 2 / 256;
  CHECK(std::abs(to_double(emm.dist.freq.at(W("00"))) - 1.0 / 6) < tol);
  CHECK(std::abs(to_double(emm.dist.freq.at(W("01"))) - 1.0 / 3) < tol);
  CHECK(std::abs(to_double(emm.dist.freq.at(W("10"))) - 1.0 / 3) < tol);
  CHECK(std::abs(to_double(emm.dist.freq.at(W("11"))) - 1.0 / 6) < tol);
  CHECK(emm.defect <= Rational(4, 256));

  CHECK_THROWS_AS(empirical_measure(full, W("0101"), 100, 1), ValidationError);
}

TEST_CASE("good points") {
  Subshift full = Subshift::full_shift(2);
  auto cert = find_good_point(full, generating_cover(full), 1, 32);
  CHECK(cert.point.size() == 33);
  CHECK(full.admissible(cert.point));
  for (const auto& row : cert.achieved)
    for (double r : row) CHECK(r >= cert.h_estimate - 1.0 - 1e-12);

  // trivial cover: zero entropy floor, every point qualifies
  auto triv = find_good_point(full, trivial_cover(full), 1, 16);
  CHECK(triv.h_estimate == Catch::Approx(0.0).margin(1e-12));

  Subshift golden = Subshift::sft(2, {W("11")});
  auto gc = find_good_point(golden, generating_cover(golden), 1, 64);
  CHECK(golden.admissible(gc.point));
  for (const auto& row : gc.achieved)
    for (double r : row) CHECK(r >= gc.h_estimate - 1.0 - 1e-12);
}

TEST_CASE("attaining the cover entropy", "[slow]") {
  Subshift full = Subshift::full_shift(2);
  auto repf = attain_cover_entropy(full, generating_cover(full), {{1, 256}, {2, 4096}});
  CHECK(repf.attained);
  CHECK(repf.h_top_estimate == Catch::Approx(kLog2).margin(1e-9));
  CHECK(repf.final_lower_bound >= kLog2 - 0.05);

  Subshift golden = Subshift::sft(2, {W("11")});
  auto repg = attain_cover_entropy(golden, generating_cover(golden), {{1, 256}, {2, 4096}});
  CHECK(repg.attained);
  CHECK(repg.final_lower_bound >= repg.h_top_estimate - 0.05);
  // the empirical measure tracks the maximal-entropy frequencies
  CHECK(repg.final_lower_bound >= kLogPhi - 0.05);
}

TEST_CASE("max-min and min-max estimates") {
  Subshift full = Subshift::full_shift(2);
  std::vector<MarkovMeasure<Rational>> fam{
      bernoulli_measure(full, {Rational(1, 2), Rational(1, 2)})};
  auto rep = evaluate_h_check(full, generating_cover(full), fam, 2);
  CHECK(rep.h_check == Catch::Approx(kLog2).margin(1e-9));
  CHECK(rep.h_hat == Catch::Approx(kLog2).margin(1e-9));
  CHECK(rep.h_top_estimate == Catch::Approx(kLog2).margin(1e-9));
  CHECK(rep.h_check <= rep.h_hat + 1e-9);
  CHECK(rep.h_hat <= rep.h_top_estimate + 1e-9);

  // trivial cover: everything collapses to zero
  std::vector<PartitionSpec> tp = enumerate_finer_partitions(full, trivial_cover(full), 1);
  auto triv = evaluate_h_check(full, trivial_cover(full), fam, 1);
  CHECK(triv.h_top_estimate == Catch::Approx(0.0).margin(1e-12));
  CHECK(triv.h_hat >= triv.h_check - 1e-9);

  Subshift golden = Subshift::sft(2, {W("11")});
  std::vector<MarkovMeasure<double>> gfam{parry_measure(golden)};
  for (auto& q : {Rational(2, 5), Rational(1, 2), Rational(3, 5)})
    gfam.push_back(to_double_measure(
        markov_measure(golden, {{Rational(1) - q, q}, {Rational(1), Rational(0)}})));
  auto grep = evaluate_h_check(golden, generating_cover(golden), gfam, 2);
  CHECK(std::abs(grep.h_check - kLogPhi) <= 0.05);
  CHECK(std::abs(grep.h_hat - kLogPhi) <= 0.05);
  CHECK(grep.h_check <= grep.h_hat + 1e-9);
  CHECK(grep.h_hat <= grep.h_top_estimate + 1e-9);
  CHECK(grep.matrix.size() == 4);
}

TEST_CASE("universal Rohlin towers") {
  Subshift full = Subshift::full_shift(2);
  std::vector<MarkovMeasure<Rational>> ms{
      bernoulli_measure(full, {Rational(1, 2), Rational(1, 2)}),
      bernoulli_measure(full, {Rational(1, 3), Rational(2, 3)}),
      markov_measure(full, {{Rational(1, 4), Rational(3, 4)}, {Rational(2, 3), Rational(1, 3)}})};
  for (long n : {2L, 3L}) {
    auto tw = universal_rohlin(full, n, Rational(1, 2), ms);
    CHECK(tw.N == 2 * n);
    CHECK(tw.gap >= tw.N);
    CHECK(tw.disjoint_verified);
    REQUIRE(tw.coverage.size() == 3);
    for (const auto& [name, cov] : tw.coverage) CHECK(cov > Rational(1, 2));
  }

  Subshift golden = Subshift::sft(2, {W("11")});
  std::vector<MarkovMeasure<Rational>> gm{
      markov_measure(golden, {{Rational(1, 2), Rational(1, 2)}, {Rational(1), Rational(0)}}),
      markov_measure(golden, {{Rational(2, 5), Rational(3, 5)}, {Rational(1), Rational(0)}}),
      markov_measure(golden, {{Rational(5, 8), Rational(3, 8)}, {Rational(1), Rational(0)}})};
  auto tg = universal_rohlin(golden, 3, Rational(1, 3), gm);
  CHECK(tg.N == 9);
  CHECK(tg.disjoint_verified);
  for (const auto& [name, cov] : tg.coverage) CHECK(cov > Rational(2, 3));

  // bracket the exact coverage with the truncated return-time profile
  {
    const auto& mu = gm[0];
    long n = 3;
    auto prof = return_times(golden, cylinder(golden, tg.marker), mu, 400);
    Rational lo(0), hi(0);
    for (const auto& [r, mass] : prof.masses) lo += Rational(r % n) * mass;
    hi = lo + Rational(n - 1) * prof.residual;
    Rational uncovered = Rational(1) - tg.coverage[0].second;
    CHECK(lo <= uncovered);
    CHECK(uncovered <= hi);
  }

  // periodic system: no marker beyond the period, construction refused
  Subshift flip = Subshift::sft(2, {W("00"), W("11")});
  std::vector<MarkovMeasure<Rational>> pm{
      markov_measure(flip, {{Rational(0), Rational(1)}, {Rational(1), Rational(0)}})};
  CHECK_THROWS_AS(universal_rohlin(flip, 2, Rational(1, 2), pm), PreconditionError);
  CHECK_THROWS_AS(universal_rohlin(full, 1, Rational(1, 2), ms), ValidationError);
  CHECK_THROWS_AS(universal_rohlin(full, 2, Rational(2), ms), ValidationError);
}
