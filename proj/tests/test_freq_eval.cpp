#include <doctest.h>

#include <cmath>

#include "modelcmp/distributions.hpp"
#include "modelcmp/errors.hpp"
#include "modelcmp/freq_eval.hpp"
#include "modelcmp/rng.hpp"
#include "oracles.hpp"

using namespace modelcmp;

namespace {

RankMatrix ranks_from_rows(const std::vector<std::vector<double>>& rows) {
  RankMatrix rm;
  const std::size_t n = rows.size(), k = rows[0].size();
  rm.per_dataset_ranks = Matrix(n, k);
  rm.avg_ranks.assign(k, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      rm.per_dataset_ranks.at(i, j) = rows[i][j];
      rm.avg_ranks[j] += rows[i][j] / static_cast<double>(n);
    }
  return rm;
}

}  // namespace

TEST_CASE("friedman statistic on hand-computed fixtures") {
  SUBCASE("all tied gives statistic 0 and p = 1") {
    const RankMatrix rm = ranks_from_rows({{2.0, 2.0, 2.0}, {2.0, 2.0, 2.0}});
    const FriedmanOutcome out = friedman_statistic(rm, 2);
    CHECK(out.statistic == doctest::Approx(0.0));
    CHECK(out.p_value == doctest::Approx(1.0));
    CHECK(out.dof == 2);
  }
  SUBCASE("k=2 N=10 perfect separation gives statistic 10") {
    std::vector<std::vector<double>> rows(10, {1.0, 2.0});
    const FriedmanOutcome out = friedman_statistic(ranks_from_rows(rows), 10);
    // (12*10 / (2*3)) * [(1 + 4) - 2*9/4] = 20 * 0.5 = 10
    CHECK(out.statistic == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(out.dof == 1);
    CHECK(out.p_value ==
          doctest::Approx(oracles::chi_square_tail_by_quadrature(10.0, 1)).epsilon(1e-8));
    CHECK(out.p_value == doctest::Approx(0.001565).epsilon(1e-3));
  }
  SUBCASE("k=2 perfect separation statistic equals N") {
    for (std::size_t n : {4, 7, 23}) {
      std::vector<std::vector<double>> rows(n, {1.0, 2.0});
      CHECK(friedman_statistic(ranks_from_rows(rows), n).statistic ==
            doctest::Approx(static_cast<double>(n)).epsilon(1e-12));
    }
  }
  SUBCASE("three-model hand computation") {
    // Rows: (1,2,3), (1,2,3), (2,1,3) -> R = (4/3, 5/3, 3).
    const RankMatrix rm =
        ranks_from_rows({{1, 2, 3}, {1, 2, 3}, {2, 1, 3}});
    // chi2 = 12*3/(3*4) * [(16/9 + 25/9 + 9) - 3*16/4] = 3 * (122/9 - 12) = 4.6667
    const FriedmanOutcome out = friedman_statistic(rm, 3);
    CHECK(out.statistic == doctest::Approx(14.0 / 3.0).epsilon(1e-12));
  }
  SUBCASE("minimum sizes enforced") {
    CHECK_THROWS_AS(friedman_statistic(ranks_from_rows({{1.0, 2.0}}), 1),
                    ValidationError);
  }
}

TEST_CASE("friedman statistic is invariant under dataset permutation") {
  Rng rng(505);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 6; ++i) {
    std::vector<double> scores(4);
    for (double& s : scores) s = rng.uniform(0.0, 1.0);
    rows.push_back(mid_ranks(scores, true));
  }
  const double base = friedman_statistic(ranks_from_rows(rows), rows.size()).statistic;
  std::reverse(rows.begin(), rows.end());
  std::swap(rows[1], rows[3]);
  CHECK(friedman_statistic(ranks_from_rows(rows), rows.size()).statistic ==
        doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("chi_square_upper_tail fixtures") {
  CHECK(chi_square_upper_tail(0.0, 1) == 1.0);
  CHECK(chi_square_upper_tail(3.841459, 1) == doctest::Approx(0.05).epsilon(1e-6));
  // dof 2 closed form: exp(-x/2).
  CHECK(chi_square_upper_tail(5.991465, 2) ==
        doctest::Approx(std::exp(-5.991465 / 2.0)).epsilon(1e-12));
  CHECK(chi_square_upper_tail(5.991465, 2) == doctest::Approx(0.05).epsilon(1e-6));
  CHECK_THROWS_AS(chi_square_upper_tail(-1.0, 1), ValidationError);
}

TEST_CASE("studentized range quantile reduces to the normal at k=2") {
  // Range of two standard normals is |N(0,2)|, so q = z_{1-alpha/2}.
  CHECK(studentized_range_quantile(2, 0.05) ==
        doctest::Approx(1.95996).epsilon(5e-4));
  CHECK(studentized_range_quantile(2, 0.10) ==
        doctest::Approx(dist::normal_quantile(0.95)).epsilon(5e-4));
  CHECK_THROWS_AS(studentized_range_quantile(1, 0.05), ValidationError);
  CHECK_THROWS_AS(studentized_range_quantile(5, 0.0), ValidationError);
}

TEST_CASE("studentized range quantile matches the independent oracle") {
  for (std::size_t k : {3, 5, 8}) {
    CHECK(studentized_range_quantile(k, 0.05) ==
          doctest::Approx(oracles::studentized_range_quantile_oracle(k, 0.05))
              .epsilon(5e-5));
  }
}

TEST_CASE("studentized range quantile grows with k") {
  double prev = studentized_range_quantile(2, 0.05);
  for (std::size_t k = 3; k <= 20; ++k) {
    const double q = studentized_range_quantile(k, 0.05);
    CHECK(q > prev);
    prev = q;
  }
}

TEST_CASE("nemenyi critical difference and significance matrix") {
  SUBCASE("cd identity holds to machine precision") {
    for (std::size_t k : {2, 5, 13}) {
      for (std::size_t n : {4, 9, 48}) {
        RankMatrix rm;
        rm.avg_ranks.assign(k, (k + 1) / 2.0);
        rm.per_dataset_ranks = Matrix(n, k, (k + 1) / 2.0);
        const NemenyiOutcome out = nemenyi(rm, n, 0.05);
        const double expected =
            out.q_alpha * std::sqrt(k * (k + 1.0) / (6.0 * static_cast<double>(n)));
        CHECK(out.cd == doctest::Approx(expected).epsilon(1e-15));
      }
    }
  }
  SUBCASE("k=2 N=8 perfect separation is significant") {
    const RankMatrix rm = ranks_from_rows(std::vector<std::vector<double>>(8, {1.0, 2.0}));
    const NemenyiOutcome out = nemenyi(rm, 8, 0.05);
    CHECK(out.cd == doctest::Approx(0.6930).epsilon(1e-3));
    CHECK(out.significant[0][1]);
    CHECK(out.significant[1][0]);
    CHECK_FALSE(out.significant[0][0]);
  }
  SUBCASE("zero gap is never significant") {
    RankMatrix rm;
    rm.avg_ranks = {1.5, 1.5, 3.0};
    rm.per_dataset_ranks = Matrix(4, 3);
    const NemenyiOutcome out = nemenyi(rm, 4, 0.05);
    CHECK_FALSE(out.significant[0][1]);
  }
  SUBCASE("matrix is symmetric with a false diagonal on random ranks") {
    Rng rng(6060);
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 5; ++i) {
      std::vector<double> scores(6);
      for (double& s : scores) s = rng.uniform(0.0, 1.0);
      rows.push_back(mid_ranks(scores, true));
    }
    const RankMatrix rm = ranks_from_rows(rows);
    const NemenyiOutcome out = nemenyi(rm, 5, 0.05);
    for (std::size_t i = 0; i < 6; ++i) {
      CHECK_FALSE(out.significant[i][i]);
      for (std::size_t j = 0; j < 6; ++j)
        CHECK(out.significant[i][j] == out.significant[j][i]);
    }
  }
}

TEST_CASE("nhst_family applies the interval rule") {
  const std::vector<std::string> models{"m1", "m2", "m3"};

  SUBCASE("rule application with engineered cd") {
    RankMatrix rm;
    rm.avg_ranks = {1.0, 1.2, 3.0};
    FriedmanOutcome omnibus;
    omnibus.p_value = 0.001;
    NemenyiOutcome posthoc;
    posthoc.alpha = 0.05;
    posthoc.cd = 0.5;
    const FamilyOfBest family = nhst_family(rm, models, omnibus, posthoc);
    CHECK(family.method == EvalMethod::nhst);
    CHECK(family.members == std::vector<std::string>{"m1", "m2"});
    CHECK(family.epistemic_note.find("not sufficient") != std::string::npos);
  }
  SUBCASE("omnibus retention raises unless forced") {
    RankMatrix rm;
    rm.avg_ranks = {2.0, 2.0, 2.0};
    FriedmanOutcome omnibus;
    omnibus.p_value = 1.0;
    NemenyiOutcome posthoc;
    posthoc.alpha = 0.05;
    posthoc.cd = 0.5;
    CHECK_THROWS_AS(nhst_family(rm, models, omnibus, posthoc), OmnibusRetainedError);
    const FamilyOfBest forced = nhst_family(rm, models, omnibus, posthoc, true);
    CHECK(forced.members.size() == 3);  // all tied, all inside cd
    CHECK(forced.members.front() == "m1");  // lexicographic tie policy
  }
  SUBCASE("family is an interval in rank space") {
    Rng rng(77);
    for (int trial = 0; trial < 20; ++trial) {
      RankMatrix rm;
      const std::size_t k = 5;
      std::vector<std::string> ids;
      for (std::size_t j = 0; j < k; ++j) ids.push_back("x" + std::to_string(j));
      rm.avg_ranks.resize(k);
      for (double& r : rm.avg_ranks) r = rng.uniform(1.0, static_cast<double>(k));
      FriedmanOutcome omnibus;
      omnibus.p_value = 0.0;
      NemenyiOutcome posthoc;
      posthoc.alpha = 0.05;
      posthoc.cd = rng.uniform(0.1, 3.0);
      const FamilyOfBest family = nhst_family(rm, ids, omnibus, posthoc);

      // Every model ranked between f1 and any member must itself be a member.
      double worst_member_rank = -1.0;
      for (const auto& m : family.members)
        for (std::size_t j = 0; j < k; ++j)
          if (ids[j] == m) worst_member_rank = std::max(worst_member_rank, rm.avg_ranks[j]);
      for (std::size_t j = 0; j < k; ++j) {
        const bool inside = rm.avg_ranks[j] < worst_member_rank;
        if (inside)
          CHECK(std::find(family.members.begin(), family.members.end(), ids[j]) !=
                family.members.end());
      }
    }
  }
}
