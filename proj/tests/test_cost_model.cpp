#include <doctest.h>

#include "netting/cost_model.hpp"
#include "support.hpp"

using namespace netting;
using namespace netting::cost;

namespace {

// Oracle in integer thousandths of a day, from raw percentages.
struct Row {
  long long banks, opinions, reviewedPct, complexPct, complexMilli, simpleMilli;
};

long long reviews(const Row& r) { return r.banks * r.opinions * r.reviewedPct / 100; }

long long days_milli(const Row& r) {
  // Per review: (complex% * complex + (100 - complex%) * simple) / 100.
  long long per = (r.complexPct * r.complexMilli + (100 - r.complexPct) * r.simpleMilli);
  long long total = reviews(r) * per;
  REQUIRE(total % 100 == 0);
  return total / 100;
}

const Row kRows[] = {{20, 300, 80, 50, 2000, 250},
                     {56, 300, 40, 50, 2000, 250},
                     {162, 300, 10, 50, 2000, 250},
                     {649, 300, 5, 50, 2000, 250}};

}  // namespace

TEST_CASE("reference levels against the integer oracle") {
  auto report = total_cost(reference_levels());
  long long reviews_total = 0, milli_total = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(report.levels[i].reviews == Decimal(reviews(kRows[i])));
    CHECK(report.levels[i].days == Decimal::from_parts(days_milli(kRows[i]), 3));
    CHECK(report.levels[i].perReviewDays == Decimal::parse("1.125"));
    reviews_total += reviews(kRows[i]);
    milli_total += days_milli(kRows[i]);
  }
  CHECK(reviews_total == 26115);
  CHECK(report.reviewsTotal == Decimal(26115));
  CHECK(report.totalDays == Decimal::from_parts(milli_total, 3));
  CHECK(report.totalDays.str() == "29379.375");
  CHECK(report.totalDays.fixed(2) == "29379.38");
  CHECK(report.levels[0].reviews == Decimal(4800));
  CHECK(report.levels[1].reviews == Decimal(6720));
  CHECK(report.levels[2].reviews == Decimal(4860));
  CHECK(report.levels[3].reviews == Decimal(9735));
  CHECK(report.levels[2].days.str() == "5467.5");
  CHECK(report.levels[3].days.str() == "10951.875");
  CHECK(report.share_percent("4").str() == "37.28");
}

TEST_CASE("monetization") {
  auto report = total_cost(reference_levels(), Decimal(1000));
  REQUIRE(report.monetized);
  CHECK(report.monetized->str() == "29379375");
  CHECK(*report.monetized >= Decimal(29'000'000));
}

TEST_CASE("parameter file equals the built-in reference") {
  auto file = documents::cost_params_from_json(testsupport::data_json("reference_cost_params.json"));
  auto a = total_cost(file), b = total_cost(reference_levels());
  CHECK(a.totalDays == b.totalDays);
  CHECK(a.reviewsTotal == b.reviewsTotal);
}

TEST_CASE("table output") {
  auto text = format_table(total_cost(reference_levels(), Decimal(1000)));
  CHECK(text.find("TOTAL 26115 reviews, 29379.38 days") != std::string::npos);
  CHECK(text.find("37.28%") != std::string::npos);
  CHECK(text.back() == '\n');
}

TEST_CASE("parameter validation") {
  auto code_of = [](std::vector<LevelParams> levels) {
    try {
      total_cost(levels);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::EmptyInput;
  };
  auto levels = reference_levels();
  levels[0].reviewed = Decimal::parse("1.2");
  CHECK(code_of(levels) == ErrorCode::InvalidFraction);
  levels = reference_levels();
  levels[1].complex = Decimal(-1);
  CHECK(code_of(levels) == ErrorCode::InvalidFraction);
  levels = reference_levels();
  levels[2].banks = Decimal(-3);
  CHECK(code_of(levels) == ErrorCode::InvalidParameters);
  CHECK(code_of({}) == ErrorCode::InvalidParameters);
}

TEST_CASE("property: total equals the sum of levels and scales linearly in banks") {
  auto g = testsupport::rng(50);
  for (int i = 0; i < 2000; ++i) {
    std::vector<LevelParams> levels;
    std::vector<Row> rows;
    int n = testsupport::uniform(g, 1, 5);
    for (int k = 0; k < n; ++k) {
      int simple = testsupport::uniform(g, 0, 5000);
      Row r{testsupport::uniform(g, 0, 1000), testsupport::uniform(g, 0, 500),
            testsupport::uniform(g, 0, 100),  testsupport::uniform(g, 0, 100),
            testsupport::uniform(g, simple, 6000), simple};
      rows.push_back(r);
      levels.push_back({std::to_string(k), Decimal(r.banks), Decimal(r.opinions),
                        Decimal::from_parts(r.reviewedPct, 2), Decimal::from_parts(r.complexPct, 2),
                        Decimal::from_parts(r.complexMilli, 3), Decimal::from_parts(r.simpleMilli, 3)});
    }
    auto report = total_cost(levels);
    // Oracle in units of 1e-7 days: percentages (1e-2 each) times milli-days.
    __int128 expected = 0;
    for (const auto& r : rows)
      expected += __int128(r.banks) * r.opinions * r.reviewedPct *
                  (r.complexPct * r.complexMilli + (100 - r.complexPct) * r.simpleMilli);
    REQUIRE(report.totalDays == Decimal::from_parts(expected, 7));

    auto k = std::size_t(testsupport::uniform(g, 0, n - 1));
    auto doubled = levels;
    doubled[k].banks = doubled[k].banks * Decimal(2);
    auto d2 = total_cost(doubled);
    for (std::size_t j = 0; j < levels.size(); ++j)
      REQUIRE(d2.levels[j].days == (j == k ? report.levels[j].days * Decimal(2)
                                           : report.levels[j].days));

    // Raising any single parameter (within its invariants) never lowers TC_d.
    auto raised = levels;
    auto& l = raised[k];
    switch (testsupport::uniform(g, 0, 5)) {
      case 0: l.banks = l.banks + Decimal(1); break;
      case 1: l.opinions = l.opinions + Decimal(1); break;
      case 2: if (l.reviewed < Decimal(1)) l.reviewed = l.reviewed + Decimal::parse("0.01"); break;
      case 3: if (l.complex < Decimal(1)) l.complex = l.complex + Decimal::parse("0.01"); break;
      case 4: l.costComplexDays = l.costComplexDays + Decimal::parse("0.001"); break;
      default:
        if (l.costSimpleDays < l.costComplexDays)
          l.costSimpleDays = l.costSimpleDays + Decimal::parse("0.001");
    }
    REQUIRE(total_cost(raised).totalDays >= report.totalDays);
    for (const auto& lc : report.levels) {
      const auto& p = levels[std::size_t(std::stoi(lc.level))];
      REQUIRE(p.costSimpleDays <= lc.perReviewDays);
      REQUIRE(lc.perReviewDays <= p.costComplexDays);
    }
  }
}

TEST_CASE("small worked cases") {
  std::vector<LevelParams> one{{"1", Decimal(1), Decimal(10), Decimal(1), Decimal(0), Decimal(2),
                                Decimal::parse("0.25")}};
  auto r = total_cost(one);
  CHECK(r.reviewsTotal == Decimal(10));
  CHECK(r.totalDays.str() == "2.5");

  auto none = reference_levels();
  for (auto& l : none) l.reviewed = Decimal(0);
  CHECK(total_cost(none).totalDays.is_zero());

  auto inverted = reference_levels();
  inverted[0].costSimpleDays = Decimal(3);
  CHECK_THROWS_AS(total_cost(inverted), Error);
}
