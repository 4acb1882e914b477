#include <doctest.h>

#include "netting/determination.hpp"
#include "support.hpp"

using namespace netting;
using namespace netting::determination;
using cnl::Likelihood;
using cnl::Sentence;
using cnl::Verb;
using risk::ProbRange;

namespace {

const auto kMapping = risk::LikelihoodMapping::standard();
const RiskFactor kCherry{"cherry", "transactions", "cherry-picked", AdverseDirection::Occurrence,
                         10000};

std::vector<BlockingReason> reasons(const NettingDetermination& d) {
  std::vector<BlockingReason> out;
  for (const auto& b : d.blockingReasons) out.push_back(b.reason);
  return out;
}

std::string trace(const NettingDetermination& d) {
  return documents::canonical(documents::trace_to_json(d, cnl::VocabularyRegistry::builtin()));
}

// Oracle: floor/ceil of the weighted mean by search rather than division.
ProbRange linear_oracle(const std::vector<std::pair<int, ProbRange>>& weighted) {
  long long lo_num = 0, hi_num = 0;
  for (const auto& [w, r] : weighted) {
    lo_num += 1LL * w * r.lo();
    hi_num += 1LL * w * r.hi();
  }
  int lo = 0;
  while (1LL * (lo + 1) * 10000 <= lo_num) ++lo;
  int hi = 10000;
  while (1LL * (hi - 1) * 10000 >= hi_num) --hi;
  return ProbRange(lo, hi);
}

using testsupport::random_input;
using testsupport::random_sentence;

}  // namespace

TEST_CASE("worked cherry-picking example gives [100,4900]") {
  std::vector<Sentence> conclusion{
      {Likelihood::PossibleThat, "transactions", Verb::WillBe, "cherry-picked"},
      {Likelihood::MoreLikelyThanNotThat, "transactions", Verb::WillNotBe, "cherry-picked"}};
  auto a = factor_range(conclusion, kCherry, kMapping);
  CHECK(a.status == FactorStatus::Assessed);
  REQUIRE(a.adverseRange);
  CHECK(*a.adverseRange == ProbRange(100, 4900));
  REQUIRE(a.sentencesUsed.size() == 2);
  CHECK(a.sentencesUsed[0].directed == ProbRange(100, 6400));
  CHECK(a.sentencesUsed[1].raw == ProbRange(5100, 10000));
  CHECK(a.sentencesUsed[1].directed == ProbRange(0, 4900));
}

TEST_CASE("non-occurrence factors use the complement") {
  RiskFactor collateral{"c", "collateral", "enforceable", AdverseDirection::NonOccurrence, 10000};
  std::vector<Sentence> conclusion{
      {Likelihood::MoreLikelyThanNotThat, "collateral", Verb::WillNotBe, "enforceable"}};
  // P(enforceable) in [0,4900] so P(not enforceable) in [5100,10000].
  CHECK(*factor_range(conclusion, collateral, kMapping).adverseRange == ProbRange(5100, 10000));
  conclusion[0] = {Likelihood::DefinitelyTheCaseThat, "collateral", Verb::Is, "enforceable"};
  CHECK(*factor_range(conclusion, collateral, kMapping).adverseRange == ProbRange(0, 0));
}

TEST_CASE("missing and contradictory factors") {
  std::vector<Sentence> none{{Likelihood::PossibleThat, "collateral", Verb::Is, "stayed"}};
  auto missing = factor_range(none, kCherry, kMapping);
  CHECK(missing.status == FactorStatus::Missing);
  CHECK_FALSE(missing.adverseRange);

  std::vector<Sentence> clash{
      {Likelihood::DefinitelyTheCaseThat, "transactions", Verb::Is, "cherry-picked"},
      {Likelihood::DefinitelyNotTheCaseThat, "transactions", Verb::Is, "cherry-picked"}};
  auto contra = factor_range(clash, kCherry, kMapping);
  CHECK(contra.status == FactorStatus::Contradictory);
  CHECK_FALSE(contra.adverseRange);

  InstitutionRiskPolicy p;
  p.factors = {kCherry};
  auto treated = resolve(missing, p);
  CHECK(treated.resolution == Resolution::TreatedAsUnknown);
  CHECK(*treated.adverseRange == ProbRange::full());
  p.missingFactorPolicy = MissingFactorPolicy::Block;
  CHECK(resolve(missing, p).resolution == Resolution::Blocked);

  CHECK(resolve(contra, p).resolution == Resolution::Blocked);
  CHECK(*resolve(contra, p).adverseRange == ProbRange::full());
  p.emptyIntersectionPolicy = EmptyIntersectionPolicy::WidestSentence;
  auto widest = resolve(contra, p);
  CHECK(widest.resolution == Resolution::WidestSentence);
  // Equal widths: the higher range wins, which is the conservative choice.
  CHECK(*widest.adverseRange == ProbRange(10000, 10000));
}

TEST_CASE("policy validation") {
  auto ok = testsupport::sample_input().policy;
  CHECK_NOTHROW(validate(ok));
  auto code_of = [](InstitutionRiskPolicy p) {
    try {
      validate(p);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::EmptyInput;
  };
  auto p = ok;
  p.factors[0].weightBp -= 1;
  CHECK(code_of(p) == ErrorCode::PolicyInvalid);
  p = ok;
  p.thresholdBp = 10001;
  CHECK(code_of(p) == ErrorCode::PolicyInvalid);
  p = ok;
  p.factors[1].object = "transactions";
  p.factors[1].predicate = "cherry-picked";
  CHECK(code_of(p) == ErrorCode::PolicyInvalid);
  p = ok;
  p.factors.clear();
  CHECK(code_of(p) == ErrorCode::PolicyInvalid);
  p = ok;
  p.blockingItemKinds = {"Whatever"};
  CHECK(code_of(p) == ErrorCode::PolicyInvalid);
}

TEST_CASE("linear aggregate matches the search oracle") {
  auto g = testsupport::rng(30);
  for (int i = 0; i < 10000; ++i) {
    InstitutionRiskPolicy p;
    std::vector<FactorAssessment> as;
    std::vector<std::pair<int, ProbRange>> weighted;
    int n = testsupport::uniform(g, 1, 5), left = 10000;
    for (int k = 0; k < n; ++k) {
      int w = k + 1 == n ? left : testsupport::uniform(g, 0, left);
      left -= w;
      int a = testsupport::uniform(g, 0, 10000), b = testsupport::uniform(g, 0, 10000);
      ProbRange r(std::min(a, b), std::max(a, b));
      std::string id = "f" + std::to_string(k);
      p.factors.push_back({id, "o" + id, "p", AdverseDirection::Occurrence, w});
      FactorAssessment fa;
      fa.factorId = id;
      fa.adverseRange = r;
      fa.status = FactorStatus::Assessed;
      as.push_back(fa);
      weighted.emplace_back(w, r);
    }
    REQUIRE(aggregate_risk(as, p) == linear_oracle(weighted));
  }
}

TEST_CASE("aggregate rejects unresolved factors") {
  InstitutionRiskPolicy p;
  p.factors = {kCherry};
  FactorAssessment a;
  a.factorId = "cherry";
  CHECK_THROWS_AS(aggregate_risk(std::vector<FactorAssessment>{a}, p), Error);
  CHECK_THROWS_AS(aggregate_risk(std::vector<FactorAssessment>{}, p), Error);
}

TEST_CASE("three-factor sample: [50,7450], No at 5000, Yes at 7500") {
  auto in = testsupport::sample_input();
  auto d = determine(in);
  CHECK(d.overallRisk == ProbRange(50, 7450));
  CHECK(d.flag == Flag::No);
  CHECK(reasons(d) == std::vector{BlockingReason::RiskAboveThreshold});
  REQUIRE(d.factorAssessments.size() == 3);
  CHECK(*d.factorAssessments[0].adverseRange == ProbRange(100, 4900));
  CHECK(*d.factorAssessments[1].adverseRange == ProbRange(0, 10000));
  CHECK(*d.factorAssessments[2].adverseRange == ProbRange(0, 10000));
  CHECK(d.aggregation == "linear");

  in.policy.thresholdBp = 7500;
  auto yes = determine(in);
  CHECK(yes.flag == Flag::Yes);
  CHECK(yes.blockingReasons.empty());
  in.policy.thresholdBp = 7450;
  CHECK(determine(in).flag == Flag::Yes);
  in.policy.thresholdBp = 7449;
  CHECK(determine(in).flag == Flag::No);
}

TEST_CASE("each gate blocks with its reason") {
  auto base = testsupport::sample_input();
  base.policy.thresholdBp = 10000;
  REQUIRE(determine(base).flag == Flag::Yes);

  auto in = base;
  in.facts.agreementType = "GMRA";
  CHECK(determine(in).has_reason(BlockingReason::ScopeNotMatched));

  in = base;
  in.facts.branchJurisdiction = "france";
  auto d = determine(in);
  CHECK(d.has_reason(BlockingReason::JurisdictionNotCovered));
  CHECK(d.coverage.uncovered == opinion::IdSet{"france"});

  in = base;
  in.opinions[0] = set_verification(in.opinions[0], "Q1", opinion::Verification::Failed, "a",
                                    Timestamp::parse("2026-05-01T00:00:00Z"));
  CHECK(reasons(determine(in)) == std::vector{BlockingReason::ItemFailed});

  in = base;
  in.opinions[0] = set_verification(in.opinions[0], "A2", opinion::Verification::Unverified, "a",
                                    Timestamp::parse("2026-05-01T00:00:00Z"));
  CHECK(reasons(determine(in)) == std::vector{BlockingReason::ItemUnverified});
  in.policy.blockingItemKinds = {"General"};
  CHECK(determine(in).flag == Flag::Yes);

  in = base;
  in.opinions[0] = set_verification(in.opinions[0], "A2", opinion::Verification::Waived, "a",
                                    Timestamp::parse("2026-05-01T00:00:00Z"));
  CHECK(determine(in).flag == Flag::Yes);

  in = base;
  in.facts.materiallyAmended = true;
  d = determine(in);
  CHECK(reasons(d) == std::vector{BlockingReason::MaterialAmendment, BlockingReason::ItemFailed});
  CHECK(d.blockingReasons[1].detail == "op-eng-isda-2026/A1");

  in = base;
  in.asOfDate = in.opinions[0].issuedAt.plus_days(365);
  CHECK(determine(in).flag == Flag::Yes);
  in.asOfDate = in.opinions[0].issuedAt.plus_days(366);
  CHECK(reasons(determine(in)) == std::vector{BlockingReason::OpinionExpired});
  in.policy.validityPeriodDays = 400;
  CHECK(determine(in).flag == Flag::Yes);

  in = base;
  in.asOfDate = in.opinions[0].issuedAt.plus_days(-1);
  CHECK(reasons(determine(in)) == std::vector{BlockingReason::OpinionNotYetIssued});

  in = base;
  in.humanAssessment.reset();
  CHECK(reasons(determine(in)) == std::vector{BlockingReason::HumanAssessmentMissing});
  in.humanAssessment = base.humanAssessment;
  in.humanAssessment->verdict = opinion::Verdict::ReasoningRejected;
  CHECK(reasons(determine(in)) == std::vector{BlockingReason::ReasoningRejected});

  in = base;
  in.opinions[0].conclusion.pop_back();  // drops the stay sentence
  d = determine(in);
  CHECK(d.flag == Flag::Yes);
  CHECK(d.warnings.size() == 1);
  in.policy.missingFactorPolicy = MissingFactorPolicy::Block;
  CHECK(reasons(determine(in)) == std::vector{BlockingReason::FactorMissing});

  in = base;
  in.opinions[0].conclusion.push_back(
      {Likelihood::DefinitelyTheCaseThat, "transactions", Verb::Is, "cherry-picked"});
  CHECK(reasons(determine(in)) == std::vector{BlockingReason::FactorContradictory});
}

TEST_CASE("unsupplied opinions and invalid policies are errors") {
  auto in = testsupport::sample_input();
  in.opinions.clear();
  CHECK_THROWS_AS(determine(in), Error);
  in = testsupport::sample_input();
  in.policy.factors[0].weightBp = 1;
  CHECK_THROWS_AS(determine(in), Error);
}

TEST_CASE("a later opinion's sentences are combined with earlier ones") {
  auto in = testsupport::sample_input();
  auto second = in.opinions[0];
  second.id = "op-2";
  second.conclusion = {
      {Likelihood::MoreLikelyThanNotThat, "collateral", Verb::WillBe, "enforceable"}};
  in.opinions.push_back(second);
  auto d = determine(in);
  REQUIRE(d.factorAssessments[1].sentencesUsed.size() == 2);
  CHECK(d.factorAssessments[1].sentencesUsed[1].opinionId == "op-2");
  CHECK(*d.factorAssessments[1].adverseRange == ProbRange(0, 4900));
}

TEST_CASE("custom aggregator is used and named in the trace") {
  struct WorstCase final : Aggregator {
    std::string_view name() const override { return "worst-case"; }
    ProbRange aggregate(std::span<const FactorAssessment> as,
                        const InstitutionRiskPolicy&) const override {
      risk::Bp lo = 0, hi = 0;
      for (const auto& a : as) {
        lo = std::max(lo, a.adverseRange->lo());
        hi = std::max(hi, a.adverseRange->hi());
      }
      return ProbRange(lo, hi);
    }
  };
  auto d = determine(testsupport::sample_input(), WorstCase{});
  CHECK(d.aggregation == "worst-case");
  CHECK(d.overallRisk == ProbRange(100, 10000));
}

TEST_CASE("property: raising the threshold never flips Yes to No") {
  auto g = testsupport::rng(31);
  for (int i = 0; i < 10000; ++i) {
    auto in = random_input(g);
    auto d = determine(in);
    int higher = testsupport::uniform(g, in.policy.thresholdBp, 10000);
    in.policy.thresholdBp = higher;
    auto d2 = determine(in);
    REQUIRE(d2.overallRisk == d.overallRisk);
    if (d.flag == Flag::Yes) REQUIRE(d2.flag == Flag::Yes);
  }
}

TEST_CASE("property: adding a sentence never widens a factor range") {
  auto g = testsupport::rng(32);
  for (int i = 0; i < 10000; ++i) {
    std::vector<Sentence> conclusion;
    int n = testsupport::uniform(g, 1, 5);
    for (int k = 0; k < n; ++k) {
      auto s = random_sentence(g);
      s.object = "transactions";
      s.predicate = "cherry-picked";
      conclusion.push_back(s);
    }
    auto factor = kCherry;
    if (testsupport::uniform(g, 0, 1)) factor.adverse = AdverseDirection::NonOccurrence;
    auto before = factor_range(conclusion, factor, kMapping);
    auto extra = random_sentence(g);
    if (testsupport::uniform(g, 0, 1)) {
      extra.object = "transactions";
      extra.predicate = "cherry-picked";
    }
    conclusion.push_back(extra);
    auto after = factor_range(conclusion, factor, kMapping);
    if (!before.adverseRange) {
      REQUIRE(!after.adverseRange);
    } else if (after.adverseRange) {
      REQUIRE(before.adverseRange->lo() <= after.adverseRange->lo());
      REQUIRE(after.adverseRange->hi() <= before.adverseRange->hi());
    } else {
      REQUIRE(after.status == FactorStatus::Contradictory);
    }
  }
}

TEST_CASE("property: identical inputs give byte-identical traces") {
  auto g = testsupport::rng(33);
  for (int i = 0; i < 2000; ++i) {
    auto in = random_input(g);
    auto copy = in;
    REQUIRE(trace(determine(in)) == trace(determine(copy)));
  }
}

TEST_CASE("property: the overall range contains the aggregate of any point choice") {
  // Choosing each factor at its own lower (upper) bound gives a weighted mean
  // inside the reported overall range.
  auto g = testsupport::rng(34);
  for (int i = 0; i < 3000; ++i) {
    auto d = determine(random_input(g));
    long long lo = 0, hi = 0;
    for (std::size_t k = 0; k < d.factorAssessments.size(); ++k) {
      lo += 1LL * d.policy.factors[k].weightBp * d.factorAssessments[k].adverseRange->lo();
      hi += 1LL * d.policy.factors[k].weightBp * d.factorAssessments[k].adverseRange->hi();
    }
    REQUIRE(1LL * d.overallRisk.lo() * 10000 <= lo);
    REQUIRE(1LL * d.overallRisk.hi() * 10000 >= hi);
  }
}
