#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <fstream>
#include <thread>

#include "netting/store.hpp"
#include "support.hpp"

using namespace netting;
using namespace netting::store;
using documents::Json;

namespace {

Clock fixed_clock(const char* iso) {
  auto t = Timestamp::parse(iso);
  return [t] { return t; };
}

ErrorCode code_of(auto fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::EmptyInput;
}

void overwrite(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << bytes;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// A Yes determination for the sample relationship as of `asOf`.
determination::NettingDetermination yes_determination(Date asOf) {
  auto in = testsupport::sample_input();
  in.policy.thresholdBp = 7500;
  in.asOfDate = asOf;
  auto d = determination::determine(in);
  REQUIRE(d.flag == determination::Flag::Yes);
  return d;
}

}  // namespace

TEST_CASE("versions are append-only and exact") {
  testsupport::TempDir dir;
  DocumentStore s(dir.path(), fixed_clock("2026-06-30T10:00:00Z"));
  CHECK(s.save(EntityKind::Policy, "p1", "first", 0, "alice") == 1);
  CHECK(s.save(EntityKind::Policy, "p1", "second", 1, "bob") == 2);
  CHECK(s.load(EntityKind::Policy, "p1") == "second");
  CHECK(s.load(EntityKind::Policy, "p1", 1) == "first");
  CHECK(s.latest_version(EntityKind::Policy, "p1") == 2u);
  CHECK(std::filesystem::exists(dir.path() / "policies" / "p1" / "v000001.json"));
  CHECK(slurp(dir.path() / "policies" / "p1" / "v000002.json") == "second");

  auto h = s.history(EntityKind::Policy, "p1");
  REQUIRE(h.size() == 2);
  CHECK(h[1].actor == "bob");
  CHECK(h[0].sha256 == "a7937b64b8caa58f03721bb6bacf5c78cb235febe0e70b1b84cd99541461a08e");
  CHECK(h[0].savedAt.iso() == "2026-06-30T10:00:00Z");
  CHECK(s.list(EntityKind::Policy) == std::vector<std::string>{"p1"});

  CHECK(code_of([&] { s.save(EntityKind::Policy, "p1", "stale", 1, "carol"); }) ==
        ErrorCode::VersionConflict);
  CHECK(code_of([&] { s.save(EntityKind::Policy, "p2", "new", 3, "carol"); }) ==
        ErrorCode::VersionConflict);
  CHECK(code_of([&] { s.load(EntityKind::Policy, "p1", 3); }) == ErrorCode::NotFound);
  CHECK(code_of([&] { s.load(EntityKind::Facts, "nope"); }) == ErrorCode::NotFound);
  CHECK(code_of([&] { s.save(EntityKind::Policy, "../escape", "x", 0, "a"); }) ==
        ErrorCode::InvalidDocument);
}

TEST_CASE("audit trail is a verifiable hash chain") {
  testsupport::TempDir dir;
  DocumentStore s(dir.path(), fixed_clock("2026-06-30T10:00:00Z"));
  s.save(EntityKind::Policy, "p1", "a", 0, "alice", "save", "initial");
  s.save(EntityKind::Policy, "p1", "b", 1, "alice");
  s.note("bob", "review", "looked at it", EntityKind::Policy, "p1");
  auto trail = s.audit_trail();
  REQUIRE(trail.size() == 3);
  CHECK(trail[0].prevHash == std::string(64, '0'));
  CHECK(trail[1].prevHash == trail[0].entryHash);
  CHECK(trail[1].beforeHash == trail[0].afterHash);
  CHECK(trail[2].action == "review");
  CHECK(trail[2].version == 2);
  CHECK(s.audit_trail(EntityKind::Policy, "p1").size() == 3);
  CHECK(s.audit_trail(EntityKind::Policy, "other").empty());
  CHECK(s.verify().ok);

  SUBCASE("tampered version content is detected") {
    overwrite(dir.path() / "policies" / "p1" / "v000001.json", "A");
    auto check = s.verify();
    CHECK_FALSE(check.ok);
    CHECK(check.problem.find("content altered") != std::string::npos);
  }
  SUBCASE("tampered audit entry is detected") {
    auto text = slurp(dir.path() / "audit.jsonl");
    auto pos = text.find("alice");
    text.replace(pos, 5, "mallo");
    overwrite(dir.path() / "audit.jsonl", text);
    CHECK_FALSE(s.verify().ok);
  }
  SUBCASE("dropped audit entry is detected") {
    auto text = slurp(dir.path() / "audit.jsonl");
    overwrite(dir.path() / "audit.jsonl", text.substr(text.find('\n') + 1));
    CHECK_FALSE(s.verify().ok);
  }
}

TEST_CASE("concurrent writers in one process") {
  testsupport::TempDir dir;
  DocumentStore s(dir.path());
  constexpr int kThreads = 4, kEach = 25;
  std::vector<std::thread> threads;
  for (int t = 0; t < kThreads; ++t)
    threads.emplace_back([&, t] {
      for (int i = 0; i < kEach; ++i)
        s.save(EntityKind::Facts, "shared", std::to_string(t * 100 + i), std::nullopt,
               "t" + std::to_string(t));
    });
  for (auto& th : threads) th.join();
  CHECK(s.latest_version(EntityKind::Facts, "shared") == std::uint64_t(kThreads * kEach));
  CHECK(s.audit_trail().size() == std::size_t(kThreads * kEach));
  CHECK(s.verify().ok);
}

TEST_CASE("optimistic edits from the same base: exactly one wins") {
  testsupport::TempDir dir;
  DocumentStore s(dir.path());
  s.save(EntityKind::Policy, "p", "base", 0, "a");
  std::atomic<int> wins{0}, conflicts{0};
  std::vector<std::thread> threads;
  for (int t = 0; t < 6; ++t)
    threads.emplace_back([&, t] {
      try {
        s.save(EntityKind::Policy, "p", "edit" + std::to_string(t), 1, "a");
        ++wins;
      } catch (const Error& e) {
        if (e.code() == ErrorCode::VersionConflict) ++conflicts;
      }
    });
  for (auto& th : threads) th.join();
  CHECK(wins == 1);
  CHECK(conflicts == 5);
}

TEST_CASE("concurrent writers across processes") {
  testsupport::TempDir dir;
  constexpr int kChildren = 3, kEach = 15;
  std::vector<pid_t> pids;
  for (int c = 0; c < kChildren; ++c) {
    pid_t pid = ::fork();
    REQUIRE(pid >= 0);
    if (pid == 0) {
      int rc = 0;
      try {
        DocumentStore s(dir.path());
        for (int i = 0; i < kEach; ++i)
          s.save(EntityKind::Facts, "shared", std::to_string(i), std::nullopt, "child");
      } catch (...) {
        rc = 1;
      }
      ::_exit(rc);
    }
    pids.push_back(pid);
  }
  for (pid_t pid : pids) {
    int status = 0;
    ::waitpid(pid, &status, 0);
    CHECK(WIFEXITED(status));
    CHECK(WEXITSTATUS(status) == 0);
  }
  DocumentStore s(dir.path());
  CHECK(s.latest_version(EntityKind::Facts, "shared") == std::uint64_t(kChildren * kEach));
  CHECK(s.verify().ok);
}

TEST_CASE("lifecycle: opinions, verification, registry") {
  testsupport::TempDir dir;
  LifecycleStore ls(dir.path(), fixed_clock("2026-06-30T10:00:00Z"));
  auto op = testsupport::sample_opinion();
  CHECK(ls.save_opinion(op, 0, "analyst") == 1);
  CHECK(ls.load_opinion(op.id) == op);
  CHECK(code_of([&] { ls.load_opinion("missing"); }) == ErrorCode::OpinionNotFound);

  auto future = op;
  future.id = "future";
  future.issuedAt = Date::parse("2026-07-01");
  CHECK(code_of([&] { ls.save_opinion(future, 0, "a"); }) == ErrorCode::InvalidOpinion);

  auto updated = ls.verify_item(op.id, "A1", opinion::Verification::Verified, "analyst-1",
                                Timestamp::parse("2026-06-30T11:00:00Z"), "checked");
  CHECK(updated.assumptions[0].verification == opinion::Verification::Verified);
  CHECK(ls.load_opinion(op.id).assumptions[0].verifiedBy == "analyst-1");
  CHECK(ls.load_opinion(op.id, 1).assumptions[0].verification ==
        opinion::Verification::Unverified);
  CHECK(code_of([&] {
          ls.verify_item(op.id, "Z", opinion::Verification::Verified, "a", Timestamp{});
        }) == ErrorCode::UnknownItem);

  auto update = op;
  update.id = "op-update";
  update.isUpdateOf = op.id;
  update.issuedAt = Date::parse("2026-02-01");
  CHECK(code_of([&] { ls.save_opinion(update, 0, "a"); }) == ErrorCode::InvalidOpinion);

  CHECK(ls.registry().version() == 1);
  auto reg = ls.registry().extend(cnl::PredicateTerm{"set-aside", "set aside"});
  ls.save_registry(reg, "admin");
  CHECK(ls.registry().version() == 2);
  CHECK(code_of([&] { ls.save_registry(cnl::VocabularyRegistry::builtin(), "admin"); }) ==
        ErrorCode::VersionConflict);

  auto policy = documents::policy_from_json(testsupport::data_json("policy_three_factor.json"));
  ls.save_policy("default", policy, 0, "risk");
  CHECK(ls.load_policy("default") == policy);
  auto facts = documents::facts_from_json(testsupport::data_json("sample_facts.json"));
  ls.save_facts(facts, 0, "ops");
  CHECK(ls.load_facts(facts.relationshipId) == facts);
}

TEST_CASE("lifecycle: trigger events mark dependants stale") {
  testsupport::TempDir dir;
  LifecycleStore ls(dir.path(), fixed_clock("2026-06-30T10:00:00Z"));
  auto op = testsupport::sample_opinion();
  ls.save_opinion(op, 0, "a");
  auto d = yes_determination(Date::parse("2026-06-30"));
  CHECK(ls.save_determination(d, "a") == 1);

  TriggerEvent lawChange{TriggerKind::LawChanged, "england", Timestamp::parse("2026-07-01T00:00:00Z"),
                         "insolvency reform"};
  CHECK(ls.record_event(lawChange, "a") == std::vector<std::string>{"rel-acme-bank"});
  auto doc = ls.load_determination("rel-acme-bank");
  CHECK(doc["stale"] == true);
  CHECK(doc["staleReasons"][0]["kind"] == "LawChanged");
  CHECK(doc["trace"]["flag"] == "Yes");  // never auto-flipped

  TriggerEvent trades{TriggerKind::TradesChanged, "rel-acme-bank", Timestamp{}, ""};
  CHECK(ls.record_event(trades, "a").size() == 1);
  CHECK(ls.load_determination("rel-acme-bank")["staleReasons"].size() == 2);

  TriggerEvent byOpinion{TriggerKind::OpinionUpdated, op.id, Timestamp{}, ""};
  CHECK(ls.record_event(byOpinion, "a").size() == 1);

  TriggerEvent unknown{TriggerKind::ExtremeEvent, "atlantis", Timestamp{}, ""};
  CHECK(code_of([&] { ls.record_event(unknown, "a"); }) == ErrorCode::UnknownSubject);

  bool noted = false;
  for (const auto& e : ls.documents().audit_trail()) noted = noted || e.action == "event:LawChanged";
  CHECK(noted);
  CHECK(ls.documents().verify().ok);
}

TEST_CASE("lifecycle: expiry sweep flips a 400-day-old Yes and is idempotent") {
  testsupport::TempDir dir;
  LifecycleStore ls(dir.path(), fixed_clock("2026-06-30T10:00:00Z"));
  auto d = yes_determination(Date::parse("2026-06-30"));
  ls.save_determination(d, "a");
  auto issued = testsupport::sample_opinion().issuedAt;

  CHECK(ls.sweep_expiry(issued.plus_days(365), 365, "sweeper").flipped.empty());
  auto asOf = issued.plus_days(400);
  CHECK(ls.expired_yes(asOf, 365) == std::vector<std::string>{"rel-acme-bank"});

  auto first = ls.sweep_expiry(asOf, 365, "sweeper");
  CHECK(first.flipped == std::vector<std::string>{"rel-acme-bank"});
  auto doc = ls.load_determination("rel-acme-bank");
  CHECK(doc["trace"]["flag"] == "No");
  CHECK(doc["trace"]["blockingReasons"].back()["reason"] == "OpinionExpired");
  CHECK(doc["sweep"]["previousVersion"] == 1);
  auto after_first = ls.documents().latest_version(EntityKind::Determination, "rel-acme-bank");
  auto audit_size = ls.documents().audit_trail().size();

  auto second = ls.sweep_expiry(asOf, 365, "sweeper");
  CHECK(second.flipped.empty());
  CHECK(ls.documents().latest_version(EntityKind::Determination, "rel-acme-bank") == after_first);
  CHECK(ls.documents().audit_trail().size() == audit_size);
  CHECK(ls.load_determination("rel-acme-bank") == doc);
  CHECK(ls.expired_yes(asOf, 365).empty());
}

TEST_CASE("lifecycle: manual override is respected by the sweep") {
  testsupport::TempDir dir;
  LifecycleStore ls(dir.path(), fixed_clock("2026-06-30T10:00:00Z"));
  ls.save_determination(yes_determination(Date::parse("2026-06-30")), "a");
  ls.set_override("rel-acme-bank", true, "renewal in progress", "head-of-legal");
  auto asOf = testsupport::sample_opinion().issuedAt.plus_days(400);
  auto r = ls.sweep_expiry(asOf, 365, "sweeper");
  CHECK(r.flipped.empty());
  CHECK(r.skippedOverride == std::vector<std::string>{"rel-acme-bank"});
  CHECK(ls.load_determination("rel-acme-bank")["trace"]["flag"] == "Yes");
  bool skipped = false;
  for (const auto& e : ls.documents().audit_trail())
    skipped = skipped || (e.action == "sweep_skip" && e.note.rfind("manual override", 0) == 0);
  CHECK(skipped);
  ls.set_override("rel-acme-bank", false, "", "head-of-legal");
  CHECK(ls.sweep_expiry(asOf, 365, "sweeper").flipped.size() == 1);
}
