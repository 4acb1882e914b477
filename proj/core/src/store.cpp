#include "netting/store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "netting/error.hpp"
#include "sha256.hpp"

namespace netting::store {

namespace fs = std::filesystem;
using documents::Json;

namespace {

constexpr std::array<std::string_view, 5> kDirNames{"opinions", "policies", "facts",
                                                    "determinations", "registries"};
constexpr std::array<std::string_view, 6> kTriggerNames{
    "AgreementChanged", "LawChanged", "TradesChanged", "ExtremeEvent", "OpinionUpdated",
    "TimeElapsed"};
const std::string kGenesis(64, '0');
constexpr const char* kRegistryId = "default";

void check_id(const std::string& id) {
  bool ok = !id.empty() && id.size() <= 128 && id[0] != '.';
  for (char c : id)
    ok = ok && (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.');
  if (!ok) throw Error(ErrorCode::InvalidDocument, "invalid entity id '" + id + "'");
}

std::string read_all(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::NotFound, "cannot read '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_atomic(const fs::path& p, const std::string& bytes) {
  static std::atomic<unsigned> counter{0};
  fs::path tmp = p;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << bytes;
    if (!out) throw Error(ErrorCode::IntegrityFailure, "cannot write '" + tmp.string() + "'");
  }
  fs::rename(tmp, p);
}

Json audit_body(const AuditEntry& e) {
  return {{"sequence", e.sequence},       {"actor", e.actor},       {"action", e.action},
          {"timestamp", e.timestamp.iso()}, {"entityKind", e.entityKind},
          {"entityId", e.entityId},       {"version", e.version},   {"beforeHash", e.beforeHash},
          {"afterHash", e.afterHash},     {"note", e.note},         {"prevHash", e.prevHash}};
}

std::string chain_hash(const AuditEntry& e) {
  return detail::sha256_hex(e.prevHash + "\n" + audit_body(e).dump());
}

AuditEntry audit_from_json(const Json& j) {
  AuditEntry e;
  e.sequence = j.at("sequence").get<std::uint64_t>();
  e.actor = j.at("actor").get<std::string>();
  e.action = j.at("action").get<std::string>();
  e.timestamp = Timestamp::parse(j.at("timestamp").get<std::string>());
  e.entityKind = j.at("entityKind").get<std::string>();
  e.entityId = j.at("entityId").get<std::string>();
  e.version = j.at("version").get<std::uint64_t>();
  e.beforeHash = j.at("beforeHash").get<std::string>();
  e.afterHash = j.at("afterHash").get<std::string>();
  e.note = j.at("note").get<std::string>();
  e.prevHash = j.at("prevHash").get<std::string>();
  e.entryHash = j.at("entryHash").get<std::string>();
  return e;
}

std::vector<AuditEntry> read_audit(const fs::path& p) {
  std::vector<AuditEntry> out;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(audit_from_json(Json::parse(line)));
    } catch (const std::exception& e) {
      throw Error(ErrorCode::IntegrityFailure, std::string("corrupt audit line: ") + e.what());
    }
  }
  return out;
}

}  // namespace

std::string_view dir_name(EntityKind k) { return kDirNames[std::size_t(k)]; }

EntityKind kind_from_name(std::string_view s) {
  for (std::size_t i = 0; i < kDirNames.size(); ++i)
    if (kDirNames[i] == s) return EntityKind(i);
  throw Error(ErrorCode::InvalidDocument, "unknown entity kind '" + std::string(s) + "'");
}

std::string_view name(TriggerKind k) { return kTriggerNames[std::size_t(k)]; }

TriggerKind trigger_from_name(std::string_view s) {
  for (std::size_t i = 0; i < kTriggerNames.size(); ++i)
    if (kTriggerNames[i] == s) return TriggerKind(i);
  throw Error(ErrorCode::InvalidDocument, "unknown trigger kind '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------

class DocumentStore::WriteLock {
 public:
  explicit WriteLock(const DocumentStore& s) : guard_(s.write_mutex_) {
    fd_ = ::open((s.root_ / ".lock").c_str(), O_CREAT | O_RDWR, 0644);
    if (fd_ < 0 || ::flock(fd_, LOCK_EX) != 0)
      throw Error(ErrorCode::IntegrityFailure, "cannot lock store at " + s.root_.string());
  }
  ~WriteLock() {
    if (fd_ >= 0) {
      ::flock(fd_, LOCK_UN);
      ::close(fd_);
    }
  }
  WriteLock(const WriteLock&) = delete;
  WriteLock& operator=(const WriteLock&) = delete;

 private:
  std::lock_guard<std::mutex> guard_;
  int fd_ = -1;
};

DocumentStore::DocumentStore(fs::path root, Clock clock)
    : root_(std::move(root)), clock_(std::move(clock)) {
  fs::create_directories(root_);
  for (auto d : kDirNames) fs::create_directories(root_ / d);
}

fs::path DocumentStore::version_path(EntityKind kind, const std::string& id,
                                     std::uint64_t version) const {
  char name[32];
  std::snprintf(name, sizeof name, "v%06llu.json", static_cast<unsigned long long>(version));
  return root_ / dir_name(kind) / id / name;
}

Json DocumentStore::read_index() const {
  fs::path p = root_ / "index.json";
  if (!fs::exists(p)) return {{"formatVersion", 1}, {"entities", Json::object()}};
  try {
    return Json::parse(read_all(p));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::IntegrityFailure, std::string("corrupt index: ") + e.what());
  }
}

void DocumentStore::write_index(const Json& index) const {
  write_atomic(root_ / "index.json", documents::canonical(index));
}

void DocumentStore::append_audit(AuditEntry e) const {
  fs::path p = root_ / "audit.jsonl";
  auto existing = read_audit(p);
  e.sequence = existing.empty() ? 1 : existing.back().sequence + 1;
  e.prevHash = existing.empty() ? kGenesis : existing.back().entryHash;
  e.entryHash = chain_hash(e);
  Json line = audit_body(e);
  line["entryHash"] = e.entryHash;
  std::ofstream out(p, std::ios::app | std::ios::binary);
  out << line.dump() << "\n";
  if (!out) throw Error(ErrorCode::IntegrityFailure, "cannot append audit log");
}

std::uint64_t DocumentStore::save(EntityKind kind, const std::string& id,
                                  const std::string& bytes,
                                  std::optional<std::uint64_t> expectedBase,
                                  const std::string& actor, const std::string& action,
                                  const std::string& note) {
  check_id(id);
  WriteLock lock(*this);
  Json index = read_index();
  Json& versions = index["entities"][std::string(dir_name(kind))][id];
  if (versions.is_null()) versions = Json::array();
  std::uint64_t current = versions.empty() ? 0 : versions.back()["version"].get<std::uint64_t>();
  if (expectedBase && *expectedBase != current)
    throw Error(ErrorCode::VersionConflict,
                std::string(dir_name(kind)) + "/" + id + " is at version " +
                    std::to_string(current) + ", edit was based on " +
                    std::to_string(*expectedBase));
  std::uint64_t next = current + 1;
  fs::path path = version_path(kind, id, next);
  fs::create_directories(path.parent_path());

  // Exclusive create: never overwrite an existing version.
  std::FILE* f = std::fopen(path.c_str(), "wbx");
  if (!f)
    throw Error(ErrorCode::VersionConflict,
                std::string(dir_name(kind)) + "/" + id + " version " + std::to_string(next) +
                    " already exists");
  bool ok = std::fwrite(bytes.data(), 1, bytes.size(), f) == bytes.size();
  ok = (std::fclose(f) == 0) && ok;
  if (!ok) throw Error(ErrorCode::IntegrityFailure, "cannot write " + path.string());

  Timestamp at = clock_();
  std::string sha = detail::sha256_hex(bytes);
  std::string before = versions.empty() ? "" : versions.back()["sha256"].get<std::string>();
  versions.push_back({{"version", next}, {"sha256", sha}, {"savedAt", at.iso()}, {"actor", actor}});
  write_index(index);

  AuditEntry e;
  e.actor = actor;
  e.action = action;
  e.timestamp = at;
  e.entityKind = std::string(dir_name(kind));
  e.entityId = id;
  e.version = next;
  e.beforeHash = before;
  e.afterHash = sha;
  e.note = note;
  append_audit(std::move(e));
  return next;
}

std::string DocumentStore::load(EntityKind kind, const std::string& id,
                                std::optional<std::uint64_t> version) const {
  check_id(id);
  auto latest = latest_version(kind, id);
  if (!latest)
    throw Error(ErrorCode::NotFound, std::string(dir_name(kind)) + "/" + id + " not found");
  std::uint64_t v = version.value_or(*latest);
  if (v < 1 || v > *latest)
    throw Error(ErrorCode::NotFound, std::string(dir_name(kind)) + "/" + id + " has no version " +
                                         std::to_string(v));
  return read_all(version_path(kind, id, v));
}

std::optional<std::uint64_t> DocumentStore::latest_version(EntityKind kind,
                                                           const std::string& id) const {
  Json index = read_index();
  const Json& kinds = index["entities"];
  auto k = kinds.find(std::string(dir_name(kind)));
  if (k == kinds.end()) return std::nullopt;
  auto e = k->find(id);
  if (e == k->end() || e->empty()) return std::nullopt;
  return e->back()["version"].get<std::uint64_t>();
}

bool DocumentStore::exists(EntityKind kind, const std::string& id) const {
  return latest_version(kind, id).has_value();
}

std::vector<VersionInfo> DocumentStore::history(EntityKind kind, const std::string& id) const {
  Json index = read_index();
  const Json& kinds = index["entities"];
  auto k = kinds.find(std::string(dir_name(kind)));
  if (k == kinds.end() || !k->contains(id))
    throw Error(ErrorCode::NotFound, std::string(dir_name(kind)) + "/" + id + " not found");
  std::vector<VersionInfo> out;
  for (const auto& v : (*k)[id])
    out.push_back({v["version"].get<std::uint64_t>(), v["sha256"].get<std::string>(),
                   Timestamp::parse(v["savedAt"].get<std::string>()),
                   v["actor"].get<std::string>()});
  return out;
}

std::vector<std::string> DocumentStore::list(EntityKind kind) const {
  Json index = read_index();
  std::vector<std::string> out;
  auto k = index["entities"].find(std::string(dir_name(kind)));
  if (k != index["entities"].end())
    for (const auto& [id, versions] : k->items()) out.push_back(id);
  return out;
}

void DocumentStore::note(const std::string& actor, const std::string& action,
                         const std::string& note, EntityKind kind, const std::string& id) {
  WriteLock lock(*this);
  AuditEntry e;
  e.actor = actor;
  e.action = action;
  e.timestamp = clock_();
  e.entityKind = std::string(dir_name(kind));
  e.entityId = id;
  e.version = latest_version(kind, id).value_or(0);
  e.note = note;
  append_audit(std::move(e));
}

std::vector<AuditEntry> DocumentStore::audit_trail() const {
  return read_audit(root_ / "audit.jsonl");
}

std::vector<AuditEntry> DocumentStore::audit_trail(EntityKind kind, const std::string& id) const {
  auto all = audit_trail();
  std::erase_if(all, [&](const AuditEntry& e) {
    return e.entityKind != dir_name(kind) || e.entityId != id;
  });
  return all;
}

ChainCheck DocumentStore::verify() const {
  std::vector<AuditEntry> entries;
  try {
    entries = audit_trail();
  } catch (const Error& e) {
    return {false, e.what()};
  }
  std::string prev = kGenesis;
  std::uint64_t seq = 0;
  for (const auto& e : entries) {
    if (e.sequence != ++seq)
      return {false, "audit sequence gap at " + std::to_string(e.sequence)};
    if (e.prevHash != prev) return {false, "audit chain broken at " + std::to_string(e.sequence)};
    if (chain_hash(e) != e.entryHash)
      return {false, "audit entry " + std::to_string(e.sequence) + " was altered"};
    prev = e.entryHash;
  }
  Json index = read_index();
  for (const auto& [kind, ids] : index["entities"].items())
    for (const auto& [id, versions] : ids.items())
      for (const auto& v : versions) {
        auto version = v["version"].get<std::uint64_t>();
        fs::path p = version_path(kind_from_name(kind), id, version);
        std::string bytes;
        try {
          bytes = read_all(p);
        } catch (const Error&) {
          return {false, "missing " + p.string()};
        }
        if (detail::sha256_hex(bytes) != v["sha256"].get<std::string>())
          return {false, kind + "/" + id + " v" + std::to_string(version) + " content altered"};
      }
  return {};
}

// ---------------------------------------------------------------------------

namespace {

bool contains(const Json& arr, const std::string& s) {
  return arr.is_array() && std::find(arr.begin(), arr.end(), Json(s)) != arr.end();
}

// Age in days of the oldest supporting opinion beyond `validity`, if any.
std::optional<std::string> expired_opinion(const Json& trace, Date asOf, int validity) {
  for (const auto& c : trace["opinionChecks"]) {
    Date issued = Date::parse(c["issuedAt"].get<std::string>());
    long age = days_between(issued, asOf);
    if (age > validity)
      return c["opinionId"].get<std::string>() + " is " + std::to_string(age) +
             " days old (validity " + std::to_string(validity) + ")";
  }
  return std::nullopt;
}

int validity_of(const Json& trace, int fallback) {
  const Json& p = trace["policy"];
  return p.is_object() && p.contains("validityPeriodDays") ? p["validityPeriodDays"].get<int>()
                                                            : fallback;
}

}  // namespace

LifecycleStore::LifecycleStore(fs::path root, Clock clock)
    : docs_(std::move(root), std::move(clock)) {}

cnl::VocabularyRegistry LifecycleStore::registry() const {
  if (!docs_.exists(EntityKind::Registry, kRegistryId)) return cnl::VocabularyRegistry::builtin();
  return documents::registry_from_json(
      documents::parse(docs_.load(EntityKind::Registry, kRegistryId)));
}

std::uint64_t LifecycleStore::save_registry(const cnl::VocabularyRegistry& registry,
                                            const std::string& actor) {
  auto current = this->registry();
  if (registry.version() <= current.version() && docs_.exists(EntityKind::Registry, kRegistryId))
    throw Error(ErrorCode::VersionConflict, "vocabulary version must increase (stored " +
                                                std::to_string(current.version()) + ")");
  return docs_.save(EntityKind::Registry, kRegistryId,
                    documents::canonical(documents::to_json(registry)), std::nullopt, actor,
                    "save_registry");
}

std::uint64_t LifecycleStore::save_opinion(const opinion::LegalOpinion& op,
                                           std::optional<std::uint64_t> expectedBase,
                                           const std::string& actor) {
  auto reg = registry();
  opinion::validate(op, reg, docs_.now().date());
  if (op.isUpdateOf && docs_.exists(EntityKind::Opinion, *op.isUpdateOf))
    opinion::validate_update(op, load_opinion(*op.isUpdateOf));
  return docs_.save(EntityKind::Opinion, op.id, documents::canonical(documents::to_json(op, reg)),
                    expectedBase, actor, "save_opinion");
}

opinion::LegalOpinion LifecycleStore::load_opinion(const std::string& id,
                                                   std::optional<std::uint64_t> version) const {
  if (!docs_.exists(EntityKind::Opinion, id))
    throw Error(ErrorCode::OpinionNotFound, "opinion '" + id + "' not found");
  return documents::opinion_from_json(documents::parse(docs_.load(EntityKind::Opinion, id, version)),
                                      registry());
}

opinion::LegalOpinion LifecycleStore::verify_item(const std::string& opinionId,
                                                  const std::string& itemId,
                                                  opinion::Verification status,
                                                  const std::string& analystId, Timestamp at,
                                                  const std::string& notes) {
  auto base = docs_.latest_version(EntityKind::Opinion, opinionId);
  auto current = load_opinion(opinionId);
  auto updated = opinion::set_verification(current, itemId, status, analystId, at, notes);
  auto reg = registry();
  docs_.save(EntityKind::Opinion, opinionId, documents::canonical(documents::to_json(updated, reg)),
             base, analystId, "set_verification",
             itemId + " -> " + std::string(opinion::name(status)));
  return updated;
}

std::uint64_t LifecycleStore::save_policy(const std::string& id,
                                          const determination::InstitutionRiskPolicy& policy,
                                          std::optional<std::uint64_t> expectedBase,
                                          const std::string& actor) {
  determination::validate(policy);
  return docs_.save(EntityKind::Policy, id, documents::canonical(documents::to_json(policy)),
                    expectedBase, actor, "save_policy");
}

determination::InstitutionRiskPolicy LifecycleStore::load_policy(
    const std::string& id, std::optional<std::uint64_t> version) const {
  return documents::policy_from_json(documents::parse(docs_.load(EntityKind::Policy, id, version)));
}

std::uint64_t LifecycleStore::save_facts(const opinion::RelationshipFacts& facts,
                                         std::optional<std::uint64_t> expectedBase,
                                         const std::string& actor) {
  opinion::validate(facts);
  return docs_.save(EntityKind::Facts, facts.relationshipId,
                    documents::canonical(documents::to_json(facts)), expectedBase, actor,
                    "save_facts");
}

opinion::RelationshipFacts LifecycleStore::load_facts(const std::string& relationshipId) const {
  return documents::facts_from_json(documents::parse(docs_.load(EntityKind::Facts, relationshipId)));
}

std::uint64_t LifecycleStore::save_determination(const determination::NettingDetermination& d,
                                                 const std::string& actor) {
  Json doc = documents::determination_document(d, registry());
  auto base = docs_.latest_version(EntityKind::Determination, d.relationshipId);
  if (base) {
    // A fresh determination keeps any override set on the relationship.
    Json prev = documents::parse(docs_.load(EntityKind::Determination, d.relationshipId));
    doc["manualOverride"] = prev.value("manualOverride", false);
    doc["overrideNote"] = prev.value("overrideNote", "");
  }
  return docs_.save(EntityKind::Determination, d.relationshipId, documents::canonical(doc),
                    base.value_or(0), actor, "determine",
                    "flag " + std::string(determination::name(d.flag)));
}

Json LifecycleStore::load_determination(const std::string& relationshipId,
                                        std::optional<std::uint64_t> version) const {
  return documents::parse(docs_.load(EntityKind::Determination, relationshipId, version));
}

void LifecycleStore::set_override(const std::string& relationshipId, bool enabled,
                                  const std::string& note, const std::string& actor) {
  auto base = docs_.latest_version(EntityKind::Determination, relationshipId);
  Json doc = load_determination(relationshipId);
  doc["manualOverride"] = enabled;
  doc["overrideNote"] = note;
  docs_.save(EntityKind::Determination, relationshipId, documents::canonical(doc), base, actor,
             "set_override", enabled ? "override on: " + note : "override off");
}

std::vector<std::string> LifecycleStore::record_event(const TriggerEvent& event,
                                                      const std::string& actor) {
  const std::string& s = event.subject;
  bool known = !s.empty() && (docs_.exists(EntityKind::Opinion, s) ||
                              docs_.exists(EntityKind::Facts, s) ||
                              docs_.exists(EntityKind::Determination, s));

  std::vector<std::pair<std::string, Json>> affected;
  for (const auto& id : docs_.list(EntityKind::Determination)) {
    Json doc = load_determination(id);
    const Json& trace = doc["trace"];
    bool depends = trace["relationshipId"] == s || contains(trace["opinionIds"], s) ||
                   contains(trace["coverage"]["required"], s);
    if (depends) affected.emplace_back(id, std::move(doc));
    known = known || depends;
  }
  if (!known && !s.empty()) {
    for (const auto& id : docs_.list(EntityKind::Opinion)) {
      auto op = load_opinion(id);
      if (op.scope.jurisdictions.contains(s) || op.scope.governingLaw == s) {
        known = true;
        break;
      }
    }
  }
  if (!known) throw Error(ErrorCode::UnknownSubject, "no opinion, relationship or jurisdiction '" + s + "'");

  std::string what = std::string(name(event.kind)) + " on " + s + " at " + event.occurredAt.iso();
  docs_.note(actor, "event:" + std::string(name(event.kind)),
             what + (event.payload.empty() ? "" : ": " + event.payload),
             affected.empty() ? EntityKind::Opinion : EntityKind::Determination,
             affected.empty() ? s : affected.front().first);

  std::vector<std::string> ids;
  for (auto& [id, doc] : affected) {
    auto base = docs_.latest_version(EntityKind::Determination, id);
    doc["stale"] = true;
    doc["staleReasons"].push_back({{"kind", name(event.kind)},
                                   {"subject", s},
                                   {"occurredAt", event.occurredAt.iso()},
                                   {"payload", event.payload}});
    docs_.save(EntityKind::Determination, id, documents::canonical(doc), base, actor, "mark_stale",
               what);
    ids.push_back(id);
  }
  return ids;
}

SweepResult LifecycleStore::sweep_expiry(Date asOf, int defaultValidityDays,
                                         const std::string& actor) {
  SweepResult result;
  for (const auto& id : docs_.list(EntityKind::Determination)) {
    auto base = docs_.latest_version(EntityKind::Determination, id);
    Json doc = load_determination(id);
    Json& trace = doc["trace"];
    if (trace["flag"] != "Yes") continue;
    auto expired = expired_opinion(trace, asOf, validity_of(trace, defaultValidityDays));
    if (!expired) continue;
    if (doc.value("manualOverride", false)) {
      docs_.note(actor, "sweep_skip", "manual override: " + *expired, EntityKind::Determination, id);
      result.skippedOverride.push_back(id);
      continue;
    }
    trace["flag"] = "No";
    trace["blockingReasons"].push_back({{"reason", "OpinionExpired"}, {"detail", *expired}});
    doc["sweep"] = {{"asOfDate", asOf.iso()}, {"previousVersion", *base}};
    docs_.save(EntityKind::Determination, id, documents::canonical(doc), base, actor,
               "sweep_expiry", *expired);
    result.flipped.push_back(id);
  }
  return result;
}

std::vector<std::string> LifecycleStore::expired_yes(Date asOf, int defaultValidityDays) const {
  std::vector<std::string> out;
  for (const auto& id : docs_.list(EntityKind::Determination)) {
    Json doc = load_determination(id);
    const Json& trace = doc["trace"];
    if (trace["flag"] == "Yes" && !doc.value("manualOverride", false) &&
        expired_opinion(trace, asOf, validity_of(trace, defaultValidityDays)))
      out.push_back(id);
  }
  return out;
}

}  // namespace netting::store
