#pragma once

// File-backed, append-only document store.
//
//   <root>/index.json                       entity -> version list (sha256, savedAt, actor)
//   <root>/audit.jsonl                      hash-chained audit entries, one per line
//   <root>/<kind>/<id>/v<NNNNNN>.json       exact bytes of each saved version
//   <root>/.lock                            cross-process write lock
//
// Versions are never rewritten or deleted. Writers pass the version their
// edit is based on; a stale base fails with VersionConflict. See
// docs/formats.md for the exact index and audit formats.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "netting/calendar.hpp"
#include "netting/cnl.hpp"
#include "netting/determination.hpp"
#include "netting/documents.hpp"
#include "netting/opinion.hpp"

namespace netting::store {

enum class EntityKind { Opinion, Policy, Facts, Determination, Registry };

std::string_view dir_name(EntityKind k);
EntityKind kind_from_name(std::string_view s);

struct VersionInfo {
  std::uint64_t version = 0;
  std::string sha256;
  Timestamp savedAt;
  std::string actor;
};

struct AuditEntry {
  std::uint64_t sequence = 0;
  std::string actor;
  std::string action;
  Timestamp timestamp;
  std::string entityKind;  // empty for store-wide entries
  std::string entityId;
  std::uint64_t version = 0;
  std::string beforeHash;
  std::string afterHash;
  std::string note;
  std::string prevHash;
  std::string entryHash;
};

struct ChainCheck {
  bool ok = true;
  std::string problem;
};

using Clock = std::function<Timestamp()>;

class DocumentStore {
 public:
  explicit DocumentStore(std::filesystem::path root, Clock clock = &Timestamp::now);

  const std::filesystem::path& root() const { return root_; }
  Timestamp now() const { return clock_(); }

  // Returns the new version number. `expectedBase` is the version the edit was
  // based on (0 for a new entity); nullopt skips the optimistic check.
  std::uint64_t save(EntityKind kind, const std::string& id, const std::string& bytes,
                     std::optional<std::uint64_t> expectedBase, const std::string& actor,
                     const std::string& action = "save", const std::string& note = {});

  // Exact bytes of a version (latest when omitted). Throws NotFound.
  std::string load(EntityKind kind, const std::string& id,
                   std::optional<std::uint64_t> version = std::nullopt) const;
  std::optional<std::uint64_t> latest_version(EntityKind kind, const std::string& id) const;
  bool exists(EntityKind kind, const std::string& id) const;
  std::vector<VersionInfo> history(EntityKind kind, const std::string& id) const;
  std::vector<std::string> list(EntityKind kind) const;

  // Store-wide audit note not tied to a saved version.
  void note(const std::string& actor, const std::string& action, const std::string& note,
            EntityKind kind, const std::string& id);

  std::vector<AuditEntry> audit_trail() const;
  std::vector<AuditEntry> audit_trail(EntityKind kind, const std::string& id) const;
  // Hash chain end-to-end plus the content hash of every stored version.
  ChainCheck verify() const;

 private:
  class WriteLock;
  documents::Json read_index() const;
  void write_index(const documents::Json& index) const;
  void append_audit(AuditEntry entry) const;
  std::filesystem::path version_path(EntityKind kind, const std::string& id,
                                     std::uint64_t version) const;

  std::filesystem::path root_;
  Clock clock_;
  mutable std::mutex write_mutex_;
};

enum class TriggerKind {
  AgreementChanged,
  LawChanged,
  TradesChanged,
  ExtremeEvent,
  OpinionUpdated,
  TimeElapsed,
};

std::string_view name(TriggerKind k);
TriggerKind trigger_from_name(std::string_view s);

// Subject is an opinion id, a relationship id or a jurisdiction id.
struct TriggerEvent {
  TriggerKind kind = TriggerKind::TimeElapsed;
  std::string subject;
  Timestamp occurredAt;
  std::string payload;
};

struct SweepResult {
  std::vector<std::string> flipped;
  std::vector<std::string> skippedOverride;
};

// Typed lifecycle operations over the document store.
class LifecycleStore {
 public:
  explicit LifecycleStore(std::filesystem::path root, Clock clock = &Timestamp::now);

  DocumentStore& documents() { return docs_; }
  const DocumentStore& documents() const { return docs_; }

  // Latest persisted vocabulary, or the built-in one.
  cnl::VocabularyRegistry registry() const;
  std::uint64_t save_registry(const cnl::VocabularyRegistry& registry, const std::string& actor);

  std::uint64_t save_opinion(const opinion::LegalOpinion& op,
                             std::optional<std::uint64_t> expectedBase, const std::string& actor);
  opinion::LegalOpinion load_opinion(const std::string& id,
                                     std::optional<std::uint64_t> version = std::nullopt) const;
  // Applies set_verification and persists the new opinion version.
  opinion::LegalOpinion verify_item(const std::string& opinionId, const std::string& itemId,
                                    opinion::Verification status, const std::string& analystId,
                                    Timestamp at, const std::string& notes = {});

  std::uint64_t save_policy(const std::string& id,
                            const determination::InstitutionRiskPolicy& policy,
                            std::optional<std::uint64_t> expectedBase, const std::string& actor);
  determination::InstitutionRiskPolicy load_policy(
      const std::string& id, std::optional<std::uint64_t> version = std::nullopt) const;

  std::uint64_t save_facts(const opinion::RelationshipFacts& facts,
                           std::optional<std::uint64_t> expectedBase, const std::string& actor);
  opinion::RelationshipFacts load_facts(const std::string& relationshipId) const;

  // Persists under the relationship id; returns the new version.
  std::uint64_t save_determination(const determination::NettingDetermination& d,
                                   const std::string& actor);
  documents::Json load_determination(const std::string& relationshipId,
                                     std::optional<std::uint64_t> version = std::nullopt) const;
  void set_override(const std::string& relationshipId, bool enabled, const std::string& note,
                    const std::string& actor);

  // Marks dependent determinations Stale; returns their ids. Throws UnknownSubject.
  std::vector<std::string> record_event(const TriggerEvent& event, const std::string& actor);

  // Rewrites expired Yes determinations as No / OpinionExpired. Idempotent for a fixed asOf.
  SweepResult sweep_expiry(Date asOf, int defaultValidityDays, const std::string& actor);

  // Non-overridden Yes determinations relying on an opinion past its validity.
  std::vector<std::string> expired_yes(Date asOf, int defaultValidityDays) const;

 private:
  DocumentStore docs_;
};

}  // namespace netting::store
