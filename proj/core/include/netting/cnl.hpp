#pragma once

// Controlled natural language for netting-opinion conclusions.
//
// A conclusion sentence is the fixed template
//
//     It is <likelihood> <object> <verb> <predicate>
//
// where likelihood and verb come from closed sets and object/predicate come
// from an extensible VocabularyRegistry. Parsing is case-insensitive,
// collapses whitespace and ignores a trailing period; rendering is canonical.

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "netting/error.hpp"

namespace netting::cnl {

enum class Likelihood : std::uint8_t {
  UnknownWhether,
  DefinitelyNotTheCaseThat,
  PossibleThat,
  MoreLikelyThanNotThat,
  DefinitelyTheCaseThat,
};

inline constexpr std::array<Likelihood, 5> kLikelihoods{
    Likelihood::UnknownWhether, Likelihood::DefinitelyNotTheCaseThat, Likelihood::PossibleThat,
    Likelihood::MoreLikelyThanNotThat, Likelihood::DefinitelyTheCaseThat};

std::string_view phrase(Likelihood l);
std::string_view id(Likelihood l);
Likelihood likelihood_from_id(std::string_view id);

enum class Polarity : std::uint8_t { Positive, Negated };

enum class Verb : std::uint8_t { Is, IsNot, WillBe, WillNotBe, CanBe, CannotBe };

inline constexpr std::array<Verb, 6> kVerbs{Verb::Is,     Verb::IsNot, Verb::WillBe,
                                            Verb::WillNotBe, Verb::CanBe, Verb::CannotBe};

std::string_view phrase(Verb v);
std::string_view id(Verb v);
Verb verb_from_id(std::string_view id);
constexpr Polarity polarity(Verb v) {
  return (v == Verb::IsNot || v == Verb::WillNotBe || v == Verb::CannotBe) ? Polarity::Negated
                                                                           : Polarity::Positive;
}

struct ObjectTerm {
  std::string id;
  std::string surface;
  friend bool operator==(const ObjectTerm&, const ObjectTerm&) = default;
};

struct PredicateTerm {
  std::string id;
  std::string surface;
  friend bool operator==(const PredicateTerm&, const PredicateTerm&) = default;
};

// Object and predicate are held by registry id.
struct Sentence {
  Likelihood likelihood{};
  std::string object;
  Verb verb{};
  std::string predicate;
  friend bool operator==(const Sentence&, const Sentence&) = default;
};

// Byte range [begin, end) within the normalized input.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string text;
};

class ParseError : public Error {
 public:
  ParseError(ErrorCode code, Span span);
  const Span& span() const noexcept { return span_; }

 private:
  Span span_;
};

// Case-fold (ASCII), collapse internal whitespace, trim, drop trailing periods.
std::string normalize(std::string_view text);

// Immutable vocabulary of objects and predicates. Copies share storage.
class VocabularyRegistry {
 public:
  // The built-in vocabulary at version 1.
  static VocabularyRegistry builtin();
  // Rebuild a persisted registry; the built-in terms must be present unchanged.
  static VocabularyRegistry restore(std::uint64_t version, std::vector<ObjectTerm> objects,
                                    std::vector<PredicateTerm> predicates);

  std::uint64_t version() const;
  std::span<const ObjectTerm> objects() const;
  std::span<const PredicateTerm> predicates() const;

  const ObjectTerm* find_object(std::string_view id) const;
  const PredicateTerm* find_predicate(std::string_view id) const;

  // New registry at version()+1. Throws SurfaceCollision, ReservedPhrase or InvalidTerm.
  VocabularyRegistry extend(ObjectTerm term) const;
  VocabularyRegistry extend(PredicateTerm term) const;

  struct Data;

 private:
  friend Sentence parse_sentence(std::string_view text, const VocabularyRegistry& registry);

  explicit VocabularyRegistry(std::shared_ptr<const Data> data) : data_(std::move(data)) {}
  std::shared_ptr<const Data> data_;
};

Sentence parse_sentence(std::string_view text, const VocabularyRegistry& registry);
std::string render_sentence(const Sentence& s, const VocabularyRegistry& registry);

}  // namespace netting::cnl
