#include "netting/cnl.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

namespace netting::cnl {

namespace {

constexpr std::array<std::string_view, 5> kLikelihoodPhrases{
    "unknown whether", "definitely not the case that", "possible that",
    "more likely than not that", "definitely the case that"};
constexpr std::array<std::string_view, 5> kLikelihoodIds{
    "unknown-whether", "definitely-not-the-case-that", "possible-that",
    "more-likely-than-not-that", "definitely-the-case-that"};

constexpr std::array<std::string_view, 6> kVerbPhrases{"is",         "is not", "will be",
                                                       "will not be", "can be", "cannot be"};
constexpr std::array<std::string_view, 6> kVerbIds{"is",         "is-not", "will-be",
                                                   "will-not-be", "can-be", "cannot-be"};

constexpr std::string_view kLead = "it is";

using Tokens = std::vector<std::string>;

Tokens split(std::string_view normalized) {
  Tokens out;
  std::size_t i = 0;
  while (i < normalized.size()) {
    std::size_t j = normalized.find(' ', i);
    if (j == std::string_view::npos) j = normalized.size();
    out.emplace_back(normalized.substr(i, j - i));
    i = j + 1;
  }
  return out;
}

// One candidate phrase for a slot: its tokens and an index into the slot's list.
struct Phrase {
  Tokens tokens;
  std::size_t index;
};

// Longest first; registration order breaks ties.
std::vector<Phrase> ordered(const std::vector<std::string>& surfaces) {
  std::vector<Phrase> out;
  for (std::size_t i = 0; i < surfaces.size(); ++i) out.push_back({split(surfaces[i]), i});
  std::stable_sort(out.begin(), out.end(), [](const Phrase& a, const Phrase& b) {
    return a.tokens.size() > b.tokens.size();
  });
  return out;
}

bool matches_at(const Tokens& text, std::size_t pos, const Tokens& phrase) {
  if (pos + phrase.size() > text.size()) return false;
  return std::equal(phrase.begin(), phrase.end(), text.begin() + long(pos));
}

std::vector<std::string> as_strings(std::span<const std::string_view> views) {
  return {views.begin(), views.end()};
}

bool is_reserved(std::string_view surface) {
  if (surface == kLead) return true;
  for (auto p : kLikelihoodPhrases)
    if (surface == p) return true;
  for (auto p : kVerbPhrases)
    if (surface == p) return true;
  return false;
}

}  // namespace

std::string_view phrase(Likelihood l) { return kLikelihoodPhrases[std::size_t(l)]; }
std::string_view id(Likelihood l) { return kLikelihoodIds[std::size_t(l)]; }

Likelihood likelihood_from_id(std::string_view s) {
  for (std::size_t i = 0; i < kLikelihoodIds.size(); ++i)
    if (kLikelihoodIds[i] == s) return Likelihood(i);
  throw Error(ErrorCode::InvalidDocument, "unknown likelihood id '" + std::string(s) + "'");
}

std::string_view phrase(Verb v) { return kVerbPhrases[std::size_t(v)]; }
std::string_view id(Verb v) { return kVerbIds[std::size_t(v)]; }

Verb verb_from_id(std::string_view s) {
  for (std::size_t i = 0; i < kVerbIds.size(); ++i)
    if (kVerbIds[i] == s) return Verb(i);
  throw Error(ErrorCode::InvalidDocument, "unknown verb id '" + std::string(s) + "'");
}

ParseError::ParseError(ErrorCode code, Span span)
    : Error(code, std::string(reason_id(code)) + " at [" + std::to_string(span.begin) + "," +
                      std::to_string(span.end) + "): '" + span.text + "'"),
      span_(std::move(span)) {}

std::string normalize(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(char(std::tolower(c)));
  }
  while (!out.empty() && (out.back() == '.' || out.back() == ' ')) out.pop_back();
  return out;
}

// ---------------------------------------------------------------------------
// Registry

struct VocabularyRegistry::Data {
  std::uint64_t version = 1;
  std::vector<ObjectTerm> objects;
  std::vector<PredicateTerm> predicates;
  // Slot candidates, longest first.
  std::vector<Phrase> likelihood_slot;
  std::vector<Phrase> object_slot;
  std::vector<Phrase> verb_slot;
  std::vector<Phrase> predicate_slot;

  void index() {
    likelihood_slot = ordered(as_strings(kLikelihoodPhrases));
    verb_slot = ordered(as_strings(kVerbPhrases));
    std::vector<std::string> o, p;
    for (const auto& t : objects) o.push_back(t.surface);
    for (const auto& t : predicates) p.push_back(t.surface);
    object_slot = ordered(o);
    predicate_slot = ordered(p);
  }
};

namespace {

const std::vector<ObjectTerm>& builtin_objects() {
  static const std::vector<ObjectTerm> terms{
      {"transactions", "transactions"},
      {"collateral", "collateral"},
      {"enforcement-of-close-out-netting", "enforcement of close-out netting"}};
  return terms;
}

const std::vector<PredicateTerm>& builtin_predicates() {
  static const std::vector<PredicateTerm> terms{
      {"cherry-picked", "cherry-picked"}, {"enforceable", "enforceable"}, {"stayed", "stayed"}};
  return terms;
}

struct Failure {
  ErrorCode code = ErrorCode::NoLeadingItIs;
  int depth = -1;
  std::size_t pos = 0;
  std::size_t end = 0;
};

// Backtracking matcher over the four slots. Candidates are tried longest first,
// so the first complete parse found is the longest-phrase-first parse.
class Matcher {
 public:
  Matcher(const VocabularyRegistry::Data& d, const Tokens& tokens) : d_(d), t_(tokens) {}

  // Collects up to `limit` complete parses.
  void run(std::size_t limit) {
    limit_ = limit;
    if (t_.size() < 2 || t_[0] != "it" || t_[1] != "is") {
      fail(ErrorCode::NoLeadingItIs, 0, 0, std::min<std::size_t>(t_.size(), 2));
      return;
    }
    slot(0, 2);
  }

  const std::vector<std::array<std::size_t, 4>>& parses() const { return parses_; }
  const Failure& failure() const { return failure_; }

 private:
  static constexpr std::array<ErrorCode, 5> kSlotErrors{
      ErrorCode::UnknownLikelihood, ErrorCode::UnknownObject, ErrorCode::UnknownVerb,
      ErrorCode::UnknownPredicate, ErrorCode::TrailingGarbage};

  const std::vector<Phrase>& candidates(int depth) const {
    switch (depth) {
      case 0: return d_.likelihood_slot;
      case 1: return d_.object_slot;
      case 2: return d_.verb_slot;
      default: return d_.predicate_slot;
    }
  }

  void slot(int depth, std::size_t pos) {
    if (parses_.size() >= limit_) return;
    if (depth == 4) {
      if (pos == t_.size()) {
        parses_.push_back(chosen_);
      } else {
        fail(ErrorCode::TrailingGarbage, 4, pos, t_.size());
      }
      return;
    }
    bool any = false;
    for (const auto& c : candidates(depth)) {
      if (!matches_at(t_, pos, c.tokens)) continue;
      any = true;
      chosen_[std::size_t(depth)] = c.index;
      slot(depth + 1, pos + c.tokens.size());
      if (parses_.size() >= limit_) return;
    }
    if (!any) fail(kSlotErrors[std::size_t(depth)], depth, pos, t_.size());
  }

  void fail(ErrorCode code, int depth, std::size_t pos, std::size_t end) {
    if (depth > failure_.depth || (depth == failure_.depth && pos > failure_.pos))
      failure_ = {code, depth, pos, end};
  }

  const VocabularyRegistry::Data& d_;
  const Tokens& t_;
  std::size_t limit_ = 1;
  std::array<std::size_t, 4> chosen_{};
  std::vector<std::array<std::size_t, 4>> parses_;
  Failure failure_;
};

Span token_span(const Tokens& tokens, std::size_t from, std::size_t to) {
  std::size_t begin = 0;
  for (std::size_t i = 0; i < from && i < tokens.size(); ++i) begin += tokens[i].size() + 1;
  std::string text;
  for (std::size_t i = from; i < to && i < tokens.size(); ++i) {
    if (!text.empty()) text.push_back(' ');
    text += tokens[i];
  }
  return {begin, begin + text.size(), text};
}

std::string render_with(const VocabularyRegistry::Data& d, Likelihood l, std::size_t object,
                        Verb v, std::size_t predicate) {
  std::string out = "It is ";
  out += phrase(l);
  out += ' ';
  out += d.objects[object].surface;
  out += ' ';
  out += phrase(v);
  out += ' ';
  out += d.predicates[predicate].surface;
  return out;
}

// Every combination of the registry must render to text that parses back to
// exactly that combination and nothing else.
bool unambiguous(const VocabularyRegistry::Data& d) {
  for (auto l : kLikelihoods)
    for (std::size_t o = 0; o < d.objects.size(); ++o)
      for (auto v : kVerbs)
        for (std::size_t p = 0; p < d.predicates.size(); ++p) {
          Tokens tokens = split(normalize(render_with(d, l, o, v, p)));
          Matcher m(d, tokens);
          m.run(2);
          if (m.parses().size() != 1) return false;
        }
  return true;
}

std::string clean_surface(std::string_view surface) {
  std::string s = normalize(surface);
  if (s.empty()) throw Error(ErrorCode::InvalidTerm, "term surface is empty");
  return s;
}

void check_id(std::string_view id) {
  if (id.empty()) throw Error(ErrorCode::InvalidTerm, "term id is empty");
  for (unsigned char c : id)
    if (std::isspace(c)) throw Error(ErrorCode::InvalidTerm, "term id contains whitespace");
}

template <class Term>
void check_new_term(const VocabularyRegistry::Data& d, const Term& t) {
  check_id(t.id);
  if (is_reserved(t.surface))
    throw Error(ErrorCode::ReservedPhrase, "'" + t.surface + "' is a reserved grammar phrase");
  auto clash = [&](const auto& existing) {
    return existing.id == t.id || existing.surface == t.surface;
  };
  if (std::any_of(d.objects.begin(), d.objects.end(), clash) ||
      std::any_of(d.predicates.begin(), d.predicates.end(), clash))
    throw Error(ErrorCode::SurfaceCollision,
                "term '" + t.id + "' / '" + t.surface + "' collides with a registered term");
}

}  // namespace

VocabularyRegistry VocabularyRegistry::builtin() {
  static const std::shared_ptr<const Data> kBuiltin = [] {
    auto d = std::make_shared<Data>();
    d->objects = builtin_objects();
    d->predicates = builtin_predicates();
    d->index();
    return d;
  }();
  return VocabularyRegistry(kBuiltin);
}

VocabularyRegistry VocabularyRegistry::restore(std::uint64_t version,
                                               std::vector<ObjectTerm> objects,
                                               std::vector<PredicateTerm> predicates) {
  if (version < 1) throw Error(ErrorCode::InvalidDocument, "registry version must be >= 1");
  for (const auto& b : builtin_objects())
    if (std::find(objects.begin(), objects.end(), b) == objects.end())
      throw Error(ErrorCode::InvalidDocument, "built-in object '" + b.id + "' missing");
  for (const auto& b : builtin_predicates())
    if (std::find(predicates.begin(), predicates.end(), b) == predicates.end())
      throw Error(ErrorCode::InvalidDocument, "built-in predicate '" + b.id + "' missing");

  // Replay the terms through the same checks extend() applies.
  auto d = std::make_shared<Data>();
  for (auto& o : objects) {
    o.surface = clean_surface(o.surface);
    check_new_term(*d, o);
    d->objects.push_back(o);
  }
  for (auto& p : predicates) {
    p.surface = clean_surface(p.surface);
    check_new_term(*d, p);
    d->predicates.push_back(p);
  }
  d->version = version;
  d->index();
  if (!unambiguous(*d))
    throw Error(ErrorCode::SurfaceCollision, "registry terms make some sentence ambiguous");
  return VocabularyRegistry(std::move(d));
}

std::uint64_t VocabularyRegistry::version() const { return data_->version; }
std::span<const ObjectTerm> VocabularyRegistry::objects() const { return data_->objects; }
std::span<const PredicateTerm> VocabularyRegistry::predicates() const {
  return data_->predicates;
}

const ObjectTerm* VocabularyRegistry::find_object(std::string_view id) const {
  for (const auto& t : data_->objects)
    if (t.id == id) return &t;
  return nullptr;
}

const PredicateTerm* VocabularyRegistry::find_predicate(std::string_view id) const {
  for (const auto& t : data_->predicates)
    if (t.id == id) return &t;
  return nullptr;
}

VocabularyRegistry VocabularyRegistry::extend(ObjectTerm term) const {
  term.surface = clean_surface(term.surface);
  check_new_term(*data_, term);
  auto d = std::make_shared<Data>(*data_);
  d->objects.push_back(std::move(term));
  d->version = data_->version + 1;
  d->index();
  if (!unambiguous(*d))
    throw Error(ErrorCode::SurfaceCollision,
                "object '" + d->objects.back().surface + "' makes some sentence ambiguous");
  return VocabularyRegistry(std::move(d));
}

VocabularyRegistry VocabularyRegistry::extend(PredicateTerm term) const {
  term.surface = clean_surface(term.surface);
  check_new_term(*data_, term);
  auto d = std::make_shared<Data>(*data_);
  d->predicates.push_back(std::move(term));
  d->version = data_->version + 1;
  d->index();
  if (!unambiguous(*d))
    throw Error(ErrorCode::SurfaceCollision,
                "predicate '" + d->predicates.back().surface + "' makes some sentence ambiguous");
  return VocabularyRegistry(std::move(d));
}

// ---------------------------------------------------------------------------

Sentence parse_sentence(std::string_view text, const VocabularyRegistry& registry) {
  std::string norm = normalize(text);
  if (norm.empty()) throw ParseError(ErrorCode::EmptyInput, {0, 0, ""});
  Tokens tokens = split(norm);

  const auto& d = *registry.data_;
  Matcher m(d, tokens);
  m.run(1);
  if (m.parses().empty()) {
    const auto& f = m.failure();
    throw ParseError(f.code, token_span(tokens, f.pos, f.end));
  }
  const auto& p = m.parses().front();
  return Sentence{Likelihood(p[0]), d.objects[p[1]].id, Verb(p[2]), d.predicates[p[3]].id};
}

std::string render_sentence(const Sentence& s, const VocabularyRegistry& registry) {
  const ObjectTerm* o = registry.find_object(s.object);
  if (!o) throw Error(ErrorCode::DanglingReference, "object id '" + s.object + "' not in registry");
  const PredicateTerm* p = registry.find_predicate(s.predicate);
  if (!p)
    throw Error(ErrorCode::DanglingReference,
                "predicate id '" + s.predicate + "' not in registry");
  std::string out = "It is ";
  out += phrase(s.likelihood);
  out += ' ';
  out += o->surface;
  out += ' ';
  out += phrase(s.verb);
  out += ' ';
  out += p->surface;
  return out;
}

}  // namespace netting::cnl
