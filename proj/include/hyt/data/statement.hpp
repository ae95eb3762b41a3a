#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hyt::data {

using EntityId = std::int32_t;
using RelationId = std::int32_t;

struct Qualifier {
  RelationId relation = 0;
  EntityId entity = 0;

  friend auto operator<=>(const Qualifier&, const Qualifier&) = default;
};

/// One hyper-relational fact: main triplet plus an ordered qualifier list.
/// Duplicate qualifier pairs are kept as given.
struct Statement {
  EntityId head = 0;
  RelationId relation = 0;
  EntityId tail = 0;
  std::vector<Qualifier> qualifiers;

  /// Flattened token count: head, relation, tail, then two per qualifier.
  std::size_t token_length() const noexcept { return 3 + 2 * qualifiers.size(); }

  friend auto operator<=>(const Statement&, const Statement&) = default;
};

enum class Split : std::uint8_t { train = 0, valid = 1, test = 2 };

inline constexpr Split kAllSplits[] = {Split::train, Split::valid, Split::test};

std::string_view to_string(Split split) noexcept;
/// Throws std::invalid_argument for anything but train/valid/test.
Split parse_split(std::string_view name);

/// Name <-> dense id mapping, ids assigned in first-appearance order.
class Vocabulary {
 public:
  /// Returns the id for `name`, inserting it if unseen.
  std::int32_t intern(std::string_view name);
  /// -1 when absent.
  std::int32_t find(std::string_view name) const;
  const std::string& name(std::int32_t id) const { return names_.at(static_cast<std::size_t>(id)); }
  std::int32_t size() const noexcept { return static_cast<std::int32_t>(names_.size()); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  /// FNV-1a over the ordered names; used to detect checkpoint/data mismatches.
  std::uint64_t fingerprint() const noexcept;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.names_ == b.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::int32_t> index_;
};

/// Statements over dense entity/relation vocabularies, each tagged with a split.
/// Immutable once loaded; safe for concurrent readers.
struct KnowledgeGraph {
  Vocabulary entities;
  Vocabulary relations;
  std::vector<Statement> statements;
  std::vector<Split> splits;  // parallel to statements

  std::int32_t num_entities() const noexcept { return entities.size(); }
  std::int32_t num_relations() const noexcept { return relations.size(); }
  std::size_t num_statements() const noexcept { return statements.size(); }

  std::size_t count(Split split) const noexcept;
  /// Indices of the statements tagged `split`, in file order.
  std::vector<std::size_t> indices(Split split) const;
  std::size_t max_token_length() const noexcept;
  std::size_t total_qualifiers(Split split) const noexcept;

  /// Appends a statement; all names are interned.
  void add(std::string_view head, std::string_view relation, std::string_view tail,
           const std::vector<std::pair<std::string, std::string>>& qualifiers, Split split);
  /// Appends a statement by id. Ids must already be in the vocabularies.
  void add(Statement statement, Split split);

  /// Throws std::logic_error if any id is outside the vocabularies.
  void validate() const;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string file, std::size_t line, const std::string& what);
  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

}  // namespace hyt::data
