#include "hyt/data/statement.hpp"

#include <algorithm>

namespace hyt::data {

std::string_view to_string(Split split) noexcept {
  switch (split) {
    case Split::train: return "train";
    case Split::valid: return "valid";
    case Split::test: return "test";
  }
  return "?";
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::train;
  if (name == "valid") return Split::valid;
  if (name == "test") return Split::test;
  throw std::invalid_argument("unknown split '" + std::string(name) + "'");
}

std::int32_t Vocabulary::intern(std::string_view name) {
  std::string key(name);
  if (auto it = index_.find(key); it != index_.end()) return it->second;
  const auto id = static_cast<std::int32_t>(names_.size());
  names_.push_back(key);
  index_.emplace(std::move(key), id);
  return id;
}

std::int32_t Vocabulary::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  return it == index_.end() ? -1 : it->second;
}

std::uint64_t Vocabulary::fingerprint() const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 0x100000001b3ull;
  };
  for (const auto& n : names_) {
    for (char c : n) mix(static_cast<unsigned char>(c));
    mix(0);
  }
  return h;
}

std::size_t KnowledgeGraph::count(Split split) const noexcept {
  return static_cast<std::size_t>(std::count(splits.begin(), splits.end(), split));
}

std::vector<std::size_t> KnowledgeGraph::indices(Split split) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < splits.size(); ++i)
    if (splits[i] == split) out.push_back(i);
  return out;
}

std::size_t KnowledgeGraph::max_token_length() const noexcept {
  std::size_t longest = 0;
  for (const auto& s : statements) longest = std::max(longest, s.token_length());
  return longest;
}

std::size_t KnowledgeGraph::total_qualifiers(Split split) const noexcept {
  std::size_t total = 0;
  for (std::size_t i = 0; i < statements.size(); ++i)
    if (splits[i] == split) total += statements[i].qualifiers.size();
  return total;
}

void KnowledgeGraph::add(std::string_view head, std::string_view relation, std::string_view tail,
                         const std::vector<std::pair<std::string, std::string>>& qualifiers,
                         Split split) {
  Statement s;
  s.head = entities.intern(head);
  s.relation = relations.intern(relation);
  s.tail = entities.intern(tail);
  s.qualifiers.reserve(qualifiers.size());
  for (const auto& [qr, qe] : qualifiers)
    s.qualifiers.push_back({relations.intern(qr), entities.intern(qe)});
  statements.push_back(std::move(s));
  splits.push_back(split);
}

void KnowledgeGraph::add(Statement statement, Split split) {
  statements.push_back(std::move(statement));
  splits.push_back(split);
}

void KnowledgeGraph::validate() const {
  const auto n = num_entities();
  const auto m = num_relations();
  auto bad = [](std::size_t i, const char* what) {
    return std::logic_error("statement " + std::to_string(i) + ": " + what + " id out of range");
  };
  if (splits.size() != statements.size()) throw std::logic_error("split tags out of sync");
  for (std::size_t i = 0; i < statements.size(); ++i) {
    const auto& s = statements[i];
    if (s.head < 0 || s.head >= n) throw bad(i, "head");
    if (s.tail < 0 || s.tail >= n) throw bad(i, "tail");
    if (s.relation < 0 || s.relation >= m) throw bad(i, "relation");
    for (const auto& q : s.qualifiers) {
      if (q.relation < 0 || q.relation >= m) throw bad(i, "qualifier relation");
      if (q.entity < 0 || q.entity >= n) throw bad(i, "qualifier entity");
    }
  }
}

ParseError::ParseError(std::string file, std::size_t line, const std::string& what)
    : std::runtime_error(file + ":" + std::to_string(line) + ": " + what),
      file_(std::move(file)),
      line_(line) {}

}  // namespace hyt::data
