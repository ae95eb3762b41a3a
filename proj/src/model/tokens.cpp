#include "hyt/model/tokens.hpp"

#include <algorithm>
#include <span>
#include <string>

namespace hyt::inline HYT_PREC::model {

std::size_t TokenSequence::used() const noexcept {
  return static_cast<std::size_t>(std::count_if(tokens.begin(), tokens.end(),
                                                [](const Token& t) { return t.kind != TokenKind::pad; }));
}

std::size_t slot_position(data::MaskedSlot slot) noexcept {
  switch (slot.kind) {
    case data::MaskedSlot::Kind::head: return 0;
    case data::MaskedSlot::Kind::tail: return 2;
    case data::MaskedSlot::Kind::qualifier: return 4 + 2 * static_cast<std::size_t>(slot.qualifier_index);
  }
  return 0;
}

TokenSequence flatten(const data::Statement& s, data::MaskedSlot slot, std::size_t seq_len, const std::string& label) {
  if (s.token_length() > seq_len) {
    const auto who = label.empty() ? "(" + std::to_string(s.head) + ", " + std::to_string(s.relation) + ", " +
                                         std::to_string(s.tail) + ", n=" + std::to_string(s.qualifiers.size()) + ")"
                                   : label;
    throw SequenceTooLong("statement " + who + " needs " + std::to_string(s.token_length()) +
                          " tokens but the model takes at most " + std::to_string(seq_len));
  }
  if (slot.kind == data::MaskedSlot::Kind::qualifier && slot.qualifier_index >= s.qualifiers.size())
    throw std::out_of_range("qualifier slot " + std::to_string(slot.qualifier_index) + " of a statement with " +
                            std::to_string(s.qualifiers.size()) + " qualifiers");

  TokenSequence seq;
  seq.tokens.assign(seq_len, Token{});
  seq.tokens[0] = {TokenKind::entity, s.head};
  seq.tokens[1] = {TokenKind::relation, s.relation};
  seq.tokens[2] = {TokenKind::entity, s.tail};
  for (std::size_t i = 0; i < s.qualifiers.size(); ++i) {
    seq.tokens[3 + 2 * i] = {TokenKind::relation, s.qualifiers[i].relation};
    seq.tokens[4 + 2 * i] = {TokenKind::entity, s.qualifiers[i].entity};
  }
  seq.mask_index = slot_position(slot);
  seq.tokens[seq.mask_index] = {TokenKind::mask, -1};
  return seq;
}

void shuffle_qualifier_pairs(TokenSequence& seq, Rng& rng) {
  const std::size_t used = seq.used();
  if (used < 5) return;
  const std::size_t pairs = (used - 3) / 2;
  std::vector<std::size_t> order(pairs);
  for (std::size_t i = 0; i < pairs; ++i) order[i] = i;
  shuffle(std::span<std::size_t>(order), rng);
  const auto old = seq.tokens;
  const std::size_t old_mask = seq.mask_index;
  for (std::size_t i = 0; i < pairs; ++i) {
    const std::size_t from = 3 + 2 * order[i], to = 3 + 2 * i;
    seq.tokens[to] = old[from];
    seq.tokens[to + 1] = old[from + 1];
    if (old_mask == from + 1) seq.mask_index = to + 1;
  }
}

}  // namespace hyt::inline HYT_PREC::model
