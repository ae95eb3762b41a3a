#pragma once

#include <cstdint>
#include <string>
#include <stdexcept>
#include <vector>

#include "hyt/config.hpp"
#include "hyt/data/queries.hpp"
#include "hyt/data/statement.hpp"
#include "hyt/rng.hpp"

namespace hyt::inline HYT_PREC::model {

enum class TokenKind : std::uint8_t { entity, relation, mask, pad };

struct Token {
  TokenKind kind = TokenKind::pad;
  std::int32_t id = -1;  // -1 for mask and pad

  friend bool operator==(const Token&, const Token&) = default;
};

/// Flattened statement: [h, r, t, qr1, qe1, ...] with one entity replaced by
/// the mask token and pads after the last real token.
struct TokenSequence {
  std::vector<Token> tokens;
  std::size_t mask_index = 0;

  std::size_t length() const noexcept { return tokens.size(); }
  /// Number of non-pad tokens.
  std::size_t used() const noexcept;
};

class SequenceTooLong : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Throws SequenceTooLong (naming the statement's ids, or `label` when given)
/// if 3 + 2n > seq_len, and std::out_of_range for a bad qualifier slot.
TokenSequence flatten(const data::Statement& statement, data::MaskedSlot slot, std::size_t seq_len,
                      const std::string& label = {});

/// Reorders the (qr, qe) pairs of `seq` uniformly at random; the mask moves
/// with its pair.
void shuffle_qualifier_pairs(TokenSequence& seq, Rng& rng);

/// Position of `slot` in the flattened layout: head 0, tail 2, qualifier i at 4 + 2i.
std::size_t slot_position(data::MaskedSlot slot) noexcept;

}  // namespace hyt::inline HYT_PREC::model
