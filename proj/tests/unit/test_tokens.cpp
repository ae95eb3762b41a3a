#include <doctest.h>

#include <algorithm>
#include <stdexcept>

#include "hyt/model/tokens.hpp"

using namespace hyt;
using namespace hyt::model;
using data::MaskedSlot;

TEST_CASE("flatten lays out head, relation, tail and qualifier pairs") {
  const data::Statement s{1, 2, 3, {{4, 5}, {6, 7}}};
  const auto seq = flatten(s, MaskedSlot::tail(), 9);
  REQUIRE(seq.length() == 9);
  CHECK(seq.tokens[0] == Token{TokenKind::entity, 1});
  CHECK(seq.tokens[1] == Token{TokenKind::relation, 2});
  CHECK(seq.tokens[2] == Token{TokenKind::mask, -1});
  CHECK(seq.tokens[3] == Token{TokenKind::relation, 4});
  CHECK(seq.tokens[4] == Token{TokenKind::entity, 5});
  CHECK(seq.tokens[6] == Token{TokenKind::entity, 7});
  CHECK(seq.tokens[7].kind == TokenKind::pad);
  CHECK(seq.mask_index == 2);
  CHECK(seq.used() == 7);
}

TEST_CASE("mask positions") {
  CHECK(slot_position(MaskedSlot::head()) == 0);
  CHECK(slot_position(MaskedSlot::tail()) == 2);
  CHECK(slot_position(MaskedSlot::qualifier(0)) == 4);
  CHECK(slot_position(MaskedSlot::qualifier(3)) == 10);
  const data::Statement s{1, 2, 3, {{4, 5}, {6, 7}}};
  const auto seq = flatten(s, MaskedSlot::qualifier(1), 7);
  CHECK(seq.mask_index == 6);
  CHECK(seq.tokens[6].kind == TokenKind::mask);
  CHECK(seq.tokens[5] == Token{TokenKind::relation, 6});
}

TEST_CASE("over-long statements and bad slots are rejected") {
  const data::Statement s{1, 2, 3, {{4, 5}, {6, 7}}};
  CHECK_THROWS_AS(flatten(s, MaskedSlot::head(), 5), SequenceTooLong);
  try {
    flatten(s, MaskedSlot::head(), 5, "line 12");
  } catch (const SequenceTooLong& e) {
    CHECK(std::string(e.what()).find("line 12") != std::string::npos);
  }
  CHECK_THROWS_AS(flatten(s, MaskedSlot::qualifier(2), 9), std::out_of_range);
}

TEST_CASE("qualifier shuffling keeps the pairs and carries the mask along") {
  const data::Statement s{1, 2, 3, {{4, 5}, {6, 7}, {8, 9}}};
  bool moved = false;
  for (std::uint64_t stream = 0; stream < 20; ++stream) {
    auto seq = flatten(s, MaskedSlot::qualifier(1), 11);
    Rng rng(5, stream);
    shuffle_qualifier_pairs(seq, rng);
    for (std::size_t i = 0; i < 3; ++i) CHECK(seq.tokens[i] == flatten(s, MaskedSlot::qualifier(1), 11).tokens[i]);
    CHECK(seq.tokens[9].kind == TokenKind::pad);
    CHECK(seq.tokens[10].kind == TokenKind::pad);
    REQUIRE(seq.tokens[seq.mask_index].kind == TokenKind::mask);
    CHECK(seq.tokens[seq.mask_index - 1] == Token{TokenKind::relation, 6});
    std::vector<std::int32_t> relations;
    for (std::size_t p = 3; p < 9; p += 2) {
      relations.push_back(seq.tokens[p].id);
      if (p + 1 != seq.mask_index) CHECK(seq.tokens[p + 1].id == seq.tokens[p].id + 1);
    }
    std::sort(relations.begin(), relations.end());
    CHECK(relations == std::vector<std::int32_t>{4, 6, 8});
    moved = moved || seq.mask_index != 6;
  }
  CHECK(moved);
}

TEST_CASE("qualifier shuffling leaves short statements alone") {
  auto seq = flatten(data::Statement{1, 2, 3, {}}, MaskedSlot::head(), 5);
  const auto before = seq.tokens;
  Rng rng(1, 0);
  shuffle_qualifier_pairs(seq, rng);
  CHECK(seq.tokens == before);
}
