#pragma once

#include <cstdint>
#include <vector>

#include "hyt/data/statement.hpp"
#include "hyt/model/hy_transformer.hpp"

namespace hyt::inline HYT_PREC::toy {

/// Small fixed problem for end-to-end gradient checks: N=10, M=4, T=7,
/// d_embed=8, d_hidden=16, one layer, a batch of head, tail and qualifier
/// queries with 1-N labels. Built identically in every precision.
struct ToyProblem {
  data::KnowledgeGraph graph;
  model::HyTransformer model;
  std::vector<model::TokenSequence> batch;
  std::vector<std::uint8_t> labels;
  std::uint64_t seed;
};

ToyProblem make_toy_problem(std::uint64_t seed);

/// Smoothed BCE (eps 0.1) of the batch in train mode. Dropout masks come from
/// a fixed stream, so repeated calls are the same function of the parameters.
num::Tensor toy_loss(const ToyProblem& p);

}  // namespace hyt::inline HYT_PREC::toy
