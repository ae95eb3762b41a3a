#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <unistd.h>

#include "hyt/num/checkpoint.hpp"

namespace fs = std::filesystem;
using namespace hyt;
using namespace hyt::num;

namespace {

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("hyt_ckpt_" + std::to_string(::getpid()) + "_" + name);
}

Checkpoint sample() {
  Checkpoint c;
  c.header = {{"model.d_embed", "4"}, {"note", "x y"}};
  c.tensors.push_back({"a", {2, 2}, {1, Real(0.1), -3, Real(1e-30)}});
  c.tensors.push_back({"b", {3}, {0, 0, Real(2.5)}});
  c.has_optimizer = true;
  c.optimizer_step = 17;
  c.moments = {{{1, 2, 3, 4}, {5, 6, 7, 8}}, {{0, 0, 1}, {1, 0, 0}}};
  return c;
}

}  // namespace

TEST_CASE("checkpoint round trip is exact") {
  const auto file = temp_file("rt");
  const auto c = sample();
  save_checkpoint(c, file);
  const auto d = load_checkpoint(file);
  fs::remove(file);
  CHECK(d.header == c.header);
  REQUIRE(d.tensors.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(d.tensors[i].name == c.tensors[i].name);
    CHECK(d.tensors[i].shape == c.tensors[i].shape);
    CHECK(d.tensors[i].values == c.tensors[i].values);
    CHECK(d.moments[i].m == c.moments[i].m);
    CHECK(d.moments[i].v == c.moments[i].v);
  }
  CHECK(d.optimizer_step == 17);
  CHECK(d.find("b") != nullptr);
  CHECK(d.find("zz") == nullptr);
  CHECK(d.at("note") == "x y");
  CHECK_THROWS_AS(d.at("zz"), std::out_of_range);
}

TEST_CASE("corrupt files are rejected") {
  const auto file = temp_file("bad");
  std::ofstream(file) << "NOTACKPT";
  CHECK_THROWS_AS(load_checkpoint(file), std::runtime_error);
  save_checkpoint(sample(), file);
  const auto size = fs::file_size(file);
  fs::resize_file(file, size - 5);
  CHECK_THROWS_AS(load_checkpoint(file), std::runtime_error);
  fs::remove(file);
  CHECK_THROWS(load_checkpoint(file));
}
