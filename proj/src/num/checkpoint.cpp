#include "hyt/num/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace hyt::inline HYT_PREC::num {

namespace {

constexpr char kMagic[8] = {'H', 'Y', 'T', 'C', 'K', 'P', 'T', '\0'};

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  void reals(const std::vector<Real>& values) {
    for (Real v : values) put(v);
  }

  void put(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void put(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  Reader(std::istream& in, std::string file) : in_(in), file_(std::move(file)) {}

  std::uint8_t u8() {
    const int c = in_.get();
    if (c == std::char_traits<char>::eof()) throw std::runtime_error(file_ + ": truncated checkpoint");
    return static_cast<std::uint8_t>(c);
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
    return v;
  }
  std::string str() {
    const auto n = u32();
    std::string s(n, '\0');
    in_.read(s.data(), n);
    if (static_cast<std::uint32_t>(in_.gcount()) != n) throw std::runtime_error(file_ + ": truncated checkpoint");
    return s;
  }
  std::vector<Real> reals(std::size_t n, std::uint32_t width) {
    std::vector<Real> out(n);
    for (auto& v : out) {
      if (width == 4) v = static_cast<Real>(std::bit_cast<float>(u32()));
      else v = static_cast<Real>(std::bit_cast<double>(u64()));
    }
    return out;
  }

 private:
  std::istream& in_;
  std::string file_;
};

}  // namespace

const std::string& Checkpoint::at(const std::string& key) const {
  auto it = header.find(key);
  if (it == header.end()) throw std::out_of_range("checkpoint header has no '" + key + "'");
  return it->second;
}

const StoredTensor* Checkpoint::find(const std::string& name) const {
  for (const auto& t : tensors)
    if (t.name == name) return &t;
  return nullptr;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& file) {
  if (ckpt.has_optimizer && ckpt.moments.size() != ckpt.tensors.size())
    throw std::invalid_argument("checkpoint optimizer state does not match tensor list");
  const auto tmp = std::filesystem::path(file.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    Writer w(out);
    out.write(kMagic, sizeof kMagic);
    w.u32(Checkpoint::kVersion);
    w.u32(sizeof(Real));
    w.u32(static_cast<std::uint32_t>(ckpt.header.size()));
    for (const auto& [k, v] : ckpt.header) {
      w.str(k);
      w.str(v);
    }
    w.u32(static_cast<std::uint32_t>(ckpt.tensors.size()));
    for (const auto& t : ckpt.tensors) {
      if (t.values.size() != numel(t.shape)) throw std::invalid_argument("tensor '" + t.name + "' shape/value mismatch");
      w.str(t.name);
      w.u32(static_cast<std::uint32_t>(t.shape.size()));
      for (auto d : t.shape) w.u64(d);
      w.reals(t.values);
    }
    w.u8(ckpt.has_optimizer ? 1 : 0);
    if (ckpt.has_optimizer) {
      w.u64(ckpt.optimizer_step);
      for (const auto& m : ckpt.moments) {
        w.reals(m.m);
        w.reals(m.v);
      }
    }
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, file);
}

Checkpoint load_checkpoint(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + file.string());
  char magic[8] = {};
  in.read(magic, sizeof magic);
  if (in.gcount() != sizeof magic || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw std::runtime_error(file.string() + ": not a checkpoint file");
  Reader r(in, file.string());
  const auto version = r.u32();
  if (version != Checkpoint::kVersion)
    throw std::runtime_error(file.string() + ": unsupported checkpoint version " + std::to_string(version));
  const auto width = r.u32();
  if (width != 4 && width != 8) throw std::runtime_error(file.string() + ": bad real width");

  Checkpoint ckpt;
  const auto header_count = r.u32();
  for (std::uint32_t i = 0; i < header_count; ++i) {
    auto key = r.str();
    ckpt.header[key] = r.str();
  }
  const auto tensor_count = r.u32();
  for (std::uint32_t i = 0; i < tensor_count; ++i) {
    StoredTensor t;
    t.name = r.str();
    const auto rank = r.u32();
    for (std::uint32_t d = 0; d < rank; ++d) t.shape.push_back(static_cast<std::size_t>(r.u64()));
    t.values = r.reals(numel(t.shape), width);
    ckpt.tensors.push_back(std::move(t));
  }
  ckpt.has_optimizer = r.u8() != 0;
  if (ckpt.has_optimizer) {
    ckpt.optimizer_step = r.u64();
    for (const auto& t : ckpt.tensors) {
      AdamMoments m;
      m.m = r.reals(t.values.size(), width);
      m.v = r.reals(t.values.size(), width);
      ckpt.moments.push_back(std::move(m));
    }
  }
  return ckpt;
}

}  // namespace hyt::inline HYT_PREC::num
