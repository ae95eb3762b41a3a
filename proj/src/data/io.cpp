#include "hyt/data/io.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace hyt::data {

namespace fs = std::filesystem;

namespace {

constexpr std::array<std::string_view, 3> kDataExtensions{".jsonl", ".tsv", ".txt"};

bool is_data_extension(const fs::path& p) {
  const auto ext = p.extension().string();
  return std::find(kDataExtensions.begin(), kDataExtensions.end(), ext) != kDataExtensions.end();
}

DatasetFormat format_for(const fs::path& file, DatasetFormat requested) {
  if (requested != DatasetFormat::automatic) return requested;
  return file.extension() == ".jsonl" ? DatasetFormat::jsonl : DatasetFormat::tsv;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string json_name(const nlohmann::json& v, const char* field) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw std::runtime_error(std::string("field '") + field + "' must be a string or integer");
}

void load_file(const fs::path& file, DatasetFormat format, Split split, KnowledgeGraph& graph) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  const auto fmt = format_for(file, format);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    try {
      parse_statement_line(line, fmt, split, graph);
    } catch (const std::exception& e) {
      throw ParseError(file.string(), line_no, e.what());
    }
  }
}

std::uint64_t fnv1a(std::uint64_t h, std::string_view bytes) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

DatasetFormat parse_format(std::string_view tag) {
  if (tag == "jsonl" || tag == "jsonl-statements") return DatasetFormat::jsonl;
  if (tag == "tsv" || tag == "tsv-flat") return DatasetFormat::tsv;
  if (tag == "auto" || tag.empty()) return DatasetFormat::automatic;
  throw std::invalid_argument("unknown dataset format '" + std::string(tag) + "'");
}

std::string_view to_string(DatasetFormat format) noexcept {
  switch (format) {
    case DatasetFormat::automatic: return "auto";
    case DatasetFormat::jsonl: return "jsonl-statements";
    case DatasetFormat::tsv: return "tsv-flat";
  }
  return "?";
}

bool parse_statement_line(std::string_view raw, DatasetFormat format, Split split,
                          KnowledgeGraph& graph) {
  const auto line = trim(raw);
  if (line.empty() || line.front() == '#') return false;

  std::string head, relation, tail;
  std::vector<std::pair<std::string, std::string>> qualifiers;

  if (format == DatasetFormat::jsonl) {
    const auto rec = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (rec.is_discarded() || !rec.is_object()) throw std::runtime_error("not a JSON object");
    for (const char* field : {"head", "relation", "tail"})
      if (!rec.contains(field)) throw std::runtime_error(std::string("missing field '") + field + "'");
    head = json_name(rec["head"], "head");
    relation = json_name(rec["relation"], "relation");
    tail = json_name(rec["tail"], "tail");
    if (rec.contains("qualifiers")) {
      const auto& qs = rec["qualifiers"];
      if (!qs.is_array()) throw std::runtime_error("'qualifiers' must be an array");
      for (const auto& q : qs) {
        if (q.is_array() && q.size() == 2) {
          qualifiers.emplace_back(json_name(q[0], "qualifier relation"),
                                  json_name(q[1], "qualifier entity"));
        } else if (q.is_object() && q.contains("relation") && q.contains("entity")) {
          qualifiers.emplace_back(json_name(q["relation"], "qualifier relation"),
                                  json_name(q["entity"], "qualifier entity"));
        } else {
          throw std::runtime_error("qualifier must be [relation, entity]");
        }
      }
    }
  } else {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      fields.emplace_back(trim(line.substr(start, tab == std::string_view::npos ? tab : tab - start)));
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    if (fields.size() < 3) throw std::runtime_error("expected at least 3 tab-separated fields");
    if ((fields.size() - 3) % 2 != 0) throw std::runtime_error("dangling qualifier relation");
    for (const auto& f : fields)
      if (f.empty()) throw std::runtime_error("empty field");
    head = fields[0];
    relation = fields[1];
    tail = fields[2];
    for (std::size_t i = 3; i < fields.size(); i += 2) qualifiers.emplace_back(fields[i], fields[i + 1]);
  }

  if (head.empty() || relation.empty() || tail.empty()) throw std::runtime_error("empty name");
  graph.add(head, relation, tail, qualifiers, split);
  return true;
}

std::string format_statement(const KnowledgeGraph& graph, const Statement& s, DatasetFormat format) {
  const auto& E = graph.entities;
  const auto& R = graph.relations;
  if (format == DatasetFormat::tsv) {
    std::string out = E.name(s.head) + '\t' + R.name(s.relation) + '\t' + E.name(s.tail);
    for (const auto& q : s.qualifiers) out += '\t' + R.name(q.relation) + '\t' + E.name(q.entity);
    return out;
  }
  nlohmann::json rec;
  rec["head"] = E.name(s.head);
  rec["relation"] = R.name(s.relation);
  rec["tail"] = E.name(s.tail);
  auto qs = nlohmann::json::array();
  for (const auto& q : s.qualifiers) qs.push_back({R.name(q.relation), E.name(q.entity)});
  rec["qualifiers"] = std::move(qs);
  return rec.dump();
}

KnowledgeGraph load_dataset(const fs::path& path, DatasetFormat format) {
  KnowledgeGraph graph;
  if (fs::is_directory(path)) {
    if (fs::exists(path / "entities.vocab")) graph.entities = read_vocabulary(path / "entities.vocab");
    if (fs::exists(path / "relations.vocab")) graph.relations = read_vocabulary(path / "relations.vocab");

    std::array<fs::path, 3> split_files;
    std::vector<fs::path> entries;
    for (const auto& entry : fs::directory_iterator(path))
      if (entry.is_regular_file()) entries.push_back(entry.path());
    std::sort(entries.begin(), entries.end());
    for (const auto& file : entries) {
      if (!is_data_extension(file)) continue;
      Split split;
      try {
        split = parse_split(file.stem().string());
      } catch (const std::invalid_argument&) {
        throw std::runtime_error("unknown split file " + file.string() +
                                 " (expected train, valid or test)");
      }
      auto& slot = split_files[static_cast<std::size_t>(split)];
      if (!slot.empty()) throw std::runtime_error("duplicate split file for " + file.stem().string());
      slot = file;
    }
    if (std::all_of(split_files.begin(), split_files.end(), [](const fs::path& p) { return p.empty(); }))
      throw std::runtime_error("no split files in " + path.string());
    for (Split split : kAllSplits) {
      const auto& file = split_files[static_cast<std::size_t>(split)];
      if (!file.empty()) load_file(file, format, split, graph);
    }
  } else if (fs::is_regular_file(path)) {
    load_file(path, format, Split::train, graph);
  } else {
    throw std::runtime_error("dataset path not found: " + path.string());
  }
  if (graph.statements.empty()) throw std::runtime_error("no statements");
  graph.validate();
  return graph;
}

void save_dataset(const KnowledgeGraph& graph, const fs::path& dir, DatasetFormat format) {
  if (format == DatasetFormat::automatic) format = DatasetFormat::jsonl;
  fs::create_directories(dir);
  const char* ext = format == DatasetFormat::jsonl ? ".jsonl" : ".tsv";
  for (Split split : kAllSplits) {
    if (graph.count(split) == 0) continue;
    std::ofstream out(dir / (std::string(to_string(split)) + ext));
    if (!out) throw std::runtime_error("cannot write dataset into " + dir.string());
    for (std::size_t i = 0; i < graph.statements.size(); ++i)
      if (graph.splits[i] == split) out << format_statement(graph, graph.statements[i], format) << '\n';
  }
  write_vocabulary(graph.entities, dir / "entities.vocab");
  write_vocabulary(graph.relations, dir / "relations.vocab");
}

void write_vocabulary(const Vocabulary& vocab, const fs::path& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  for (std::int32_t i = 0; i < vocab.size(); ++i) out << vocab.name(i) << '\t' << i << '\n';
}

Vocabulary read_vocabulary(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  Vocabulary vocab;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto tab = body.rfind('\t');
    if (tab == std::string_view::npos) throw ParseError(file.string(), line_no, "expected name<TAB>id");
    const auto name = body.substr(0, tab);
    long id = -1;
    try {
      id = std::stol(std::string(body.substr(tab + 1)));
    } catch (const std::exception&) {
      throw ParseError(file.string(), line_no, "bad id");
    }
    if (id != vocab.size() || vocab.find(name) != -1)
      throw ParseError(file.string(), line_no, "ids must be dense and names unique");
    vocab.intern(name);
  }
  return vocab;
}

std::uint64_t dataset_checksum(const fs::path& path) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto absorb = [&h](const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    h = fnv1a(h, file.filename().string());
    h = fnv1a(h, buf.str());
  };
  if (fs::is_regular_file(path)) {
    absorb(path);
    return h;
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(path))
    if (entry.is_regular_file() && (is_data_extension(entry.path()) ||
                                    entry.path().extension() == ".vocab"))
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) absorb(f);
  return h;
}

}  // namespace hyt::data
