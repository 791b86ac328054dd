#include "shiftsig/ingest.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <unordered_set>

#include "json.hpp"
#include "shiftsig/detail/text.hpp"
#include "shiftsig/error.hpp"

namespace shiftsig::ingest {

namespace {

using ordered_json = nlohmann::ordered_json;

std::ifstream open_in(const std::filesystem::path& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ostream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "write to '" + path.string() + "' failed");
}

std::string at_line(std::size_t line) { return "line " + std::to_string(line) + ": "; }

Period parse_period(const ordered_json& value, std::size_t line) {
  if (value.is_string()) {
    const auto& s = value.get_ref<const std::string&>();
    if (s == "C1") return Period::C1;
    if (s == "C2") return Period::C2;
  }
  throw Error(ErrorKind::InvalidPeriod, at_line(line) + "period must be \"C1\" or \"C2\"");
}

}  // namespace

// ---- JSONL ---------------------------------------------------------------

OccurrenceSet read_occurrences_jsonl(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::MalformedHeader, "line 1: missing header");
  ordered_json header;
  try {
    header = ordered_json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::MalformedHeader, at_line(1) + e.what());
  }
  if (!header.is_object() || header.size() != 3 || !header.contains("format") ||
      !header.contains("version") || !header.contains("dim") || header["format"] != kJsonlFormat) {
    throw Error(ErrorKind::MalformedHeader,
                at_line(1) + R"(expected {"format":"sseb-jsonl","version":1,"dim":D})");
  }
  if (!header["version"].is_number_integer() || header["version"].get<long long>() != kFormatVersion) {
    throw Error(ErrorKind::MalformedHeader, at_line(1) + "unsupported version");
  }
  if (!header["dim"].is_number_unsigned() || header["dim"].get<unsigned long long>() == 0) {
    throw Error(ErrorKind::MalformedHeader, at_line(1) + "dim must be a positive integer");
  }
  const auto dim = static_cast<std::size_t>(header["dim"].get<unsigned long long>());

  OccurrenceSet set(dim);
  std::vector<double> vec(dim);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    ordered_json rec;
    try {
      rec = ordered_json::parse(line);
    } catch (const nlohmann::json::out_of_range& e) {
      // Number literals beyond double range.
      throw Error(ErrorKind::NonFiniteValue, at_line(lineno) + e.what());
    } catch (const nlohmann::json::parse_error& e) {
      // NaN / Infinity tokens as emitted by lenient JSON writers.
      const char bad = e.byte >= 1 && e.byte <= line.size() ? line[e.byte - 1] : '\0';
      const auto kind = bad == 'N' || bad == 'I' ? ErrorKind::NonFiniteValue : ErrorKind::MalformedRow;
      throw Error(kind, at_line(lineno) + e.what());
    }
    if (!rec.is_object() || rec.size() != 3 || !rec.contains("w") || !rec.contains("t") ||
        !rec.contains("v") || !rec["w"].is_string() || !rec["v"].is_array()) {
      throw Error(ErrorKind::MalformedRow, at_line(lineno) + R"(expected {"w":...,"t":...,"v":[...]})");
    }
    const auto& word = rec["w"].get_ref<const std::string&>();
    try {
      validate_word(word);
    } catch (const Error& e) {
      throw Error(ErrorKind::MalformedRow, at_line(lineno) + e.what());
    }
    const Period period = parse_period(rec["t"], lineno);
    const auto& values = rec["v"];
    if (values.size() != dim) {
      throw Error(ErrorKind::DimensionMismatch, at_line(lineno) + std::to_string(values.size()) +
                                                    " values under dim=" + std::to_string(dim));
    }
    for (std::size_t j = 0; j < dim; ++j) {
      if (!values[j].is_number()) {
        throw Error(ErrorKind::NonFiniteValue, at_line(lineno) + "value " + std::to_string(j) + " is not a number");
      }
      vec[j] = values[j].get<double>();
      if (!std::isfinite(vec[j])) {
        throw Error(ErrorKind::NonFiniteValue, at_line(lineno) + "value " + std::to_string(j) + " is not finite");
      }
    }
    set.add(word, period, vec);
  }
  return set;
}

OccurrenceSet read_occurrences_jsonl(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_occurrences_jsonl(in);
}

void write_occurrences_jsonl(const OccurrenceSet& set, std::ostream& out) {
  ordered_json header;
  header["format"] = kJsonlFormat;
  header["version"] = kFormatVersion;
  header["dim"] = set.dim();
  out << header.dump() << '\n';
  ordered_json rec;
  for (const auto& [word, occ] : set.words()) {
    for (const Period period : {Period::C1, Period::C2}) {
      const auto& block = occ.at(period);
      for (std::size_t i = 0; i < block.size(); ++i) {
        const auto row = block.row(i);
        rec["w"] = word;
        rec["t"] = to_string(period);
        rec["v"] = std::vector<double>(row.begin(), row.end());
        out << rec.dump() << '\n';
      }
    }
  }
}

void write_occurrences_jsonl(const OccurrenceSet& set, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_occurrences_jsonl(set, out);
  finish(out, path);
}

// ---- binary --------------------------------------------------------------

namespace {

void put_u16(std::ostream& out, std::uint16_t v) {
  const char b[2] = {static_cast<char>(v & 0xFF), static_cast<char>(v >> 8)};
  out.write(b, 2);
}

void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b, 4);
}

class ByteReader {
 public:
  explicit ByteReader(std::istream& in) : in_(in) {}

  [[nodiscard]] std::uint64_t offset() const noexcept { return offset_; }
  void skip(std::uint64_t n) noexcept { offset_ += n; }

  /// False on clean EOF before any byte; throws TruncatedRecord mid-read.
  bool read(void* dst, std::size_t n, bool eof_ok = false) {
    in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    const auto got = static_cast<std::size_t>(in_.gcount());
    if (got == 0 && eof_ok) return false;
    if (got != n) {
      throw Error(ErrorKind::TruncatedRecord, "byte " + std::to_string(offset_ + got) + ": expected " +
                                                  std::to_string(n) + " bytes, found " + std::to_string(got));
    }
    offset_ += n;
    return true;
  }

 private:
  std::istream& in_;
  std::uint64_t offset_ = 0;
};

std::uint16_t le16(const unsigned char* b) { return static_cast<std::uint16_t>(b[0] | (b[1] << 8)); }
std::uint32_t le32(const unsigned char* b) {
  return std::uint32_t{b[0]} | (std::uint32_t{b[1]} << 8) | (std::uint32_t{b[2]} << 16) |
         (std::uint32_t{b[3]} << 24);
}

}  // namespace

OccurrenceSet read_occurrences_binary(std::istream& in) {
  ByteReader reader(in);
  unsigned char magic[4] = {};
  in.read(reinterpret_cast<char*>(magic), 4);
  if (in.gcount() != 4 || std::memcmp(magic, kBinaryMagic, 4) != 0) {
    throw Error(ErrorKind::BadMagic, "byte 0: expected magic 'SSEB'");
  }
  reader.skip(4);
  unsigned char head[6];
  reader.read(head, 6);
  const std::uint16_t version = le16(head);
  if (version != kFormatVersion) {
    throw Error(ErrorKind::UnsupportedVersion, "byte 4: version " + std::to_string(version));
  }
  const std::uint32_t dim = le32(head + 2);
  if (dim == 0) throw Error(ErrorKind::MalformedHeader, "byte 6: dim must be positive");

  OccurrenceSet set(dim);
  std::string word;
  std::vector<unsigned char> payload(std::size_t{dim} * 4);
  std::vector<double> vec(dim);
  for (;;) {
    const std::uint64_t record_start = reader.offset();
    const std::string where = "record at byte " + std::to_string(record_start) + ": ";
    unsigned char len_bytes[2];
    if (!reader.read(len_bytes, 2, true)) break;
    const std::uint16_t len = le16(len_bytes);
    if (len == 0) throw Error(ErrorKind::MalformedRow, where + "empty word");
    word.resize(len);
    reader.read(word.data(), len);
    unsigned char period_byte = 0;
    reader.read(&period_byte, 1);
    if (period_byte > 1) {
      throw Error(ErrorKind::InvalidPeriod, where + "period byte " + std::to_string(period_byte));
    }
    reader.read(payload.data(), payload.size());
    for (std::size_t j = 0; j < dim; ++j) {
      const float f = std::bit_cast<float>(le32(payload.data() + 4 * j));
      if (!std::isfinite(f)) {
        throw Error(ErrorKind::NonFiniteValue, where + "value " + std::to_string(j) + " is not finite");
      }
      vec[j] = static_cast<double>(f);
    }
    try {
      validate_word(word);
    } catch (const Error& e) {
      throw Error(ErrorKind::MalformedRow, where + e.what());
    }
    set.add(word, static_cast<Period>(period_byte), vec);
  }
  return set;
}

OccurrenceSet read_occurrences_binary(const std::filesystem::path& path) {
  auto in = open_in(path, true);
  return read_occurrences_binary(in);
}

void write_occurrences_binary(const OccurrenceSet& set, std::ostream& out) {
  if (set.dim() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorKind::DimensionMismatch, "dim does not fit the binary header");
  }
  out.write(kBinaryMagic, 4);
  put_u16(out, kFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(set.dim()));
  for (const auto& [word, occ] : set.words()) {
    if (word.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw Error(ErrorKind::MalformedRow, "word longer than 65535 bytes");
    }
    for (const Period period : {Period::C1, Period::C2}) {
      const auto& block = occ.at(period);
      for (std::size_t i = 0; i < block.size(); ++i) {
        put_u16(out, static_cast<std::uint16_t>(word.size()));
        out.write(word.data(), static_cast<std::streamsize>(word.size()));
        out.put(static_cast<char>(period));
        for (double v : block.row(i)) {
          const auto f = static_cast<float>(v);
          if (!std::isfinite(f)) throw Error(ErrorKind::NonFiniteValue, "value overflows f32");
          put_u32(out, std::bit_cast<std::uint32_t>(f));
        }
      }
    }
  }
}

void write_occurrences_binary(const OccurrenceSet& set, const std::filesystem::path& path) {
  auto out = open_out(path, true);
  write_occurrences_binary(set, out);
  finish(out, path);
}

OccurrenceSet read_occurrences(const std::filesystem::path& path) {
  char magic[4] = {};
  {
    auto probe = open_in(path, true);
    probe.read(magic, 4);
    if (probe.gcount() != 4) std::memset(magic, 0, 4);
  }
  if (std::memcmp(magic, kBinaryMagic, 4) == 0) return read_occurrences_binary(path);
  return read_occurrences_jsonl(path);
}

void write_occurrences(const OccurrenceSet& set, const std::filesystem::path& path) {
  if (path.extension() == ".bin") {
    write_occurrences_binary(set, path);
  } else {
    write_occurrences_jsonl(set, path);
  }
}

// ---- annotations ---------------------------------------------------------

evaluate::AnnotationTable read_annotations(std::istream& in) {
  evaluate::AnnotationTable table;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 && line == "word\tscore") continue;
    const auto fields = detail::split(line, '\t');
    if (fields.size() != 2) throw Error(ErrorKind::MalformedRow, at_line(lineno) + "expected 'word<TAB>score'");
    const auto score = detail::parse_double(fields[1]);
    if (!score || !std::isfinite(*score)) {
      throw Error(ErrorKind::MalformedRow, at_line(lineno) + "score is not a finite number");
    }
    std::string word(fields[0]);
    try {
      validate_word(word);
    } catch (const Error& e) {
      throw Error(ErrorKind::MalformedRow, at_line(lineno) + e.what());
    }
    if (!seen.insert(word).second) {
      throw Error(ErrorKind::DuplicateWord, at_line(lineno) + "word '" + word + "' repeated");
    }
    table.rows.emplace_back(std::move(word), *score);
  }
  return table;
}

evaluate::AnnotationTable read_annotations(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_annotations(in);
}

// ---- results -------------------------------------------------------------

void write_results(std::span<const ShiftResult> rows, std::ostream& out) {
  std::vector<const ShiftResult*> order;
  order.reserve(rows.size());
  for (const auto& r : rows) order.push_back(&r);
  std::sort(order.begin(), order.end(), [](const ShiftResult* a, const ShiftResult* b) {
    if (a->distance != b->distance) return a->distance > b->distance;
    return a->word < b->word;
  });
  out << kResultsHeader << '\n';
  for (const auto* r : order) {
    out << r->word << '\t' << r->n1 << '\t' << r->n2 << '\t' << detail::format_g(r->distance, 6) << '\t'
        << detail::format_g(r->p_raw, 6) << '\t' << detail::format_g(r->p_adjusted, 6) << '\t'
        << permtest::to_string(r->method) << '\t' << r->n_used << '\n';
  }
}

void write_results(std::span<const ShiftResult> rows, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_results(rows, out);
  finish(out, path);
}

std::vector<ShiftResult> read_results(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kResultsHeader) {
    throw Error(ErrorKind::MalformedHeader, at_line(1) + "expected results header");
  }
  std::vector<ShiftResult> rows;
  std::unordered_set<std::string> seen;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto f = detail::split(line, '\t');
    if (f.size() != 8) throw Error(ErrorKind::MalformedRow, at_line(lineno) + "expected 8 fields");
    ShiftResult r;
    r.word = std::string(f[0]);
    const auto n1 = detail::parse_uint(f[1]);
    const auto n2 = detail::parse_uint(f[2]);
    const auto distance = detail::parse_double(f[3]);
    const auto p_raw = detail::parse_double(f[4]);
    const auto p_adj = detail::parse_double(f[5]);
    const auto n_used = detail::parse_uint(f[7]);
    if (!n1 || !n2 || !distance || !p_raw || !p_adj || !n_used) {
      throw Error(ErrorKind::MalformedRow, at_line(lineno) + "unparsable field");
    }
    try {
      validate_word(r.word);
      r.method = permtest::parse_method(f[6]);
    } catch (const Error& e) {
      throw Error(ErrorKind::MalformedRow, at_line(lineno) + e.what());
    }
    r.n1 = *n1;
    r.n2 = *n2;
    r.distance = *distance;
    r.p_raw = *p_raw;
    r.p_adjusted = *p_adj;
    r.n_used = *n_used;
    if (!seen.insert(r.word).second) {
      throw Error(ErrorKind::DuplicateWord, at_line(lineno) + "word '" + r.word + "' repeated");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<ShiftResult> read_results(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_results(in);
}

// ---- ground truth --------------------------------------------------------

void write_ground_truth(const simulate::SimulationGroundTruth& truth, std::ostream& out) {
  out << kGroundTruthHeader << '\n';
  for (const auto& p : truth.pairs) {
    out << p.acceptor << '\t' << p.donor << '\t' << detail::format_g(p.proportion, 17) << '\t'
        << p.injected_count << '\n';
  }
}

void write_ground_truth(const simulate::SimulationGroundTruth& truth, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_ground_truth(truth, out);
  finish(out, path);
}

simulate::SimulationGroundTruth read_ground_truth(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kGroundTruthHeader) {
    throw Error(ErrorKind::MalformedHeader, at_line(1) + "expected ground-truth header");
  }
  simulate::SimulationGroundTruth truth;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto f = detail::split(line, '\t');
    if (f.size() != 4) throw Error(ErrorKind::MalformedRow, at_line(lineno) + "expected 4 fields");
    const auto proportion = detail::parse_double(f[2]);
    const auto count = detail::parse_uint(f[3]);
    if (!proportion || !count || f[0].empty() || f[1].empty()) {
      throw Error(ErrorKind::MalformedRow, at_line(lineno) + "unparsable field");
    }
    truth.pairs.push_back({std::string(f[0]), std::string(f[1]), *proportion, *count});
  }
  return truth;
}

simulate::SimulationGroundTruth read_ground_truth(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_ground_truth(in);
}

std::vector<std::string> read_word_list(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<std::string> words;
  std::unordered_set<std::string> seen;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (seen.insert(line).second) words.push_back(line);
  }
  return words;
}

}  // namespace shiftsig::ingest
