#include <algorithm>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "hetree/dataset.h"
#include "hetree/error.h"

namespace hetree {

namespace {

constexpr std::string_view kXsd = "http://www.w3.org/2001/XMLSchema#";

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

bool read_digits(std::string_view s, std::size_t pos, std::size_t n, int* out) {
  if (pos + n > s.size()) return false;
  int v = 0;
  for (std::size_t i = pos; i < pos + n; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
    v = v * 10 + (s[i] - '0');
  }
  *out = v;
  return true;
}

struct Literal {
  double value;
  ValueKind kind;
};

enum class LiteralType { kNumeric, kTemporal, kOther };

LiteralType classify_datatype(std::string_view dt) {
  std::string_view local;
  if (dt.substr(0, kXsd.size()) == kXsd) {
    local = dt.substr(kXsd.size());
  } else if (dt.substr(0, 4) == "xsd:") {
    local = dt.substr(4);
  } else {
    return LiteralType::kOther;
  }
  if (local == "integer" || local == "decimal" || local == "double") {
    return LiteralType::kNumeric;
  }
  if (local == "date" || local == "dateTime") return LiteralType::kTemporal;
  return LiteralType::kOther;
}

// Result of reading one N-Triples line.
enum class LineStatus { kBlank, kMalformed, kIneligible, kEligible };

struct Triple {
  std::string subject;
  std::string predicate;
  Literal literal;
};

// Reads "<iri>" or "_:label" starting at pos. Returns the term text.
bool read_term(std::string_view line, std::size_t* pos, std::string* out,
               bool allow_blank) {
  std::size_t p = *pos;
  if (p >= line.size()) return false;
  if (line[p] == '<') {
    std::size_t end = line.find('>', p + 1);
    if (end == std::string_view::npos) return false;
    out->assign(line.substr(p + 1, end - p - 1));
    *pos = end + 1;
    return true;
  }
  if (allow_blank && line.substr(p, 2) == "_:") {
    std::size_t end = p + 2;
    while (end < line.size() && !is_space(line[end])) ++end;
    if (end == p + 2) return false;
    out->assign(line.substr(p, end - p));
    *pos = end;
    return true;
  }
  return false;
}

void skip_spaces(std::string_view line, std::size_t* pos) {
  while (*pos < line.size() && is_space(line[*pos])) ++*pos;
}

LineStatus read_ntriple(std::string_view raw, Triple* triple) {
  std::string_view line = trim(raw);
  if (line.empty() || line.front() == '#') return LineStatus::kBlank;
  std::size_t pos = 0;
  if (!read_term(line, &pos, &triple->subject, true)) return LineStatus::kMalformed;
  skip_spaces(line, &pos);
  if (!read_term(line, &pos, &triple->predicate, false)) {
    return LineStatus::kMalformed;
  }
  skip_spaces(line, &pos);
  if (pos >= line.size()) return LineStatus::kMalformed;
  if (line.back() != '.') return LineStatus::kMalformed;
  std::string_view body = trim(line.substr(0, line.size() - 1));
  if (pos >= body.size()) return LineStatus::kMalformed;
  std::string_view rest = body.substr(pos);
  if (rest.front() != '"') {
    std::string ignored;
    std::size_t p = 0;
    return read_term(rest, &p, &ignored, true) && p == rest.size()
               ? LineStatus::kIneligible
               : LineStatus::kMalformed;
  }
  std::string lexical;
  std::size_t p = 1;
  bool closed = false;
  while (p < rest.size()) {
    char c = rest[p];
    if (c == '\\' && p + 1 < rest.size()) {
      lexical.push_back(rest[p + 1]);
      p += 2;
      continue;
    }
    if (c == '"') {
      closed = true;
      ++p;
      break;
    }
    lexical.push_back(c);
    ++p;
  }
  if (!closed) return LineStatus::kMalformed;
  std::string_view suffix = rest.substr(p);
  if (suffix.empty() || suffix.front() == '@') return LineStatus::kIneligible;
  if (suffix.substr(0, 2) != "^^") return LineStatus::kMalformed;
  suffix.remove_prefix(2);
  std::string datatype;
  if (!suffix.empty() && suffix.front() == '<') {
    std::size_t q = 0;
    if (!read_term(suffix, &q, &datatype, false) || q != suffix.size()) {
      return LineStatus::kMalformed;
    }
  } else {
    datatype.assign(suffix);
  }
  switch (classify_datatype(datatype)) {
    case LiteralType::kOther:
      return LineStatus::kIneligible;
    case LiteralType::kNumeric: {
      auto v = parse_numeric(lexical);
      if (!v) return LineStatus::kMalformed;
      triple->literal = {*v, ValueKind::kNumeric};
      return LineStatus::kEligible;
    }
    case LiteralType::kTemporal: {
      auto v = parse_temporal(lexical);
      if (!v) return LineStatus::kMalformed;
      triple->literal = {*v, ValueKind::kTemporal};
      return LineStatus::kEligible;
    }
  }
  return LineStatus::kMalformed;
}

std::vector<std::string_view> split_lines(std::string_view bytes) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < bytes.size()) {
    std::size_t end = bytes.find('\n', start);
    if (end == std::string_view::npos) end = bytes.size();
    lines.push_back(bytes.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

// RFC-4180 records. Returns false for an unterminated quote at end of input.
std::vector<std::vector<std::string>> read_csv_records(std::string_view bytes,
                                                       std::size_t* broken) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
    record.clear();
  };
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    char c = bytes[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < bytes.size() && bytes[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\n') {
      end_record();
    } else if (c == '\r') {
      if (i + 1 < bytes.size() && bytes[i + 1] == '\n') continue;
      end_record();
    } else {
      field.push_back(c);
      field_started = true;
    }
  }
  if (in_quotes) {
    ++*broken;
  } else if (field_started || !record.empty()) {
    end_record();
  }
  return records;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

const char* value_kind_name(ValueKind kind) {
  return kind == ValueKind::kNumeric ? "numeric" : "temporal";
}

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyDataset: return "empty_dataset";
    case ErrorCode::kMixedKinds: return "mixed_kinds";
    case ErrorCode::kParameter: return "parameter";
    case ErrorCode::kPrecondition: return "precondition";
    case ErrorCode::kDegenerateRange: return "degenerate_range";
    case ErrorCode::kNoCandidate: return "no_candidate";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kEmptyRange: return "empty_range";
    case ErrorCode::kStaleOperation: return "stale_operation";
    case ErrorCode::kInvalidOperation: return "invalid_operation";
    case ErrorCode::kTopOfTree: return "top_of_tree";
    case ErrorCode::kUnsupported: return "unsupported";
    case ErrorCode::kNoOp: return "no_op";
    case ErrorCode::kInvariant: return "invariant";
  }
  return "unknown";
}

Dataset::Dataset(std::vector<DataObject> objects, ValueKind kind, bool sorted)
    : base_(std::make_shared<const std::vector<DataObject>>(std::move(objects))),
      kind_(kind),
      sorted_(sorted) {
  init_values();
}

Dataset::Dataset(std::shared_ptr<const std::vector<DataObject>> base,
                 std::vector<std::uint32_t> order, ValueKind kind, bool sorted)
    : base_(std::move(base)), order_(std::move(order)), kind_(kind), sorted_(sorted) {
  init_values();
}

Dataset::Dataset(std::shared_ptr<const std::vector<DataObject>> base,
                 std::vector<std::uint32_t> order, std::vector<double> values, ValueKind kind,
                 bool sorted)
    : base_(std::move(base)),
      order_(std::move(order)),
      values_(std::move(values)),
      kind_(kind),
      sorted_(sorted) {
  init_range();
}

void Dataset::init_values() {
  std::size_t n = order_.empty() ? base_->size() : order_.size();
  values_.resize(n);
  for (std::size_t i = 0; i < n; ++i) values_[i] = (*this)[i].value;
  init_range();
}

void Dataset::init_range() {
  if (!values_.empty()) {
    auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
    minv_ = *lo;
    maxv_ = *hi;
  }
}

const std::string& Dataset::predicate() const {
  static const std::string kNone;
  return empty() ? kNone : (*this)[0].predicate;
}

std::optional<double> parse_numeric(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<double> parse_temporal(std::string_view text) {
  using namespace std::chrono;
  text = trim(text);
  int y, mo, d;
  if (text.size() < 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  if (!read_digits(text, 0, 4, &y) || !read_digits(text, 5, 2, &mo) ||
      !read_digits(text, 8, 2, &d)) {
    return std::nullopt;
  }
  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                     day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  double ms = static_cast<double>(sys_days{ymd}.time_since_epoch().count()) *
              86400000.0;
  std::size_t pos = 10;
  if (pos < text.size() && text[pos] == 'T') {
    int hh, mm, ss;
    if (!read_digits(text, pos + 1, 2, &hh) || text.size() < pos + 9 ||
        text[pos + 3] != ':' || !read_digits(text, pos + 4, 2, &mm) ||
        text[pos + 6] != ':' || !read_digits(text, pos + 7, 2, &ss)) {
      return std::nullopt;
    }
    if (hh > 24 || mm > 59 || ss > 60) return std::nullopt;
    pos += 9;
    double frac = 0;
    if (pos < text.size() && text[pos] == '.') {
      double scale = 0.1;
      ++pos;
      std::size_t start = pos;
      while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
        frac += (text[pos] - '0') * scale;
        scale /= 10;
        ++pos;
      }
      if (pos == start) return std::nullopt;
    }
    ms += ((hh * 60.0 + mm) * 60.0 + ss) * 1000.0 + std::round(frac * 1000.0);
  }
  if (pos < text.size()) {
    char c = text[pos];
    if (c == 'Z' && pos + 1 == text.size()) {
      pos += 1;
    } else if ((c == '+' || c == '-') && text.size() == pos + 6 &&
               text[pos + 3] == ':') {
      int oh, om;
      if (!read_digits(text, pos + 1, 2, &oh) || !read_digits(text, pos + 4, 2, &om)) {
        return std::nullopt;
      }
      double offset = (oh * 60.0 + om) * 60000.0;
      ms += c == '+' ? -offset : offset;
      pos += 6;
    } else {
      return std::nullopt;
    }
  }
  if (pos != text.size()) return std::nullopt;
  return ms;
}

std::string format_temporal(double epoch_ms) {
  using namespace std::chrono;
  auto total = milliseconds{static_cast<long long>(std::llround(epoch_ms))};
  auto days = floor<std::chrono::days>(total);
  year_month_day ymd{sys_days{days}};
  long long rest = (total - days).count();
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lld.%03lldZ",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()), rest / 3600000,
                rest / 60000 % 60, rest / 1000 % 60, rest % 1000);
  return buf;
}

std::string format_number(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

ParseResult parse_ntriples(std::string_view bytes,
                           std::optional<std::string> predicate_filter) {
  ParseResult result;
  std::vector<Triple> eligible;
  for (std::string_view line : split_lines(bytes)) {
    Triple t;
    switch (read_ntriple(line, &t)) {
      case LineStatus::kBlank: break;
      case LineStatus::kMalformed: ++result.report.malformed; break;
      case LineStatus::kIneligible: ++result.report.ineligible; break;
      case LineStatus::kEligible: eligible.push_back(std::move(t)); break;
    }
  }
  if (eligible.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "no eligible numeric or temporal triples");
  }
  std::string predicate;
  if (predicate_filter) {
    predicate = *predicate_filter;
    if (predicate.size() >= 2 && predicate.front() == '<' && predicate.back() == '>') {
      predicate = predicate.substr(1, predicate.size() - 2);
    }
  } else {
    std::map<std::string, std::size_t> freq;
    for (const Triple& t : eligible) ++freq[t.predicate];
    std::size_t best = 0;
    for (const auto& [p, n] : freq) {
      if (n > best) {
        best = n;
        predicate = p;
      }
    }
  }
  std::vector<DataObject> objects;
  std::optional<ValueKind> kind;
  for (Triple& t : eligible) {
    if (t.predicate != predicate) {
      ++result.report.other_predicate;
      continue;
    }
    if (kind && *kind != t.literal.kind) {
      throw Error(ErrorCode::kMixedKinds,
                  "predicate <" + predicate + "> mixes numeric and temporal values");
    }
    kind = t.literal.kind;
    objects.push_back({std::move(t.subject), std::move(t.predicate), t.literal.value});
  }
  if (objects.empty()) {
    throw Error(ErrorCode::kEmptyDataset,
                "no eligible triples for predicate <" + predicate + ">");
  }
  result.dataset = Dataset(std::move(objects), *kind);
  return result;
}

ParseResult parse_csv(std::string_view bytes, std::string_view subject_column,
                      std::string_view value_column) {
  ParseResult result;
  std::size_t broken = 0;
  auto records = read_csv_records(bytes, &broken);
  result.report.malformed += broken;
  if (records.empty()) throw Error(ErrorCode::kEmptyDataset, "CSV input has no header");
  const auto& header = records.front();
  auto find_col = [&](std::string_view name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (trim(header[i]) == name) return i;
    }
    throw Error(ErrorCode::kParameter,
                "CSV header has no column '" + std::string(name) + "'");
  };
  std::size_t scol = find_col(subject_column);
  std::size_t vcol = find_col(value_column);
  std::string predicate(value_column);
  std::vector<DataObject> objects;
  std::optional<ValueKind> kind;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& row = records[r];
    if (row.size() <= std::max(scol, vcol) || trim(row[scol]).empty()) {
      ++result.report.malformed;
      continue;
    }
    std::optional<double> num = parse_numeric(row[vcol]);
    std::optional<double> tmp = num ? std::nullopt : parse_temporal(row[vcol]);
    if (!num && !tmp) {
      ++result.report.malformed;
      continue;
    }
    ValueKind k = num ? ValueKind::kNumeric : ValueKind::kTemporal;
    if (kind && *kind != k) {
      throw Error(ErrorCode::kMixedKinds,
                  "column '" + predicate + "' mixes numeric and temporal values");
    }
    kind = k;
    objects.push_back({std::string(trim(row[scol])), predicate, num ? *num : *tmp});
  }
  if (objects.empty()) throw Error(ErrorCode::kEmptyDataset, "no usable CSV rows");
  result.dataset = Dataset(std::move(objects), *kind);
  return result;
}

std::string write_csv(const Dataset& dataset) {
  std::string out = "subject," + csv_quote(dataset.predicate()) + "\n";
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    out += csv_quote(dataset[i].subject);
    out += ',';
    out += dataset.kind() == ValueKind::kTemporal ? format_temporal(dataset.value(i))
                                                  : format_number(dataset.value(i));
    out += '\n';
  }
  return out;
}

bool object_less(const DataObject& a, const DataObject& b) {
  if (a.value != b.value) return a.value < b.value;
  return a.subject < b.subject;
}

namespace {

struct SortKey {
  std::uint64_t bits;
  std::uint32_t index;
};

double key_value(std::uint64_t b) {
  return std::bit_cast<double>((b >> 63) ? b & ~(std::uint64_t{1} << 63) : ~b);
}

// Stable LSD passes over the bytes that vary, ping-ponging through `b`.
void radix_bits(SortKey* a, SortKey* b, std::size_t n) {
  std::uint64_t lo = a[0].bits, hi = a[0].bits;
  for (std::size_t i = 1; i < n; ++i) {
    lo = std::min(lo, a[i].bits);
    hi = std::max(hi, a[i].bits);
  }
  const int bytes = (static_cast<int>(std::bit_width(lo ^ hi)) + 7) / 8;
  std::size_t counts[8][256];
  std::memset(counts, 0, sizeof(counts[0]) * bytes);
  for (std::size_t i = 0; i < n; ++i) {
    for (int d = 0; d < bytes; ++d) ++counts[d][(a[i].bits >> (8 * d)) & 0xff];
  }
  SortKey* src = a;
  SortKey* dst = b;
  for (int d = 0; d < bytes; ++d) {
    std::size_t* c = counts[d];
    if (c[(src[0].bits >> (8 * d)) & 0xff] == n) continue;  // one bucket
    std::size_t sum = 0;
    for (int k = 0; k < 256; ++k) {
      std::size_t x = c[k];
      c[k] = sum;
      sum += x;
    }
    for (std::size_t i = 0; i < n; ++i) dst[c[(src[i].bits >> (8 * d)) & 0xff]++] = src[i];
    std::swap(src, dst);
  }
  if (src != a) std::memcpy(a, src, n * sizeof(SortKey));
}

// Stable sort by bits of the n keys in `data`, leaving the result in `data`
// or in `other`; the buffer not holding the result is scratch. Keys are
// spread over buckets by their value's position between the extremes, about
// eight per bucket and at most 256 buckets so every scatter stays cache
// friendly, and larger buckets recurse with the buffers swapped. Skewed
// values that keep landing in one bucket fall back to byte passes.
void sort_keys(SortKey* data, SortKey* other, std::size_t n, bool result_in_data,
               int depth = 0) {
  SortKey* out = result_in_data ? data : other;
  if (n <= 32) {
    if (out != data) std::copy(data, data + n, out);
    for (std::size_t i = 1; i < n; ++i) {
      SortKey k = out[i];
      std::size_t j = i;
      for (; j > 0 && out[j - 1].bits > k.bits; --j) out[j] = out[j - 1];
      out[j] = k;
    }
    return;
  }
  std::uint64_t lo = data[0].bits, hi = data[0].bits;
  for (std::size_t i = 1; i < n; ++i) {
    lo = std::min(lo, data[i].bits);
    hi = std::max(hi, data[i].bits);
  }
  if (lo == hi) {
    if (out != data) std::copy(data, data + n, out);
    return;
  }
  const std::size_t buckets = std::min<std::size_t>(256, n / 8);
  const double low = key_value(lo);
  const double scale = buckets / (key_value(hi) - low);
  if (!std::isfinite(scale) || scale <= 0.0 || depth == 6) {
    radix_bits(data, other, n);
    if (out != data) std::copy(data, data + n, out);
    return;
  }
  auto bucket_of = [&](const SortKey& k) {
    double x = (key_value(k.bits) - low) * scale;
    return x < static_cast<double>(buckets) ? static_cast<std::size_t>(x) : buckets - 1;
  };
  std::size_t start[257] = {};
  for (std::size_t i = 0; i < n; ++i) ++start[bucket_of(data[i]) + 1];
  for (std::size_t b = 1; b <= buckets; ++b) start[b] += start[b - 1];
  std::size_t pos[256];
  std::copy(start, start + buckets, pos);
  for (std::size_t i = 0; i < n; ++i) other[pos[bucket_of(data[i])]++] = data[i];
  for (std::size_t b = 0; b < buckets; ++b) {
    std::size_t s = start[b], e = start[b + 1];
    sort_keys(other + s, data + s, e - s, !result_in_data, depth + 1);
  }
}

}  // namespace

Dataset sort_dataset(const Dataset& dataset) {
  // Sorts on the order-preserving bit pattern of each value. Every step is
  // stable, so equal values stay in index order and only the subject
  // tie-break remains.
  const std::size_t n = dataset.size();
  std::unique_ptr<SortKey[]> keys(new SortKey[n]), tmp(new SortKey[n]);
  for (std::size_t i = 0; i < n; ++i) {
    double v = dataset.value(i);
    if (v == 0.0) v = 0.0;  // -0.0 and 0.0 must tie
    std::uint64_t b = std::bit_cast<std::uint64_t>(v);
    b = (b >> 63) ? ~b : b | (std::uint64_t{1} << 63);
    keys[i] = {b, static_cast<std::uint32_t>(i)};
  }
  sort_keys(keys.get(), tmp.get(), n, true);
  std::vector<std::uint32_t> order(n);
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && keys[j].bits == keys[i].bits) ++j;
    if (j - i > 1) {
      std::stable_sort(keys.get() + i, keys.get() + j, [&](const SortKey& a, const SortKey& b) {
        return dataset[a.index].subject < dataset[b.index].subject;
      });
    }
    const double v = key_value(keys[i].bits);
    for (; i < j; ++i) {
      order[i] = dataset.base_index(keys[i].index);
      values[i] = v;
    }
  }
  return Dataset(dataset.base(), std::move(order), std::move(values), dataset.kind(), true);
}

}  // namespace hetree
