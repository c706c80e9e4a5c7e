#ifndef HETREE_DATASET_H_
#define HETREE_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hetree {

enum class ValueKind { kNumeric, kTemporal };

const char* value_kind_name(ValueKind kind);

// One (subject, predicate, value) triple. Temporal values are stored as
// milliseconds since the Unix epoch (UTC).
struct DataObject {
  std::string subject;
  std::string predicate;
  double value = 0.0;
};

// Position of an object inside the dataset a tree was built from.
using ObjectRef = std::uint32_t;

// Immutable list of objects sharing one value kind. A sorted dataset is a
// permutation over the objects of the dataset it was sorted from, so sorting
// never copies subjects or predicates. Values are kept in a contiguous array
// in dataset order.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<DataObject> objects, ValueKind kind, bool sorted = false);
  // Element i is (*base)[order[i]].
  Dataset(std::shared_ptr<const std::vector<DataObject>> base,
          std::vector<std::uint32_t> order, ValueKind kind, bool sorted);
  // As above with values[i] already equal to (*base)[order[i]].value.
  Dataset(std::shared_ptr<const std::vector<DataObject>> base,
          std::vector<std::uint32_t> order, std::vector<double> values, ValueKind kind,
          bool sorted);

  const DataObject& operator[](std::size_t i) const {
    return (*base_)[order_.empty() ? i : order_[i]];
  }
  double value(std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  ValueKind kind() const { return kind_; }
  bool sorted() const { return sorted_; }

  // Only meaningful for non-empty datasets.
  double minv() const { return minv_; }
  double maxv() const { return maxv_; }

  const std::string& predicate() const;

  const std::shared_ptr<const std::vector<DataObject>>& base() const { return base_; }
  std::uint32_t base_index(std::size_t i) const {
    return order_.empty() ? static_cast<std::uint32_t>(i) : order_[i];
  }

 private:
  void init_values();
  void init_range();

  std::shared_ptr<const std::vector<DataObject>> base_ =
      std::make_shared<const std::vector<DataObject>>();
  std::vector<std::uint32_t> order_;
  std::vector<double> values_;
  ValueKind kind_ = ValueKind::kNumeric;
  bool sorted_ = false;
  double minv_ = 0.0;
  double maxv_ = 0.0;
};

struct ParseReport {
  std::size_t malformed = 0;     // lines or rows that could not be read
  std::size_t ineligible = 0;    // well-formed but not a usable literal
  std::size_t other_predicate = 0;
};

struct ParseResult {
  Dataset dataset;
  ParseReport report;
};

// Parses the N-Triples subset with typed numeric/temporal literals. Without
// a filter the most frequent eligible predicate is used.
ParseResult parse_ntriples(std::string_view bytes,
                           std::optional<std::string> predicate_filter = {});

// Parses RFC-4180 CSV with a header row. Columns are looked up by header name.
ParseResult parse_csv(std::string_view bytes, std::string_view subject_column,
                      std::string_view value_column);

// Canonical CSV form: header "subject,<predicate>", values printed so that
// parse_csv reproduces them bit for bit.
std::string write_csv(const Dataset& dataset);

// Sorted by value, ties by subject.
Dataset sort_dataset(const Dataset& dataset);

bool object_less(const DataObject& a, const DataObject& b);

// Accepts YYYY-MM-DD and YYYY-MM-DDThh:mm:ss[.fff][Z|(+|-)hh:mm].
std::optional<double> parse_temporal(std::string_view text);
std::optional<double> parse_numeric(std::string_view text);
std::string format_temporal(double epoch_ms);
std::string format_number(double value);

}  // namespace hetree

#endif  // HETREE_DATASET_H_
