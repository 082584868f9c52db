#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dschat/errors.hpp"
#include "dschat/json.hpp"
#include "dschat/petel/ml_task.hpp"

namespace dschat::petel {

enum class SlotKind { scalar, list, filter_list };

struct Slot {
  std::string name;
  SlotKind kind;
  bool required;
  std::string description;
};

// Fillable slots only; problem_type is fixed when the PeTEL is created.
struct SlotSchema {
  MlTask task;
  std::vector<Slot> slots;  // serialization order
  // Order the slots are asked for: required first. Supervised schemas ask dataset_size
  // right after the target.
  std::vector<std::string> ask_order;

  const Slot* find(std::string_view name) const;
  // classification_methods, time_series_methods, ...
  const std::string& methods_slot() const;
  bool has_target() const { return find("target_variable") != nullptr; }
};

const SlotSchema& schema_for(MlTask task);

enum class Condition { equals, not_equals, greater_than, less_than, greater_equal, less_equal, in, between };

std::string_view to_string(Condition c);
// Accepts the canonical names plus "less than", ">", "==", "at least", ...
std::optional<Condition> parse_condition(std::string_view text);

struct FilterSpec {
  std::string column;
  Condition condition;
  Json value;  // scalar; array for in; [low, high] for between
};

// Marks an optional slot the user chose not to fill.
inline const std::string kSkipped = "__skipped__";

class UnknownSlot : public ValidationError {
 public:
  explicit UnknownSlot(std::string name)
      : ValidationError("UnknownSlot", "unknown PeTEL slot: " + name), name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class TypeMismatch : public ValidationError {
 public:
  TypeMismatch(std::string slot, const std::string& why)
      : ValidationError("TypeMismatch", "slot " + slot + ": " + why), slot_(std::move(slot)) {}
  const std::string& slot() const noexcept { return slot_; }

 private:
  std::string slot_;
};

// Maps key spellings seen in replies (target_variables, metrics, ...) to a slot of
// `schema`, or "problem_type". Returns "" when nothing matches.
std::string canonical_slot_name(const SlotSchema& schema, std::string_view key);

// Coerces a raw value to the slot's kind; throws TypeMismatch. null stays null.
Json coerce_slot_value(const Slot& slot, const Json& raw);

class Petel {
 public:
  explicit Petel(MlTask task);

  MlTask problem_type() const { return task_; }
  const SlotSchema& schema() const { return schema_for(task_); }

  const Json& get(std::string_view slot) const;
  // Coerces and stores; throws UnknownSlot or TypeMismatch.
  void set(std::string_view slot, const Json& value);
  bool is_filled(std::string_view slot) const;
  bool is_skipped(std::string_view slot) const;

  // Filters with a non-null column and condition.
  std::vector<FilterSpec> filters() const;
  // A scalar slot's value as text; one-element lists are unwrapped.
  std::optional<std::string> scalar_text(std::string_view slot) const;
  // A list slot's values as text; a lone scalar counts as one element.
  std::vector<std::string> list_text(std::string_view slot) const;

  // problem_type first, then schema order.
  OrderedJson to_json() const;
  bool operator==(const Petel& other) const { return task_ == other.task_ && values_ == other.values_; }
  bool operator!=(const Petel& other) const { return !(*this == other); }

 private:
  MlTask task_;
  std::map<std::string, Json> values_;
};

// Text or object in the listing notation or strict JSON. Unknown keys are rejected.
Petel parse_petel(std::string_view text);
Petel petel_from_json(const Json& object);
std::string serialize_petel(const Petel& petel);

struct Completeness {
  bool complete = false;
  std::vector<std::string> missing;
};

// Complete when every required slot is filled; filters whose column is null do not count.
Completeness is_complete(const Petel& petel);

// First unfilled slot in ask order.
std::optional<std::string> next_unfilled_slot(const Petel& petel);

// Fills every unfilled optional slot with the skipped marker.
Petel skip_optional(const Petel& petel);

// Filled and unfilled slot names for progress displays.
struct Progress {
  std::vector<std::string> filled;
  std::vector<std::string> missing;
};
Progress progress(const Petel& petel);

}  // namespace dschat::petel
