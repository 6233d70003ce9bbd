#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tsg::engine {

using Instant = std::int64_t;  // milliseconds on the engine clock
using Seq = std::uint64_t;

enum class Origin { Node, Injected };
enum class RecordKind { Data, Exit };

const char* to_string(Origin origin);
const char* to_string(RecordKind kind);

struct BufferRecord {
  Seq seq = 0;
  Instant timestamp = 0;
  Origin origin = Origin::Node;
  RecordKind kind = RecordKind::Data;
  std::string text;
};

/// Append-only record stream carried by one node output. Records never
/// change once appended; `seq` equals the record's position.
class Buffer {
 public:
  Buffer(std::string id, std::string owner, std::optional<int> output)
      : id_(std::move(id)), owner_(std::move(owner)), output_(output) {}

  const std::string& id() const { return id_; }
  const std::string& owner() const { return owner_; }
  std::optional<int> output() const { return output_; }

  Seq append(Instant timestamp, Origin origin, RecordKind kind, std::string text);

  Seq size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const BufferRecord& at(Seq seq) const { return records_.at(seq); }
  const std::vector<BufferRecord>& records() const { return records_; }

  /// Latest data record, if any.
  const BufferRecord* latest_data() const;

 private:
  std::string id_;
  std::string owner_;
  std::optional<int> output_;
  std::vector<BufferRecord> records_;
};

struct Cursor {
  std::string buffer;
  Seq next = 0;
};

struct Delta {
  std::string text;  // data records only, concatenated
  Seq records = 0;   // records consumed, exit records included
  Seq exits = 0;
};

/// Reads everything past the cursor and moves it to the end.
Delta read_delta(const Buffer& buffer, Cursor& cursor);

}  // namespace tsg::engine
