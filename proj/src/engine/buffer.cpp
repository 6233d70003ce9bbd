#include "tsg/engine/buffer.hpp"

#include <stdexcept>

namespace tsg::engine {

const char* to_string(Origin origin) { return origin == Origin::Node ? "node" : "injected"; }
const char* to_string(RecordKind kind) { return kind == RecordKind::Data ? "data" : "exit"; }

Seq Buffer::append(Instant timestamp, Origin origin, RecordKind kind, std::string text) {
  const Seq seq = records_.size();
  records_.push_back({seq, timestamp, origin, kind, std::move(text)});
  return seq;
}

const BufferRecord* Buffer::latest_data() const {
  for (auto it = records_.rbegin(); it != records_.rend(); ++it)
    if (it->kind == RecordKind::Data) return &*it;
  return nullptr;
}

Delta read_delta(const Buffer& buffer, Cursor& cursor) {
  if (cursor.buffer != buffer.id()) throw std::invalid_argument("cursor does not belong to " + buffer.id());
  Delta d;
  for (Seq s = cursor.next; s < buffer.size(); ++s) {
    const BufferRecord& r = buffer.at(s);
    if (r.kind == RecordKind::Data) d.text += r.text;
    else ++d.exits;
    ++d.records;
  }
  cursor.next = buffer.size();
  return d;
}

}  // namespace tsg::engine
