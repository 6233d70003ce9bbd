#pragma once

#include <chrono>

#include "tsg/engine/buffer.hpp"

namespace tsg::engine {

class Clock {
 public:
  virtual ~Clock() = default;
  virtual Instant now() const = 0;
  virtual bool is_virtual() const = 0;
};

/// Time moves only when the engine is told to advance it.
class VirtualClock : public Clock {
 public:
  Instant now() const override { return now_; }
  bool is_virtual() const override { return true; }
  void set(Instant t) { now_ = t; }

 private:
  Instant now_ = 0;
};

/// Wall time in milliseconds since construction.
class RealClock : public Clock {
 public:
  RealClock() : origin_(std::chrono::steady_clock::now()) {}
  Instant now() const override {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - origin_).count();
  }
  bool is_virtual() const override { return false; }

 private:
  std::chrono::steady_clock::time_point origin_;
};

}  // namespace tsg::engine
