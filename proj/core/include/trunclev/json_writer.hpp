// Copyright (c) 2026 the trunclev authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace trunclev {

/// Minimal streaming JSON writer with a fixed, caller-controlled key order
/// and doubles printed with 17 significant digits ("%.17g"), so that equal
/// inputs serialize to identical bytes and every double round-trips.
class JsonWriter {
 public:
  JsonWriter() { stack_.reserve(8); }

  void begin_object() {
    separate();
    out_ += '{';
    stack_.push_back(Frame::object_first);
  }
  void end_object() {
    pop(Frame::object_first, Frame::object);
    out_ += '}';
  }
  void begin_array() {
    separate();
    out_ += '[';
    stack_.push_back(Frame::array_first);
  }
  void end_array() {
    pop(Frame::array_first, Frame::array);
    out_ += ']';
  }

  void key(std::string_view k) {
    separate_key();
    append_string(k);
    out_ += ':';
    pending_value_ = true;
  }

  void value(double v) {
    separate();
    if (!std::isfinite(v)) {
      out_ += "null";
      return;
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out_ += buf;
  }
  void value(bool v) {
    separate();
    out_ += v ? "true" : "false";
  }
  void value(long long v) {
    separate();
    out_ += std::to_string(v);
  }
  void value(int v) { value(static_cast<long long>(v)); }
  void value(long v) { value(static_cast<long long>(v)); }
  void value(std::size_t v) { value(static_cast<long long>(v)); }
  void value(std::string_view s) {
    separate();
    append_string(s);
  }
  void value(const char* s) { value(std::string_view(s)); }
  void null() {
    separate();
    out_ += "null";
  }

  const std::string& str() const {
    if (!stack_.empty()) throw std::logic_error("JsonWriter: unbalanced document");
    return out_;
  }

 private:
  enum class Frame { object_first, object, array_first, array };

  void separate_key() {
    if (stack_.empty()) throw std::logic_error("JsonWriter: key outside object");
    Frame& f = stack_.back();
    if (f == Frame::object) out_ += ',';
    f = Frame::object;
  }

  void separate() {
    if (pending_value_) {
      pending_value_ = false;
      return;
    }
    if (stack_.empty()) return;
    Frame& f = stack_.back();
    if (f == Frame::array) out_ += ',';
    if (f == Frame::array_first) f = Frame::array;
  }

  void pop(Frame first, Frame rest) {
    if (stack_.empty() || (stack_.back() != first && stack_.back() != rest))
      throw std::logic_error("JsonWriter: mismatched end");
    stack_.pop_back();
  }

  void append_string(std::string_view s) {
    out_ += '"';
    for (char c : s) {
      switch (c) {
        case '"': out_ += "\\\""; break;
        case '\\': out_ += "\\\\"; break;
        case '\n': out_ += "\\n"; break;
        case '\t': out_ += "\\t"; break;
        case '\r': out_ += "\\r"; break;
        default:
          if (static_cast<unsigned char>(c) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof(buf), "\\u%04x", c);
            out_ += buf;
          } else {
            out_ += c;
          }
      }
    }
    out_ += '"';
  }

  std::string out_;
  std::vector<Frame> stack_;
  bool pending_value_ = false;
};

}  // namespace trunclev
