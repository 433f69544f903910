#pragma once

#include <compare>
#include <string>
#include <utility>

#include "recon/namespace.hpp"

namespace recon {

/// Content type. The enumerator order is the structural rank used by the
/// algebra: constructors move up this order, destructors move down.
enum class Kind : unsigned char { empty = 0, file = 1, directory = 2 };

const char* to_string(Kind k) noexcept;

/// Value stored at a node. There is exactly one empty value and one
/// directory value; file values compare by payload bytes.
class Content {
 public:
  Content() = default;

  static Content empty() { return Content(); }
  static Content dir() { return Content(Kind::directory, {}); }
  static Content file(std::string payload) { return Content(Kind::file, std::move(payload)); }

  Kind kind() const noexcept { return kind_; }
  bool is_empty() const noexcept { return kind_ == Kind::empty; }
  bool is_dir() const noexcept { return kind_ == Kind::directory; }
  bool is_file() const noexcept { return kind_ == Kind::file; }

  /// Empty unless this is a file.
  const std::string& payload() const noexcept { return payload_; }

  friend bool operator==(const Content&, const Content&) = default;
  friend auto operator<=>(const Content&, const Content&) = default;

 private:
  Content(Kind k, std::string p) : kind_(k), payload_(std::move(p)) {}

  Kind kind_ = Kind::empty;
  std::string payload_;
};

/// Internal command <node, before, after>: replaces `before` with `after`.
struct Command {
  NodeId node;
  Content before;
  Content after;

  friend bool operator==(const Command&, const Command&) = default;
  friend auto operator<=>(const Command&, const Command&) = default;
};

/// `empty`, `dir`, or `file(<literal-or-digest>)`.
std::string render(const Content& c);

/// `node: BEFORE -> AFTER`.
std::string render(const Command& c);

}  // namespace recon
