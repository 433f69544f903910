#include "recon/command.hpp"

#include <algorithm>

#include "recon/digest.hpp"

namespace recon {

namespace {

constexpr std::size_t max_literal = 32;

bool renders_literally(const std::string& p) {
  if (p.empty() || p.size() > max_literal) return false;
  return std::all_of(p.begin(), p.end(), [](char ch) {
    return ch > ' ' && ch < 0x7f && ch != '(' && ch != ')';
  });
}

}  // namespace

const char* to_string(Kind k) noexcept {
  switch (k) {
    case Kind::empty: return "empty";
    case Kind::file: return "file";
    case Kind::directory: return "dir";
  }
  return "?";
}

std::string render(const Content& c) {
  switch (c.kind()) {
    case Kind::empty: return "empty";
    case Kind::directory: return "dir";
    case Kind::file:
      if (renders_literally(c.payload())) return "file(" + c.payload() + ")";
      return "file(sha256:" + sha256_hex(c.payload()) + ")";
  }
  return "?";
}

std::string render(const Command& c) {
  return c.node.str() + ": " + render(c.before) + " -> " + render(c.after);
}

}  // namespace recon
