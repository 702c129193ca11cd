#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace attn {

// Root of the library's exception hierarchy. Messages always name the
// offending entity (file, line, record id) so the CLI can print them as-is.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad flags, unknown format tags, missing resource files, empty salt.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Unreadable input or unwritable output.
class IoError : public Error {
 public:
  using Error::Error;
};

// Records that parse but break a data contract (duplicate ids, unknown
// references, missing authors).
class DataError : public Error {
 public:
  using Error::Error;
};

// Corpus-level validation failure.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class UnlabeledGroupsError : public ValidationError {
 public:
  explicit UnlabeledGroupsError(std::vector<std::string> groups);
  const std::vector<std::string>& groups() const noexcept { return groups_; }

 private:
  std::vector<std::string> groups_;
};

// Argument outside an operation's mathematical domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Internal invariant violated; indicates a bug or a corrupted upstream file.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace attn
