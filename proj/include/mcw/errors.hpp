#ifndef MCW_ERRORS_HPP
#define MCW_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcw {

/// Base of every error thrown by the library. The CLI maps these to exit status 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input; carries a 1-based line number and the byte offset of that line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t byte_offset)
      : Error(what + " (line " + std::to_string(line) + ", byte " + std::to_string(byte_offset) + ")"),
        line_(line),
        byte_offset_(byte_offset) {}

  std::size_t line() const { return line_; }
  std::size_t byte_offset() const { return byte_offset_; }

 private:
  std::size_t line_;
  std::size_t byte_offset_;
};

/// Relation targets that do not resolve.
class LinkError : public Error {
 public:
  explicit LinkError(std::vector<std::string> unresolved)
      : Error(make_message(unresolved)), unresolved_(std::move(unresolved)) {}

  const std::vector<std::string>& unresolved() const { return unresolved_; }

 private:
  static std::string make_message(const std::vector<std::string>& ids) {
    std::string msg = "unresolved relation targets:";
    for (const auto& id : ids) msg += " " + id;
    return msg;
  }
  std::vector<std::string> unresolved_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Data files disagree with each other; lists the offending entries.
class ConsistencyError : public Error {
 public:
  ConsistencyError(const std::string& what, std::vector<std::string> offenders)
      : Error(what + make_suffix(offenders)), offenders_(std::move(offenders)) {}

  const std::vector<std::string>& offenders() const { return offenders_; }

 private:
  static std::string make_suffix(const std::vector<std::string>& offenders) {
    std::string s = ":";
    std::size_t shown = 0;
    for (const auto& o : offenders) {
      if (shown++ == 20) {
        s += " ... (" + std::to_string(offenders.size()) + " total)";
        break;
      }
      s += " " + o;
    }
    return s;
  }
  std::vector<std::string> offenders_;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

class UnsupportedPosError : public Error {
 public:
  using Error::Error;
};

class VersionMismatchError : public Error {
 public:
  using Error::Error;
};

class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// An edit log could not be applied; the whole log is rejected.
class ApplyError : public Error {
 public:
  ApplyError(const std::string& edit_id, const std::string& what)
      : Error("edit " + edit_id + ": " + what), edit_id_(edit_id) {}

  const std::string& edit_id() const { return edit_id_; }

 private:
  std::string edit_id_;
};

/// A decision on a review item that is no longer open.
class ConflictError : public Error {
 public:
  using Error::Error;
};

/// Hash chain or record layout of an edit log does not verify.
class AuditError : public Error {
 public:
  AuditError(const std::string& what, std::size_t record)
      : Error(what + " (record " + std::to_string(record) + ")"), record_(record) {}

  std::size_t record() const { return record_; }

 private:
  std::size_t record_;
};

}  // namespace mcw

#endif  // MCW_ERRORS_HPP
