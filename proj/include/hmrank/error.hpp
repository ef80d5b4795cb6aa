#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hmrank {

/// Bad input: a malformed file, an out-of-range parameter, an inconsistent
/// configuration. The CLI maps these to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A line-oriented input file that failed to parse. Carries the 1-based
/// physical line number so callers can point at the offending record.
class ParseError : public ValidationError {
 public:
  ParseError(std::string path, std::size_t line, const std::string& what)
      : ValidationError(path + ":" + std::to_string(line) + ": " + what),
        path_(std::move(path)),
        line_(line) {}

  const std::string& path() const noexcept { return path_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string path_;
  std::size_t line_;
};

/// Failure inside a pipeline stage after validation succeeded.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, std::string topic_id, const std::string& what)
      : std::runtime_error("stage '" + stage + "'" +
                           (topic_id.empty() ? "" : " topic '" + topic_id + "'") + ": " + what),
        stage_(std::move(stage)),
        topic_id_(std::move(topic_id)) {}

  const std::string& stage() const noexcept { return stage_; }
  const std::string& topic_id() const noexcept { return topic_id_; }

 private:
  std::string stage_;
  std::string topic_id_;
};

}  // namespace hmrank
