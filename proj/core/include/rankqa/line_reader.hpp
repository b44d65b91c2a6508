#pragma once

#include <memory>
#include <string>

namespace rankqa {

/// Reads a text file line by line. Files whose name ends in ".gz" are
/// decompressed transparently. Trailing '\r' is stripped so CRLF input
/// behaves like LF input.
class LineReader {
public:
  explicit LineReader(const std::string& path);
  ~LineReader();
  LineReader(LineReader&&) noexcept;
  LineReader& operator=(LineReader&&) noexcept;

  /// Reads the next line into `line`. Returns false at end of file.
  bool next(std::string& line);

  /// 1-based number of the last line returned by next().
  std::size_t line_no() const { return line_no_; }

  const std::string& path() const { return path_; }

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::string path_;
  std::size_t line_no_ = 0;
};

}  // namespace rankqa
