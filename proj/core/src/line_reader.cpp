#include "rankqa/line_reader.hpp"

#include <fstream>

#include <zlib.h>

#include "rankqa/errors.hpp"

namespace rankqa {

namespace {
bool ends_with_gz(const std::string& path) {
  return path.size() >= 3 && path.compare(path.size() - 3, 3, ".gz") == 0;
}
}  // namespace

struct LineReader::Impl {
  std::ifstream stream;
  gzFile gz = nullptr;
  std::string buffer;      // carry-over bytes between gzread calls
  bool gz_eof = false;

  ~Impl() {
    if (gz != nullptr) gzclose(gz);
  }

  bool next_plain(std::string& line) {
    if (!std::getline(stream, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }

  bool next_gz(std::string& line) {
    while (true) {
      auto nl = buffer.find('\n');
      if (nl != std::string::npos) {
        line.assign(buffer, 0, nl);
        buffer.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
      }
      if (gz_eof) {
        if (buffer.empty()) return false;
        line = std::move(buffer);
        buffer.clear();
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
      }
      char chunk[1 << 16];
      int n = gzread(gz, chunk, sizeof(chunk));
      if (n < 0) throw Error("gzip read error");
      if (n == 0) {
        gz_eof = true;
      } else {
        buffer.append(chunk, static_cast<std::size_t>(n));
      }
    }
  }
};

LineReader::LineReader(const std::string& path) : impl_(std::make_unique<Impl>()), path_(path) {
  if (ends_with_gz(path)) {
    impl_->gz = gzopen(path.c_str(), "rb");
    if (impl_->gz == nullptr) throw Error("cannot open " + path);
  } else {
    impl_->stream.open(path, std::ios::binary);
    if (!impl_->stream) throw Error("cannot open " + path);
  }
}

LineReader::~LineReader() = default;
LineReader::LineReader(LineReader&&) noexcept = default;
LineReader& LineReader::operator=(LineReader&&) noexcept = default;

bool LineReader::next(std::string& line) {
  const bool ok = impl_->gz != nullptr ? impl_->next_gz(line) : impl_->next_plain(line);
  if (ok) ++line_no_;
  return ok;
}

}  // namespace rankqa
