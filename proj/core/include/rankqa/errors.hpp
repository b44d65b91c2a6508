#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rankqa {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// datapack
class OutOfBounds : public Error {
public:
  using Error::Error;
};
class MalformedPack : public Error {
public:
  using Error::Error;
};
class UnresolvedReference : public Error {
public:
  using Error::Error;
};

// corpus
class MalformedLine : public Error {
public:
  MalformedLine(const std::string& path, std::size_t line_no, const std::string& what)
      : Error(path + ":" + std::to_string(line_no) + ": " + what), line_no_(line_no) {}
  std::size_t line_no() const { return line_no_; }

private:
  std::size_t line_no_;
};
class MalformedManifest : public Error {
public:
  using Error::Error;
};
class InvalidChunkParams : public Error {
public:
  using Error::Error;
};

// fullranker
class DuplicatePassageId : public Error {
public:
  using Error::Error;
};
class UnknownOrdinal : public Error {
public:
  using Error::Error;
};
class EmptyIndex : public Error {
public:
  using Error::Error;
};
class CorruptIndex : public Error {
public:
  using Error::Error;
};
class VersionMismatch : public Error {
public:
  using Error::Error;
};

// remote clients
class TransportError : public Error {
public:
  using Error::Error;
};
class Timeout : public TransportError {
public:
  using TransportError::TransportError;
};
class ProtocolError : public Error {
public:
  using Error::Error;
};

// reranker / answer
class ScorerFailure : public Error {
public:
  ScorerFailure(std::size_t batch_index, const std::string& what)
      : Error("scorer batch " + std::to_string(batch_index) + ": " + what),
        batch_index_(batch_index) {}
  std::size_t batch_index() const { return batch_index_; }

private:
  std::size_t batch_index_;
};
class ExtractorFailure : public Error {
public:
  using Error::Error;
};
class EmptyContext : public Error {
public:
  using Error::Error;
};

// eval
class NoJudgments : public Error {
public:
  using Error::Error;
};
class DimensionMismatch : public Error {
public:
  using Error::Error;
};

// pipeline
class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& field, const std::string& what)
      : Error("config field '" + field + "': " + what), field_(field) {}
  const std::string& field() const { return field_; }

private:
  std::string field_;
};
class EndpointUnreachable : public Error {
public:
  using Error::Error;
};

}  // namespace rankqa
