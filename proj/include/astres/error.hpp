#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace astres {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
  ParseError(const std::string &what, std::size_t offset)
      : Error(what + " at byte " + std::to_string(offset)), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

private:
  std::size_t offset_;
};

#define ASTRES_DEFINE_ERROR(Name)                                              \
  class Name : public Error {                                                  \
  public:                                                                      \
    using Error::Error;                                                        \
  }

ASTRES_DEFINE_ERROR(UnsupportedConstruct);
ASTRES_DEFINE_ERROR(UnresolvableAlias);
ASTRES_DEFINE_ERROR(ModeMismatch);
ASTRES_DEFINE_ERROR(EmbedderUnavailable);
ASTRES_DEFINE_ERROR(InvalidR);
ASTRES_DEFINE_ERROR(MissingColumn);
ASTRES_DEFINE_ERROR(ApproximatorUnavailable);
ASTRES_DEFINE_ERROR(LookupMiss);
ASTRES_DEFINE_ERROR(InconsistentBundle);
ASTRES_DEFINE_ERROR(EndpointError);
ASTRES_DEFINE_ERROR(SchemaRefError);
ASTRES_DEFINE_ERROR(ConfigError);
ASTRES_DEFINE_ERROR(IoError);

#undef ASTRES_DEFINE_ERROR

/// No parseable SQL statement could be extracted from an LLM response.
class ExtractionError : public Error {
public:
  ExtractionError(const std::string &what, std::string raw)
      : Error(what), raw_(std::move(raw)) {}

  const std::string &raw() const noexcept { return raw_; }

private:
  std::string raw_;
};

} // namespace astres
