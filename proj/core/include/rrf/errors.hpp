#pragma once

#include <stdexcept>
#include <string>

namespace rrf {

// Every library failure derives from Error; kind() is the machine-readable
// tag written into CLI error records.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define RRF_DEFINE_ERROR(Name)                                      \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& what) : Error(#Name, what) {}  \
  }

RRF_DEFINE_ERROR(DomainError);
RRF_DEFINE_ERROR(ParallelLines);
RRF_DEFINE_ERROR(ResourceError);
RRF_DEFINE_ERROR(InvalidInstance);
RRF_DEFINE_ERROR(BoundaryState);
RRF_DEFINE_ERROR(InvalidState);
RRF_DEFINE_ERROR(GiveUp);
RRF_DEFINE_ERROR(EmptySample);
RRF_DEFINE_ERROR(SchemaError);
RRF_DEFINE_ERROR(ConfigError);

#undef RRF_DEFINE_ERROR

}  // namespace rrf
