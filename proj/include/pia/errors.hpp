#pragma once

#include <stdexcept>
#include <string>

namespace pia {

// Base of every error raised by the pipeline. The category is the stable,
// user-facing name ("CacheError", "MetricError", ...) that the CLI prints.
class Error : public std::runtime_error {
 public:
  Error(std::string category, const std::string& message)
      : std::runtime_error(category + ": " + message), category_(std::move(category)) {}

  const std::string& category() const noexcept { return category_; }

 private:
  std::string category_;
};

#define PIA_DEFINE_ERROR(Name)                                        \
  class Name : public Error {                                         \
   public:                                                            \
    explicit Name(const std::string& message) : Error(#Name, message) {} \
  };

PIA_DEFINE_ERROR(InvalidInput)
PIA_DEFINE_ERROR(AdapterError)
PIA_DEFINE_ERROR(DecodeError)
PIA_DEFINE_ERROR(NoFaceError)
PIA_DEFINE_ERROR(CacheError)
PIA_DEFINE_ERROR(ShapeError)
PIA_DEFINE_ERROR(EmptySequence)
PIA_DEFINE_ERROR(NumericalError)
PIA_DEFINE_ERROR(EmptySeries)
PIA_DEFINE_ERROR(MetricError)
PIA_DEFINE_ERROR(InvalidDataset)
PIA_DEFINE_ERROR(InvalidConfig)

#undef PIA_DEFINE_ERROR

}  // namespace pia
