#pragma once

#include <stdexcept>
#include <string>

namespace graphpop {

/// Base of every error raised by the library. `tag()` is the short name
/// written into failure records.
class Error : public std::runtime_error {
 public:
  Error(std::string tag, const std::string& what)
      : std::runtime_error(what), tag_(std::move(tag)) {}

  const std::string& tag() const noexcept { return tag_; }

 private:
  std::string tag_;
};

#define GRAPHPOP_DEFINE_ERROR(Name)                                  \
  class Name : public Error {                                        \
   public:                                                           \
    explicit Name(const std::string& what) : Error(#Name, what) {}   \
  };

GRAPHPOP_DEFINE_ERROR(InvalidGraph)
GRAPHPOP_DEFINE_ERROR(InvalidArgument)
GRAPHPOP_DEFINE_ERROR(SplitInfeasible)
GRAPHPOP_DEFINE_ERROR(DegenerateLabels)
GRAPHPOP_DEFINE_ERROR(DegenerateTargets)
GRAPHPOP_DEFINE_ERROR(DegenerateGroups)
GRAPHPOP_DEFINE_ERROR(TooFewValues)
GRAPHPOP_DEFINE_ERROR(NonFinite)
GRAPHPOP_DEFINE_ERROR(NoRecords)
GRAPHPOP_DEFINE_ERROR(AllRoundsFailed)
GRAPHPOP_DEFINE_ERROR(NoComparableLocations)
GRAPHPOP_DEFINE_ERROR(ConfigError)
GRAPHPOP_DEFINE_ERROR(IoError)

#undef GRAPHPOP_DEFINE_ERROR

}  // namespace graphpop
