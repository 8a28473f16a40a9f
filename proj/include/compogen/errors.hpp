#pragma once

#include <stdexcept>
#include <string>

namespace compogen {

// Root of every error the library raises. Subclasses name the failing contract
// so callers (and the CLI) can report the category without parsing messages.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define COMPOGEN_DEFINE_ERROR(Name)      \
  class Name : public Error {            \
   public:                               \
    using Error::Error;                  \
  };

COMPOGEN_DEFINE_ERROR(DimensionError)
COMPOGEN_DEFINE_ERROR(TileError)
COMPOGEN_DEFINE_ERROR(ShapeError)
COMPOGEN_DEFINE_ERROR(BoundsError)
COMPOGEN_DEFINE_ERROR(EmptyGridError)
COMPOGEN_DEFINE_ERROR(SizeError)
COMPOGEN_DEFINE_ERROR(ArityError)
COMPOGEN_DEFINE_ERROR(SpecError)
COMPOGEN_DEFINE_ERROR(EvaluationError)
COMPOGEN_DEFINE_ERROR(MappingError)
COMPOGEN_DEFINE_ERROR(StructureError)
COMPOGEN_DEFINE_ERROR(FormatError)
COMPOGEN_DEFINE_ERROR(ConfigError)
COMPOGEN_DEFINE_ERROR(TilesetError)
COMPOGEN_DEFINE_ERROR(FileError)

#undef COMPOGEN_DEFINE_ERROR

}  // namespace compogen
