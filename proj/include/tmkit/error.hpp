#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tmkit {

/// Stable failure codes shared by every module.
enum class Errc {
  UnknownMachinePath,
  UnknownThing,
  StageNotDeclared,
  ElementNotInModel,
  DanglingReference,
  InvalidModel,
  CyclicInduction,
  IdSetMismatch,
  AmbiguousFlow,
  UnresolvedRef,
  UnknownFixture,
  Syntax,
};

std::string_view to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace tmkit
