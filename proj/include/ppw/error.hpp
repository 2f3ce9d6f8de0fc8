#pragma once

#include <stdexcept>
#include <string>

namespace ppw {

enum class ErrorKind {
  Model,               // ill-formed program or theory detected at run time
  UnboundVariable,     // a variable had to be bound and was not
  DepthLimit,          // derivation-step budget exhausted
  ImpossibleEvidence,  // every sample weight is zero
  Enumeration,         // exact enumeration unsupported or over budget
  Argument,            // bad caller-supplied argument
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ppw
