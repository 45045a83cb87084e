#pragma once

#include <stdexcept>
#include <string>

namespace wsal {

/// Base class for every recoverable failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No member of the hypothesis class satisfies the label constraints.
class Infeasible : public Error {
 public:
  using Error::Error;
};

/// A sampling loop hit its draw cap before its stopping rule fired.
class BudgetExhausted : public Error {
 public:
  using Error::Error;
};

/// The world refused to hand out more unlabeled points.
class UnlabeledCapExceeded : public BudgetExhausted {
 public:
  using BudgetExhausted::BudgetExhausted;
};

class DoublingCapExceeded : public Error {
 public:
  using Error::Error;
};

/// A diagnostic facility (shadow labels) is switched off.
class Unavailable : public Error {
 public:
  using Error::Error;
};

}  // namespace wsal
