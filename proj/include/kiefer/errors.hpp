#ifndef KIEFER_ERRORS_HPP
#define KIEFER_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace kiefer {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// --- matrix / spectral failures ---
struct NotSymmetric : Error {
  using Error::Error;
};
struct IndefiniteBeyondTol : Error {
  using Error::Error;
};
struct DimensionMismatch : Error {
  using Error::Error;
};
struct SingularInformationMatrix : Error {
  using Error::Error;
};
struct RankDeficientObservations : Error {
  using Error::Error;
};

// --- document / instance failures ---
struct ParseError : Error {
  using Error::Error;
};
struct SchemaError : Error {
  using Error::Error;
};
struct NotPsd : Error {
  using Error::Error;
};
struct BadParams : Error {
  using Error::Error;
};

// --- solver failures ---
struct SingularIterate : Error {
  using Error::Error;
};

// --- combinatorial / rounding failures ---
struct BadBudget : Error {
  using Error::Error;
};
struct BudgetTooSmall : Error {
  using Error::Error;
};
struct BudgetScaleOverflow : Error {
  using Error::Error;
};
struct NothingAffordable : Error {
  using Error::Error;
};
struct TooLarge : Error {
  using Error::Error;
};
struct AllAtomsNull : Error {
  using Error::Error;
};
struct NotSorted : Error {
  using Error::Error;
};
struct BadSum : Error {
  using Error::Error;
};

}  // namespace kiefer

#endif  // KIEFER_ERRORS_HPP
