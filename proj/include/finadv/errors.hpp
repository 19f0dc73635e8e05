#pragma once

#include <stdexcept>
#include <string>

#include "finadv/variables.hpp"

namespace finadv {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// --- panel construction and recomputation -------------------------------

class PanelError : public Error {
 public:
  using Error::Error;
};

class DuplicateYear : public PanelError {
 public:
  explicit DuplicateYear(int year)
      : PanelError("duplicate fiscal year " + std::to_string(year)), year_(year) {}
  int year() const noexcept { return year_; }

 private:
  int year_;
};

class InsufficientYears : public PanelError {
 public:
  explicit InsufficientYears(std::size_t n)
      : PanelError("panel needs at least 2 fiscal years, got " + std::to_string(n)) {}
};

class MissingVariable : public PanelError {
 public:
  MissingVariable(int year, Var v)
      : PanelError("missing " + std::string(code(v)) + " in fiscal year " + std::to_string(year)),
        year_(year),
        var_(v) {}
  int year() const noexcept { return year_; }
  Var variable() const noexcept { return var_; }

 private:
  int year_;
  Var var_;
};

class NonFiniteValue : public PanelError {
 public:
  NonFiniteValue(int year, Var v)
      : PanelError("non-finite " + std::string(code(v)) + " in fiscal year " + std::to_string(year)) {}
};

class NotAnAtom : public PanelError {
 public:
  explicit NotAnAtom(Var v)
      : PanelError(std::string(code(v)) + " is not a manipulable atom"), var_(v) {}
  Var variable() const noexcept { return var_; }

 private:
  Var var_;
};

class NonFiniteResult : public PanelError {
 public:
  explicit NonFiniteResult(Var v)
      : PanelError("recomputation produced a non-finite " + std::string(code(v))) {}
};

class HierarchyError : public Error {
 public:
  using Error::Error;
};

// --- scoring -------------------------------------------------------------

class ScoreError : public Error {
 public:
  using Error::Error;
};

/// A ratio denominator vanished (or came within the guard band).
class DenominatorError : public ScoreError {
 public:
  DenominatorError(const std::string& kind, std::string ratio, int year)
      : ScoreError(kind + " in " + ratio + " for fiscal year " + std::to_string(year)),
        ratio_(std::move(ratio)),
        year_(year) {}
  const std::string& ratio() const noexcept { return ratio_; }
  int year() const noexcept { return year_; }

 private:
  std::string ratio_;
  int year_;
};

class ZeroDenominator : public DenominatorError {
 public:
  ZeroDenominator(std::string ratio, int year)
      : DenominatorError("zero denominator", std::move(ratio), year) {}
};

class NearSingularDenominator : public DenominatorError {
 public:
  NearSingularDenominator(std::string ratio, int year)
      : DenominatorError("near-singular denominator", std::move(ratio), year) {}
};

class NonPositiveShareCount : public ScoreError {
 public:
  explicit NonPositiveShareCount(int year)
      : ScoreError("non-positive CSHO in fiscal year " + std::to_string(year)), year_(year) {}
  int year() const noexcept { return year_; }

 private:
  int year_;
};

class BothZero : public ScoreError {
 public:
  BothZero() : ScoreError("relative percent difference of two zeros") {}
};

// --- attacks -------------------------------------------------------------

class EvaluationFailure : public Error {
 public:
  using Error::Error;
};

// --- data io -------------------------------------------------------------

class DataError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public DataError {
 public:
  explicit SchemaError(std::string column)
      : DataError("CSV schema mismatch at column " + column), column_(std::move(column)) {}
  const std::string& column() const noexcept { return column_; }

 private:
  std::string column_;
};

class ParseError : public DataError {
 public:
  ParseError(std::size_t row, const std::string& what)
      : DataError("row " + std::to_string(row) + ": " + what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class EmptyDataset : public DataError {
 public:
  EmptyDataset() : DataError("dataset has no usable companies") {}
};

class InvalidParams : public DataError {
 public:
  using DataError::DataError;
};

class IoError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace finadv
