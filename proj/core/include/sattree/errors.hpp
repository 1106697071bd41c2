#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sattree {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input row (ragged line, unparseable cell, missing value).
class ParseError : public Error {
 public:
  ParseError(std::size_t row, const std::string& what)
      : Error("row " + std::to_string(row) + ": " + what), row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class EmptyDatasetError : public Error {
 public:
  using Error::Error;
};

class EvaluationError : public Error {
 public:
  using Error::Error;
};

class PruneError : public Error {
 public:
  using Error::Error;
};

class DecodeError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Solver queried in a state that has no answer (e.g. model read after Unsat).
class StateError : public Error {
 public:
  using Error::Error;
};

class GeneratorError : public Error {
 public:
  using Error::Error;
};

class TimeoutError : public Error {
 public:
  using Error::Error;
};

// A SAT model violated an invariant the encoding is supposed to guarantee.
class EncodingBug : public Error {
 public:
  using Error::Error;
};

// The same feature vector was added to the formula under two distinct labels.
class ContradictoryDataset : public Error {
 public:
  using Error::Error;
};

class DepthCapExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace sattree
