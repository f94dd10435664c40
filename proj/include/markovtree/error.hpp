#ifndef MARKOVTREE_ERROR_HPP
#define MARKOVTREE_ERROR_HPP

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace markovtree {

// Base of every error raised by the library. Callers that only care about
// "did it work" catch this; the CLI maps the concrete types to exit codes.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
  public:
    using Error::Error;
};

class NonSquare : public Error {
  public:
    NonSquare(std::size_t row, std::size_t expected, std::size_t actual)
        : Error("matrix is not square: row " + std::to_string(row) + " has " +
                std::to_string(actual) + " entries, expected " +
                std::to_string(expected)),
          row_(row), expected_(expected), actual_(actual) {}

    std::size_t row() const { return row_; }
    std::size_t expected() const { return expected_; }
    std::size_t actual() const { return actual_; }

  private:
    std::size_t row_, expected_, actual_;
};

class RowSumViolation : public Error {
  public:
    RowSumViolation(std::size_t row, std::string sum, double sum_value)
        : Error("row " + std::to_string(row) + " sums to " + sum +
                ", expected 1"),
          row_(row), sum_(std::move(sum)), sum_value_(sum_value) {}

    std::size_t row() const { return row_; }
    // Exact textual sum ("p/q" in exact mode, shortest decimal otherwise).
    const std::string& sum() const { return sum_; }
    double sum_value() const { return sum_value_; }

  private:
    std::size_t row_;
    std::string sum_;
    double sum_value_;
};

class NegativeEntry : public Error {
  public:
    NegativeEntry(std::size_t i, std::size_t j)
        : Error("negative entry at (" + std::to_string(i) + ", " +
                std::to_string(j) + ") in strict mode"),
          i_(i), j_(j) {}

    std::size_t row() const { return i_; }
    std::size_t col() const { return j_; }

  private:
    std::size_t i_, j_;
};

class InvalidGenerator : public Error {
  public:
    InvalidGenerator(std::size_t row, const std::string& what)
        : Error("invalid generator at row " + std::to_string(row) + ": " +
                what),
          row_(row) {}

    std::size_t row() const { return row_; }

  private:
    std::size_t row_;
};

class AlphaTooLarge : public Error {
  public:
    using Error::Error;
};

class ModeMismatch : public Error {
  public:
    using Error::Error;
};

class VertexOutOfRange : public Error {
  public:
    VertexOutOfRange(std::size_t vertex, std::size_t n)
        : Error("vertex " + std::to_string(vertex) + " out of range for " +
                std::to_string(n) + " states"),
          vertex_(vertex), n_(n) {}

    std::size_t vertex() const { return vertex_; }
    std::size_t size() const { return n_; }

  private:
    std::size_t vertex_, n_;
};

class EnumerationCapExceeded : public Error {
  public:
    explicit EnumerationCapExceeded(std::uint64_t cap)
        : Error("enumeration cap of " + std::to_string(cap) +
                " trees exceeded"),
          cap_(cap) {}

    std::uint64_t cap() const { return cap_; }

  private:
    std::uint64_t cap_;
};

class EmptyMarkedSet : public Error {
  public:
    EmptyMarkedSet() : Error("marked vertex set is empty") {}
};

class InvalidArborescence : public Error {
  public:
    using Error::Error;
};

class DimensionMismatch : public Error {
  public:
    DimensionMismatch(std::size_t expected, std::size_t actual)
        : Error("dimension mismatch: expected " + std::to_string(expected) +
                ", got " + std::to_string(actual)) {}
};

class TreeNotSpanning : public Error {
  public:
    using Error::Error;
};

class TreeEdgeNotInGraph : public Error {
  public:
    TreeEdgeNotInGraph(std::size_t i, std::size_t j)
        : Error("tree edge {" + std::to_string(i) + ", " + std::to_string(j) +
                "} is not a two-way edge of the graph"),
          i_(i), j_(j) {}

    std::size_t first() const { return i_; }
    std::size_t second() const { return j_; }

  private:
    std::size_t i_, j_;
};

class DetailedBalanceViolation : public Error {
  public:
    using Error::Error;
};

class InstanceTooLarge : public Error {
  public:
    using Error::Error;
};

class ParseError : public Error {
  public:
    ParseError(std::size_t line, std::size_t column, const std::string& what)
        : Error("line " + std::to_string(line) + ", column " +
                std::to_string(column) + ": " + what),
          line_(line), column_(column) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

  private:
    std::size_t line_, column_;
};

} // namespace markovtree

#endif // MARKOVTREE_ERROR_HPP
