#pragma once

#include <stdexcept>
#include <string>

namespace vtag {

// Operand shapes disagree.
class DimensionError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Token or label id outside the (extended) vocabulary.
class VocabularyError : public std::out_of_range {
  using std::out_of_range::out_of_range;
};

// Train-mode batch statistics need at least two rows.
class BatchSizeError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Empty or otherwise unusable label set.
class LabelError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Loss target outside its admissible set.
class TargetError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Configuration field out of range or inconsistent.
class ConfigError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Numeric argument outside the function's domain.
class DomainError : public std::domain_error {
  using std::domain_error::domain_error;
};

// Fixed-point denominator vanishes; every value is a fixed point.
class DegeneracyError : public std::domain_error {
  using std::domain_error::domain_error;
};

// Metric undefined for the given inputs (e.g. empty pool).
class MetricError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Checksum mismatch while reading a record stream.
class CorruptionError : public std::runtime_error {
 public:
  CorruptionError(const std::string& what, std::uint64_t offset)
      : std::runtime_error(what + " (offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t offset_;
};

// Stream ended mid-record.
class TruncationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Record does not match the expected feature schema.
class SchemaError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Checkpoint file malformed or incompatible with the model.
class CheckpointError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// NaN/Inf produced where finite values are required.
class NumericError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace vtag
