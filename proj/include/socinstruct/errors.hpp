#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace socinstruct {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownTask : public Error {
 public:
  UnknownTask(const std::string& task_id, const std::string& valid_slugs)
      : Error("unknown task '" + task_id + "'; valid tasks: " + valid_slugs),
        task_id_(task_id) {}
  const std::string& task_id() const { return task_id_; }

 private:
  std::string task_id_;
};

class UnknownLabel : public Error {
 public:
  using Error::Error;
};

class InvalidScore : public Error {
 public:
  using Error::Error;
};

class MissingField : public Error {
 public:
  explicit MissingField(const std::string& name)
      : Error("missing field '" + name + "'"), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class InsufficientPool : public Error {
 public:
  InsufficientPool(std::size_t k, std::size_t size)
      : Error("few-shot pool too small: need " + std::to_string(k) +
              " exemplars, pool has " + std::to_string(size)),
        k_(k),
        size_(size) {}
  std::size_t k() const { return k_; }
  std::size_t size() const { return size_; }

 private:
  std::size_t k_;
  std::size_t size_;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class MissingLabelMap : public Error {
 public:
  using Error::Error;
};

class AlignmentError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace socinstruct
