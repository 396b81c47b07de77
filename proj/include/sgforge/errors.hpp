#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sgforge {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed guard text. `offset` is the byte position of the offending token.
class ConditionSyntaxError : public Error {
public:
    ConditionSyntaxError(std::size_t offset, const std::string& what)
        : Error("offset " + std::to_string(offset) + ": " + what), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

class UnboundVariable : public Error {
public:
    explicit UnboundVariable(std::string name)
        : Error("unbound variable '" + name + "'"), name_(std::move(name)) {}
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

class MissingRange : public Error {
public:
    explicit MissingRange(std::string name)
        : Error("no declared range for variable '" + name + "'"), name_(std::move(name)) {}
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

/// Malformed or schema-violating document. `path` is the element path
/// (e.g. "/scenario/acts/act[2]/scene[1]") when known.
class ParseError : public Error {
public:
    ParseError(std::string path, const std::string& what)
        : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

class NotRepresentable : public Error {
public:
    using Error::Error;
};

class DuplicateId : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

}  // namespace sgforge
