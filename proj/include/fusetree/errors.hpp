#pragma once

#include <stdexcept>
#include <string>

namespace fusetree {

// Error categories map onto CLI exit codes: data = 1, usage = 2, internal = 3.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

class InternalError : public std::runtime_error {
public:
    explicit InternalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace fusetree
