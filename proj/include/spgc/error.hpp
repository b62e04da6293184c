#pragma once

#include <stdexcept>
#include <string>

namespace spgc {

/// Coarse classification used by callers (notably the CLI) to map a failure
/// onto an exit code. `data` covers malformed inputs and schema violations,
/// `config` covers invalid model/build settings, `numeric` covers conditions
/// like zero-likelihood evidence or non-finite losses.
enum class ErrorKind {
    data,
    config,
    numeric,
    parse,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

} // namespace spgc
