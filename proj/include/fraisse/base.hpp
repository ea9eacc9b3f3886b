#ifndef FRAISSE_BASE_HPP
#define FRAISSE_BASE_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace fraisse {

// Element of the common universe omega.
using Label = std::uint64_t;

// Element code inside an algebraic structure (mixed-radix for groups,
// base-p digits for fields). 128 bits so long abelian chains fit.
using Code = unsigned __int128;

// Raised when a caller breaks an operation's precondition.
class ContractViolation : public std::logic_error {
public:
    explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

// Raised on malformed external input (CLI args, files, formula text).
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

std::string code_to_string(Code c);
Code code_from_string(const std::string& s);

} // namespace fraisse

#endif
