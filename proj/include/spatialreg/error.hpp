#ifndef SPATIALREG_ERROR_HPP
#define SPATIALREG_ERROR_HPP

#include <stdexcept>
#include <string>

namespace spatialreg {

// All recoverable failures in the library throw Error. The message carries
// enough context (ids, column names, line numbers) for a caller to report it.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace spatialreg

#endif
