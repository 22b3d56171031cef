#pragma once

#include "nrd/cmatrix.hpp"

#include <stdexcept>
#include <string>

namespace nrdcli {

/// File or format problem; the message carries path and field context.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Reads {"rows": r, "cols": c, "data": [[[re, im], ...], ...]}; every entry
/// is a [real, imaginary] pair of finite binary64 numbers. Throws IoError
/// with the offending path/field in the message.
nrd::CMatrix parse_matrix(const std::string& path);

/// Writes the same schema. Doubles print in shortest-round-trip form, so
/// serialize followed by parse is bitwise exact. The write is atomic.
void serialize_matrix(const nrd::CMatrix& m, const std::string& path);

/// Writes text to path through a temp file in the same directory plus a
/// rename, so readers never observe a partial file.
void write_atomic(const std::string& path, const std::string& text);

} // namespace nrdcli
