#pragma once

#include <string>

namespace hsurf {

/// Serialized write through a temp file plus rename. All writers in the
/// process share one lock.
void atomic_write(const std::string& path, const std::string& content);

/// Shortest 17-significant-digit form that round-trips a double.
std::string format_double(double v);

}  // namespace hsurf
