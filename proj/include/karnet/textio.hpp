#ifndef KARNET_TEXTIO_HPP
#define KARNET_TEXTIO_HPP

#include <string>

namespace karnet {

/// Shortest round-trip decimal rendering (locale-free, deterministic).
std::string format_double(double v);

/// Write a whole file through a temp-and-rename so readers never observe a
/// partial file. Throws IoError on failure.
void atomic_write_text(const std::string& path, const std::string& body);

/// Slurp a file; throws IoError when it cannot be opened.
std::string read_text_file(const std::string& path);

}  // namespace karnet

#endif
