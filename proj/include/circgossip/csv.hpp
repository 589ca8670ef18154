#pragma once

// File helpers shared by the scenario writers. Doubles are printed in the
// shortest form that round-trips, so identical runs give identical bytes.

#include <filesystem>
#include <string>
#include <string_view>

namespace circgossip {

std::string read_text_file(const std::filesystem::path& path);

/// Creates parent directories as needed; throws std::runtime_error on
/// failure.
void write_text_file(const std::filesystem::path& path, std::string_view contents);

/// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace circgossip
