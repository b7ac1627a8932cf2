#pragma once

#include <filesystem>
#include <string>

#include "slicing/construction.hpp"

namespace slicing {

/// JSON document {version, kind, n, schedule{...}, seed, thetas, etas}.
/// Doubles are written in shortest round-trip form.
std::string body_to_json(const CounterexampleBody& body);
CounterexampleBody body_from_json(const std::string& text);

void save_body(const CounterexampleBody& body, const std::filesystem::path& path);
/// Throws Error when the file cannot be read or parsed.
CounterexampleBody load_body(const std::filesystem::path& path);

}  // namespace slicing
