#pragma once

#include <string>

#include <json.hpp>

namespace rad {

// Canonical serialization: object keys in sorted order (nlohmann's default
// map ordering), every finite double printed with %.17g, no insignificant
// whitespace. Two equal documents always produce identical bytes, which makes
// determinism contracts byte-testable.
std::string dump_canonical(const nlohmann::json& value);

// FNV-1a over the canonical dump, hex-encoded; used as a config fingerprint.
std::string canonical_hash(const nlohmann::json& value);

}  // namespace rad
