#ifndef FRAISSE_JSON_IO_HPP
#define FRAISSE_JSON_IO_HPP

#include <fraisse/structure.hpp>

#include <json.hpp>

namespace fraisse {

// Canonical JSON form of a structure:
//   {"class": id, "domain": [labels], "payload": {...}}
// Element codes and sizes are decimal strings so 128-bit values survive.
// Round-trips bit-exactly: from(to(s)) == s.
nlohmann::json structure_to_json(const Structure& s);
Structure structure_from_json(const nlohmann::json& j);

nlohmann::json labeling_to_json(const Labeling& lab);
Labeling labeling_from_json(const nlohmann::json& j);

std::string structure_to_string(const Structure& s);
Structure structure_from_string(const std::string& text);

// File helpers; UsageError on I/O or parse failure.
nlohmann::json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const nlohmann::json& j);

} // namespace fraisse

#endif
