#pragma once

#include "futsim/dag.hpp"

#include <json.hpp>

#include <string>

namespace futsim {

nlohmann::json dag_to_json(const dag& d);
dag dag_from_json(const nlohmann::json& j);

void save_dag(const dag& d, const std::string& path);
dag load_dag(const std::string& path);

// Content hash over the semantic fields (nodes, edges, root, final, mode).
// Landmark names are presentation only and do not affect the hash.
uint64_t dag_hash(const dag& d);

// Write any json atomically: to a temp file in the same directory, then
// rename over the destination.
void write_json_atomic(const nlohmann::json& j, const std::string& path, int indent = 2);
// Same guarantee for arbitrary text.
void write_text_atomic(const std::string& text, const std::string& path);

nlohmann::json read_json_file(const std::string& path);

} // namespace futsim
