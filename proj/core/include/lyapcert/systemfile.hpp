#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lyapcert/hopfield.hpp"
#include "lyapcert/system.hpp"

namespace lyapcert {

/// Per-file analysis overrides; flags beat these, these beat defaults.
struct AnalysisOverrides {
    std::optional<double> quad_tol;
    std::optional<double> margin;
    std::optional<double> horizon;
    std::optional<std::uint64_t> seed;
    std::optional<int> samples;
};

/// Parsed and schema-validated system definition file.
struct SystemFile {
    enum class Kind { expressions, hopfield, builtin };
    Kind kind = Kind::expressions;
    std::string label;

    // kind == expressions
    int n = 0;
    std::vector<std::string> components;
    std::optional<double> ball_radius; // nullopt = "unbounded"

    // kind == hopfield
    std::optional<HopfieldNetwork> network;

    // kind == builtin
    std::string builtin_name;

    AnalysisOverrides overrides;
    std::string canonical_json; // sorted, compact re-serialization of the input
};

/// Validates a JSON document against the system-file schema
/// (schemas/system_file.schema.json). Unknown fields, wrong types, non-finite
/// numbers, and dimension mismatches are InputErrors whose message starts
/// with the JSON-pointer path of the offending value.
SystemFile parse_system_file(const std::string& json_text);

SystemFile load_system_file(const std::filesystem::path& path);

const std::vector<std::string>& builtin_names();

/// Expands one of the bundled demonstration systems by name.
SystemFile builtin_system_file(const std::string& name);

struct LoadedSystem {
    SystemDef system;
    std::optional<HopfieldNetwork> network;
    SystemFile file;
};

/// Builds the SystemDef (compiling networks, expanding builtins). All
/// construction failures surface as InputError.
LoadedSystem instantiate(const SystemFile& file);

} // namespace lyapcert
