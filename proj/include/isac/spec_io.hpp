#pragma once

#include "isac/channel.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>

namespace isac {

using AnySpec = std::variant<SdmcSpec, SdmbcSpec>;

/// Parses a channel document (see README for the format). Rows within 1e-6
/// of normalized are rescaled; anything else throws SpecError.
AnySpec parse_spec(std::string_view json_text);
AnySpec load_spec(const std::filesystem::path& path);

/// Dense `law` for small channels; the marginal form (law_y / law_z with
/// sparse rows) when the joint is absent.
std::string to_json(const SdmcSpec& spec);
std::string to_json(const SdmbcSpec& spec);

MappingTable parse_mapping(std::string_view json_text);
std::string to_json(const MappingTable& psi);

std::string read_file(const std::filesystem::path& path);

}  // namespace isac
