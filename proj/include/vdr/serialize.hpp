#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vdr/trajectory.hpp"

namespace vdr {

inline constexpr int kSchemaVersion = 1;

struct DecodeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Canonical JSON forms. Key order is fixed so encode∘decode∘encode is
// byte-stable; trajectory files are one canonical line per trajectory.
nlohmann::ordered_json image_to_json(const ImageRef& image);
ImageRef image_from_json(const nlohmann::json& j);

// include_id=false yields the wire form used inside <tool_call> blocks, where
// call ids are positional.
nlohmann::ordered_json toolcall_to_json(const ToolCall& call,
                                        bool include_id = true);
ToolCall toolcall_from_json(const nlohmann::json& j);

nlohmann::ordered_json step_to_json(const Step& step);
Step step_from_json(const nlohmann::json& j);

nlohmann::ordered_json trajectory_to_json(const Trajectory& t);

// Throws std::invalid_argument if the trajectory violates an invariant or is
// still in progress.
std::string encode_trajectory(const Trajectory& t);

// Throws DecodeError naming the failed invariant ("malformed record" for
// unparseable input).
Trajectory decode_trajectory(std::string_view line);

void write_trajectories(const std::filesystem::path& path,
                        const std::vector<Trajectory>& trajectories);
std::vector<Trajectory> read_trajectories(const std::filesystem::path& path);

}  // namespace vdr
