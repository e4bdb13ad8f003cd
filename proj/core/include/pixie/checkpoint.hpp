#pragma once

// Versioned JSON checkpoints. Matrices are stored as arrays of rows; the
// serialisation is deterministic, so save -> load -> save reproduces the
// same bytes.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "pixie/model.hpp"
#include "pixie/trainer.hpp"

namespace pixie {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
    ModelStack model;
    TrainConfig config;
    OptimiserStates optimiser;
    std::uint64_t seed = 0;
    std::size_t epoch = 0;  // completed epochs
};

nlohmann::json to_json(const Checkpoint& ckpt);
// Throws DataError on a malformed document and ShapeError on inconsistent
// shapes.
Checkpoint checkpoint_from_json(const nlohmann::json& j);

std::string serialise(const Checkpoint& ckpt);
Checkpoint deserialise(const std::string& text);

// Writes through a temporary file and renames it into place.
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace pixie
