#pragma once

// JSON run configuration. Every key is optional and falls back to its
// default; unknown keys are rejected.
//
//   {
//     "sembank": "train.jsonl", "output": "model.ckpt.json", "metrics": "metrics.jsonl",
//     "model": {"dim": 8, "cardinality": 3, "hidden0": 0, "hidden1": 0, "use_bias": false},
//     "init": {"world_scale": 0.1, "world_density": 0.1, "lexical_scale": 0.1,
//              "lexical_density": 0.1, "encoder_stddev": 0.1},
//     "world": {"learning_rate": 0.001, "l2": 0.0}, "lexical": {...}, "encoder": {...},
//     "beta": 5, "alpha": 1, "negatives": 20, "uniform_negatives": false,
//     "dropout_rate": 0.2, "bp_iterations": 5, "bp_damping": 0.5,
//     "batch_size": 32, "epochs": 1, "seed": 0, "enumeration_budget": 1000000
//   }
//
// Relative paths are resolved against the directory of the config file.

#include <filesystem>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "pixie/model.hpp"
#include "pixie/trainer.hpp"

namespace pixie {

struct RunConfig {
    std::filesystem::path sembank;
    std::filesystem::path output = "pixie.ckpt.json";
    std::filesystem::path metrics;  // empty: standard output
    ModelShape shape;
    InitConfig init;
    TrainConfig train;
};

// Both throw DataError on unknown keys, wrong types or invalid values.
TrainConfig train_config_from_json(const nlohmann::json& j);
RunConfig run_config_from_json(const nlohmann::json& j,
                               const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

nlohmann::json to_json(const TrainConfig& config);
nlohmann::json to_json(const ModelShape& shape);
nlohmann::json to_json(const InitConfig& init);

}  // namespace pixie
