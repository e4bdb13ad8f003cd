#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "pixie/checkpoint.hpp"
#include "pixie/config.hpp"
#include "pixie/errors.hpp"
#include "planted.hpp"

using namespace pixie;
namespace fs = std::filesystem;

namespace {

Checkpoint trained_checkpoint(std::size_t epochs)
{
    std::mt19937_64 rng(4);
    testing::PlantedSpec spec;
    spec.dim = 6;
    spec.cardinality = 2;
    spec.vocab = 8;
    const auto planted = testing::make_planted_model(spec, rng);
    const auto graphs = testing::sample_corpus(planted, 24, rng);

    Checkpoint ckpt;
    ModelShape shape;
    shape.dim = 6;
    shape.cardinality = 2;
    std::mt19937_64 init(9);
    ckpt.model = initialise_model(testing::corpus_vocabulary(planted, graphs), shape, {}, init);
    ckpt.config.batch_size = 8;
    ckpt.config.epochs = epochs;
    ckpt.config.encoder.learning_rate = 0.01;
    ckpt.seed = 9;
    for (std::size_t e = 0; e < epochs; ++e) {
        auto r = epoch_rng(ckpt.seed, e);
        train_epoch(graphs, ckpt.model, ckpt.optimiser, ckpt.config, r);
        ckpt.epoch = e + 1;
    }
    return ckpt;
}

fs::path scratch_dir()
{
    auto dir = fs::temp_directory_path() / "pixie_persistence_test";
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_SUITE("persistence") {

TEST_CASE("empty config gives defaults")
{
    const auto cfg = run_config_from_json(nlohmann::json::object());
    CHECK(cfg.train == TrainConfig{});
    CHECK(cfg.shape.dim == ModelShape{}.dim);
}

TEST_CASE("config fields are read")
{
    const auto j = nlohmann::json::parse(R"({
        "sembank": "bank.jsonl", "model": {"dim": 8, "cardinality": 3},
        "encoder": {"learning_rate": 0.05, "l2": 0.001}, "beta": 2, "epochs": 4
    })");
    const auto cfg = run_config_from_json(j, "/data");
    CHECK(cfg.sembank == fs::path("/data/bank.jsonl"));
    CHECK(cfg.shape.dim == 8);
    CHECK(cfg.shape.cardinality == 3);
    CHECK(cfg.train.encoder.learning_rate == 0.05);
    CHECK(cfg.train.encoder.l2 == 0.001);
    CHECK(cfg.train.beta == 2.0);
    CHECK(cfg.train.epochs == 4);
}

TEST_CASE("config rejects unknown keys, wrong types and bad values")
{
    CHECK_THROWS_AS(run_config_from_json(nlohmann::json{{"betta", 1}}), DataError);
    CHECK_THROWS_AS(run_config_from_json(nlohmann::json{{"model", {{"dimension", 4}}}}), DataError);
    CHECK_THROWS_AS(run_config_from_json(nlohmann::json{{"epochs", "two"}}), DataError);
    CHECK_THROWS_AS(run_config_from_json(nlohmann::json{{"dropout_rate", 1.5}}), DataError);
    CHECK_THROWS_AS(run_config_from_json(nlohmann::json{{"model", {{"dim", 2}, {"cardinality", 3}}}}),
                    DataError);
}

TEST_CASE("train config survives a JSON round trip")
{
    TrainConfig cfg;
    cfg.beta = 3.5;
    cfg.uniform_negatives = true;
    cfg.lexical.l2 = 0.25;
    cfg.seed = 17;
    CHECK(train_config_from_json(to_json(cfg)) == cfg);
}

TEST_CASE("checkpoint save, load and save are byte identical")
{
    const auto ckpt = trained_checkpoint(2);
    const auto dir = scratch_dir();
    save_checkpoint(ckpt, dir / "a.json");
    save_checkpoint(load_checkpoint(dir / "a.json"), dir / "b.json");
    std::ifstream a(dir / "a.json");
    std::ifstream b(dir / "b.json");
    const std::string ta((std::istreambuf_iterator<char>(a)), {});
    const std::string tb((std::istreambuf_iterator<char>(b)), {});
    CHECK(!ta.empty());
    CHECK(ta == tb);
}

TEST_CASE("checkpoint round trip restores every field")
{
    const auto ckpt = trained_checkpoint(1);
    const auto back = deserialise(serialise(ckpt));
    CHECK(back.epoch == 1);
    CHECK(back.seed == ckpt.seed);
    CHECK(back.config == ckpt.config);
    CHECK(back.optimiser == ckpt.optimiser);
    CHECK(back.model.vocabulary == ckpt.model.vocabulary);
    CHECK(back.model.lexical.weights == ckpt.model.lexical.weights);
    CHECK(back.model.world.weights == ckpt.model.world.weights);
    CHECK(back.model.encoder.embeddings == ckpt.model.encoder.embeddings);
}

TEST_CASE("resuming from a checkpoint matches uninterrupted training")
{
    const auto full = trained_checkpoint(3);
    auto half = deserialise(serialise(trained_checkpoint(1)));

    std::mt19937_64 rng(4);
    testing::PlantedSpec spec;
    spec.dim = 6;
    spec.cardinality = 2;
    spec.vocab = 8;
    const auto planted = testing::make_planted_model(spec, rng);
    const auto graphs = testing::sample_corpus(planted, 24, rng);
    for (std::size_t e = half.epoch; e < 3; ++e) {
        auto r = epoch_rng(half.seed, e);
        train_epoch(graphs, half.model, half.optimiser, half.config, r);
        half.epoch = e + 1;
    }
    half.config.epochs = full.config.epochs;
    CHECK(serialise(half) == serialise(full));
}

TEST_CASE("malformed checkpoints are rejected")
{
    CHECK_THROWS_AS(deserialise("not json"), DataError);
    auto j = to_json(trained_checkpoint(0));
    j["version"] = 99;
    CHECK_THROWS_AS(checkpoint_from_json(j), DataError);
    auto shapes = to_json(trained_checkpoint(0));
    shapes["lexical"]["weights"].erase(0);
    CHECK_THROWS(checkpoint_from_json(shapes));
    CHECK_THROWS_AS(load_checkpoint(scratch_dir() / "absent.json"), DataError);
}

}
