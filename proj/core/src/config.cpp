#include "pixie/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>
#include <type_traits>

#include <nlohmann/json.hpp>

#include "pixie/errors.hpp"

namespace pixie {

namespace {

using nlohmann::json;

static_assert(std::is_same_v<std::uint64_t, std::size_t>);

// Reads keys from one JSON object and rejects whatever is left unread.
class Fields {
public:
    Fields(const json& j, std::string where) : j_(j), where_(std::move(where))
    {
        if (!j_.is_object())
            throw DataError(where_ + ": expected a JSON object");
    }

    void read(const char* key, double& out)
    {
        if (const auto* v = take(key)) {
            if (!v->is_number())
                fail(key, "a number");
            out = v->get<double>();
        }
    }

    void read(const char* key, std::size_t& out)
    {
        if (const auto* v = take(key)) {
            if (!v->is_number_unsigned())
                fail(key, "a non-negative integer");
            out = v->get<std::size_t>();
        }
    }

    void read(const char* key, bool& out)
    {
        if (const auto* v = take(key)) {
            if (!v->is_boolean())
                fail(key, "a boolean");
            out = v->get<bool>();
        }
    }

    void read(const char* key, std::filesystem::path& out)
    {
        if (const auto* v = take(key)) {
            if (!v->is_string())
                fail(key, "a string");
            out = v->get<std::string>();
        }
    }

    const json* take(const char* key)
    {
        const auto it = j_.find(key);
        if (it == j_.end())
            return nullptr;
        seen_.insert(key);
        return &*it;
    }

    std::string path(const char* key) const { return where_ + "." + key; }

    void finish() const
    {
        for (const auto& [key, value] : j_.items())
            if (!seen_.contains(key))
                throw DataError(where_ + ": unknown field \"" + key + "\"");
    }

private:
    [[noreturn]] void fail(const char* key, const char* expected) const
    {
        throw DataError(where_ + ": field \"" + key + "\" must be " + expected);
    }

    const json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

void read_group(Fields& f, const char* key, GroupRates& g)
{
    if (const auto* v = f.take(key)) {
        Fields sub(*v, f.path(key));
        sub.read("learning_rate", g.learning_rate);
        sub.read("l2", g.l2);
        sub.finish();
    }
}

void read_train(Fields& f, TrainConfig& c)
{
    read_group(f, "world", c.world);
    read_group(f, "lexical", c.lexical);
    read_group(f, "encoder", c.encoder);
    f.read("beta", c.beta);
    f.read("alpha", c.alpha);
    f.read("negatives", c.negatives);
    f.read("uniform_negatives", c.uniform_negatives);
    f.read("dropout_rate", c.dropout_rate);
    f.read("bp_iterations", c.bp_iterations);
    f.read("bp_damping", c.bp_damping);
    f.read("batch_size", c.batch_size);
    f.read("epochs", c.epochs);
    f.read("seed", c.seed);
    f.read("enumeration_budget", c.enumeration_budget);
}

void check_train(const TrainConfig& c)
{
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw DataError(e.what());
    }
}

json group_json(const GroupRates& g)
{
    return {{"learning_rate", g.learning_rate}, {"l2", g.l2}};
}

}  // namespace

TrainConfig train_config_from_json(const json& j)
{
    TrainConfig c;
    Fields f(j, "config");
    read_train(f, c);
    f.finish();
    check_train(c);
    return c;
}

RunConfig run_config_from_json(const json& j, const std::filesystem::path& base_dir)
{
    RunConfig c;
    Fields f(j, "config");
    f.read("sembank", c.sembank);
    f.read("output", c.output);
    f.read("metrics", c.metrics);
    if (const auto* v = f.take("model")) {
        Fields m(*v, f.path("model"));
        m.read("dim", c.shape.dim);
        m.read("cardinality", c.shape.cardinality);
        m.read("hidden0", c.shape.hidden0);
        m.read("hidden1", c.shape.hidden1);
        m.read("use_bias", c.shape.use_bias);
        m.finish();
    }
    if (const auto* v = f.take("init")) {
        Fields m(*v, f.path("init"));
        m.read("world_scale", c.init.world_scale);
        m.read("world_density", c.init.world_density);
        m.read("lexical_scale", c.init.lexical_scale);
        m.read("lexical_density", c.init.lexical_density);
        m.read("encoder_stddev", c.init.encoder_stddev);
        m.finish();
    }
    read_train(f, c.train);
    f.finish();
    check_train(c.train);

    if (c.shape.cardinality < 1 || c.shape.cardinality > c.shape.dim)
        throw DataError("config.model: cardinality must lie in [1, dim]");
    for (double d : {c.init.world_density, c.init.lexical_density})
        if (!(d >= 0.0 && d <= 1.0))
            throw DataError("config.init: densities must lie in [0, 1]");
    for (double s : {c.init.world_scale, c.init.lexical_scale, c.init.encoder_stddev})
        if (!(s >= 0.0))
            throw DataError("config.init: scales must be >= 0");

    auto resolve = [&](std::filesystem::path& p) {
        if (!p.empty() && p.is_relative() && !base_dir.empty())
            p = base_dir / p;
    };
    resolve(c.sembank);
    resolve(c.output);
    resolve(c.metrics);
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot read config " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw DataError("config " + path.string() + ": " + e.what());
    }
    return run_config_from_json(j, path.parent_path());
}

json to_json(const TrainConfig& c)
{
    return {{"world", group_json(c.world)},
            {"lexical", group_json(c.lexical)},
            {"encoder", group_json(c.encoder)},
            {"beta", c.beta},
            {"alpha", c.alpha},
            {"negatives", c.negatives},
            {"uniform_negatives", c.uniform_negatives},
            {"dropout_rate", c.dropout_rate},
            {"bp_iterations", c.bp_iterations},
            {"bp_damping", c.bp_damping},
            {"batch_size", c.batch_size},
            {"epochs", c.epochs},
            {"seed", c.seed},
            {"enumeration_budget", c.enumeration_budget}};
}

json to_json(const ModelShape& s)
{
    return {{"dim", s.dim},
            {"cardinality", s.cardinality},
            {"hidden0", s.hidden0},
            {"hidden1", s.hidden1},
            {"use_bias", s.use_bias}};
}

json to_json(const InitConfig& i)
{
    return {{"world_scale", i.world_scale},
            {"world_density", i.world_density},
            {"lexical_scale", i.lexical_scale},
            {"lexical_density", i.lexical_density},
            {"encoder_stddev", i.encoder_stddev}};
}

}  // namespace pixie
