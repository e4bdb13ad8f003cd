#include "pixie/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pixie/config.hpp"
#include "pixie/errors.hpp"

namespace pixie {

namespace {

using nlohmann::json;

constexpr const char* kFormatName = "pixie-checkpoint";

json matrix_json(const Eigen::MatrixXd& m)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

json vector_json(const Eigen::VectorXd& v)
{
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out.push_back(v[i]);
    return out;
}

json matrices_json(const std::vector<Eigen::MatrixXd>& ms)
{
    json out = json::array();
    for (const auto& m : ms)
        out.push_back(matrix_json(m));
    return out;
}

json layer_json(const ConvLayer& layer)
{
    return {{"self", matrix_json(layer.self)},
            {"head", matrices_json(layer.head)},
            {"inverse", matrices_json(layer.inverse)},
            {"bias", vector_json(layer.bias)}};
}

json adam_json(const AdamState& s)
{
    return {{"step", s.step}, {"first", s.first}, {"second", s.second}};
}

const json& field(const json& j, const char* key)
{
    if (!j.is_object())
        throw DataError("checkpoint: expected an object around \"" + std::string(key) + "\"");
    const auto it = j.find(key);
    if (it == j.end())
        throw DataError(std::string("checkpoint: missing field \"") + key + "\"");
    return *it;
}

double number(const json& j)
{
    if (!j.is_number())
        throw DataError("checkpoint: expected a number");
    return j.get<double>();
}

std::size_t count(const json& j, const char* what)
{
    if (!j.is_number_unsigned())
        throw DataError(std::string("checkpoint: ") + what + " must be a non-negative integer");
    return j.get<std::size_t>();
}

const json& array(const json& j)
{
    if (!j.is_array())
        throw DataError("checkpoint: expected an array");
    return j;
}

// An empty array of rows has no column count; `cols` supplies it.
Eigen::MatrixXd matrix_from(const json& j, Eigen::Index cols)
{
    const auto& rows = array(j);
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = array(rows[i]);
        if (static_cast<Eigen::Index>(row.size()) != cols)
            throw ShapeError("checkpoint: ragged or mis-sized matrix row");
        for (std::size_t c = 0; c < row.size(); ++c)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = number(row[c]);
    }
    return m;
}

Eigen::MatrixXd matrix_from(const json& j)
{
    const auto& rows = array(j);
    const auto cols = rows.empty() ? 0 : static_cast<Eigen::Index>(array(rows[0]).size());
    return matrix_from(j, cols);
}

Eigen::VectorXd vector_from(const json& j)
{
    const auto& a = array(j);
    Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = number(a[i]);
    return v;
}

std::vector<Eigen::MatrixXd> matrices_from(const json& j)
{
    std::vector<Eigen::MatrixXd> out;
    for (const auto& m : array(j))
        out.push_back(matrix_from(m));
    return out;
}

ConvLayer layer_from(const json& j)
{
    ConvLayer layer;
    layer.self = matrix_from(field(j, "self"));
    layer.head = matrices_from(field(j, "head"));
    layer.inverse = matrices_from(field(j, "inverse"));
    layer.bias = vector_from(field(j, "bias"));
    return layer;
}

AdamState adam_from(const json& j)
{
    AdamState s;
    s.step = count(field(j, "step"), "step");
    for (const auto* key : {"first", "second"}) {
        auto& dst = std::string_view(key) == "first" ? s.first : s.second;
        for (const auto& t : array(field(j, key))) {
            std::vector<double> values;
            for (const auto& x : array(t))
                values.push_back(number(x));
            dst.push_back(std::move(values));
        }
    }
    return s;
}

void check_state(const AdamState& s, const ConstTensorViews& params, const char* group)
{
    if (s.first.empty() && s.second.empty() && s.step == 0)
        return;
    bool ok = s.first.size() == params.size() && s.second.size() == params.size();
    for (std::size_t k = 0; ok && k < params.size(); ++k)
        ok = s.first[k].size() == params[k].size() && s.second[k].size() == params[k].size();
    if (!ok)
        throw ShapeError(std::string("checkpoint: optimiser state for ") + group
                         + " does not match the parameters");
}

}  // namespace

json to_json(const Checkpoint& ckpt)
{
    const auto& m = ckpt.model;
    json predicates = json::array();
    for (const auto& p : m.vocabulary.predicates())
        predicates.push_back(json::array({p.name, p.frequency}));
    json labels = json::array();
    for (const auto& l : m.vocabulary.labels())
        labels.push_back(l);

    return {
        {"format", kFormatName},
        {"version", kCheckpointVersion},
        {"dim", m.world.dim},
        {"cardinality", m.world.cardinality},
        {"vocabulary", {{"predicates", predicates}, {"labels", labels}}},
        {"world", matrices_json(m.world.weights)},
        {"lexical",
         {{"weights", matrix_json(m.lexical.weights)},
          {"bias", vector_json(m.lexical.bias)},
          {"use_bias", m.lexical.use_bias}}},
        {"encoder",
         {{"embeddings", matrix_json(m.encoder.embeddings)},
          {"drop", vector_json(m.encoder.drop)},
          {"drop_head", matrix_json(m.encoder.drop_head)},
          {"drop_inverse", matrix_json(m.encoder.drop_inverse)},
          {"layer1", layer_json(m.encoder.layer1)},
          {"layer2", layer_json(m.encoder.layer2)}}},
        {"config", to_json(ckpt.config)},
        {"optimiser",
         {{"world", adam_json(ckpt.optimiser.world)},
          {"lexical", adam_json(ckpt.optimiser.lexical)},
          {"encoder", adam_json(ckpt.optimiser.encoder)}}},
        {"seed", ckpt.seed},
        {"epoch", ckpt.epoch},
    };
}

Checkpoint checkpoint_from_json(const json& j)
{
    const auto& format = field(j, "format");
    if (!format.is_string() || format.get<std::string>() != kFormatName)
        throw DataError("not a pixie checkpoint");
    const auto version = count(field(j, "version"), "version");
    if (version != static_cast<std::size_t>(kCheckpointVersion))
        throw DataError("unsupported checkpoint version " + std::to_string(version));

    Checkpoint ckpt;
    auto& m = ckpt.model;
    const auto dim = count(field(j, "dim"), "dim");
    const auto cardinality = count(field(j, "cardinality"), "cardinality");

    const auto& vocab = field(j, "vocabulary");
    for (const auto& p : array(field(vocab, "predicates"))) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_string())
            throw DataError("checkpoint: predicate entries are [name, frequency]");
        const auto name = p[0].get<std::string>();
        if (m.vocabulary.find_predicate(name))
            throw DataError("checkpoint: duplicate predicate " + name);
        m.vocabulary.add_predicate(name, count(p[1], "frequency"));
    }
    for (const auto& l : array(field(vocab, "labels"))) {
        if (!l.is_string())
            throw DataError("checkpoint: labels must be strings");
        if (m.vocabulary.find_label(l.get<std::string>()))
            throw DataError("checkpoint: duplicate label " + l.get<std::string>());
        m.vocabulary.add_label(l.get<std::string>());
    }

    m.world.dim = dim;
    m.world.cardinality = cardinality;
    m.world.weights = matrices_from(field(j, "world"));

    const auto& lex = field(j, "lexical");
    m.lexical.weights = matrix_from(field(lex, "weights"), static_cast<Eigen::Index>(dim));
    m.lexical.bias = vector_from(field(lex, "bias"));
    const auto& use_bias = field(lex, "use_bias");
    if (!use_bias.is_boolean())
        throw DataError("checkpoint: use_bias must be a boolean");
    m.lexical.use_bias = use_bias.get<bool>();

    const auto& enc = field(j, "encoder");
    m.encoder.embeddings = matrix_from(field(enc, "embeddings"),
                                       static_cast<Eigen::Index>(m.vocabulary.predicate_count()));
    m.encoder.drop = vector_from(field(enc, "drop"));
    const auto labels = static_cast<Eigen::Index>(m.vocabulary.label_count());
    m.encoder.drop_head = matrix_from(field(enc, "drop_head"), labels);
    m.encoder.drop_inverse = matrix_from(field(enc, "drop_inverse"), labels);
    m.encoder.layer1 = layer_from(field(enc, "layer1"));
    m.encoder.layer2 = layer_from(field(enc, "layer2"));

    try {
        ckpt.config = train_config_from_json(field(j, "config"));
    } catch (const DataError& e) {
        throw DataError(std::string("checkpoint: ") + e.what());
    }
    const auto& opt = field(j, "optimiser");
    ckpt.optimiser.world = adam_from(field(opt, "world"));
    ckpt.optimiser.lexical = adam_from(field(opt, "lexical"));
    ckpt.optimiser.encoder = adam_from(field(opt, "encoder"));
    ckpt.seed = count(field(j, "seed"), "seed");
    ckpt.epoch = count(field(j, "epoch"), "epoch");

    m.validate();
    check_state(ckpt.optimiser.world, tensors(std::as_const(m.world)), "world");
    check_state(ckpt.optimiser.lexical, tensors(std::as_const(m.lexical)), "lexical");
    check_state(ckpt.optimiser.encoder, tensors(std::as_const(m.encoder)), "encoder");
    return ckpt;
}

std::string serialise(const Checkpoint& ckpt)
{
    return to_json(ckpt).dump() + "\n";
}

Checkpoint deserialise(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("checkpoint: ") + e.what());
    }
    return checkpoint_from_json(j);
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path)
{
    const auto text = serialise(ckpt);
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw DataError("cannot write checkpoint " + tmp.string());
        out << text;
        if (!out.flush())
            throw DataError("failed writing checkpoint " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("cannot read checkpoint " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return deserialise(buffer.str());
}

}  // namespace pixie
