#include "commands.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pixie/checkpoint.hpp"
#include "pixie/config.hpp"
#include "pixie/errors.hpp"
#include "pixie/evaluate.hpp"
#include "pixie/verification.hpp"

namespace pixie::cli {

namespace {

std::ifstream open_input(const std::filesystem::path& path, const char* what)
{
    std::ifstream in(path);
    if (!in)
        throw DataError(std::string("cannot read ") + what + " " + path.string());
    return in;
}

Sembank read_sembank(const std::filesystem::path& path)
{
    if (path.empty())
        throw DataError("config names no sembank");
    auto in = open_input(path, "sembank");
    try {
        return parse_sembank(in);
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

void check_resume(const Checkpoint& ckpt, const RunConfig& config, const Sembank& bank,
                  std::ostream& log)
{
    if (ckpt.model.dim() != config.shape.dim
        || ckpt.model.cardinality() != config.shape.cardinality)
        throw ShapeError("checkpoint D/C differ from the config");
    if (!(ckpt.model.vocabulary == bank.vocabulary))
        throw ShapeError("sembank vocabulary differs from the checkpoint vocabulary");
    auto a = ckpt.config;
    auto b = config.train;
    a.epochs = b.epochs = 0;
    if (!(a == b))
        log << "warning: training settings differ from those stored in the checkpoint\n";
}

std::optional<Component> parse_fault(const std::string& name)
{
    if (name.empty())
        return std::nullopt;
    const auto c = component_from_string(name);
    if (!c)
        throw std::invalid_argument("unknown component for fault injection: " + name);
    return c;
}

int report_verification(const VerificationReport& report, std::ostream& out, std::ostream& log)
{
    out << report.to_json().dump(2) << '\n';
    if (report.passed()) {
        log << report.suite << ": all checks passed\n";
        return kOk;
    }
    for (const auto& name : report.failing())
        log << report.suite << ": FAILED component " << name << '\n';
    return kVerification;
}

}  // namespace

int train(const TrainArgs& args, std::ostream& out, std::ostream& log)
{
    const auto config = load_run_config(args.config);
    const auto bank = read_sembank(config.sembank);
    log << "sembank: " << bank.graphs.size() << " graphs, "
        << bank.vocabulary.predicate_count() << " predicates, "
        << bank.vocabulary.label_count() << " labels\n";

    Checkpoint ckpt;
    if (!args.resume.empty()) {
        ckpt = load_checkpoint(args.resume);
        check_resume(ckpt, config, bank, log);
        ckpt.config = config.train;
        log << "resuming after epoch " << ckpt.epoch << '\n';
    } else {
        std::mt19937_64 init_rng(config.train.seed);
        ckpt.model = initialise_model(bank.vocabulary, config.shape, config.init, init_rng);
        ckpt.config = config.train;
        ckpt.seed = config.train.seed;
    }

    std::ofstream metrics_file;
    std::ostream* metrics = &out;
    if (!config.metrics.empty()) {
        const auto mode = args.resume.empty() ? std::ios::trunc : std::ios::app;
        metrics_file.open(config.metrics, std::ios::out | mode);
        if (!metrics_file)
            throw DataError("cannot write metrics " + config.metrics.string());
        metrics = &metrics_file;
    }

    save_checkpoint(ckpt, config.output);
    for (std::size_t epoch = ckpt.epoch; epoch < config.train.epochs; ++epoch) {
        auto rng = epoch_rng(ckpt.seed, epoch);
        auto m = train_epoch(bank.graphs, ckpt.model, ckpt.optimiser, ckpt.config, rng);
        m.epoch = epoch + 1;
        ckpt.epoch = epoch + 1;
        *metrics << m.to_json().dump() << '\n';
        metrics->flush();
        save_checkpoint(ckpt, config.output);
        log << "epoch " << m.epoch << ": objective " << m.objective << " (" << m.wall_seconds
            << " s)\n";
    }
    if (metrics != &out)
        out << nlohmann::json{{"checkpoint", config.output.string()}, {"epochs", ckpt.epoch}}.dump()
            << '\n';
    return kOk;
}

int infer(const InferArgs& args, std::ostream& out, std::ostream&)
{
    const auto ckpt = load_checkpoint(args.checkpoint);
    const auto& vocab = ckpt.model.vocabulary;
    auto in = open_input(args.graph, "graph");
    std::stringstream text;
    text << in.rdbuf();
    const std::string line = text.str();
    const auto graph = parse_graph(std::string_view(line), vocab);
    const auto pred = vocab.find_predicate(args.predicate);
    if (!pred)
        throw DataError("unknown predicate " + args.predicate);
    if (args.node >= graph.node_count())
        throw DataError("node " + std::to_string(args.node) + " is not in the graph");
    const double p = infer_truth(graph, args.node, *pred, ckpt.model);
    out << std::setprecision(std::numeric_limits<double>::max_digits10) << p << '\n';
    return kOk;
}

int eval(const EvalArgs& args, std::ostream& out, std::ostream& log)
{
    const auto ckpt = load_checkpoint(args.checkpoint);
    Lexicon lexicon;
    if (!args.lexicon.empty()) {
        auto in = open_input(args.lexicon, "lexicon");
        lexicon = Lexicon::load(in);
    }
    auto in = open_input(args.data, "benchmark");
    nlohmann::json report;
    if (args.task == "ranking") {
        const auto r = score_ranking(load_ranking_benchmark(in), ckpt.model, lexicon);
        report = r.to_json();
        std::mt19937_64 rng(0);
        const auto lists = relevance_lists(r);
        report["random_baseline_map"] =
            lists.empty() ? 0.0 : random_baseline_map(lists, 1000, rng);
        log << "MAP " << r.map << " over " << r.terms.size() << " terms\n";
    } else {
        const auto mode =
            args.mode == "both" ? SimilarityMode::BothDirections : SimilarityMode::OneDirection;
        const auto r = score_similarity(load_similarity_benchmark(in), mode, ckpt.model, lexicon);
        report = r.to_json();
        log << "spearman separate " << r.separate.rho << ", averaged " << r.averaged.rho << '\n';
    }
    out << report.dump(2) << '\n';
    return kOk;
}

int gradcheck(const CheckArgs& args, std::ostream& out, std::ostream& log)
{
    GradcheckOptions options;
    options.instances = args.instances;
    options.fault = parse_fault(args.fault);
    return report_verification(run_gradcheck(args.seed, options), out, log);
}

int oracle_check(const CheckArgs& args, std::ostream& out, std::ostream& log)
{
    OracleCheckOptions options;
    options.fault = parse_fault(args.fault);
    return report_verification(run_oracle_check(args.seed, options), out, log);
}

}  // namespace pixie::cli
