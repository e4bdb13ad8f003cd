#include <iostream>
#include <stdexcept>

#include <CLI11.hpp>

#include "commands.hpp"
#include "pixie/errors.hpp"

namespace {

using namespace pixie::cli;

template <typename F>
int guarded(F&& run)
{
    try {
        return run();
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kData;
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Train and query a pixie autoencoder"};
    app.require_subcommand(1);

    TrainArgs train_args;
    auto* train_cmd = app.add_subcommand("train", "Train from a JSON config, writing checkpoints");
    train_cmd->add_option("--config", train_args.config, "Run configuration")->required();
    train_cmd->add_option("--resume", train_args.resume, "Checkpoint to continue from");

    InferArgs infer_args;
    auto* infer_cmd = app.add_subcommand("infer", "Probability that a predicate holds of a node");
    infer_cmd->add_option("--ckpt", infer_args.checkpoint, "Checkpoint")->required();
    infer_cmd->add_option("--graph", infer_args.graph, "Graph as one JSON record")->required();
    infer_cmd->add_option("--node", infer_args.node, "Target node index")->required();
    infer_cmd->add_option("--predicate", infer_args.predicate, "Predicate name")->required();

    EvalArgs eval_args;
    auto* eval_cmd = app.add_subcommand("eval", "Score a ranking or similarity benchmark");
    eval_cmd->add_option("--ckpt", eval_args.checkpoint, "Checkpoint")->required();
    eval_cmd->add_option("--task", eval_args.task, "ranking or similarity")
        ->required()
        ->check(CLI::IsMember({"ranking", "similarity"}));
    eval_cmd->add_option("--data", eval_args.data, "Benchmark file")->required();
    eval_cmd->add_option("--mode", eval_args.mode, "Similarity direction: one or both")
        ->check(CLI::IsMember({"one", "both"}));
    eval_cmd->add_option("--lexicon", eval_args.lexicon, "Lexeme to predicate map");

    CheckArgs grad_args;
    auto* grad_cmd = app.add_subcommand("gradcheck", "Finite-difference gradient checks");
    grad_cmd->add_option("--seed", grad_args.seed, "Random seed");
    grad_cmd->add_option("--instances", grad_args.instances, "Random instances per component");
    grad_cmd->add_option("--inject-fault", grad_args.fault, "Corrupt one component");

    CheckArgs oracle_args;
    auto* oracle_cmd = app.add_subcommand("oracle-check", "Compare approximations to enumeration");
    oracle_cmd->add_option("--seed", oracle_args.seed, "Random seed");
    oracle_cmd->add_option("--inject-fault", oracle_args.fault, "Corrupt one component");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    auto& out = std::cout;
    auto& log = std::cerr;
    if (*train_cmd)
        return guarded([&] { return train(train_args, out, log); });
    if (*infer_cmd)
        return guarded([&] { return infer(infer_args, out, log); });
    if (*eval_cmd)
        return guarded([&] { return eval(eval_args, out, log); });
    if (*grad_cmd)
        return guarded([&] { return gradcheck(grad_args, out, log); });
    return guarded([&] { return oracle_check(oracle_args, out, log); });
}
