#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace pixie::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kData = 2,
    kVerification = 3,
};

struct TrainArgs {
    std::string config;
    std::string resume;
};

struct InferArgs {
    std::string checkpoint;
    std::string graph;
    std::size_t node = 0;
    std::string predicate;
};

struct EvalArgs {
    std::string checkpoint;
    std::string task;
    std::string data;
    std::string mode = "one";
    std::string lexicon;
};

struct CheckArgs {
    std::uint64_t seed = 0;
    std::size_t instances = 50;
    std::string fault;
};

int train(const TrainArgs& args, std::ostream& out, std::ostream& log);
int infer(const InferArgs& args, std::ostream& out, std::ostream& log);
int eval(const EvalArgs& args, std::ostream& out, std::ostream& log);
int gradcheck(const CheckArgs& args, std::ostream& out, std::ostream& log);
int oracle_check(const CheckArgs& args, std::ostream& out, std::ostream& log);

}  // namespace pixie::cli
