#include "pixie/cardinality.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "pixie/numeric.hpp"

namespace pixie {

namespace {

// table[i * (C + 1) + c]: log-sum over the first i units (forward) or the
// units from i onwards (backward) of configurations with exactly c active.
class CountingChain {
public:
    CountingChain(const Eigen::Ref<const Eigen::VectorXd>& theta, std::size_t cardinality)
        : dim_(static_cast<std::size_t>(theta.size())), width_(cardinality + 1),
          forward_((dim_ + 1) * width_, kNegInf), backward_((dim_ + 1) * width_, kNegInf)
    {
        fwd(0, 0) = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) {
            const double t = theta[static_cast<Eigen::Index>(i)];
            for (std::size_t c = 0; c < width_; ++c) {
                double v = fwd(i, c);
                if (c > 0)
                    v = log_add_exp(v, fwd(i, c - 1) + t);
                fwd(i + 1, c) = v;
            }
        }
        bwd(dim_, 0) = 0.0;
        for (std::size_t i = dim_; i-- > 0;) {
            const double t = theta[static_cast<Eigen::Index>(i)];
            for (std::size_t c = 0; c < width_; ++c) {
                double v = bwd(i + 1, c);
                if (c > 0)
                    v = log_add_exp(v, bwd(i + 1, c - 1) + t);
                bwd(i, c) = v;
            }
        }
    }

    double log_partition() const { return fwd(dim_, width_ - 1); }

    // log-sum over configurations of all units except i with `count` active.
    double log_partition_without(std::size_t i, std::size_t count) const
    {
        double acc = kNegInf;
        for (std::size_t a = 0; a <= count; ++a)
            acc = log_add_exp(acc, fwd(i, a) + bwd(i + 1, count - a));
        return acc;
    }

private:
    double& fwd(std::size_t i, std::size_t c) { return forward_[i * width_ + c]; }
    double fwd(std::size_t i, std::size_t c) const { return forward_[i * width_ + c]; }
    double& bwd(std::size_t i, std::size_t c) { return backward_[i * width_ + c]; }
    double bwd(std::size_t i, std::size_t c) const { return backward_[i * width_ + c]; }

    std::size_t dim_;
    std::size_t width_;
    std::vector<double> forward_;
    std::vector<double> backward_;
};

}  // namespace

double cardinality_log_partition(const Eigen::Ref<const Eigen::VectorXd>& theta,
                                 std::size_t cardinality)
{
    const auto dim = static_cast<std::size_t>(theta.size());
    if (cardinality > dim)
        return kNegInf;
    // Forward pass only; one rolling row.
    std::vector<double> row(cardinality + 1, kNegInf);
    row[0] = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        const double t = theta[static_cast<Eigen::Index>(i)];
        for (std::size_t c = std::min(cardinality, i + 1); c > 0; --c)
            row[c] = log_add_exp(row[c], row[c - 1] + t);
    }
    return row[cardinality];
}

Eigen::VectorXd cardinality_marginals(const Eigen::Ref<const Eigen::VectorXd>& theta,
                                      std::size_t cardinality)
{
    const auto dim = static_cast<std::size_t>(theta.size());
    if (cardinality > dim)
        throw std::invalid_argument("cardinality exceeds number of units");
    if (!theta.allFinite())
        throw std::invalid_argument("cardinality potentials must be finite");
    if (dim == 0)
        return Eigen::VectorXd();
    if (cardinality == 0)
        return Eigen::VectorXd::Zero(theta.size());
    if (cardinality == dim)
        return Eigen::VectorXd::Ones(theta.size());
    if (theta.maxCoeff() == theta.minCoeff())
        return Eigen::VectorXd::Constant(theta.size(),
                                         static_cast<double>(cardinality)
                                             / static_cast<double>(dim));

    const CountingChain chain(theta, cardinality);
    const double log_z = chain.log_partition();
    Eigen::VectorXd marginals(theta.size());
    for (std::size_t i = 0; i < dim; ++i) {
        const double on = theta[static_cast<Eigen::Index>(i)]
                          + chain.log_partition_without(i, cardinality - 1);
        marginals[static_cast<Eigen::Index>(i)] = std::clamp(std::exp(on - log_z), 0.0, 1.0);
    }
    return marginals;
}

}  // namespace pixie
