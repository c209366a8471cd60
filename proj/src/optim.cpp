#include "sae/optim.hpp"

namespace sae::optim
{

double logit(double p)
{
    return std::log(p) - std::log1p(-p);
}

double logistic(double u)
{
    if (u >= 0.0) {
        return 1.0 / (1.0 + std::exp(-u));
    }
    const double e = std::exp(u);
    return e / (1.0 + e);
}

Vec3 to_transformed(const NaturalParams& params)
{
    if (!(params.a > 0.0) || !(params.s > 0.0) || !(params.p >= 0.0 && params.p <= 1.0)) {
        throw DomainError("to_transformed: parameters outside their domain");
    }
    return {std::log(params.a), std::log(params.s), std::clamp(logit(params.p), -kLogitClamp, kLogitClamp)};
}

NaturalParams from_transformed(const Vec3& u)
{
    return {std::exp(u[0]), std::exp(u[1]), logistic(std::clamp(u[2], -kLogitClamp, kLogitClamp))};
}

} // namespace sae::optim
