#pragma once

#include "pla/channel.hpp"
#include "pla/error.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace pla {

enum class AttackKind { MlEstimate, Simplified, Modulus, Exponent };

/// How Eve turns her two link observations into a forged vector.
/// Never consults Phase-II fading: Eve assumes the most conservative value of one.
struct AttackStrategy {
    AttackKind kind = AttackKind::MlEstimate;
    double x = 1.0;
    double y = 1.0;

    static AttackStrategy ml() { return {AttackKind::MlEstimate, 1.0, 1.0}; }
    static AttackStrategy simplified() { return {AttackKind::Simplified, 1.0, 1.0}; }
    static AttackStrategy modulus() { return {AttackKind::Modulus, -1.0, -1.0}; }
    static AttackStrategy exponent(double x, double y)
    {
        detail::require(x >= -1 && x <= 1 && y >= -1 && y <= 1, "exponent attack: exponents must lie in [-1,1]");
        return {AttackKind::Exponent, x, y};
    }

    friend bool operator==(const AttackStrategy&, const AttackStrategy&) = default;
};

inline std::string to_string(const AttackStrategy& a)
{
    switch (a.kind) {
    case AttackKind::MlEstimate: return "ml";
    case AttackKind::Simplified: return "simplified";
    case AttackKind::Modulus: return "modulus";
    case AttackKind::Exponent: break;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "exponent(%.3g,%.3g)", a.x, a.y);
    return buf;
}

struct MlCoefficients {
    double c; // weight on the Eve-Bob observation
    double d; // weight on the Alice-Eve observation
};

inline MlCoefficients ml_coefficients(const ScenarioParams& p, std::size_t carrier)
{
    const double lam = p.power_delay()[carrier];
    const double w_ae = 1.0 + p.sigma2_AE() / lam;
    const double w_eb = 1.0 + p.sigma2_EB() / lam;
    const double den = w_ae * w_eb - p.rho_AB() * p.rho_AB();
    if (std::fabs(den) < 1e-12) throw SingularGeometry("ml_attack: degenerate observation geometry");
    return {(p.rho_EB() * w_eb - p.rho_AB() * p.rho_AE()) / den, (p.rho_AE() * w_ae - p.rho_AB() * p.rho_EB()) / den};
}

inline ChannelVector ml_attack(const ChannelVector& h_ae, const ChannelVector& h_eb, const ScenarioParams& p)
{
    detail::require_same_size(h_ae.size(), p.n(), "ml_attack");
    detail::require_same_size(h_eb.size(), p.n(), "ml_attack");
    ChannelVector g(p.n());
    for (std::size_t i = 0; i < p.n(); ++i) {
        const auto [c, d] = ml_coefficients(p, i);
        g[i] = h_eb[i] * c + h_ae[i] * d;
    }
    return g;
}

namespace detail {

inline ChannelVector weighted_sum(const ChannelVector& a, double wa, const ChannelVector& b, double wb)
{
    require_same_size(a.size(), b.size(), "attack observations");
    ChannelVector g(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) g[i] = wa * a[i] + wb * b[i];
    return g;
}

} // namespace detail

inline ChannelVector simplified_attack(const ChannelVector& h_ae, const ChannelVector& h_eb, const ScenarioParams& p)
{
    return detail::weighted_sum(h_ae, p.rho_AE(), h_eb, p.rho_EB());
}

inline ChannelVector modulus_attack(const ChannelVector& h_ae, const ChannelVector& h_eb, const ScenarioParams& p)
{
    detail::require(p.rho_AE() != 0 && p.rho_EB() != 0, "modulus attack requires nonzero correlations");
    return detail::weighted_sum(h_ae, std::pow(p.rho_AE(), -1.0), h_eb, std::pow(p.rho_EB(), -1.0));
}

/// Link weights rho^x and rho^y; (1,1) is the simplified attack and (-1,-1) the modulus attack.
inline MlCoefficients exponent_weights(const ScenarioParams& p, double x, double y)
{
    detail::require(x >= -1 && x <= 1 && y >= -1 && y <= 1, "exponent attack: exponents must lie in [-1,1]");
    if ((p.rho_AE() == 0 && x <= 0) || (p.rho_EB() == 0 && y <= 0))
        throw InvariantViolation("exponent attack: non-positive exponent on a zero correlation");
    return {std::pow(p.rho_EB(), y), std::pow(p.rho_AE(), x)};
}

inline ChannelVector exponent_attack(const ChannelVector& h_ae, const ChannelVector& h_eb, const ScenarioParams& p,
                                     double x, double y)
{
    const auto [c, d] = exponent_weights(p, x, y);
    return detail::weighted_sum(h_ae, d, h_eb, c);
}

inline ChannelVector forge(const AttackStrategy& a, const EveObservation& o, const ScenarioParams& p)
{
    switch (a.kind) {
    case AttackKind::MlEstimate: return ml_attack(o.ae, o.eb, p);
    case AttackKind::Simplified: return simplified_attack(o.ae, o.eb, p);
    case AttackKind::Modulus: return modulus_attack(o.ae, o.eb, p);
    case AttackKind::Exponent: return exponent_attack(o.ae, o.eb, p, a.x, a.y);
    }
    throw InvariantViolation("unknown attack kind");
}

/// Per-carrier linear weights (on AE, on EB) that `forge` applies; constant across carriers
/// except for the ML attack under a non-flat power-delay profile.
inline MlCoefficients attack_weights(const AttackStrategy& a, const ScenarioParams& p, std::size_t carrier)
{
    switch (a.kind) {
    case AttackKind::MlEstimate: return ml_coefficients(p, carrier);
    case AttackKind::Simplified: return {p.rho_EB(), p.rho_AE()};
    case AttackKind::Modulus:
        detail::require(p.rho_AE() != 0 && p.rho_EB() != 0, "modulus attack requires nonzero correlations");
        return {std::pow(p.rho_EB(), -1.0), std::pow(p.rho_AE(), -1.0)};
    case AttackKind::Exponent: return exponent_weights(p, a.x, a.y);
    }
    throw InvariantViolation("unknown attack kind");
}

} // namespace pla
