#pragma once

#include "pla/error.hpp"

#include <cmath>
#include <cstdint>

namespace pla {

enum class Truth { Alice, Eve };
enum class Decision { Accept, Reject };

/// Exact ratio of two counters; compared by cross-multiplication.
struct Ratio {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    [[nodiscard]] double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }

    friend bool operator==(const Ratio& a, const Ratio& b) noexcept
    {
        return static_cast<unsigned __int128>(a.num) * b.den == static_cast<unsigned __int128>(b.num) * a.den;
    }
};

/// Alice is the positive class: FP counts accepted Eve packets, FN rejected Alice packets.
struct ConfusionMatrix {
    std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;

    [[nodiscard]] std::uint64_t total() const noexcept { return tp + fp + tn + fn; }
    [[nodiscard]] std::uint64_t alice() const noexcept { return tp + fn; }
    [[nodiscard]] std::uint64_t eve() const noexcept { return fp + tn; }

    ConfusionMatrix& operator+=(const ConfusionMatrix& o) noexcept
    {
        tp += o.tp;
        fp += o.fp;
        tn += o.tn;
        fn += o.fn;
        return *this;
    }
    friend ConfusionMatrix operator+(ConfusionMatrix a, const ConfusionMatrix& b) noexcept { return a += b; }
    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

inline ConfusionMatrix record(ConfusionMatrix cm, Truth truth, Decision d) noexcept
{
    const bool accept = d == Decision::Accept;
    if (truth == Truth::Alice) ++(accept ? cm.tp : cm.fn);
    else ++(accept ? cm.fp : cm.tn);
    return cm;
}

inline Ratio p_md_ratio(const ConfusionMatrix& cm)
{
    if (cm.eve() == 0) throw UndefinedMetric("P_MD undefined: no Eve samples");
    return {cm.fp, cm.eve()};
}

inline Ratio p_fa_ratio(const ConfusionMatrix& cm)
{
    if (cm.alice() == 0) throw UndefinedMetric("P_FA undefined: no Alice samples");
    return {cm.fn, cm.alice()};
}

inline Ratio accuracy_ratio(const ConfusionMatrix& cm)
{
    if (cm.total() == 0) throw UndefinedMetric("accuracy undefined: empty matrix");
    return {cm.tp + cm.tn, cm.total()};
}

/// g_mean squared as an exact ratio: TPR * TNR.
inline Ratio g_mean_squared_ratio(const ConfusionMatrix& cm)
{
    if (cm.alice() == 0 || cm.eve() == 0) throw UndefinedMetric("g_mean undefined: a class is empty");
    return {cm.tp * cm.tn, cm.alice() * cm.eve()};
}

inline double p_md(const ConfusionMatrix& cm) { return p_md_ratio(cm).value(); }
inline double p_fa(const ConfusionMatrix& cm) { return p_fa_ratio(cm).value(); }
inline double accuracy(const ConfusionMatrix& cm) { return accuracy_ratio(cm).value(); }

inline double g_mean(const ConfusionMatrix& cm)
{
    const Ratio fa = p_fa_ratio(cm), md = p_md_ratio(cm);
    return std::sqrt((1.0 - fa.value()) * (1.0 - md.value()));
}

/// Binomial standard error of a rate estimated from n trials.
inline double binomial_se(double p, std::uint64_t n) noexcept
{
    return n == 0 ? 0.0 : std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

} // namespace pla
