#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace pla::testing {

struct Moments {
    double mean = 0.0;
    double var = 0.0;
    std::size_t n = 0;
};

template <class It>
Moments moments(It first, It last)
{
    Moments m;
    for (It it = first; it != last; ++it, ++m.n) m.mean += *it;
    m.mean /= static_cast<double>(m.n);
    for (It it = first; it != last; ++it) m.var += (*it - m.mean) * (*it - m.mean);
    m.var /= static_cast<double>(m.n - 1);
    return m;
}

inline Moments moments(const std::vector<double>& v) { return moments(v.begin(), v.end()); }

} // namespace pla::testing
