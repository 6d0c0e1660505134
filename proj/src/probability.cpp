#include "mtpdb/probability.hpp"

#include <algorithm>


using namespace mtpdb;


namespace {

double log_add_exp(double a, double b)
{
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

}


Prob mtpdb::disjoin(const Prob &a, const Prob &b)
{
    const double log_q = a.log_q + b.log_q;
    return {-std::expm1(log_q), log_q};
}

Prob mtpdb::conjoin(const Prob &a, const Prob &b)
{
    const double p = a.p * b.p;
    if (p < 0.5) return {p, std::log1p(-p)};
    /* 1 - ab = (1 - a) + a(1 - b) */
    return {p, log_add_exp(a.log_q, std::log(a.p) + b.log_q)};
}

Prob mtpdb::signed_sum(const std::vector<std::pair<double, Prob>> &terms)
{
    double p = 0.0;
    for (auto &[c, x] : terms) p += c * x.p;
    if (p < 0.5) return {p, std::log1p(-std::min(p, 1.0))};

    double m = -std::numeric_limits<double>::infinity();
    for (auto &[c, x] : terms)
        if (c != 0.0) m = std::max(m, x.log_q);
    if (m == -std::numeric_limits<double>::infinity()) return Prob::one();
    double sum = 0.0;
    for (auto &[c, x] : terms) sum += c * std::exp(x.log_q - m);
    if (sum <= 0.0) return {p, std::log1p(-std::min(p, 1.0))};
    return {p, m + std::log(sum)};
}

double mtpdb::clamp(Prob &x)
{
    double moved = 0.0;
    if (x.p < 0.0) {
        moved = -x.p;
        x = Prob::zero();
    } else if (x.p > 1.0) {
        moved = x.p - 1.0;
        x.p = 1.0;
    }
    if (std::isnan(x.log_q)) x.log_q = std::log1p(-x.p);
    if (x.log_q > 0.0) x.log_q = 0.0;
    return moved;
}

int mtpdb::compare(const Prob &a, const Prob &b)
{
    if (a.p > b.p + 1e-12) return 1;
    if (b.p > a.p + 1e-12) return -1;
    if (a.p < 0.5 and b.p < 0.5) return 0;
    const double la = a.log_q, lb = b.log_q;
    if (la == lb) return 0;
    if (std::isinf(la) or std::isinf(lb)) return la < lb ? 1 : -1;
    if (la < lb - 1e-9) return 1;
    if (lb < la - 1e-9) return -1;
    return 0;
}
