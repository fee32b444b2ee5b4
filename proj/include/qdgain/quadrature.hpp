#pragma once

// Globally adaptive Gauss-Kronrod (G10/K21) quadrature for vector-valued
// integrands on the real line. Finite pieces are given by breakpoints; the
// two semi-infinite tails are optional and mapped onto [0, 1).
//
// The evaluation order depends only on the integrand values, so results are
// reproducible bit for bit.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <sstream>
#include <vector>

#include "qdgain/errors.hpp"

namespace qdgain::quad {

namespace gk21 {
// Abscissae of the 21-point Kronrod rule; odd indices are the 10-point Gauss nodes.
inline constexpr std::array<double, 11> xgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
inline constexpr std::array<double, 11> wgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208015373211, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> wg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};
}  // namespace gk21

struct Options {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    int max_intervals = 4000;
};

template <std::size_t N>
struct Result {
    std::array<double, N> value{};
    std::array<double, N> error{};
    int evaluations = 0;
    int intervals = 0;
};

enum class Map { finite, upper_tail, lower_tail };

namespace detail {

template <std::size_t N>
struct Piece {
    double a, b;  // in the mapped variable
    Map map;
    std::array<double, N> value;
    std::array<double, N> error;
    double badness;
    long order;  // tie-break for a deterministic queue
};

template <std::size_t N>
struct ByBadness {
    bool operator()(const Piece<N>* l, const Piece<N>* r) const {
        if (l->badness != r->badness) return l->badness < r->badness;
        return l->order > r->order;
    }
};

// x(t) and dx/dt for the tail maps; origin is the finite end, scale > 0.
inline void map_point(Map map, double t, double origin, double scale, double& x, double& jac) {
    switch (map) {
        case Map::finite:
            x = t;
            jac = 1.0;
            return;
        case Map::upper_tail: {
            const double u = 1.0 - t;
            x = origin + scale * t / u;
            jac = scale / (u * u);
            return;
        }
        case Map::lower_tail: {
            const double u = 1.0 - t;
            x = origin - scale * t / u;
            jac = scale / (u * u);
            return;
        }
    }
}

template <std::size_t N, class F>
void gauss_kronrod(F& f, Piece<N>& p, double origin, double scale) {
    constexpr double epmach = std::numeric_limits<double>::epsilon();
    constexpr double uflow = std::numeric_limits<double>::min();
    const double centr = 0.5 * (p.a + p.b);
    const double hlgth = 0.5 * (p.b - p.a);
    const double dhlgth = std::abs(hlgth);

    auto eval = [&](double t) {
        double x, jac;
        map_point(p.map, t, origin, scale, x, jac);
        std::array<double, N> v = f(x);
        for (auto& c : v) c *= jac;
        return v;
    };

    std::array<std::array<double, N>, 21> fv;
    fv[10] = eval(centr);
    for (int j = 0; j < 10; ++j) {
        const double absc = hlgth * gk21::xgk[j];
        fv[j] = eval(centr - absc);
        fv[20 - j] = eval(centr + absc);
    }

    for (std::size_t c = 0; c < N; ++c) {
        const double fc = fv[10][c];
        double resg = 0.0;
        double resk = gk21::wgk[10] * fc;
        double resabs = std::abs(resk);
        for (int j = 0; j < 10; ++j) {
            const double f1 = fv[j][c], f2 = fv[20 - j][c];
            resk += gk21::wgk[j] * (f1 + f2);
            resabs += gk21::wgk[j] * (std::abs(f1) + std::abs(f2));
            if (j % 2 == 1) resg += gk21::wg[j / 2] * (f1 + f2);
        }
        const double reskh = resk * 0.5;
        double resasc = gk21::wgk[10] * std::abs(fc - reskh);
        for (int j = 0; j < 10; ++j)
            resasc += gk21::wgk[j] * (std::abs(fv[j][c] - reskh) + std::abs(fv[20 - j][c] - reskh));

        const double result = resk * hlgth;
        resabs *= dhlgth;
        resasc *= dhlgth;
        double abserr = std::abs((resk - resg) * hlgth);
        if (resasc != 0.0 && abserr != 0.0)
            abserr = resasc * std::min(1.0, std::pow(200.0 * abserr / resasc, 1.5));
        if (resabs > uflow / (50.0 * epmach)) abserr = std::max(epmach * 50.0 * resabs, abserr);
        p.value[c] = result;
        p.error[c] = abserr;
    }
}

}  // namespace detail

/// Integrates f over [breakpoints.front(), breakpoints.back()], plus the
/// semi-infinite tails beyond them when `tails` is set. `tail_scale` sets
/// the length scale of the tail map. f returns std::array<double, N>.
///
/// Converged when every component satisfies error <= max(abs_tol, rel_tol*|value|).
template <std::size_t N, class F>
Result<N> integrate(F&& f, std::span<const double> breakpoints, bool tails, double tail_scale,
                    const Options& opts) {
    using Piece = detail::Piece<N>;
    if (breakpoints.size() < 2 && !(tails && breakpoints.size() == 1))
        throw std::invalid_argument("integration needs at least two breakpoints");
    for (std::size_t i = 1; i < breakpoints.size(); ++i)
        if (!(breakpoints[i] > breakpoints[i - 1]))
            throw std::invalid_argument("breakpoints must be strictly increasing");
    if (tails && !(tail_scale > 0.0)) throw std::invalid_argument("tail scale must be positive");

    const double lo = breakpoints.front();
    const double hi = breakpoints.back();
    auto origin_of = [&](Map m) { return m == Map::lower_tail ? lo : hi; };

    std::vector<Piece> pieces;
    pieces.reserve(std::max<std::size_t>(static_cast<std::size_t>(opts.max_intervals), breakpoints.size() + 2) + 4);
    long order = 0;
    Result<N> out;

    auto seed = [&](double a, double b, Map m) {
        Piece p{a, b, m, {}, {}, 0.0, order++};
        detail::gauss_kronrod<N>(f, p, origin_of(m), tail_scale);
        out.evaluations += 21;
        pieces.push_back(p);
    };
    for (std::size_t i = 1; i < breakpoints.size(); ++i) seed(breakpoints[i - 1], breakpoints[i], Map::finite);
    if (tails) {
        seed(0.0, 1.0, Map::lower_tail);
        seed(0.0, 1.0, Map::upper_tail);
    }

    std::array<double, N> total{}, err{};
    auto recompute = [&] {
        total.fill(0.0);
        err.fill(0.0);
        for (const Piece& p : pieces)
            for (std::size_t c = 0; c < N; ++c) {
                total[c] += p.value[c];
                err[c] += p.error[c];
            }
    };
    auto tolerance = [&](std::size_t c) { return std::max(opts.abs_tol, opts.rel_tol * std::abs(total[c])); };
    auto badness = [&](const Piece& p) {
        double b = 0.0;
        for (std::size_t c = 0; c < N; ++c) b = std::max(b, p.error[c] / tolerance(c));
        return b;
    };
    auto converged = [&] {
        for (std::size_t c = 0; c < N; ++c)
            if (err[c] > tolerance(c)) return false;
        return true;
    };

    recompute();
    // Pieces are addressed by index; the vector never reallocates past reserve.
    std::priority_queue<Piece*, std::vector<Piece*>, detail::ByBadness<N>> queue;
    for (Piece& p : pieces) {
        p.badness = badness(p);
        queue.push(&p);
    }

    constexpr double min_width = 64.0 * std::numeric_limits<double>::epsilon();
    while (!converged()) {
        if (queue.empty() || pieces.size() + 1 > pieces.capacity() - 4 ||
            static_cast<int>(pieces.size()) + 1 > opts.max_intervals)
            break;
        Piece* worst = queue.top();
        queue.pop();
        const double a = worst->a, b = worst->b;
        const double mid = 0.5 * (a + b);
        if (b - a <= min_width * std::max({1.0, std::abs(a), std::abs(b)})) continue;  // roundoff floor
        const Map m = worst->map;
        const std::array<double, N> old_v = worst->value, old_e = worst->error;

        Piece left{a, mid, m, {}, {}, 0.0, order++};
        Piece right{mid, b, m, {}, {}, 0.0, order++};
        detail::gauss_kronrod<N>(f, left, origin_of(m), tail_scale);
        detail::gauss_kronrod<N>(f, right, origin_of(m), tail_scale);
        out.evaluations += 42;
        for (std::size_t c = 0; c < N; ++c) {
            total[c] += left.value[c] + right.value[c] - old_v[c];
            err[c] += left.error[c] + right.error[c] - old_e[c];
        }
        *worst = left;
        pieces.push_back(right);
        worst->badness = badness(*worst);
        pieces.back().badness = badness(pieces.back());
        queue.push(worst);
        queue.push(&pieces.back());
    }

    // Final sums in positional order.
    std::vector<const Piece*> sorted;
    sorted.reserve(pieces.size());
    for (const Piece& p : pieces) sorted.push_back(&p);
    auto rank = [](Map m) { return m == Map::lower_tail ? 0 : (m == Map::finite ? 1 : 2); };
    std::sort(sorted.begin(), sorted.end(), [&](const Piece* l, const Piece* r) {
        if (rank(l->map) != rank(r->map)) return rank(l->map) < rank(r->map);
        return l->map == Map::lower_tail ? l->a > r->a : l->a < r->a;
    });
    out.value.fill(0.0);
    out.error.fill(0.0);
    for (const Piece* p : sorted)
        for (std::size_t c = 0; c < N; ++c) {
            out.value[c] += p->value[c];
            out.error[c] += p->error[c];
        }
    out.intervals = static_cast<int>(pieces.size());
    total = out.value;
    err = out.error;
    if (!converged()) {
        double worst_err = 0.0;
        for (std::size_t c = 0; c < N; ++c) worst_err = std::max(worst_err, err[c]);
        std::ostringstream os;
        os << "adaptive quadrature did not converge after " << out.intervals
           << " intervals; achieved error " << worst_err;
        throw IntegrationFailure(os.str(), worst_err);
    }
    return out;
}

/// Scalar convenience over a finite interval.
template <class F>
double integrate_scalar(F&& f, double a, double b, const Options& opts = {}) {
    const std::array<double, 2> bp{a, b};
    auto g = [&](double x) { return std::array<double, 1>{f(x)}; };
    return integrate<1>(g, bp, false, 1.0, opts).value[0];
}

}  // namespace qdgain::quad
