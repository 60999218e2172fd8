#pragma once

// Random programs and distributions over tiny universes, plus brute-force
// oracles that do not share code with the library under test.

#include <random>
#include <vector>

#include "pnk/pnk.hpp"

namespace pnk::testkit {

/// Universes with at most 8 packets.
inline std::vector<PacketUniverse> small_universes() {
    return {PacketUniverse({{"f", 2}}),
            PacketUniverse({{"f", 3}}),
            PacketUniverse({{"f", 2}, {"g", 2}}),
            PacketUniverse({{"f", 4}, {"g", 2}}),
            PacketUniverse({{"f", 2}, {"g", 2}, {"h", 2}})};
}

class ProgramGen {
public:
    ProgramGen(std::uint64_t seed, PacketUniverse u) : rng_(seed), u_(std::move(u)) {}

    const PacketUniverse& universe() const { return u_; }
    std::mt19937_64& rng() { return rng_; }

    std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

    Rational weight() {
        static const Rational ws[] = {Rational(1, 2), Rational(1, 3), Rational(2, 3), Rational(1, 4), Rational(3, 4)};
        return ws[pick(5)];
    }

    Program test() {
        const auto& f = u_.fields()[pick(u_.fields().size())];
        return ast::test(f.name, static_cast<std::uint32_t>(pick(f.size)));
    }

    Program assign() {
        const auto& f = u_.fields()[pick(u_.fields().size())];
        return ast::assign(f.name, static_cast<std::uint32_t>(pick(f.size)));
    }

    Program pred(int depth) {
        if (depth <= 0) {
            switch (pick(5)) {
            case 0:
                return ast::skip();
            case 1:
                return ast::drop();
            default:
                return test();
            }
        }
        switch (pick(4)) {
        case 0:
            return ast::neg(pred(depth - 1));
        case 1:
            return ast::uni(pred(depth - 1), pred(depth - 1));
        case 2:
            return ast::seq(pred(depth - 1), pred(depth - 1));
        default:
            return pred(0);
        }
    }

    /// A core program; `stars` bounds the number of nested iterations.
    Program core(int depth, int stars = 1) {
        if (depth <= 0) {
            switch (pick(4)) {
            case 0:
                return pred(1);
            default:
                return assign();
            }
        }
        switch (pick(stars > 0 ? 8 : 7)) {
        case 0:
            return pred(1);
        case 1:
            return assign();
        case 2:
            return ast::uni(core(depth - 1, stars), core(depth - 1, stars));
        case 3:
        case 4:
            return ast::seq(core(depth - 1, stars), core(depth - 1, stars));
        case 5:
        case 6:
            return ast::choice(weight(), core(depth - 1, stars), core(depth - 1, stars));
        default:
            return ast::star(core(depth - 1, stars - 1));
        }
    }

    PacketSet subset() {
        std::vector<PacketIndex> pks;
        for (PacketIndex i = 0; i < u_.packet_count(); ++i)
            if (pick(2)) pks.push_back(i);
        return PacketSet(std::move(pks));
    }

    PacketSet nonempty_subset() {
        for (;;)
            if (auto s = subset(); !s.empty()) return s;
    }

    /// A distribution over 1..4 random sets with random rational weights.
    Dist<Rational> dist() {
        const std::size_t n = 1 + pick(4);
        std::vector<Rational> w;
        Rational total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            w.emplace_back(1 + static_cast<long>(pick(5)));
            total += w.back();
        }
        DistBuilder<Rational> b;
        for (std::size_t i = 0; i < n; ++i) b.add(subset(), Rational(w[i] / total));
        return b.finish();
    }

    /// A distribution obtained from d by enlarging each outcome, so d is
    /// below it in the order.
    Dist<Rational> grow(const Dist<Rational>& d) {
        DistBuilder<Rational> b;
        for (const auto& [s, p] : d) b.add(s | subset(), p);
        return b.finish();
    }

private:
    std::mt19937_64 rng_;
    PacketUniverse u_;
};

/// Every subset of the universe, for brute-force checks.
inline std::vector<PacketSet> every_subset(const PacketUniverse& u) { return Kernel<Rational>::all_subsets(u); }

/// mu(up a) computed by scanning the support.
inline Rational brute_up_mass(const Dist<Rational>& d, const PacketSet& a) {
    Rational m = 0;
    for (const auto& [b, p] : d)
        if (a.subset_of(b)) m += p;
    return m;
}

/// The order on distributions checked on every principal up-set.
inline bool brute_dist_leq(const Dist<Rational>& x, const Dist<Rational>& y, const PacketUniverse& u) {
    for (const auto& a : every_subset(u))
        if (brute_up_mass(x, a) > brute_up_mass(y, a)) return false;
    return true;
}

/// p^(0) = skip, p^(n+1) = skip & p ; p^(n).
inline Program unroll(const Program& p, int n) {
    Program out = ast::skip();
    for (int i = 0; i < n; ++i) out = ast::uni(ast::skip(), ast::seq(p, out));
    return out;
}

}  // namespace pnk::testkit
