#pragma once

// Monte Carlo interpreter working directly on the AST. It shares no code with
// the kernel so it can serve as an independent check of exact results.

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <unordered_map>
#include <vector>

#include "pnk/ast.hpp"
#include "pnk/dist.hpp"
#include "pnk/packet.hpp"
#include "pnk/predicate.hpp"

namespace pnk {

/// splitmix64 finalizer; derives independent per-run seeds from one seed.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

class Sampler {
public:
    /// `depth_cap` bounds the number of iterations of any single star.
    Sampler(Program core, PacketUniverse u, std::size_t depth_cap = 100000)
        : program_(std::move(core)), u_(std::move(u)), depth_cap_(depth_cap) {
        if (!is_core(program_)) throw ProgramError("sampler requires a core program");
    }

    struct Run {
        PacketSet output;
        bool truncated = false;
    };

    Run run(const PacketSet& a, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        bool truncated = false;
        auto out = sample(program_, a, rng, truncated);
        return {std::move(out), truncated};
    }

    /// Set of outputs reachable with positive probability.
    const std::set<PacketSet>& support(const Program& p, const PacketSet& a) {
        auto& memo = support_memo_[p.get()];
        if (auto it = memo.find(a); it != memo.end()) return it->second;
        auto s = compute_support(p, a);
        return memo.emplace(a, std::move(s)).first->second;
    }

private:
    PacketSet sample(const Program& p, const PacketSet& a, std::mt19937_64& rng, bool& truncated) {
        switch (p->kind) {
        case Kind::Drop:
            return {};
        case Kind::Skip:
            return a;
        case Kind::Test:
        case Kind::Neg:
            return a.filter([&](PacketIndex pk) { return satisfies(p, u_, pk); });
        case Kind::Assign:
            return modify(u_, a, p->field, p->value);
        case Kind::Union:
            return sample(p->kids[0], a, rng, truncated) | sample(p->kids[1], a, rng, truncated);
        case Kind::Seq:
            return sample(p->kids[1], sample(p->kids[0], a, rng, truncated), rng, truncated);
        case Kind::Choice: {
            std::uniform_real_distribution<double> coin(0.0, 1.0);
            return coin(rng) < p->weight.get_d() ? sample(p->kids[0], a, rng, truncated)
                                                 : sample(p->kids[1], a, rng, truncated);
        }
        case Kind::Star: {
            PacketSet cur = a, acc;
            for (std::size_t step = 0;; ++step) {
                if (cur.empty() || settled(p->kids[0], cur, acc)) return acc;
                if (step == depth_cap_) {
                    truncated = true;
                    return acc | cur;
                }
                acc = acc | cur;
                cur = sample(p->kids[0], cur, rng, truncated);
            }
        }
        default:
            throw ProgramError("sampler: unexpected sugar node");
        }
    }

    /// The loop state (cur, acc) can never add packets to acc again.
    bool settled(const Program& body, const PacketSet& cur, const PacketSet& acc) {
        return reach(body, cur).subset_of(acc);
    }

    /// Union of every set reachable from a by zero or more body steps.
    const PacketSet& reach(const Program& body, const PacketSet& a) {
        auto& memo = reach_memo_[body.get()];
        if (auto it = memo.find(a); it != memo.end()) return it->second;
        std::set<PacketSet> seen{a};
        std::vector<PacketSet> work{a};
        PacketSet all = a;
        while (!work.empty()) {
            auto c = std::move(work.back());
            work.pop_back();
            for (const auto& n : support(body, c))
                if (seen.insert(n).second) {
                    all = all | n;
                    work.push_back(n);
                }
        }
        return memo.emplace(a, std::move(all)).first->second;
    }

    std::set<PacketSet> compute_support(const Program& p, const PacketSet& a) {
        switch (p->kind) {
        case Kind::Drop:
            return {PacketSet{}};
        case Kind::Skip:
            return {a};
        case Kind::Test:
        case Kind::Neg:
            return {a.filter([&](PacketIndex pk) { return satisfies(p, u_, pk); })};
        case Kind::Assign:
            return {modify(u_, a, p->field, p->value)};
        case Kind::Union: {
            std::set<PacketSet> out;
            const auto& l = support(p->kids[0], a);
            const auto& r = support(p->kids[1], a);
            for (const auto& x : l)
                for (const auto& y : r) out.insert(x | y);
            return out;
        }
        case Kind::Seq: {
            std::set<PacketSet> out;
            // copy: the inner calls may insert into the same memo table
            const auto mid = support(p->kids[0], a);
            for (const auto& b : mid)
                for (const auto& c : support(p->kids[1], b)) out.insert(c);
            return out;
        }
        case Kind::Choice: {
            std::set<PacketSet> out;
            if (p->weight != 0) out = support(p->kids[0], a);
            if (p->weight != 1)
                for (const auto& b : support(p->kids[1], a)) out.insert(b);
            return out;
        }
        case Kind::Star: {
            // accumulators of the settled loop states reachable from (a, {})
            const auto& body = p->kids[0];
            std::set<PacketSet> out;
            std::set<std::pair<PacketSet, PacketSet>> seen{{a, {}}};
            std::vector<std::pair<PacketSet, PacketSet>> work{{a, {}}};
            while (!work.empty()) {
                auto [cur, acc] = std::move(work.back());
                work.pop_back();
                if (cur.empty() || settled(body, cur, acc)) {
                    out.insert(acc);
                    continue;
                }
                auto grown = acc | cur;
                const auto next = support(body, cur);
                for (const auto& n : next)
                    if (seen.emplace(n, grown).second) work.emplace_back(n, grown);
            }
            return out;
        }
        default:
            throw ProgramError("sampler: unexpected sugar node");
        }
    }

    Program program_;
    PacketUniverse u_;
    std::size_t depth_cap_;
    std::unordered_map<const Node*, std::map<PacketSet, std::set<PacketSet>>> support_memo_;
    std::unordered_map<const Node*, std::map<PacketSet, PacketSet>> reach_memo_;
};

struct Estimate {
    std::map<PacketSet, std::size_t> counts;  // completed runs only
    std::size_t completed = 0;
    std::size_t truncated = 0;

    double frequency(const PacketSet& b) const {
        auto it = counts.find(b);
        return completed == 0 || it == counts.end() ? 0.0 : double(it->second) / double(completed);
    }

    Dist<double> empirical() const {
        std::vector<Dist<double>::Entry> out;
        for (const auto& [b, c] : counts) out.emplace_back(b, double(c) / double(completed));
        return Dist<double>::from_entries(std::move(out));
    }
};

/// Runs n independent samples; run i is seeded with split_seed(seed, i).
inline Estimate estimate(const Program& core, const PacketUniverse& u, const PacketSet& a,
                         std::size_t n, std::uint64_t seed, std::size_t depth_cap = 100000) {
    Sampler s(core, u, depth_cap);
    Estimate e;
    for (std::size_t i = 0; i < n; ++i) {
        auto r = s.run(a, split_seed(seed, i));
        if (r.truncated) {
            ++e.truncated;
            continue;
        }
        ++e.completed;
        ++e.counts[r.output];
    }
    return e;
}

/// Per-support-point agreement between an exact distribution and an
/// estimate: |freq - p| <= z * sqrt(p (1 - p) / n), with the standard error
/// taken from the exact probability.
struct Agreement {
    bool ok = true;
    std::size_t points = 0;
    std::size_t failures = 0;
    double worst_z = 0.0;
};

inline Agreement agreement(const Dist<Rational>& exact, const Estimate& est, double z = 3.0) {
    Agreement out;
    std::set<PacketSet> keys;
    for (const auto& [b, p] : exact) keys.insert(b);
    for (const auto& [b, c] : est.counts) keys.insert(b);
    const double n = double(est.completed);
    for (const auto& b : keys) {
        ++out.points;
        const double p = exact.prob(b).get_d();
        const double f = est.frequency(b);
        const double se = std::sqrt(p * (1 - p) / n);
        double score;
        if (se == 0.0)
            score = f == p ? 0.0 : INFINITY;
        else
            score = std::fabs(f - p) / se;
        out.worst_z = std::max(out.worst_z, score);
        if (score > z) {
            ++out.failures;
            out.ok = false;
        }
    }
    if (est.truncated) out.ok = false;
    return out;
}

}  // namespace pnk
