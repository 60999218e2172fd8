#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pnk/ast.hpp"
#include "pnk/netlib/topology.hpp"

namespace pnk::net {

/// At most `k` simultaneous failures (nullopt: unbounded), each failable
/// link down with probability `p` otherwise.
struct FailureModel {
    std::optional<std::uint32_t> k;
    Rational p;
    std::vector<Link> links;
};

inline const char* kBudgetField = "budget";

/// Resets every flag to 1, then visits the failable links in order: a link
/// leaving the current switch fails with probability p. With a finite k the
/// flips are gated on a budget counter `budget` that starts at k and drops
/// by one per failure, so later links see a smaller budget.
inline Program failure_program(const FailureModel& fm) {
    using namespace ast;
    if (fm.p < 0 || fm.p >= 1) throw ProgramError("failure probability must lie in [0,1)");
    std::vector<std::string> flags;
    for (const auto& l : fm.links) {
        auto f = up_field(l.srcport);
        if (std::find(flags.begin(), flags.end(), f) == flags.end()) flags.push_back(f);
    }
    std::sort(flags.begin(), flags.end());
    std::vector<Program> steps;
    for (const auto& f : flags) steps.push_back(assign(f, 1));
    if (fm.k && *fm.k == 0) return seq_all(steps);

    std::vector<Program> decrement;
    if (fm.k)
        for (std::uint32_t n = 1; n <= *fm.k; ++n)
            decrement.push_back(seq(test(kBudgetField, n), assign(kBudgetField, n - 1)));

    for (const auto& l : fm.links) {
        auto flag = up_field(l.srcport);
        Program fail = assign(flag, 0);
        if (fm.k) fail = seq(fail, union_all(decrement));
        Program flip = choice(Rational(1 - fm.p), assign(flag, 1), fail);
        if (fm.k) flip = ite(test(kBudgetField, 0), skip(), flip);
        steps.push_back(ite(test("sw", l.src), flip, skip()));
    }
    Program body = seq_all(steps);
    return fm.k ? var(kBudgetField, *fm.k, body) : body;
}

}  // namespace pnk::net
