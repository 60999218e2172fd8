// Acceptance driver: one PASS/FAIL line per criterion, with timings. The
// property criterion runs the Properties.* GoogleTest suite linked into this
// binary; everything else is checked directly.

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include "pnk/casestudy.hpp"
#include "pnk/sampler.hpp"
#include "support.hpp"

using namespace pnk;

namespace {

struct Outcome {
    bool ok;
    std::string detail;
};

int failures = 0;

void criterion(int n, const std::string& title, double budget_s, const std::function<Outcome()>& fn) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = fn();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_time = s < budget_s;
    bool ok = o.ok && in_time;
    if (!ok) ++failures;
    std::printf("%s criterion %d: %s (%.2f s, budget %.0f s)%s%s\n", ok ? "PASS" : "FAIL", n, title.c_str(), s,
                budget_s, o.detail.empty() ? "" : ": ", o.detail.c_str());
    if (!in_time) std::printf("     over time budget\n");
    std::fflush(stdout);
}

const std::vector<std::string>& row_named(const study::Table& t, const std::string& check) {
    for (const auto& r : t.rows)
        if (r[0] == check) return r;
    throw std::runtime_error("missing row " + check);
}

// Counts failing tests without printing the default GoogleTest report.
class Tally : public ::testing::EmptyTestEventListener {
public:
    int tests = 0, failed = 0;
    std::vector<std::string> names;
    void OnTestEnd(const ::testing::TestInfo& info) override {
        ++tests;
        if (info.result()->Failed()) {
            ++failed;
            names.push_back(info.name());
        }
    }
};

// Sum of Q^n R until the terms vanish; an independent route to the
// absorption probabilities.
SparseMatrix<double> power_series(const SparseMatrix<double>& q, const SparseMatrix<double>& r) {
    const std::size_t n = q.rows(), m = r.cols();
    std::vector<std::vector<double>> term(n, std::vector<double>(m, 0.0)), sum = term;
    for (std::size_t i = 0; i < n; ++i)
        for (const auto& [j, v] : r.row(i)) term[i][j] = v;
    for (int it = 0; it < 200000; ++it) {
        double biggest = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                sum[i][j] += term[i][j];
                biggest = std::max(biggest, term[i][j]);
            }
        if (biggest < 1e-17) break;
        std::vector<std::vector<double>> next(n, std::vector<double>(m, 0.0));
        for (std::size_t i = 0; i < n; ++i)
            for (const auto& [k, v] : q.row(i))
                for (std::size_t j = 0; j < m; ++j) next[i][j] += v * term[k][j];
        term = std::move(next);
    }
    SparseMatrix<double> out(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        SparseMatrix<double>::Row row;
        for (std::size_t j = 0; j < m; ++j) row.emplace_back(j, sum[i][j]);
        out.set_row(i, std::move(row));
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    ::testing::InitGoogleTest(&argc, argv);

    criterion(1, "toy delivery is 4/5 naive and 24/25 resilient", 5, [] {
        using namespace net::toy;
        const auto u = universe();
        auto pk = PacketSet::singleton(in_packet(u));
        Kernel<Rational> naive(desugar(delivery(refined_model(p(), t_hat(), f2()))), u);
        Kernel<Rational> hat(desugar(delivery(refined_model(p_hat(), t_hat(), f2()))), u);
        auto a = prob_nonempty(naive.apply(pk)), b = prob_nonempty(hat.apply(pk));
        return Outcome{a == Rational(4, 5) && b == Rational(24, 25), a.get_str() + ", " + b.get_str()};
    });

    // all checks together must fit in the 30 s budget of a single one
    criterion(2, "toy equivalence suite", 30, [] {
        auto tab = study::toy_overview<Rational>();
        const char* checks[] = {"M(p,t) == M^(p,t^,f0) on all located inputs", "in;M^(p^,t^,f0);out == in;teleport",
                                "in;M^(p^,t^,f1);out == in;teleport", "in;M^(p,t^,f1);out == in;teleport",
                                "in;M^(p,t^,f2);out < in;M^(p^,t^,f2);out"};
        bool ok = true;
        std::ostringstream detail;
        for (auto c : checks) {
            const auto& r = row_named(tab, c);
            ok = ok && r[3] == "yes";
            detail << "\n     " << r[0] << " -> " << r[2];
        }
        return Outcome{ok, detail.str()};
    });

    criterion(3, "loop termination equals f:=0", 1, [] {
        PacketUniverse u({{"f", 2}});
        auto v = equiv<Rational>(parse("while !(f=0) do (skip +[1/2] f:=0)", u), parse("f:=0", u), u,
                                 InputSpec::all(u));
        return Outcome{v.result == Relation::Equal, to_string(v.result)};
    });

    criterion(4, "pair-state graph of (f:=0 +[1/2] f:=1)* from {pi0}", 1, [] {
        PacketUniverse u({{"f", 2}});
        PacketSet p0({0}), p1({1}), both({0, 1});
        auto body = parse("f:=0 +[1/2] f:=1", u);
        auto g = explore<Rational>(body, u, p0);
        bool ok = g.size() == 5;
        for (const PairState& s : std::vector<PairState>{{p0, {}}, {p0, p0}, {p1, p0}, {p0, both}, {p1, both}})
            ok = ok && g.index_of(s) != static_cast<std::size_t>(-1);
        for (const auto& es : g.edges)
            for (const auto& [j, p] : es) ok = ok && p == Rational(1, 2);
        Kernel<Rational> k(ast::star(body), u);
        ok = ok && k.apply(p0) == Dist<Rational>::delta(both);
        return Outcome{ok, std::to_string(g.size()) + " states"};
    });

    criterion(5, "property suites, 500 exact cases each", 600, [] {
        auto& listeners = ::testing::UnitTest::GetInstance()->listeners();
        delete listeners.Release(listeners.default_result_printer());
        auto* tally = new Tally;
        listeners.Append(tally);
        ::testing::GTEST_FLAG(filter) = "Properties.*";
        int rc = RUN_ALL_TESTS();
        std::string detail = std::to_string(tally->tests - tally->failed) + "/" + std::to_string(tally->tests) + " suites";
        for (const auto& n : tally->names) detail += ", failed " + n;
        return Outcome{rc == 0 && tally->tests >= 8, detail};
    });

    criterion(6, "exact vs Monte Carlo on 100 programs, absorption vs power series", 600, [] {
        const auto us = testkit::small_universes();
        std::size_t points = 0, bad = 0, truncated = 0;
        double worst = 0;
        for (std::uint64_t i = 0; i < 100; ++i) {
            testkit::ProgramGen gen(i, us[i % us.size()]);
            auto p = gen.core(3, 1);
            auto a = gen.nonempty_subset();
            Kernel<Rational> k(p, gen.universe());
            auto est = estimate(p, gen.universe(), a, 10000, split_seed(1, i));
            auto agree = agreement(k.apply(a), est, 3.0);
            points += agree.points;
            bad += agree.failures;
            truncated += est.truncated;
            worst = std::max(worst, agree.worst_z);
        }
        std::mt19937_64 rng(1);
        std::uniform_int_distribution<int> w(0, 4);
        double err = 0;
        for (int trial = 0; trial < 50; ++trial) {
            const std::size_t n = 2 + trial % 7, m = 3;
            SparseMatrix<double> q(n, n), r(n, m);
            for (std::size_t i = 0; i < n; ++i) {
                std::vector<int> ws(n + m);
                int total = 0;
                for (auto& x : ws) total += x = w(rng);
                ws[n + i % m] += 1;
                ++total;
                SparseMatrix<double>::Row qr, rr;
                for (std::size_t j = 0; j < n; ++j) qr.emplace_back(j, double(ws[j]) / total);
                for (std::size_t j = 0; j < m; ++j) rr.emplace_back(j, double(ws[n + j]) / total);
                q.set_row(i, std::move(qr));
                r.set_row(i, std::move(rr));
            }
            auto a = solve_absorption(q, r), b = power_series(q, r);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < m; ++j) err = std::max(err, std::fabs(a.at(i, j) - b.at(i, j)));
        }
        std::ostringstream d;
        d << bad << "/" << points << " support points outside 3 s.e. (worst z " << worst << "), " << truncated
          << " truncated runs; max |solve - series| " << err;
        return Outcome{bad == 0 && truncated == 0 && err <= 1e-9, d.str()};
    });

    criterion(7, "F10 resilience grid on abfattree20 and F10_0 == F10_3 on fattree20", 1800, [] {
        study::F10Config c;
        auto res = study::f10_resilience<Rational>(c)[0];
        // expected equivalence with teleport: F10_0 only at k=0, F10_3 up to
        // k=2, F10_35 up to k=3
        const int last_ok[3] = {0, 2, 3};
        bool ok = true;
        std::ostringstream d;
        d << "\n     k    F10_0  F10_3  F10_35";
        for (std::size_t i = 0; i < c.ks.size(); ++i) {
            const int k = c.ks[i] ? static_cast<int>(*c.ks[i]) : 1000;
            d << "\n     " << study::k_label(c.ks[i]);
            for (std::size_t s = 0; s < 3; ++s) {
                const auto& row = res.rows[3 * i + s];
                bool eq = row[3] == "equal";
                ok = ok && eq == (k <= last_ok[s]);
                d << (s ? "      " : "    ") << (eq ? "yes" : "no ");
            }
        }
        auto inv = study::f10_invariants<Rational>(c);
        std::size_t fat = 0;
        for (const auto& r : inv.rows)
            if (r[0] == "M^(F10_0) == M^(F10_3)") {
                ++fat;
                ok = ok && r[5] == "yes";
            }
        ok = ok && fat == c.ks.size();
        d << "\n     fattree20 F10_0 == F10_3 for k in {0,1,2,3,4,inf}: " << (ok ? "yes" : "see above");
        return Outcome{ok, d.str()};
    });

    criterion(8, "delivery and hop-count tables are monotone", 600, [] {
        study::LatencyConfig c;
        auto tabs = study::f10_latency<Rational>(c);
        const auto& del = tabs[0].rows;  // p-major, three schemes per p
        const std::size_t np = del.size() / 3;
        bool ok = np == study::LatencyConfig::default_ps().size();
        auto val = [&](std::size_t p, std::size_t s) { return Rational(del[3 * p + s][4]); };
        bool dec = true, order = true;
        for (std::size_t p = 0; p < np; ++p) {
            order = order && val(p, 0) <= val(p, 1) && val(p, 1) <= val(p, 2);
            if (p > 0)
                for (std::size_t s = 0; s < 3; ++s) dec = dec && val(p, s) <= val(p - 1, s);
        }
        std::string at4[3];
        for (const auto& r : tabs[1].rows)
            if (r[4] == "4")
                for (std::size_t s = 0; s < 3; ++s)
                    if (r[3] == net::to_string(study::kSchemes[s])) at4[s] = r[5];
        bool same4 = !at4[0].empty() && at4[0] == at4[1] && at4[1] == at4[2];
        ok = ok && dec && order && same4;
        std::ostringstream d;
        d << "non-increasing in p: " << (dec ? "yes" : "no") << ", F10_35 >= F10_3 >= F10_0: "
          << (order ? "yes" : "no") << ", P(hops <= 4) " << at4[0] << " / " << at4[1] << " / " << at4[2];
        return Outcome{ok, d.str()};
    });

    std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
