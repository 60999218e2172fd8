#pragma once

// Drivers for the worked examples: the toy network checks, the F10
// resilience grid and scheme comparison, the F10 invariants, and the
// delivery / hop-count sweeps. Each returns plain tables of strings so the
// CLI and the tests can render or inspect them.

#include <atomic>
#include <exception>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "pnk/analysis.hpp"
#include "pnk/desugar.hpp"
#include "pnk/netlib/f10.hpp"
#include "pnk/netlib/toy.hpp"

namespace pnk::study {

/// A rectangular result table. Cells are rendered scalars or verdict words.
struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

/// Runs fn(0..n-1) on up to `jobs` threads; results keep index order. A
/// throwing cell yields std::nullopt and its message in `errors`.
template <class R>
std::vector<std::optional<R>> parallel_cells(std::size_t n, unsigned jobs,
                                             const std::function<R(std::size_t)>& fn,
                                             std::vector<std::string>* errors = nullptr) {
    std::vector<std::optional<R>> out(n);
    std::vector<std::string> errs(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < n;) {
            try {
                out[i] = fn(i);
            } catch (const std::exception& e) {
                errs[i] = e.what();
            }
        }
    };
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (errors) *errors = std::move(errs);
    return out;
}

/// Uniform mixture of the output distributions over the input rows: the
/// traffic-weighted view used for delivery and hop-count figures.
template <class S>
Dist<S> traffic(Kernel<S>& k, const InputSpec& rows) {
    const S w = scalar_traits<S>::one() / S(static_cast<long>(rows.sets.size()));
    DistBuilder<S> b;
    for (const auto& a : rows.sets)
        for (const auto& [out, p] : k.apply(a)) b.add(out, p * w);
    return b.finish();
}

/// "equal", "<", ">" or "incomparable" over the given rows.
template <class S>
std::string compare(Kernel<S>& p, Kernel<S>& q, const InputSpec& rows, double tol) {
    if (equiv(p, q, rows, tol).positive()) return "equal";
    if (leq(p, q, rows, tol).positive()) return "<";
    if (leq(q, p, rows, tol).positive()) return ">";
    return "incomparable";
}

inline std::string k_label(const std::optional<std::uint32_t>& k) {
    return k ? std::to_string(*k) : "inf";
}

inline std::vector<std::optional<std::uint32_t>> default_ks() { return {0, 1, 2, 3, 4, std::nullopt}; }

inline constexpr net::Scheme kSchemes[] = {net::Scheme::F10_0, net::Scheme::F10_3, net::Scheme::F10_35};

inline net::FatTree topology_by_name(const std::string& name) {
    if (name == "abfattree") return net::abfattree20();
    if (name == "fattree") return net::fattree20();
    if (name == "abfattree-reduced") return net::abfattree_reduced();
    throw std::invalid_argument("unknown topology '" + name +
                                "' (expected abfattree, fattree or abfattree-reduced)");
}

// ---------------------------------------------------------------------------
// Toy network

template <class S>
Table toy_overview(const KernelOptions& opts = {}, double tol = kDefaultTolerance) {
    using namespace net::toy;
    using T = scalar_traits<S>;
    const auto u = universe();
    Table tab{"toy-overview", {"check", "expected", "observed", "ok"}, {}};
    auto add = [&](std::string check, std::string expected, std::string observed,
                   std::optional<bool> ok_override = std::nullopt) {
        const bool ok = ok_override.value_or(expected == observed);
        tab.rows.push_back({std::move(check), std::move(expected), std::move(observed), ok ? "yes" : "no"});
    };
    auto kernel = [&](const Program& p) { return Kernel<S>(desugar(p), u, opts); };
    auto value = [&](const Rational& q) { return T::str(T::from_rational(q)); };
    auto in_rows_ = in_rows(u);

    auto naive2 = kernel(delivery(refined_model(p(), t_hat(), f2())));
    auto hat2 = kernel(delivery(refined_model(p_hat(), t_hat(), f2())));
    auto pk = PacketSet::singleton(in_packet(u));
    add("delivery in;M^(p,t^,f2);out", value(Rational(4, 5)), T::str(prob_nonempty(naive2.apply(pk))));
    add("delivery in;M^(p^,t^,f2);out", value(Rational(24, 25)), T::str(prob_nonempty(hat2.apply(pk))));

    auto m = kernel(model(p(), t()));
    auto m0 = kernel(refined_model(p(), t_hat(), f0()));
    add("M(p,t) == M^(p,t^,f0) on all located inputs", "equal",
        to_string(equiv(m, m0, location_rows(u), tol).result));

    auto tele = kernel(ast::seq(in(), teleport()));
    auto hat0 = kernel(delivery(refined_model(p_hat(), t_hat(), f0())));
    auto hat1 = kernel(delivery(refined_model(p_hat(), t_hat(), f1())));
    auto naive1 = kernel(delivery(refined_model(p(), t_hat(), f1())));
    add("in;M^(p^,t^,f0);out == in;teleport", "equal", to_string(equiv(hat0, tele, in_rows_, tol).result));
    add("in;M^(p^,t^,f1);out == in;teleport", "equal", to_string(equiv(hat1, tele, in_rows_, tol).result));
    auto v = equiv(naive1, tele, in_rows_, tol);
    std::string observed = to_string(v.result);
    if (v.witness)
        observed += " (input " + format_set(u, v.witness->input) + ", output " + format_set(u, v.witness->output) +
                    ": " + T::str(v.witness->left) + " vs " + T::str(v.witness->right) + ")";
    add("in;M^(p,t^,f1);out == in;teleport", "not-equal", observed, v.result == Relation::NotEqual);

    add("in;M^(p,t^,f2);out < in;M^(p^,t^,f2);out", "<", compare(naive2, hat2, in_rows_, tol));
    // Without the out filter the models also emit the packets they leave
    // stranded at switch 1, which the naive scheme does more often.
    auto raw_naive = kernel(refined_model(p(), t_hat(), f2()));
    auto raw_hat = kernel(refined_model(p_hat(), t_hat(), f2()));
    add("M^(p,t^,f2) vs M^(p^,t^,f2) without out", "incomparable", compare(raw_naive, raw_hat, in_rows_, tol));
    return tab;
}

// ---------------------------------------------------------------------------
// F10

struct F10Config {
    std::string topology = "abfattree";
    std::vector<std::optional<std::uint32_t>> ks = default_ks();
    Rational p = Rational(1, 4);
    KernelOptions opts;
    double tol = kDefaultTolerance;
    unsigned jobs = 1;
};

/// One compiled scheme model together with its universe and input rows.
template <class S>
struct SchemeModel {
    net::FatTree ft;
    net::ModelOptions mo;
    PacketUniverse u;
    InputSpec rows;
    Kernel<S> kernel;

    SchemeModel(const net::FatTree& tree, net::Scheme s, const net::ModelOptions& o, const KernelOptions& ko)
        : ft(tree), mo(o), u(net::model_universe(tree, o)), rows(net::ingress_rows(u, tree, o.dest)),
          kernel(desugar(net::scheme_model(s, tree, o)), u, ko) {}
};

template <class S>
Kernel<S> teleport_kernel(const net::FatTree& ft, const net::ModelOptions& o, const KernelOptions& ko) {
    return Kernel<S>(desugar(ast::seq(net::ingress(ft, o.dest), net::teleport(o.dest))), net::model_universe(ft, o), ko);
}

/// Table 1 (equivalence with teleport per k and scheme, plus the delivery
/// probability) and Table 2 (pairwise comparisons) for one topology.
template <class S>
std::vector<Table> f10_resilience(const F10Config& c) {
    const auto ft = topology_by_name(c.topology);
    Table res{"resilience", {"topology", "k", "scheme", "equiv_teleport", "delivery"}, {}};
    Table cmp{"compare", {"topology", "k", "left", "right", "relation"}, {}};
    struct Cell {
        std::vector<std::string> verdict, delivery, relation;
    };
    std::vector<std::string> errors;
    auto cells = parallel_cells<Cell>(
        c.ks.size(), c.jobs,
        [&](std::size_t i) {
            net::ModelOptions mo;
            mo.k = c.ks[i];
            mo.p = c.p;
            std::vector<SchemeModel<S>> ms;
            for (auto s : kSchemes) ms.emplace_back(ft, s, mo, c.opts);
            auto tele = teleport_kernel<S>(ft, mo, c.opts);
            Cell out;
            for (auto& m : ms) {
                out.verdict.push_back(to_string(equiv(m.kernel, tele, m.rows, c.tol).result));
                out.delivery.push_back(scalar_traits<S>::str(prob_nonempty(traffic(m.kernel, m.rows))));
            }
            const auto& rows = ms[0].rows;
            out.relation.push_back(compare(ms[0].kernel, ms[1].kernel, rows, c.tol));
            out.relation.push_back(compare(ms[1].kernel, ms[2].kernel, rows, c.tol));
            out.relation.push_back(compare(ms[2].kernel, tele, rows, c.tol));
            return out;
        },
        &errors);
    const char* pairs[3][2] = {{"F10_0", "F10_3"}, {"F10_3", "F10_35"}, {"F10_35", "teleport"}};
    for (std::size_t i = 0; i < c.ks.size(); ++i) {
        const auto k = k_label(c.ks[i]);
        for (std::size_t s = 0; s < 3; ++s) {
            if (cells[i])
                res.rows.push_back({c.topology, k, to_string(kSchemes[s]), cells[i]->verdict[s], cells[i]->delivery[s]});
            else
                res.rows.push_back({c.topology, k, to_string(kSchemes[s]), "error: " + errors[i], ""});
        }
        for (std::size_t j = 0; j < 3; ++j)
            cmp.rows.push_back({c.topology, k, pairs[j][0], pairs[j][1],
                                cells[i] ? cells[i]->relation[j] : "error: " + errors[i]});
    }
    return {res, cmp};
}

/// Design invariants: 3-hop rerouting is a no-op on the plain FatTree,
/// delivered packets carry default=1, and the refinement chain under
/// unbounded failures.
template <class S>
Table f10_invariants(const F10Config& c) {
    Table t{"invariants", {"check", "topology", "k", "expected", "observed", "ok"}, {}};
    struct Job {
        std::string check, topology;
        std::optional<std::uint32_t> k;
        std::string expected;
        std::function<std::string()> run;
    };
    std::vector<Job> jobs;
    for (const auto& k : c.ks) {
        jobs.push_back({"M^(F10_0) == M^(F10_3)", "fattree", k, "equal", [&, k] {
                            auto ft = net::fattree20();
                            net::ModelOptions mo;
                            mo.k = k;
                            mo.p = c.p;
                            SchemeModel<S> a(ft, net::Scheme::F10_0, mo, c.opts), b(ft, net::Scheme::F10_3, mo, c.opts);
                            return std::string(to_string(equiv(a.kernel, b.kernel, a.rows, c.tol).result));
                        }});
        for (std::string topo : {"abfattree", "fattree"})
            jobs.push_back({"M^(F10_35) == M^(F10_35);default=1", topo, k, "equal", [&, k, topo] {
                                auto ft = topology_by_name(topo);
                                net::ModelOptions mo;
                                mo.k = k;
                                mo.p = c.p;
                                SchemeModel<S> a(ft, net::Scheme::F10_35, mo, c.opts);
                                mo.check_default = true;
                                SchemeModel<S> b(ft, net::Scheme::F10_35, mo, c.opts);
                                return std::string(to_string(equiv(a.kernel, b.kernel, a.rows, c.tol).result));
                            }});
    }
    jobs.push_back({"drop < M^(F10_0) < M^(F10_3) < M^(F10_35) < teleport", "abfattree", std::nullopt, "yes", [&] {
                        auto ft = net::abfattree20();
                        net::ModelOptions mo;
                        mo.p = c.p;
                        std::vector<SchemeModel<S>> ms;
                        for (auto s : kSchemes) ms.emplace_back(ft, s, mo, c.opts);
                        auto tele = teleport_kernel<S>(ft, mo, c.opts);
                        Kernel<S> drop(ast::drop(), ms[0].u, c.opts);
                        const auto& rows = ms[0].rows;
                        bool ok = compare(drop, ms[0].kernel, rows, c.tol) == "<" &&
                                  compare(ms[0].kernel, ms[1].kernel, rows, c.tol) == "<" &&
                                  compare(ms[1].kernel, ms[2].kernel, rows, c.tol) == "<" &&
                                  compare(ms[2].kernel, tele, rows, c.tol) == "<";
                        return std::string(ok ? "yes" : "no");
                    }});
    std::vector<std::string> errors;
    auto out = parallel_cells<std::string>(
        jobs.size(), c.jobs, [&](std::size_t i) { return jobs[i].run(); }, &errors);
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const auto& j = jobs[i];
        std::string observed = out[i] ? *out[i] : "error: " + errors[i];
        t.rows.push_back({j.check, j.topology, k_label(j.k), j.expected, observed, observed == j.expected ? "yes" : "no"});
    }
    return t;
}

struct LatencyConfig {
    std::string topology = "abfattree";
    std::optional<std::uint32_t> k;  // unbounded by default
    std::vector<Rational> ps;        // delivery sweep
    Rational cdf_p = Rational(1, 4);
    std::uint32_t counter_size = 16;
    KernelOptions opts;
    unsigned jobs = 1;

    static std::vector<Rational> default_ps() {
        std::vector<Rational> ps;
        for (int i = 0; i <= 8; ++i) {
            ps.emplace_back(i, 16);
            ps.back().canonicalize();
        }
        return ps;
    }
};

/// Delivery probability and expected hop count (given delivery) per failure
/// probability, and the hop-count CDF at one failure probability.
template <class S>
std::vector<Table> f10_latency(const LatencyConfig& c) {
    using T = scalar_traits<S>;
    const auto ft = topology_by_name(c.topology);
    const auto ps = c.ps.empty() ? LatencyConfig::default_ps() : c.ps;
    Table del{"delivery", {"topology", "k", "p", "scheme", "delivery", "expected_hops"}, {}};
    Table cdf{"hop_cdf", {"topology", "k", "p", "scheme", "hops", "cdf"}, {}};

    auto model_dist = [&](net::Scheme s, const Rational& p) {
        net::ModelOptions mo;
        mo.k = c.k;
        mo.p = p;
        mo.hop_counter = true;
        mo.counter_size = c.counter_size;
        SchemeModel<S> m(ft, s, mo, c.opts);
        return std::make_pair(traffic(m.kernel, m.rows), m.u);
    };

    const std::size_t n = ps.size() * 3;
    std::vector<std::string> errors;
    auto cells = parallel_cells<std::vector<std::string>>(
        n + 3, c.jobs,
        [&](std::size_t i) {
            std::vector<std::string> out;
            if (i < n) {
                auto [d, u] = model_dist(kSchemes[i % 3], ps[i / 3]);
                auto mass = prob_nonempty(d);
                out.push_back(T::str(mass));
                out.push_back(T::is_zero(mass) ? "" : T::str(expected_field(d, u, net::kCounterField)));
            } else {
                auto [d, u] = model_dist(kSchemes[i - n], c.cdf_p);
                for (const auto& v : field_cdf(d, u, net::kCounterField, false)) out.push_back(T::str(v));
            }
            return out;
        },
        &errors);
    const auto k = k_label(c.k);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::string> row{c.topology, k, ps[i / 3].get_str(), to_string(kSchemes[i % 3])};
        if (cells[i]) {
            row.insert(row.end(), cells[i]->begin(), cells[i]->end());
        } else {
            row.push_back("error: " + errors[i]);
            row.push_back("");
        }
        del.rows.push_back(std::move(row));
    }
    for (std::size_t s = 0; s < 3; ++s) {
        const auto& cell = cells[n + s];
        if (!cell) {
            cdf.rows.push_back({c.topology, k, c.cdf_p.get_str(), to_string(kSchemes[s]), "", "error: " + errors[n + s]});
            continue;
        }
        for (std::size_t h = 0; h < cell->size(); ++h)
            cdf.rows.push_back({c.topology, k, c.cdf_p.get_str(), to_string(kSchemes[s]), std::to_string(h), (*cell)[h]});
    }
    return {del, cdf};
}

}  // namespace pnk::study
