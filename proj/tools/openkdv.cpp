#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "openkdv/potentials.hpp"
#include "openkdv/psdo.hpp"
#include "openkdv/virasoro.hpp"

using namespace okdv;
using nlohmann::json;

namespace {

// exit codes: 0 ok, 1 failing check, 2 config error, 3 internal inconsistency
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInternal = 3;

void emit(const std::string& content, const std::string& path) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open output file: " + path);
    f << content;
}

std::string index_str(const MultiIndex& a) {
    std::string s;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (i) s += " ";
        s += std::to_string(a[i]);
    }
    return s;
}

std::string monomial_str(const TSeries& F, const MultiIndex& a) {
    std::string s;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        if (!s.empty()) s += "*";
        s += F.var_name((int)i);
        if (a[i] != 1) s += "^" + std::to_string(a[i]);
    }
    return s.empty() ? "1" : s;
}

struct SeriesSummary {
    std::size_t count = 0;
    int umin = 0, umax = 0;
};

SeriesSummary summarize(const TSeries& F) {
    SeriesSummary s;
    bool first = true;
    for (const auto& [a, c] : F.coeffs()) {
        ++s.count;
        for (const auto& [e, r] : c.terms()) {
            if (first || e < s.umin) s.umin = e;
            if (first || e > s.umax) s.umax = e;
            first = false;
        }
    }
    return s;
}

int cmd_flows(int k_depth, int rq_depth, const std::string& output) {
    if (k_depth < 0 || rq_depth < 0)
        throw ConfigError("flows: depths must be >= 0");
    FlowTable t;
    std::ostringstream out;
    for (int n = 0; n <= k_depth; ++n)
        out << "K" << n << " = " << t.K(n).str() << "\n";
    for (int n = 0; n <= rq_depth; ++n)
        out << "R" << n << " = " << t.R(n).str() << "\n";
    for (int n = 0; n <= rq_depth; ++n)
        out << "Q" << n << " = " << t.Q(n).str() << "\n";
    emit(out.str(), output);
    return 0;
}

int cmd_potential(const std::string& which, int M, int K, int D, bool cross_check,
                  const std::string& format, const std::string& output) {
    Window w{M, which == "open" ? K : -1, D};
    TSeries F;
    bool agree = true;
    if (which == "open") {
        F = open_potential(w);
    } else if (which == "closed-kdv" || which == "closed-virasoro") {
        TSeries kdv, vir;
        if (which == "closed-kdv" || cross_check) kdv = closed_potential_kdv(w);
        if (which == "closed-virasoro" || cross_check) vir = closed_potential_virasoro(w);
        if (cross_check) agree = (kdv == vir);
        F = which == "closed-kdv" ? kdv : vir;
    } else {
        throw ConfigError("potential: unknown kind " + which);
    }
    SeriesSummary s = summarize(F);

    std::ostringstream out;
    if (format == "json") {
        json j;
        j["type"] = which;
        j["window"] = {{"M", w.M}, {"K", w.K}, {"D", w.D}};
        j["summary"] = {{"coefficients", s.count}, {"u_min", s.umin}, {"u_max", s.umax}};
        if (cross_check) j["routes_agree"] = agree;
        json rows = json::array();
        for (const auto& [a, c] : F.coeffs())
            rows.push_back({{"index", a}, {"monomial", monomial_str(F, a)},
                            {"value", c.str()}});
        j["coefficients"] = rows;
        out << j.dump(2) << "\n";
    } else if (format == "csv") {
        out << "index,monomial,value\n";
        for (const auto& [a, c] : F.coeffs())
            out << index_str(a) << "," << monomial_str(F, a) << ",\"" << c.str()
                << "\"\n";
    } else {
        out << "type: " << which << "\n"
            << "window: M=" << w.M << " K=" << w.K << " D=" << w.D << "\n"
            << "coefficients: " << s.count << "\n"
            << "u range: [" << s.umin << ", " << s.umax << "]\n";
        if (cross_check) out << "routes agree: " << (agree ? "true" : "false") << "\n";
        for (const auto& [a, c] : F.coeffs())
            out << monomial_str(F, a) << " = " << c.str() << "\n";
    }
    emit(out.str(), output);
    return agree ? 0 : kExitInternal;
}

TSeries deterministic_exponent(const Window& w, unsigned seed) {
    // fixed low-entropy exponent; any series with all variables present works
    TSeries r(w);
    MultiIndex a(w.nvars(), 0);
    unsigned state = seed;
    auto next = [&state] {
        state = state * 1103515245u + 12345u;
        return (int)((state >> 16) % 11) - 5;
    };
    for (int i = 0; i < w.nvars(); ++i) {
        a.assign(w.nvars(), 0);
        a[i] = 1;
        r.set_coeff(a, ULaurent(Rational(next(), 3)));
        a[i] = 2;
        r.set_coeff(a, ULaurent(Rational(next(), 2), -1));
        a[i] = 1;
        a[(i + 1) % w.nvars()] += 1;
        r.set_coeff(a, ULaurent(Rational(next(), 4), 1));
    }
    return r;
}

int cmd_verify(const std::string& level, unsigned threads, const std::string& fault,
               const std::string& format, const std::string& output) {
    int M = 3, D = 6, idx = 2, lax_n = 1;
    if (level == "full") {
        M = 5;
        D = 8;
        idx = 3;
        lax_n = 2;
    } else if (level != "fast") {
        throw ConfigError("verify: unknown level " + level);
    }
    FlowFaults ff;
    PotentialFaults pf;
    if (fault == "drop-34-term") ff.drop_r1_transport_term = true;
    else if (fault == "corrupt-open-init") pf.corrupt_open_init = true;
    else if (!fault.empty()) throw ConfigError("verify: unknown fault " + fault);

    Window cw{M, -1, D};
    Window ow{M, 0, D};
    Report rep;
    auto add = [&rep](const std::string& name, bool pass, const std::string& det = "") {
        rep.checks.push_back({name, pass, det});
    };
    auto merge = [&rep](const std::string& prefix, const Report& r) {
        for (const auto& c : r.checks)
            rep.checks.push_back({prefix + c.name, c.pass, c.detail});
    };

    merge("commutativity ", verify_commutativity(idx, ff, threads));
    merge("lax ", verify_lax_equivalence(lax_n));

    FlowTable table(ff);
    TSeries Fc_kdv = closed_potential_kdv(cw, table);
    TSeries Fc = closed_potential_virasoro(cw);
    TSeries diff = Fc_kdv - Fc;
    add("closed routes agree", diff.is_zero(),
        diff.is_zero() ? "" : detail::first_monomial(diff));
    add("closed string equation", closed_string_residual(Fc).is_zero());
    add("closed u-grading", u_grading_closed_ok(Fc));

    TSeries Fo = open_potential(ow, table, pf);
    add("open string equation", open_string_residual(Fo).is_zero(),
        detail::first_monomial(open_string_residual(Fo)));
    add("s-string equation", s_string_residual(Fo, Fc).is_zero(),
        detail::first_monomial(s_string_residual(Fo, Fc)));
    add("open u-grading", u_grading_open_ok(Fo));
    for (int n = 1; n <= idx; ++n) {
        TSeries res = open_kdv_residual(n, Fo, Fc);
        add("open kdv n=" + std::to_string(n), res.is_zero(),
            detail::first_monomial(res));
    }
    merge("", verify_open_virasoro(std::min(idx, M - 1), Fo, Fc));
    add("recursion lemma point 1", lemma51_point1(Fo, Fc));
    for (int n = 0; n <= std::min(M - 2, 2); ++n)
        add("recursion lemma point 2 n=" + std::to_string(n),
            lemma51_point2(n, Fo, Fc));
    for (int n = -1; n <= M - 2 && n <= 2; ++n)
        add("ladder identity n=" + std::to_string(n), appendix_identity_check(n, Fc));

    TSeries testF = deterministic_exponent(ow, 42u);
    for (int n = -1; n <= 2; ++n)
        for (int m = n + 1; m <= 2; ++m) {
            if (n + m < -1) continue;
            add("commutation closed [" + std::to_string(n) + "," + std::to_string(m) + "]",
                verify_commutation(n, m, VirasoroKind::Closed, testF));
            add("commutation open [" + std::to_string(n) + "," + std::to_string(m) + "]",
                verify_commutation(n, m, VirasoroKind::Open, testF));
        }

    std::ostringstream out;
    std::string window = "M=" + std::to_string(M) + ",D=" + std::to_string(D);
    if (format == "json") {
        json j = json::array();
        for (const auto& c : rep.checks) {
            json row = {{"check", c.name}, {"pass", c.pass}, {"window", window}};
            if (!c.pass && !c.detail.empty()) row["first_failing_monomial"] = c.detail;
            j.push_back(row);
        }
        out << j.dump(2) << "\n";
    } else {
        for (const auto& c : rep.checks) {
            out << (c.pass ? "pass" : "FAIL") << "  " << c.name << "  [" << window
                << "]";
            if (!c.pass && !c.detail.empty()) out << "  " << c.detail;
            out << "\n";
        }
        out << (rep.all_pass() ? "all checks passed" : "checks FAILED") << " ("
            << rep.checks.size() << " checks)\n";
    }
    emit(out.str(), output);
    return rep.all_pass() ? 0 : kExitCheckFailed;
}

void multisets(int size, int sum, int maxpart, int minpart, std::vector<int>& cur,
               const std::function<void(const std::vector<int>&)>& fn) {
    if (size == 0) {
        if (sum == 0) fn(cur);
        return;
    }
    for (int p = minpart; p <= maxpart && p * size <= sum + p * (size - 1); ++p) {
        if (sum - p < 0) break;
        cur.push_back(p);
        multisets(size - 1, sum - p, maxpart, p, cur, fn);
        cur.pop_back();
    }
}

struct TableRow {
    int g = 0;
    int k = -1; // -1 for closed rows
    std::vector<int> indices;
    std::string value;
};

int cmd_table(const std::string& type, int g_max, int M, int D,
              const std::string& format, const std::string& output) {
    if (g_max < 0) throw ConfigError("table: g-max must be >= 0");
    Window w{M, type == "open" ? 0 : -1, D};
    std::vector<TableRow> rows;
    if (type == "closed") {
        TSeries F = closed_potential_virasoro(w);
        for (int g = 0; g <= g_max; ++g)
            for (int n = 1; n <= D + 1; ++n) {
                int sum = 3 * g - 3 + n;
                if (sum < 0) continue;
                std::vector<int> cur;
                multisets(n, sum, M, 0, cur, [&](const std::vector<int>& idx) {
                    TableRow row{g, -1, idx, ""};
                    try {
                        row.value = rat_str(correlator_closed(F, g, idx));
                    } catch (const OutOfWindow&) {
                        row.value = "unavailable";
                    }
                    rows.push_back(row);
                });
            }
    } else if (type == "open") {
        TSeries F = open_potential(w);
        for (int g = 0; g <= g_max; ++g)
            for (int l = 0; l <= D; ++l) {
                // enumerate all index multisets of size l regardless of sum
                std::vector<int> cur;
                std::function<void(int, int)> walk = [&](int pos, int minpart) {
                    if (pos == l) {
                        int sum = 0;
                        for (int i : cur) sum += i;
                        int k = 2 * sum - 3 * g + 3 - 2 * l;
                        if (k < 0 || (k == 0 && l == 0) || k + l > D) return;
                        TableRow row{g, k, cur, ""};
                        try {
                            row.value = rat_str(correlator_open(F, g, k, cur));
                        } catch (const OutOfWindow&) {
                            row.value = "unavailable";
                        }
                        rows.push_back(row);
                        return;
                    }
                    for (int p = minpart; p <= M; ++p) {
                        cur.push_back(p);
                        walk(pos + 1, p);
                        cur.pop_back();
                    }
                };
                walk(0, 0);
            }
    } else {
        throw ConfigError("table: unknown type " + type);
    }

    std::sort(rows.begin(), rows.end(), [](const TableRow& a, const TableRow& b) {
        if (a.g != b.g) return a.g < b.g;
        if (a.k != b.k) return a.k < b.k;
        if (a.indices.size() != b.indices.size())
            return a.indices.size() < b.indices.size();
        return a.indices < b.indices;
    });

    std::ostringstream out;
    if (format == "json") {
        json j = json::array();
        for (const auto& r : rows) {
            json row = {{"type", type}, {"g", r.g}, {"indices", r.indices},
                        {"value", r.value}};
            if (r.k >= 0) row["k"] = r.k;
            j.push_back(row);
        }
        out << j.dump(2) << "\n";
    } else if (format == "csv") {
        out << "type,g,k,indices,value\n";
        for (const auto& r : rows) {
            out << type << "," << r.g << ",";
            if (r.k >= 0) out << r.k;
            out << ",";
            for (std::size_t i = 0; i < r.indices.size(); ++i)
                out << (i ? " " : "") << r.indices[i];
            out << ",\"" << r.value << "\"\n";
        }
    } else {
        for (const auto& r : rows) {
            out << "g=" << r.g;
            if (r.k >= 0) out << " k=" << r.k;
            out << " [";
            for (std::size_t i = 0; i < r.indices.size(); ++i)
                out << (i ? " " : "") << r.indices[i];
            out << "] " << r.value << "\n";
        }
    }
    emit(out.str(), output);
    return 0;
}

int cmd_psdo(int depth, int twice_n, const std::string& output) {
    if (depth > -1) throw ConfigError("psdo: depth must be negative");
    if (twice_n < 1) throw ConfigError("psdo: twice-n must be >= 1");
    std::ostringstream out;
    PsDOp s = sqrt_L(depth);
    out << "sqrt(L) to depth " << depth << ":\n";
    for (const auto& [k, c] : s.coeffs())
        out << "  dx^" << k << ": " << c.str() << "\n";
    PsDOp p = positive_part(lax_power_half(twice_n, depth));
    out << "(L^(" << twice_n << "/2))_+ :\n";
    for (const auto& [k, c] : p.coeffs())
        out << "  dx^" << k << ": " << c.str() << "\n";
    emit(out.str(), output);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact engine for the coupled Burgers-KdV hierarchy and its"
                 " intersection-number potentials"};
    app.require_subcommand(1);

    int M = 3, K = 0, D = 6;
    std::string format = "text", output, level = "fast", fault;
    unsigned threads = 1;
    if (const char* env = std::getenv("OPENKDV_THREADS"))
        threads = (unsigned)std::max(1, std::atoi(env));

    auto add_window = [&](CLI::App* c, bool with_k) {
        c->add_option("--M", M, "largest t index");
        if (with_k) c->add_option("--K", K, "largest s index");
        c->add_option("--D", D, "total degree bound");
    };
    auto add_io = [&](CLI::App* c) {
        c->add_option("--format", format)
            ->check(CLI::IsMember({"json", "csv", "text"}));
        c->add_option("--output,-o", output, "write to file instead of stdout");
    };

    auto* flows = app.add_subcommand("flows", "print the flow generators");
    int k_depth = 4, rq_depth = 3;
    flows->add_option("--k-depth", k_depth, "highest K_n");
    flows->add_option("--rq-depth", rq_depth, "highest R_n and Q_n");
    flows->add_option("--output,-o", output);

    auto* pot = app.add_subcommand("potential", "compute a potential series");
    std::string which;
    bool cross_check = false;
    pot->add_option("kind", which, "closed-kdv | closed-virasoro | open")->required();
    pot->add_flag("--cross-check", cross_check, "compare both closed routes");
    add_window(pot, true);
    add_io(pot);

    auto* ver = app.add_subcommand("verify", "run the verification suite");
    ver->add_option("--level", level)->check(CLI::IsMember({"fast", "full"}));
    ver->add_option("--threads", threads);
#ifdef OPENKDV_FAULT_INJECTION
    ver->add_option("--inject-fault", fault,
                    "drop-34-term | corrupt-open-init")
        ->group(""); // hidden
#endif
    add_io(ver);

    auto* tab = app.add_subcommand("table", "export a correlator table");
    std::string table_type;
    int g_max = 1;
    tab->add_option("type", table_type, "closed | open")->required();
    tab->add_option("--g-max", g_max);
    add_window(tab, false);
    add_io(tab);

    auto* ps = app.add_subcommand("psdo", "pseudo-differential operator dumps");
    int depth = -8, twice_n = 3;
    ps->add_option("--depth", depth, "truncation order (negative)");
    ps->add_option("--twice-n", twice_n, "doubled Lax exponent");
    ps->add_option("--output,-o", output);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (flows->parsed()) return cmd_flows(k_depth, rq_depth, output);
        if (pot->parsed())
            return cmd_potential(which, M, K, D, cross_check, format, output);
        if (ver->parsed()) return cmd_verify(level, threads, fault, format, output);
        if (tab->parsed()) return cmd_table(table_type, g_max, M, D, format, output);
        if (ps->parsed()) return cmd_psdo(depth, twice_n, output);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const OutOfWindow& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitConfig;
}
