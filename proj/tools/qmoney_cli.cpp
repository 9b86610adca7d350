// Command-line driver. Exit codes: 0 success, 1 usage, 2 invariant violation,
// 3 verification reject.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "qmoney/cache.hpp"
#include "qmoney/errors.hpp"

using namespace qm;

namespace {

constexpr int kUsage = 1, kInvariant = 2, kReject = 3;

struct Options {
    std::int64_t N = 0;
    std::string n_list;
    std::int64_t p = 0;
    std::string primes = "auto";
    double epsilon = 0.0;
    double delta = 0.0;
    std::uint64_t seed = 1;
    std::uint64_t key_seed = 0;
    std::string cache_dir;
    bool no_cache = false;
    std::string out;
    std::string in;
    std::string format = "json";
    int jobs = 1;
    double residual_tol = default_tolerances().residual;
    double symmetry_tol = default_tolerances().symmetry;
    bool state_vector = false;
    double noise = 0.0;
    std::string budget = "sqrt*10";
    std::size_t runs = 200;
    std::size_t trials = 10000;
    bool demo = false;
};

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::vector<std::int64_t> parse_list(const std::string& s) {
    std::vector<std::int64_t> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            std::size_t used = 0;
            out.push_back(std::stoll(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError("not an integer list: " + s);
        }
    }
    if (out.empty()) throw UsageError("empty list");
    return out;
}

std::vector<std::int64_t> resolve_primes(const Options& o, std::int64_t N) {
    if (o.primes == "auto") return default_primes(N);
    if (o.primes == "auto-floor") return default_primes(N, PrimeRule::below_floor_log2);
    auto ps = parse_list(o.primes);
    for (auto p : ps)
        if (!is_prime(p) || p == N) throw UsageError("primes must be prime and different from N");
    return ps;
}

std::optional<std::filesystem::path> cache_root(const Options& o) {
    if (o.no_cache) return std::nullopt;
    return o.cache_dir.empty() ? default_cache_dir() : std::filesystem::path(o.cache_dir);
}

Workspace workspace(const Options& o, std::int64_t N) {
    Workspace ws(N, cache_root(o), o.jobs);
    Tolerances t;
    t.residual = o.residual_tol;
    t.symmetry = o.symmetry_tol;
    ws.set_tolerances(t);
    return ws;
}

void emit(const Options& o, const std::string& text) {
    if (o.out.empty() || o.out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(o.out, std::ios::binary);
    f << text;
    if (!f) throw std::runtime_error("cannot write " + o.out);
}

std::string slurp(const std::string& path) {
    if (path.empty() || path == "-") return {std::istreambuf_iterator<char>(std::cin), {}};
    std::ifstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot read " + path);
    return {std::istreambuf_iterator<char>(f), {}};
}

std::string join(const std::vector<std::int64_t>& v, char sep) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? std::string(1, sep) : "") + std::to_string(v[i]);
    return s;
}

PublicParams params(const Options& o, Workspace& ws) {
    auto jb = ws.spectrum(resolve_primes(o, ws.level()), o.seed);
    return make_public_params(jb, o.epsilon > 0 ? std::optional<double>(o.epsilon) : std::nullopt);
}

int cmd_order(const Options& o) {
    auto O = build_maximal_order(o.N);
    Json j = to_json(*O);
    j["ramification_ok"] = is_ramified_correctly(O->params(), o.N);
    emit(o, dump(j));
    return 0;
}

int cmd_classset(const Options& o) {
    auto ws = workspace(o, o.N);
    emit(o, dump(to_json(ws.class_set())));
    return 0;
}

int cmd_brandt(const Options& o) {
    if (!is_prime(o.p) || o.p == o.N) throw UsageError("--p must be a prime different from N");
    auto ws = workspace(o, o.N);
    const auto& B = ws.brandt(o.p);
    if (o.format == "csv") {
        std::string s = "row,col,value\n";
        for (const auto& t : B.triplets) s += join({t[0], t[1], t[2]}, ',') + "\n";
        emit(o, s);
    } else {
        emit(o, dump(to_json(B)));
    }
    return 0;
}

int cmd_separation(const Options& o) {
    auto ws = workspace(o, o.N);
    auto primes = resolve_primes(o, o.N);
    auto jb = ws.spectrum(primes, o.seed);
    const auto s = separation(*jb);
    if (o.format == "csv") {
        emit(o, std::to_string(o.N) + "," + fmt(s.epsilon) + "," + join(primes, ' ') + "\n");
    } else {
        emit(o, dump(Json{{"N", o.N},
                          {"primes", primes},
                          {"epsilon", s.epsilon},
                          {"argmin", Json::array({s.i, s.k})},
                          {"duplicate", s.duplicate},
                          {"epsilon_with_distinguished", separation(*jb, true).epsilon},
                          {"suggested_epsilon", 1.0 / (4.0 * std::log2(static_cast<double>(o.N)))},
                          {"max_residual", jb->max_residual}}));
    }
    return 0;
}

int cmd_table(const Options& o) {
    std::string s = "N,epsilon\n";
    for (auto N : parse_list(o.n_list)) {
        auto ws = workspace(o, N);
        s += std::to_string(N) + "," + fmt(separation(*ws.spectrum(resolve_primes(o, N), o.seed)).epsilon) + "\n";
    }
    emit(o, s);
    return 0;
}

int cmd_mint(const Options& o) {
    auto ws = workspace(o, o.N);
    const auto pp = params(o, ws);
    const auto sk = HmacStubScheme::generate(o.key_seed);
    Rng rng(o.seed);
    auto r = mint(pp, sk, rng, o.state_vector);
    if (!r.bill) {
        std::cerr << "mint produced bottom (distinguished eigenvector sampled)\n";
        return kReject;
    }
    emit(o, dump(to_json(*r.bill, o.N)));
    return 0;
}

int cmd_verify(const Options& o) {
    const Json j = Json::parse(slurp(o.in));
    const Bill bill = bill_from_json(j);
    const std::int64_t N = o.N ? o.N : j.at("N").get<std::int64_t>();
    if (j.at("N").get<std::int64_t>() != N) throw UsageError("bill level differs from --N");
    auto ws = workspace(o, N);
    const auto pp = params(o, ws);
    const auto vk = HmacStubScheme::generate(o.key_seed);
    Rng rng(o.seed);
    const auto r = verify(pp, vk, bill, rng, o.noise);
    emit(o, dump(Json{{"accepted", r.accepted}, {"reason", r.reason}, {"k", r.k}, {"l", r.l}}));
    return r.accepted ? 0 : kReject;
}

Json serial_json(const std::optional<LightningSerial>& s) {
    if (!s) return nullptr;
    Json a = Json::array();
    for (const auto& [re, im] : *s) a.push_back(Json::array({re, im}));
    return a;
}

int cmd_lightning(const Options& o) {
    auto ws = workspace(o, o.N);
    const auto pp = params(o, ws);
    Rng rng(o.seed);
    const auto lp = make_lightning_params(pp, rng, o.delta > 0 ? std::optional<double>(o.delta) : std::nullopt);
    const auto storm = lightning_storm(pp, lp, rng);
    const auto s1 = lightning_verify(pp, storm.bolt, rng);
    const auto s2 = lightning_verify(pp, storm.bolt, rng);
    Json j{{"epsilon", lp.epsilon},  {"delta", lp.delta},     {"z", Json::array({lp.z.real(), lp.z.imag()})},
           {"attempts", storm.attempts}, {"serial_1", serial_json(s1)}, {"serial_2", serial_json(s2)},
           {"stable", s1 && s2 && *s1 == *s2}};
    emit(o, dump(j));
    return (s1 && s2 && *s1 == *s2) ? 0 : kReject;
}

int cmd_attack(const Options& o) {
    auto ws = workspace(o, o.N);
    const auto pp = params(o, ws);
    std::size_t budget = 0;
    if (o.budget.rfind("sqrt*", 0) == 0) {
        const double k = std::stod(o.budget.substr(5));
        budget = static_cast<std::size_t>(std::ceil(k * std::sqrt(static_cast<double>(pp.h()))));
    } else {
        budget = static_cast<std::size_t>(parse_list(o.budget).at(0));
    }
    Rng rng(o.seed);
    const auto st = birthday_attack(pp, budget, o.runs, rng);
    if (o.format == "csv") {
        std::string s = "run,first_collision_index\n";
        for (std::size_t r = 0; r < st.runs; ++r) s += std::to_string(r) + "," + std::to_string(st.first_collision[r]) + "\n";
        emit(o, s);
    } else {
        emit(o, dump(Json{{"N", o.N},
                          {"h", pp.h()},
                          {"budget", budget},
                          {"runs", st.runs},
                          {"collided", st.collided},
                          {"collision_rate", static_cast<double>(st.collided) / static_cast<double>(st.runs)},
                          {"mean_first_collision", st.mean_first_collision()},
                          {"birthday_expectation", std::sqrt(std::acos(-1.0) * static_cast<double>(pp.h()) / 2.0)}}));
    }
    return 0;
}

int cmd_prepare(const Options& o) {
    auto ws = workspace(o, o.N);
    Rng rng(o.seed);
    const auto st = prepare_entangled(ws.class_set(), o.trials, rng);
    emit(o, dump(Json{{"N", o.N},
                      {"trials", st.trials},
                      {"successes", st.successes},
                      {"empirical", st.empirical()},
                      {"exact", st.exact_probability},
                      {"bound", st.bound},
                      {"fidelity_with_uniform", st.fidelity_with_uniform}}));
    return st.empirical() >= st.bound ? 0 : kInvariant;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quaternion-order quantum money: exact class sets, Brandt spectra and protocol simulation"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* c) {
        c->add_option("--cache-dir", o.cache_dir, "Cache root (default $QMONEY_CACHE_DIR or .qmoney-cache)");
        c->add_flag("--no-cache", o.no_cache, "Do not read or write the cache");
        c->add_option("--out", o.out, "Output file (default stdout)");
        c->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
    };
    auto add_spectral = [&](CLI::App* c) {
        c->add_option("--primes", o.primes, "Comma-separated primes, 'auto' (all p < log2 N) or 'auto-floor' (p < floor(log2 N))");
        c->add_option("--seed", o.seed, "Seed for the random combination and protocol randomness");
        c->add_option("--residual-tol", o.residual_tol, "Eigenvector residual tolerance");
        c->add_option("--symmetry-tol", o.symmetry_tol, "Symmetry tolerance for normalized Brandt matrices");
    };
    auto add_protocol = [&](CLI::App* c) {
        add_spectral(c);
        c->add_option("--epsilon", o.epsilon, "Separation parameter (default: measured separation)");
        c->add_option("--key-seed", o.key_seed, "Seed of the keyed-hash signing stub");
    };

    auto* order = app.add_subcommand("order", "Build the N-extremal maximal order and report its basis, "
                                              "reduced discriminant and extremality witness");
    order->add_option("--N", o.N, "Prime level")->required();
    order->add_option("--out", o.out, "Output file");

    auto* classset = app.add_subcommand("classset", "Enumerate left ideal classes by canonical triples (d,a,b) "
                                                    "and check the mass formula");
    classset->add_option("--N", o.N, "Prime level")->required();
    add_common(classset);

    auto* brandt = app.add_subcommand("brandt", "Sparse p-Brandt matrix: column J counts the classes of the p+1 "
                                                "neighbors of J");
    brandt->add_option("--N", o.N, "Prime level")->required();
    brandt->add_option("--p", o.p, "Neighbor prime")->required();
    brandt->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    add_common(brandt);

    auto* sep = app.add_subcommand("separation", "Minimum distance between joint eigenvalue tuples of "
                                                 "exp(i T(p) / sqrt p) on the complement of the constant vector");
    sep->add_option("--N", o.N, "Prime level")->required();
    sep->add_option("--format", o.format, "json or csv (row N,epsilon,primes)")->check(CLI::IsMember({"json", "csv"}));
    sep->add_flag("--csv", [&](std::int64_t) { o.format = "csv"; }, "Shorthand for --format csv");
    add_common(sep);
    add_spectral(sep);

    auto* table = app.add_subcommand("table", "Separation table as CSV with columns N,epsilon");
    table->add_option("--N-list", o.n_list, "Comma-separated prime levels")->required();
    add_common(table);
    add_spectral(table);

    auto* mintc = app.add_subcommand("mint", "Mint a bill: sample a joint eigenstate from the maximally "
                                             "entangled class state, sign its serial");
    mintc->add_option("--N", o.N, "Prime level")->required();
    mintc->add_flag("--state-vector", o.state_vector, "Carry full amplitudes instead of the eigenstate index");
    add_common(mintc);
    add_protocol(mintc);

    auto* verifyc = app.add_subcommand("verify", "Verify a bill (JSON on stdin or --in): signature, then "
                                                 "eigenvalues within epsilon/2 of every serial entry");
    verifyc->add_option("--N", o.N, "Prime level (default: taken from the bill)");
    verifyc->add_option("--in", o.in, "Bill file (default stdin)");
    verifyc->add_option("--noise", o.noise, "Readout noise width; negative selects epsilon/6");
    add_common(verifyc);
    add_protocol(verifyc);

    auto* light = app.add_subcommand("lightning", "Lightning storm plus two verifications with a rounded, "
                                                  "offset eigenvalue grid");
    light->add_option("--N", o.N, "Prime level")->required();
    light->add_option("--delta", o.delta, "Measurement error (default epsilon_L / (20 t))");
    light->add_flag("--demo", o.demo, "Run storm and two verifications (the default action)");
    add_common(light);
    add_protocol(light);

    auto* attack = app.add_subcommand("attack", "Birthday attack: mint notes until two serials agree");
    attack->add_option("--N", o.N, "Prime level")->required();
    attack->add_option("--budget", o.budget, "Mints per run: an integer or sqrt*K for K sqrt(h)");
    attack->add_option("--runs", o.runs, "Independent runs");
    attack->add_option("--format", o.format, "json summary or csv transcript")->check(CLI::IsMember({"json", "csv"}));
    add_common(attack);
    add_protocol(attack);

    auto* prep = app.add_subcommand("prepare", "Simulate the rejection-sampling preparation of the uniform "
                                               "superposition over canonical triples");
    prep->add_option("--N", o.N, "Prime level")->required();
    prep->add_option("--trials", o.trials, "Number of trials");
    prep->add_option("--seed", o.seed, "Seed");
    add_common(prep);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kUsage;
    }

    try {
        if (*order) return cmd_order(o);
        if (*classset) return cmd_classset(o);
        if (*brandt) return cmd_brandt(o);
        if (*sep) return cmd_separation(o);
        if (*table) return cmd_table(o);
        if (*mintc) return cmd_mint(o);
        if (*verifyc) return cmd_verify(o);
        if (*light) return cmd_lightning(o);
        if (*attack) return cmd_attack(o);
        if (*prep) return cmd_prepare(o);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const UnsupportedError& e) {
        std::cerr << "unsupported: " << e.what() << "\n";
        return kUsage;
    } catch (const Json::exception& e) {
        std::cerr << "malformed JSON: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return kInvariant;
    }
    return kUsage;
}
