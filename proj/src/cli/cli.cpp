#include "cli/cli.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <variant>
#include <vector>

#include "apps/apps.hpp"
#include "dsl/dsl.hpp"
#include "morse/morse.hpp"
#include "trace/trace.hpp"

namespace kvt::cli {

using json = nlohmann::ordered_json;
using kv::KVObject;
using kv::KVOneMor;
using kv::KVTwoMor;
using lin::ExactScalar;
using lin::Matrix;
using lin::ScalarMode;
using tr::CommutingPair;

namespace {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return std::uint64_t((unsigned __int128)(a) * b % m);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    for (; e; e >>= 1, a = mulmod(a, a, m))
        if (e & 1) r = mulmod(r, a, m);
    return r;
}

// Deterministic Miller-Rabin; this witness set decides primality for every
// 64-bit integer.
bool is_prime(std::uint64_t n) {
    constexpr std::array<std::uint64_t, 12> wit{2,  3,  5,  7,  11, 13,
                                                17, 19, 23, 29, 31, 37};
    if (n < 2) return false;
    for (auto p : wit)
        if (n % p == 0) return n == p;
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) d >>= 1, ++s;
    for (auto a : wit) {
        std::uint64_t x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s && composite; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) composite = false;
        }
        if (composite) return false;
    }
    return true;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Instance i draws from its own stream, so a worker pool reproduces the
// serial run no matter how instances are scheduled.
std::mt19937_64 rng_for(std::uint64_t seed, std::size_t i) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(i)));
}

void run_jobs(std::size_t count, std::size_t jobs,
              const std::function<void(std::size_t)>& fn) {
    if (jobs == 0)
        jobs = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    jobs = std::min(jobs, count);
    if (jobs <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < jobs; ++t)
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < count; i += jobs) fn(i);
        });
    for (auto& th : pool) th.join();
}

KVOneMor random_mor(std::mt19937_64& rng, KVObject src, KVObject tgt,
                    std::size_t max_dim) {
    std::uniform_int_distribution<std::size_t> d(0, max_dim);
    std::vector<std::vector<std::size_t>> dims(
        tgt.rank, std::vector<std::size_t>(src.rank, 0));
    for (auto& row : dims)
        for (auto& c : row) c = d(rng);
    return make_one_mor(src, tgt, std::move(dims));
}

KVTwoMor random_two_mor(std::mt19937_64& rng, const KVOneMor& src,
                        const KVOneMor& tgt, ScalarMode mode, long max_num) {
    std::uniform_int_distribution<long> e(-max_num, max_num);
    std::uniform_int_distribution<long> ep(0, mode.p ? long(mode.p) - 1 : 0);
    std::vector<std::vector<Matrix>> blocks(src.tgt.rank);
    for (std::size_t i = 0; i < src.tgt.rank; ++i)
        for (std::size_t j = 0; j < src.src.rank; ++j) {
            Matrix m(tgt.dims[i][j], src.dims[i][j], mode);
            for (std::size_t r = 0; r < m.rows(); ++r)
                for (std::size_t c = 0; c < m.cols(); ++c)
                    m.at(r, c) =
                        ExactScalar::from_int(mode.p ? ep(rng) : e(rng), mode);
            blocks[i].push_back(std::move(m));
        }
    return make_two_mor(src, tgt, mode, std::move(blocks));
}

CommutingPair random_pair(std::mt19937_64& rng, const RunConfig& cfg) {
    std::uniform_int_distribution<std::size_t> r(1, cfg.max_rank);
    KVObject a{r(rng)};
    auto pa = random_mor(rng, a, a, cfg.max_dim);
    auto pb = random_mor(rng, a, a, cfg.max_dim);
    auto alpha = random_two_mor(rng, compose1(pa, pb), compose1(pb, pa),
                                cfg.mode, cfg.max_numerator);
    return tr::make_commuting_pair(pa, pb, alpha);
}

json mor_json(const KVOneMor& f) {
    json rows = json::array();
    for (const auto& r : f.dims) rows.push_back(r);
    return json{{"src", f.src.rank}, {"tgt", f.tgt.rank}, {"dims", rows}};
}

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j)
            row.push_back(m.at(i, j).str());
        rows.push_back(std::move(row));
    }
    return rows;
}

json two_mor_json(const KVTwoMor& t) {
    json blocks = json::array();
    for (const auto& row : t.blocks) {
        json brow = json::array();
        for (const auto& b : row) brow.push_back(matrix_json(b));
        blocks.push_back(std::move(brow));
    }
    return json{{"src", mor_json(t.src)},
                {"tgt", mor_json(t.tgt)},
                {"blocks", std::move(blocks)}};
}

json pair_json(const CommutingPair& p) {
    return json{{"phi_a", mor_json(p.phi_a)},
                {"phi_b", mor_json(p.phi_b)},
                {"alpha", two_mor_json(p.alpha)}};
}

std::string grid_str(const std::vector<std::vector<std::size_t>>& g) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (i) os << ", ";
        os << "[";
        for (std::size_t j = 0; j < g[i].size(); ++j) {
            if (j) os << ", ";
            os << g[i][j];
        }
        os << "]";
    }
    os << "]";
    return os.str();
}

std::string entries_str(const Matrix& m) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < m.rows(); ++i) {
        if (i) os << ", ";
        os << "[";
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) os << ", ";
            os << m.at(i, j).str();
        }
        os << "]";
    }
    os << "]";
    return os.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// One instance's verdicts: ok[k] per suite check, plus the first failing
// check's name, reason, and serialized instance data.
struct InstanceResult {
    std::vector<char> ok;
    std::string check, detail;
    json data;
};

struct Checker {
    InstanceResult& out;

    void operator()(std::size_t k, const char* name, const json& data,
                    const std::function<bool()>& fn) const {
        bool good = false;
        std::string why = "equality failed";
        try {
            good = fn();
        } catch (const std::exception& e) {
            why = e.what();
        }
        out.ok[k] = good;
        if (!good && out.check.empty()) {
            out.check = name;
            out.detail = why;
            out.data = data;
        }
    }
};

const std::vector<std::string> kVerifyChecks{
    "secondary", "shear", "alt", "dual", "snake", "cyclic", "bv"};
const std::vector<std::string> kMorseChecks{"main", "diamond", "saddles"};

InstanceResult verify_instance(const RunConfig& cfg, std::size_t i) {
    InstanceResult out;
    out.ok.assign(kVerifyChecks.size(), 0);
    Checker check{out};
    auto rng = rng_for(cfg.seed, i);

    // Shallow checks (3-atom flattened chains at worst) take the configured
    // bounds. The shear, alt, and dual maps route through 4- and 5-atom
    // chains whose dense exact matrices grow as the square of the flattened
    // dimension, gigabytes at rank 3 and beyond, so those draws stay at
    // rank <= 2, dim <= 2.
    auto pair = random_pair(rng, cfg);
    std::uniform_int_distribution<std::size_t> r(1, cfg.max_rank);
    KVObject a{r(rng)}, b{r(rng)};
    auto psi = random_mor(rng, a, b, cfg.max_dim);
    auto back = random_mor(rng, b, a, cfg.max_dim);

    RunConfig deep = cfg;
    deep.max_rank = std::min<std::size_t>(deep.max_rank, 2);
    deep.max_dim = std::min<std::size_t>(deep.max_dim, 2);
    auto dpair = random_pair(rng, deep);
    std::uniform_int_distribution<std::size_t> dr(1, deep.max_rank);
    KVObject da{dr(rng)}, db{dr(rng)};
    auto dpsi = random_mor(rng, da, db, deep.max_dim);
    auto dphi = random_mor(rng, da, da, deep.max_dim);
    auto dphip = random_mor(rng, db, db, deep.max_dim);
    auto dalpha = random_two_mor(rng, compose1(dpsi, dphi),
                                 compose1(dphip, dpsi), cfg.mode,
                                 cfg.max_numerator);

    json pair_data = pair_json(pair);
    json dpair_data = pair_json(dpair);
    json fun_data{{"psi", mor_json(dpsi)},
                  {"phi", mor_json(dphi)},
                  {"phi_prime", mor_json(dphip)},
                  {"alpha", two_mor_json(dalpha)}};
    json loop_data{{"f", mor_json(psi)}, {"g", mor_json(back)}};

    check(0, "secondary", pair_data, [&] {
        return tr::secondary_trace_a(pair) == tr::secondary_trace_b(pair);
    });
    check(1, "shear", dpair_data, [&] {
        if (!(tr::shear_map(dpair) ==
              tr::trace_map(dpair.phi_a, dpair.alpha, dpair.phi_b,
                            dpair.phi_b)))
            return false;
        auto sheared = tr::make_commuting_pair(
            compose1(dpair.phi_a, dpair.phi_b), dpair.phi_b,
            tr::shear_commutor(dpair));
        return tr::secondary_trace_b(sheared) ==
                   tr::secondary_trace_b(dpair) &&
               tr::secondary_trace_a(sheared) == tr::secondary_trace_a(dpair);
    });
    check(2, "alt", fun_data, [&] {
        return tr::trace_map(dpsi, dalpha, dphi, dphip) ==
               tr::trace_map_alt(dpsi, dalpha, dphi, dphip);
    });
    check(3, "dual", fun_data, [&] {
        // computes the mate route and the pairing-adjoint route internally
        // and throws if they disagree
        auto d = tr::dual_trace_map(dpsi, dalpha, dphi, dphip);
        return d.rows() == tr::trace_of(transpose_mor(dphi)).dim &&
               d.cols() == tr::trace_of(transpose_mor(dphip)).dim;
    });
    check(4, "snake", pair_data, [&] {
        auto du = tr::trace_duality(pair.phi_a, cfg.mode);
        auto idd =
            Matrix::identity(tr::trace_of(pair.phi_a).dim, cfg.mode);
        return mat_mul(kron(du.ev, idd), kron(idd, du.coev)) == idd &&
               mat_mul(kron(idd, du.ev), kron(du.coev, idd)) == idd;
    });
    check(5, "cyclic", loop_data, [&] {
        auto round = mat_mul(tr::cyclic(back, psi, cfg.mode),
                             tr::cyclic(psi, back, cfg.mode));
        return round == Matrix::identity(
                            tr::trace_of(compose1(psi, back)).dim, cfg.mode);
    });
    check(6, "bv", pair_data, [&] {
        return tr::bv_check(pair.phi_a, cfg.mode).is_identity();
    });
    return out;
}

InstanceResult morse_instance(const RunConfig& cfg, std::size_t i) {
    InstanceResult out;
    out.ok.assign(kMorseChecks.size(), 0);
    Checker check{out};
    auto rng = rng_for(cfg.seed, i);

    auto pair = random_pair(rng, cfg);
    json data = pair_json(pair);
    using N = morse::Node;
    auto t = [&](N p, N q) {
        return morse::T_morphism({morse::node_mask(p)}, {morse::node_mask(q)},
                                 pair);
    };

    check(0, "main", data, [&] {
        auto rep = morse::verify_main(pair);
        if (!rep.ok)
            throw std::runtime_error(
                rep.detail.empty() ? "endpoint disagreement" : rep.detail);
        return true;
    });
    check(1, "diamond", data, [&] {
        auto direct = t(N::M, N::MAB);
        return direct == mat_mul(t(N::MA, N::MAB), t(N::M, N::MA)) &&
               direct == mat_mul(t(N::MB, N::MAB), t(N::M, N::MB));
    });
    check(2, "saddles", data, [&] {
        auto direct = t(N::MAB, N::SASB);
        return direct == mat_mul(t(N::SAMB, N::SASB), t(N::MAB, N::SAMB)) &&
               direct == mat_mul(t(N::MASB, N::SASB), t(N::MAB, N::MASB));
    });
    return out;
}

CommandResult assemble(const char* cmd, const RunConfig& cfg,
                       const std::vector<std::string>& names,
                       const std::vector<InstanceResult>& res, Format fmt) {
    std::vector<std::size_t> pass(names.size(), 0);
    std::size_t fail_at = res.size();
    for (std::size_t i = 0; i < res.size(); ++i) {
        for (std::size_t k = 0; k < names.size(); ++k)
            if (res[i].ok[k]) ++pass[k];
        if (!res[i].check.empty() && fail_at == res.size()) fail_at = i;
    }
    std::size_t total = names.size() * res.size();
    std::size_t passed = 0;
    for (auto n : pass) passed += n;
    bool ok = passed == total;

    CommandResult cr;
    cr.status = ok ? 0 : 1;
    if (fmt == Format::Json) {
        json j;
        j["command"] = cmd;
        j["field"] = lin::to_string(cfg.mode);
        j["seed"] = cfg.seed;
        j["cases"] = cfg.cases;
        j["max_rank"] = cfg.max_rank;
        j["max_dim"] = cfg.max_dim;
        j["max_numerator"] = cfg.max_numerator;
        json checks = json::object();
        for (std::size_t k = 0; k < names.size(); ++k)
            checks[names[k]] =
                json{{"pass", pass[k]}, {"fail", res.size() - pass[k]}};
        j["checks"] = std::move(checks);
        if (ok)
            j["counterexample"] = nullptr;
        else
            j["counterexample"] = json{{"instance", fail_at},
                                       {"check", res[fail_at].check},
                                       {"detail", res[fail_at].detail},
                                       {"data", res[fail_at].data}};
        j["ok"] = ok;
        cr.report = j.dump(2) + "\n";
        return cr;
    }

    std::size_t width = 0;
    for (const auto& n : names) width = std::max(width, n.size());
    std::ostringstream os;
    os << cmd << " over " << lin::to_string(cfg.mode) << ": seed " << cfg.seed
       << ", " << cfg.cases << " cases, max rank " << cfg.max_rank
       << ", max dim " << cfg.max_dim << ", max numerator "
       << cfg.max_numerator << "\n";
    for (std::size_t k = 0; k < names.size(); ++k)
        os << "  " << names[k] << std::string(width - names[k].size(), ' ')
           << "  " << pass[k] << "/" << res.size() << "\n";
    if (!ok) {
        os << "first counterexample: instance " << fail_at << ", check "
           << res[fail_at].check << " (" << res[fail_at].detail << ")\n"
           << res[fail_at].data.dump(2) << "\n";
    }
    os << cmd << ": " << (ok ? "PASS" : "FAIL") << " (" << passed << "/"
       << total << " checks)\n";
    cr.report = os.str();
    return cr;
}

ExactScalar entry_of_json(const json& v, ScalarMode mode) {
    if (v.is_number_integer())
        return ExactScalar::from_int(v.get<long>(), mode);
    if (mode.rational() && v.is_string()) {
        mpq_class q;
        try {
            q = mpq_class(v.get<std::string>());
        } catch (const std::exception&) {
            throw std::invalid_argument("cannot parse \"" +
                                        v.get<std::string>() +
                                        "\" as a rational");
        }
        if (q.get_den() == 0)
            throw std::invalid_argument("zero denominator in \"" +
                                        v.get<std::string>() + "\"");
        q.canonicalize();
        return ExactScalar::from_rational(q);
    }
    throw std::invalid_argument(
        mode.rational()
            ? "matrix entries must be integers or \"p/q\" strings"
            : "prime-field entries must be integers");
}

std::size_t nat_of_json(const json& v, const char* what) {
    if (!v.is_number_unsigned() &&
        !(v.is_number_integer() && v.get<long long>() >= 0))
        throw std::invalid_argument(std::string(what) +
                                    " must be a nonnegative integer");
    return v.get<std::size_t>();
}

const json& member(const json& j, const char* key, const char* doc) {
    auto it = j.find(key);
    if (it == j.end())
        throw std::invalid_argument(std::string(doc) + " is missing \"" +
                                    key + "\"");
    return *it;
}

KVOneMor mor_of_json(const json& j, const std::string& name) {
    const char* doc = "1-morphism value";
    if (!j.is_object())
        throw std::invalid_argument(name + ": " + doc + " must be an object");
    std::size_t src = nat_of_json(member(j, "src", doc), "src");
    std::size_t tgt = nat_of_json(member(j, "tgt", doc), "tgt");
    const json& rows = member(j, "dims", doc);
    if (!rows.is_array() || rows.size() != tgt)
        throw std::invalid_argument(name + ": dims must have " +
                                    std::to_string(tgt) + " rows");
    std::vector<std::vector<std::size_t>> dims;
    for (const auto& row : rows) {
        if (!row.is_array() || row.size() != src)
            throw std::invalid_argument(name + ": dims rows must have " +
                                        std::to_string(src) + " entries");
        std::vector<std::size_t> r;
        for (const auto& v : row) r.push_back(nat_of_json(v, "dims entry"));
        dims.push_back(std::move(r));
    }
    return kv::make_one_mor({src}, {tgt}, std::move(dims));
}

Matrix matrix_of_json(const json& j, std::size_t rows, std::size_t cols,
                      ScalarMode mode, const std::string& where) {
    if (!j.is_array() || j.size() != rows)
        throw std::invalid_argument(where + " must have " +
                                    std::to_string(rows) + " rows");
    Matrix m(rows, cols, mode);
    for (std::size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols)
            throw std::invalid_argument(where + " rows must have " +
                                        std::to_string(cols) + " entries");
        for (std::size_t c = 0; c < cols; ++c)
            m.at(r, c) = entry_of_json(j[r][c], mode);
    }
    return m;
}

KVTwoMor two_mor_of_json(const json& j, ScalarMode mode,
                         const std::string& name) {
    if (!j.is_object())
        throw std::invalid_argument(name +
                                    ": 2-morphism value must be an object");
    auto src = mor_of_json(member(j, "src", "2-morphism value"), name);
    auto tgt = mor_of_json(member(j, "tgt", "2-morphism value"), name);
    const json& rows = member(j, "blocks", "2-morphism value");
    if (!rows.is_array() || rows.size() != src.tgt.rank)
        throw std::invalid_argument(name + ": blocks must have " +
                                    std::to_string(src.tgt.rank) + " rows");
    std::vector<std::vector<Matrix>> blocks(src.tgt.rank);
    for (std::size_t i = 0; i < src.tgt.rank; ++i) {
        if (!rows[i].is_array() || rows[i].size() != src.src.rank)
            throw std::invalid_argument(name + ": blocks rows must have " +
                                        std::to_string(src.src.rank) +
                                        " entries");
        for (std::size_t jx = 0; jx < src.src.rank; ++jx)
            blocks[i].push_back(matrix_of_json(
                rows[i][jx], tgt.dims[i][jx], src.dims[i][jx], mode,
                name + ": block[" + std::to_string(i) + "][" +
                    std::to_string(jx) + "]"));
    }
    return make_two_mor(std::move(src), std::move(tgt), mode,
                        std::move(blocks));
}

// {"objects": {name: rank}, "one_mors": {name: {src, tgt, dims}},
//  "two_mors": {name: {src, tgt, blocks}}}; every section optional.
void load_env(dsl::Environment& env, const std::string& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(path + " is not valid JSON: " + e.what());
    }
    if (!j.is_object())
        throw std::invalid_argument(path + ": environment must be an object");
    if (auto it = j.find("objects"); it != j.end())
        for (const auto& [k, v] : it->items())
            env.objects[k] = nat_of_json(v, ("object " + k).c_str());
    if (auto it = j.find("one_mors"); it != j.end())
        for (const auto& [k, v] : it->items())
            env.one_mors.emplace(k, mor_of_json(v, k));
    if (auto it = j.find("two_mors"); it != j.end())
        for (const auto& [k, v] : it->items())
            env.two_mors.emplace(k, two_mor_of_json(v, env.mode, k));
}

}  // namespace

ScalarMode parse_field(const std::string& spec) {
    if (spec == "q" || spec == "Q") return ScalarMode{0};
    if (spec.rfind("fp:", 0) == 0) {
        std::string digits = spec.substr(3);
        if (digits.empty() ||
            !std::all_of(digits.begin(), digits.end(),
                         [](unsigned char c) { return std::isdigit(c); }))
            throw std::invalid_argument(
                "field \"" + spec + "\" needs a decimal modulus after fp:");
        std::uint64_t p = 0;
        try {
            p = std::stoull(digits);
        } catch (const std::exception&) {
            throw std::invalid_argument("field modulus " + digits +
                                        " is out of range");
        }
        if (p < 2 || p >= (std::uint64_t(1) << 62) || !is_prime(p))
            throw std::invalid_argument(
                "field modulus must be a prime below 2^62, got " + digits);
        return ScalarMode{p};
    }
    throw std::invalid_argument("field must be q or fp:P, got \"" + spec +
                                "\"");
}

void validate(const RunConfig& cfg) {
    if (cfg.cases < 1) throw std::invalid_argument("cases must be at least 1");
    if (cfg.max_rank < 1)
        throw std::invalid_argument("max rank must be at least 1");
    if (cfg.max_dim < 1)
        throw std::invalid_argument("max dim must be at least 1");
    if (cfg.max_numerator < 1)
        throw std::invalid_argument("max numerator must be at least 1");
    if (cfg.mode.p != 0 && !is_prime(cfg.mode.p))
        throw std::invalid_argument("field modulus must be prime");
}

CommandResult run_verify(const RunConfig& cfg, Format fmt, std::size_t jobs) {
    validate(cfg);
    std::vector<InstanceResult> res(cfg.cases);
    run_jobs(cfg.cases, jobs,
             [&](std::size_t i) { res[i] = verify_instance(cfg, i); });
    return assemble("verify", cfg, kVerifyChecks, res, fmt);
}

CommandResult run_morse(const RunConfig& cfg, Format fmt, std::size_t jobs) {
    validate(cfg);
    std::vector<InstanceResult> res(cfg.cases);
    run_jobs(cfg.cases, jobs,
             [&](std::size_t i) { res[i] = morse_instance(cfg, i); });
    return assemble("morse", cfg, kMorseChecks, res, fmt);
}

CommandResult run_char2(const std::string& group_path,
                        const std::string& action_spec, ScalarMode mode,
                        Format fmt, std::size_t jobs) {
    auto lg = apps::load_group_file(group_path);
    apps::GroupAction act = action_spec == "natural"
                                ? apps::natural_action(lg)
                            : action_spec == "regular"
                                ? apps::regular_action(lg.group)
                                : apps::load_action_file(action_spec, lg);
    auto table = apps::char2_table(act, mode, jobs);

    std::size_t oracle_pass = 0;
    std::vector<std::string> mismatches;
    for (const auto& e : table.entries) {
        auto want = ExactScalar::from_int(
            long(apps::fixed_point_oracle(act, e.g, e.h)), mode);
        if (e.chi == want) {
            ++oracle_pass;
        } else if (mismatches.size() < 5) {
            mismatches.push_back("chi(" + std::to_string(e.g) + "," +
                                 std::to_string(e.h) + ") = " + e.chi.str() +
                                 " but the oracle counts " + want.str());
        }
    }
    auto moves = apps::sl2z_check(table);
    std::size_t move_pass = moves.checked - moves.failures.size();
    bool ok = oracle_pass == table.entries.size() && moves.ok;

    CommandResult cr;
    cr.status = ok ? 0 : 1;
    if (fmt == Format::Json) {
        json j;
        j["command"] = "char2";
        j["field"] = lin::to_string(mode);
        j["group_order"] = act.group.order;
        j["set_size"] = act.set_size;
        j["action"] = action_spec;
        json entries = json::array();
        for (const auto& e : table.entries)
            entries.push_back(
                json{{"g", e.g}, {"h", e.h}, {"chi", e.chi.str()}});
        j["entries"] = std::move(entries);
        j["oracle"] = json{{"pass", oracle_pass},
                           {"total", table.entries.size()}};
        j["moves"] = json{{"pass", move_pass}, {"total", moves.checked}};
        json fails = json::array();
        for (const auto& m : mismatches) fails.push_back(m);
        for (const auto& m : moves.failures) fails.push_back(m);
        j["failures"] = std::move(fails);
        j["ok"] = ok;
        cr.report = j.dump(2) + "\n";
        return cr;
    }

    std::ostringstream os;
    os << "char2 over " << lin::to_string(mode) << ": group order "
       << act.group.order << " acting on " << act.set_size << " points ("
       << action_spec << ")\n";
    for (const auto& e : table.entries)
        os << "  chi(" << e.g << "," << e.h << ") = " << e.chi.str() << "\n";
    os << "  oracle agreement: " << oracle_pass << "/" << table.entries.size()
       << "\n";
    os << "  modular moves: " << move_pass << "/" << moves.checked << "\n";
    for (const auto& m : mismatches) os << "  mismatch: " << m << "\n";
    for (const auto& m : moves.failures) os << "  move failure: " << m << "\n";
    os << "char2: " << (ok ? "PASS" : "FAIL") << "\n";
    cr.report = os.str();
    return cr;
}

CommandResult run_lefschetz(const std::string& bundle_path, Format fmt) {
    auto b = apps::load_bundle_file(bundle_path);
    auto res = apps::lefschetz(b);
    bool ok = false;
    std::string sec_str, why;
    try {
        auto sec = tr::secondary_trace_b(apps::lefschetz_pair(b));
        sec_str = sec.str();
        ok = res.lhs == res.rhs && res.rhs == sec;
        if (!ok) why = "the three values disagree";
    } catch (const std::logic_error& e) {
        why = e.what();
    }

    CommandResult cr;
    cr.status = ok ? 0 : 1;
    if (fmt == Format::Json) {
        json j;
        j["command"] = "lefschetz";
        j["base_size"] = b.base_size;
        j["fiber_dims"] = b.fiber_dims;
        j["fixed_point_sum"] = res.lhs.str();
        j["global_trace"] = res.rhs.str();
        j["secondary_trace"] = sec_str.empty() ? json(nullptr) : json(sec_str);
        if (!why.empty()) j["detail"] = why;
        j["ok"] = ok;
        cr.report = j.dump(2) + "\n";
        return cr;
    }

    std::ostringstream os;
    os << "lefschetz: base " << b.base_size << " points, fiber dims [";
    for (std::size_t x = 0; x < b.fiber_dims.size(); ++x)
        os << (x ? ", " : "") << b.fiber_dims[x];
    os << "]\n";
    os << "  fixed-point sum: " << res.lhs.str() << "\n";
    os << "  global trace:    " << res.rhs.str() << "\n";
    os << "  secondary trace: " << (sec_str.empty() ? "(error)" : sec_str)
       << "\n";
    if (!why.empty()) os << "  " << why << "\n";
    os << "lefschetz: " << (ok ? "PASS (the three values agree)" : "FAIL")
       << "\n";
    cr.report = os.str();
    return cr;
}

CommandResult run_eval(const std::string& program_path,
                       const std::string& env_path, ScalarMode mode,
                       Format fmt) {
    dsl::Environment env;
    env.mode = mode;
    if (!env_path.empty()) load_env(env, env_path);
    auto prog = dsl::parse_program(read_file(program_path));
    auto res = dsl::run_program(prog, env);

    CommandResult cr;
    cr.status = 0;
    if (fmt == Format::Json) {
        json j;
        j["command"] = "eval";
        j["field"] = lin::to_string(mode);
        json exprs = json::array();
        for (std::size_t i = 0; i < res.values.size(); ++i) {
            json e;
            e["text"] = dsl::print_expr(*prog.exprs[i]);
            if (const auto* f = std::get_if<KVOneMor>(&res.values[i])) {
                e["layer"] = 1;
                e["value"] = mor_json(*f);
            } else {
                e["layer"] = 2;
                e["value"] = two_mor_json(std::get<KVTwoMor>(res.values[i]));
            }
            exprs.push_back(std::move(e));
        }
        j["exprs"] = std::move(exprs);
        cr.report = j.dump(2) + "\n";
        return cr;
    }

    std::ostringstream os;
    for (std::size_t i = 0; i < res.values.size(); ++i) {
        os << "expr " << i + 1 << ": " << dsl::print_expr(*prog.exprs[i])
           << "\n";
        if (const auto* f = std::get_if<KVOneMor>(&res.values[i])) {
            os << "  1-morphism: rank " << f->src.rank << " -> rank "
               << f->tgt.rank << "\n";
            os << "  dims: " << grid_str(f->dims) << "\n";
        } else {
            const auto& t = std::get<KVTwoMor>(res.values[i]);
            os << "  2-morphism over " << lin::to_string(t.mode) << "\n";
            os << "  src: rank " << t.src.src.rank << " -> rank "
               << t.src.tgt.rank << ", dims " << grid_str(t.src.dims) << "\n";
            os << "  tgt: rank " << t.tgt.src.rank << " -> rank "
               << t.tgt.tgt.rank << ", dims " << grid_str(t.tgt.dims) << "\n";
            for (std::size_t bi = 0; bi < t.blocks.size(); ++bi)
                for (std::size_t bj = 0; bj < t.blocks[bi].size(); ++bj)
                    os << "  block[" << bi << "][" << bj
                       << "]: " << entries_str(t.blocks[bi][bj]) << "\n";
        }
    }
    cr.report = os.str();
    return cr;
}

}  // namespace kvt::cli
