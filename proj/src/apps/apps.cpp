#include "apps/apps.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>

#include <json.hpp>

namespace kvt::apps {
namespace {

using lin::ExactScalar;
using lin::Matrix;
using lin::ScalarMode;
using nlohmann::json;

bool is_bijection(const std::vector<std::size_t>& p, std::size_t m) {
    if (p.size() != m) return false;
    std::vector<bool> hit(m, false);
    for (std::size_t v : p) {
        if (v >= m || hit[v]) return false;
        hit[v] = true;
    }
    return true;
}

std::vector<std::size_t> compose_perm(const std::vector<std::size_t>& p,
                                      const std::vector<std::size_t>& q) {
    std::vector<std::size_t> r(q.size());
    for (std::size_t x = 0; x < q.size(); ++x) r[x] = p[q[x]];
    return r;
}

void require_element(const FiniteGroup& g, std::size_t e, const char* role) {
    if (e >= g.order)
        throw std::invalid_argument(std::string(role) + " index " +
                                    std::to_string(e) +
                                    " out of range for group of order " +
                                    std::to_string(g.order));
}

void require_commuting(const FiniteGroup& g, std::size_t a, std::size_t b) {
    if (g.mul[a][b] != g.mul[b][a])
        throw std::invalid_argument("elements " + std::to_string(a) + " and " +
                                    std::to_string(b) + " do not commute");
}

// Exact determinant test by Gaussian elimination; works in any mode.
bool invertible(const Matrix& m) {
    if (m.rows() != m.cols()) return false;
    std::size_t n = m.rows();
    Matrix w = m;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = n;
        for (std::size_t r = k; r < n; ++r)
            if (!w.at(r, k).is_zero()) {
                piv = r;
                break;
            }
        if (piv == n) return false;
        if (piv != k)
            for (std::size_t c = k; c < n; ++c)
                std::swap(w.at(k, c), w.at(piv, c));
        ExactScalar inv = w.at(k, k).inverse();
        for (std::size_t r = k + 1; r < n; ++r) {
            ExactScalar factor = w.at(r, k) * inv;
            for (std::size_t c = k; c < n; ++c)
                w.at(r, c) = w.at(r, c) - factor * w.at(k, c);
        }
    }
    return true;
}

ScalarMode bundle_mode(const EquivariantBundle& b) {
    return b.beta.empty() ? ScalarMode{0} : b.beta[0].mode();
}

void run_jobs(std::size_t count, std::size_t jobs,
              const std::function<void(std::size_t)>& fn) {
    if (jobs == 0) jobs = std::max<std::size_t>(1, std::thread::hardware_concurrency());
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

const json& field(const json& j, const char* key, const char* doc) {
    auto it = j.find(key);
    if (it == j.end())
        throw std::invalid_argument(std::string(doc) + " document is missing \"" +
                                    key + "\"");
    return *it;
}

std::vector<std::size_t> index_array(const json& j, const char* what) {
    if (!j.is_array())
        throw std::invalid_argument(std::string(what) + " must be an array");
    std::vector<std::size_t> out;
    for (const auto& v : j) {
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
            throw std::invalid_argument(std::string(what) +
                                        " entries must be nonnegative integers");
        out.push_back(v.get<std::size_t>());
    }
    return out;
}

ExactScalar rational_entry(const json& v) {
    if (v.is_number_integer())
        return ExactScalar::from_int(v.get<long>(), ScalarMode{0});
    if (v.is_string()) {
        mpq_class q;
        try {
            q = mpq_class(v.get<std::string>());
        } catch (const std::exception&) {
            throw std::invalid_argument("cannot parse \"" + v.get<std::string>() +
                                        "\" as a rational");
        }
        if (q.get_den() == 0)
            throw std::invalid_argument("zero denominator in \"" +
                                        v.get<std::string>() + "\"");
        q.canonicalize();
        return ExactScalar::from_rational(q);
    }
    throw std::invalid_argument(
        "matrix entries must be integers or \"p/q\" strings");
}

json parse_document(const std::string& text, const char* doc) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string(doc) + " is not valid JSON: " +
                                    e.what());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

FiniteGroup make_group(std::vector<std::vector<std::size_t>> mul) {
    std::size_t n = mul.size();
    if (n == 0) throw std::invalid_argument("group table is empty");
    for (const auto& row : mul) {
        if (row.size() != n)
            throw std::invalid_argument("group table is not square");
        for (std::size_t v : row)
            if (v >= n)
                throw std::invalid_argument("group table entry out of range");
    }
    for (std::size_t g = 0; g < n; ++g)
        if (mul[0][g] != g || mul[g][0] != g)
            throw std::invalid_argument("element 0 is not the identity");
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t c = 0; c < n; ++c)
                if (mul[mul[a][b]][c] != mul[a][mul[b][c]])
                    throw std::invalid_argument(
                        "group table is not associative");
    FiniteGroup g;
    g.order = n;
    g.mul = std::move(mul);
    g.inv.assign(n, n);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b)
            if (g.mul[a][b] == 0 && g.mul[b][a] == 0) {
                g.inv[a] = b;
                break;
            }
        if (g.inv[a] == n)
            throw std::invalid_argument("element " + std::to_string(a) +
                                        " has no inverse");
    }
    return g;
}

LoadedGroup group_from_generators(
    const std::vector<std::vector<std::size_t>>& gens) {
    if (gens.empty())
        throw std::invalid_argument("generator list is empty");
    std::size_t m = gens[0].size();
    for (const auto& p : gens)
        if (!is_bijection(p, m))
            throw std::invalid_argument(
                "generators must be bijections of a common set");

    std::vector<std::size_t> id(m);
    for (std::size_t x = 0; x < m; ++x) id[x] = x;

    std::vector<std::vector<std::size_t>> elems{id};
    std::map<std::vector<std::size_t>, std::size_t> index{{id, 0}};
    for (std::size_t head = 0; head < elems.size(); ++head)
        for (const auto& gen : gens) {
            auto next = compose_perm(gen, elems[head]);
            if (index.emplace(next, elems.size()).second)
                elems.push_back(std::move(next));
        }

    std::size_t n = elems.size();
    std::vector<std::vector<std::size_t>> mul(n, std::vector<std::size_t>(n));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            mul[a][b] = index.at(compose_perm(elems[a], elems[b]));

    LoadedGroup lg;
    lg.group = make_group(std::move(mul));
    lg.perms = std::move(elems);
    return lg;
}

GroupAction make_action(FiniteGroup group,
                        std::vector<std::vector<std::size_t>> perm) {
    if (perm.size() != group.order)
        throw std::invalid_argument("action needs one permutation per element");
    std::size_t m = perm.empty() ? 0 : perm[0].size();
    for (const auto& p : perm)
        if (!is_bijection(p, m))
            throw std::invalid_argument(
                "action permutations must be bijections of a common set");
    for (std::size_t x = 0; x < m; ++x)
        if (perm[0][x] != x)
            throw std::invalid_argument("the identity must act trivially");
    for (std::size_t a = 0; a < group.order; ++a)
        for (std::size_t b = 0; b < group.order; ++b)
            if (perm[group.mul[a][b]] != compose_perm(perm[a], perm[b]))
                throw std::invalid_argument(
                    "permutations do not respect the group law");
    GroupAction act;
    act.group = std::move(group);
    act.set_size = m;
    act.perm = std::move(perm);
    return act;
}

GroupAction natural_action(const LoadedGroup& lg) {
    if (lg.perms.empty())
        throw std::invalid_argument(
            "group has no permutation realization; load it from generators "
            "or give an explicit action");
    return make_action(lg.group, lg.perms);
}

GroupAction regular_action(const FiniteGroup& g) {
    std::vector<std::vector<std::size_t>> perm(g.order);
    for (std::size_t a = 0; a < g.order; ++a) perm[a] = g.mul[a];
    return make_action(g, std::move(perm));
}

kv::KVOneMor linearize(const GroupAction& a, std::size_t g) {
    require_element(a.group, g, "element");
    std::vector<std::vector<std::size_t>> dims(
        a.set_size, std::vector<std::size_t>(a.set_size, 0));
    for (std::size_t x = 0; x < a.set_size; ++x) dims[a.perm[g][x]][x] = 1;
    kv::KVObject obj{a.set_size};
    return kv::make_one_mor(obj, obj, std::move(dims));
}

tr::CommutingPair action_pair(const GroupAction& a, std::size_t g,
                              std::size_t h, lin::ScalarMode mode) {
    require_element(a.group, g, "element");
    require_element(a.group, h, "element");
    require_commuting(a.group, g, h);
    auto pg = linearize(a, g), ph = linearize(a, h);
    return tr::make_commuting_pair(pg, ph,
                                   kv::id2(kv::compose1(pg, ph), mode));
}

lin::ExactScalar char2(const GroupAction& a, std::size_t g, std::size_t h,
                       lin::ScalarMode mode) {
    return tr::secondary_trace_b(action_pair(a, g, h, mode));
}

std::size_t fixed_point_oracle(const GroupAction& a, std::size_t g,
                               std::size_t h) {
    require_element(a.group, g, "element");
    require_element(a.group, h, "element");
    require_commuting(a.group, g, h);
    std::size_t k = 0;
    for (std::size_t x = 0; x < a.set_size; ++x)
        if (a.perm[g][x] == x && a.perm[h][x] == x) ++k;
    return k;
}

Char2Table char2_table(const GroupAction& a, lin::ScalarMode mode,
                       std::size_t jobs) {
    Char2Table t;
    t.group = a.group;
    t.mode = mode;
    for (std::size_t g = 0; g < a.group.order; ++g)
        for (std::size_t h = 0; h < a.group.order; ++h)
            if (a.group.mul[g][h] == a.group.mul[h][g])
                t.entries.push_back({g, h, ExactScalar::zero(mode)});
    run_jobs(t.entries.size(), jobs, [&](std::size_t i) {
        t.entries[i].chi = char2(a, t.entries[i].g, t.entries[i].h, mode);
    });
    return t;
}

SL2ZReport sl2z_check(const Char2Table& t) {
    std::map<std::pair<std::size_t, std::size_t>, ExactScalar> chi;
    for (const auto& e : t.entries) chi.emplace(std::pair{e.g, e.h}, e.chi);

    SL2ZReport rep;
    auto expect = [&](const char* move, const Char2Entry& e, std::size_t g2,
                      std::size_t h2) {
        ++rep.checked;
        auto it = chi.find({g2, h2});
        std::ostringstream msg;
        if (it == chi.end()) {
            msg << move << ": pair (" << g2 << "," << h2
                << ") missing from the table";
            rep.failures.push_back(msg.str());
        } else if (!(it->second == e.chi)) {
            msg << move << ": chi(" << e.g << "," << e.h << ") = "
                << e.chi.str() << " but chi(" << g2 << "," << h2 << ") = "
                << it->second.str();
            rep.failures.push_back(msg.str());
        }
    };
    for (const auto& e : t.entries) {
        expect("S-move", e, t.group.inv[e.h], e.g);
        expect("T-move", e, t.group.mul[e.g][e.h], e.h);
    }
    rep.ok = rep.failures.empty();
    return rep;
}

EquivariantBundle make_bundle(std::vector<std::size_t> fiber_dims,
                              std::vector<std::size_t> f,
                              std::vector<lin::Matrix> beta) {
    std::size_t m = fiber_dims.size();
    if (!is_bijection(f, m))
        throw std::invalid_argument("f must be a bijection of the base");
    if (beta.size() != m)
        throw std::invalid_argument("need one beta block per base point");
    for (std::size_t x = 0; x < m; ++x) {
        if (beta[x].rows() != fiber_dims[x] ||
            beta[x].cols() != fiber_dims[f[x]])
            throw std::invalid_argument(
                "beta at point " + std::to_string(x) +
                " must map the fiber over f(x) to the fiber over x");
        if (!(beta[x].mode() == beta[0].mode()))
            throw std::invalid_argument("beta blocks mix scalar modes");
        if (!invertible(beta[x]))
            throw std::invalid_argument("beta at point " + std::to_string(x) +
                                        " is not invertible");
    }
    EquivariantBundle b;
    b.base_size = m;
    b.fiber_dims = std::move(fiber_dims);
    b.f = std::move(f);
    b.beta = std::move(beta);
    return b;
}

tr::CommutingPair lefschetz_pair(const EquivariantBundle& b) {
    ScalarMode mode = bundle_mode(b);
    std::size_t m = b.base_size;
    kv::KVObject obj{m};

    std::vector<std::vector<std::size_t>> da(m, std::vector<std::size_t>(m, 0));
    std::vector<std::vector<std::size_t>> db(m, std::vector<std::size_t>(m, 0));
    for (std::size_t x = 0; x < m; ++x) {
        da[x][b.f[x]] = 1;
        db[x][x] = b.fiber_dims[x];
    }
    auto phi_a = kv::make_one_mor(obj, obj, std::move(da));
    auto phi_b = kv::make_one_mor(obj, obj, std::move(db));

    // Both composites are supported on cells (x, f(x)); the source carries
    // the fiber over f(x) and the target the fiber over x, so beta_x is
    // exactly the block in between.
    auto src = kv::compose1(phi_a, phi_b);
    auto tgt = kv::compose1(phi_b, phi_a);
    std::vector<std::vector<Matrix>> blocks(m);
    for (std::size_t t = 0; t < m; ++t)
        for (std::size_t s = 0; s < m; ++s) {
            if (s == b.f[t])
                blocks[t].push_back(b.beta[t]);
            else
                blocks[t].push_back(Matrix(tgt.dims[t][s], src.dims[t][s], mode));
        }
    auto alpha = kv::make_two_mor(src, tgt, mode, std::move(blocks));
    return tr::make_commuting_pair(phi_a, phi_b, alpha);
}

LefschetzResult lefschetz(const EquivariantBundle& b) {
    ScalarMode mode = bundle_mode(b);
    LefschetzResult out{ExactScalar::zero(mode), ExactScalar::zero(mode)};
    for (std::size_t x = 0; x < b.base_size; ++x)
        if (b.f[x] == x) out.lhs += lin::mat_trace(b.beta[x]);

    std::vector<std::size_t> off(b.base_size + 1, 0);
    for (std::size_t x = 0; x < b.base_size; ++x)
        off[x + 1] = off[x] + b.fiber_dims[x];
    Matrix big(off[b.base_size], off[b.base_size], mode);
    for (std::size_t x = 0; x < b.base_size; ++x)
        for (std::size_t i = 0; i < b.beta[x].rows(); ++i)
            for (std::size_t j = 0; j < b.beta[x].cols(); ++j)
                big.at(off[x] + i, off[b.f[x]] + j) = b.beta[x].at(i, j);
    out.rhs = lin::mat_trace(big);
    return out;
}

LoadedGroup parse_group(const std::string& text) {
    json j = parse_document(text, "group");
    if (j.contains("generators")) {
        std::vector<std::vector<std::size_t>> gens;
        for (const auto& g : field(j, "generators", "group"))
            gens.push_back(index_array(g, "generator"));
        return group_from_generators(gens);
    }
    if (j.contains("mul")) {
        std::vector<std::vector<std::size_t>> mul;
        for (const auto& row : field(j, "mul", "group"))
            mul.push_back(index_array(row, "mul row"));
        if (j.contains("order") &&
            (!j["order"].is_number_unsigned() ||
             j["order"].get<std::size_t>() != mul.size()))
            throw std::invalid_argument(
                "declared order does not match the mul table");
        return {make_group(std::move(mul)), {}};
    }
    throw std::invalid_argument(
        "group document needs \"generators\" or \"mul\"");
}

GroupAction parse_action(const std::string& text, const LoadedGroup& lg) {
    json j = parse_document(text, "action");
    std::vector<std::vector<std::size_t>> perms;
    for (const auto& p : field(j, "perms", "action"))
        perms.push_back(index_array(p, "perm"));
    return make_action(lg.group, std::move(perms));
}

EquivariantBundle parse_bundle(const std::string& text) {
    json j = parse_document(text, "bundle");
    auto fiber_dims = index_array(field(j, "fiber_dims", "bundle"), "fiber_dims");
    auto f = index_array(field(j, "f", "bundle"), "f");
    std::vector<Matrix> beta;
    const json& blocks = field(j, "beta_blocks", "bundle");
    if (!blocks.is_array())
        throw std::invalid_argument("beta_blocks must be an array");
    for (std::size_t x = 0; x < blocks.size(); ++x) {
        const json& bj = blocks[x];
        std::size_t rows = bj.size();
        std::size_t cols = rows && bj[0].is_array() ? bj[0].size() : 0;
        Matrix m(rows, cols, ScalarMode{0});
        for (std::size_t r = 0; r < rows; ++r) {
            if (!bj[r].is_array() || bj[r].size() != cols)
                throw std::invalid_argument("beta block " + std::to_string(x) +
                                            " is ragged");
            for (std::size_t c = 0; c < cols; ++c)
                m.at(r, c) = rational_entry(bj[r][c]);
        }
        beta.push_back(std::move(m));
    }
    return make_bundle(std::move(fiber_dims), std::move(f), std::move(beta));
}

LoadedGroup load_group_file(const std::string& path) {
    return parse_group(read_file(path));
}

GroupAction load_action_file(const std::string& path, const LoadedGroup& lg) {
    return parse_action(read_file(path), lg);
}

EquivariantBundle load_bundle_file(const std::string& path) {
    return parse_bundle(read_file(path));
}

}  // namespace kvt::apps
