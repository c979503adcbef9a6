#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "dsl/dsl.hpp"
#include "morse/morse.hpp"
#include "trace/trace.hpp"

using namespace kvt;
using namespace kvt::kv;
using lin::ExactScalar;
using lin::Matrix;
using lin::ScalarMode;
namespace dsl = kvt::dsl;

namespace {

const ScalarMode Q{0};

KVOneMor random_mor(std::mt19937_64& rng, KVObject src, KVObject tgt,
                    std::size_t max_dim = 3) {
    std::uniform_int_distribution<std::size_t> d(0, max_dim);
    std::vector<std::vector<std::size_t>> dims(
        tgt.rank, std::vector<std::size_t>(src.rank, 0));
    for (auto& row : dims)
        for (auto& c : row) c = d(rng);
    return make_one_mor(src, tgt, std::move(dims));
}

KVTwoMor random_two_mor(std::mt19937_64& rng, const KVOneMor& src,
                        const KVOneMor& tgt, ScalarMode mode,
                        long max_num = 5) {
    std::uniform_int_distribution<long> e(-max_num, max_num);
    std::uniform_int_distribution<long> ep(0, mode.p ? long(mode.p) - 1 : 0);
    std::vector<std::vector<Matrix>> blocks(src.tgt.rank);
    for (std::size_t i = 0; i < src.tgt.rank; ++i)
        for (std::size_t j = 0; j < src.src.rank; ++j) {
            Matrix m(tgt.dims[i][j], src.dims[i][j], mode);
            for (std::size_t r = 0; r < m.rows(); ++r)
                for (std::size_t c = 0; c < m.cols(); ++c)
                    m.at(r, c) = ExactScalar::from_int(
                        mode.p ? ep(rng) : e(rng), mode);
            blocks[i].push_back(std::move(m));
        }
    return make_two_mor(src, tgt, mode, std::move(blocks));
}

KVOneMor permutation_mor(const std::vector<std::size_t>& perm) {
    std::size_t n = perm.size();
    std::vector<std::vector<std::size_t>> dims(n,
                                               std::vector<std::size_t>(n, 0));
    for (std::size_t x = 0; x < n; ++x) dims[perm[x]][x] = 1;
    return make_one_mor({n}, {n}, std::move(dims));
}

tr::CommutingPair permutation_pair(const std::vector<std::size_t>& g,
                                   const std::vector<std::size_t>& h) {
    auto pg = permutation_mor(g), ph = permutation_mor(h);
    return tr::make_commuting_pair(pg, ph, id2(compose1(pg, ph), Q));
}

struct TestEnv {
    dsl::Environment env;
    KVOneMor Phi, Psi, f, g;
    KVTwoMor theta, eta;
};

TestEnv make_env(std::mt19937_64& rng) {
    KVObject A{2}, B{3};
    TestEnv t;
    t.Phi = random_mor(rng, A, A);
    t.Psi = random_mor(rng, A, A);
    t.f = random_mor(rng, A, B);
    t.g = random_mor(rng, B, A);
    t.theta = random_two_mor(rng, t.Phi, t.Psi, Q);
    t.eta = random_two_mor(rng, t.Phi, t.Phi, Q);
    t.env.mode = Q;
    t.env.objects = {{"A", 2}, {"B", 3}, {"Aop", 2}};
    t.env.one_mors = {{"Phi", t.Phi}, {"Psi", t.Psi}, {"f", t.f}, {"g", t.g}};
    t.env.two_mors = {{"theta", t.theta}, {"eta", t.eta}};
    return t;
}

// One expression per node kind and per operator shape; every entry
// type-checks in the environment above.
std::vector<std::string> corpus() {
    return {
        "Phi",
        "id(A)",
        "id(1)",
        "ev(A)",
        "coev(A)",
        "serre_r(A)",
        "serre_l(B)",
        "radj(f)",
        "ladj(f)",
        "radj(ladj(f))",
        "g . f",
        "Phi . Psi . Phi",
        "f (x) g",
        "(g . f) (x) id(B)",
        "id(A (x) B)",
        "ev(A) . (Phi (x) id(Aop)) . coev(A)",
        "unit_r(f)",
        "unit_l(f)",
        "counit_r(f)",
        "counit_l(f)",
        "unit_r(Phi (x) f)",
        "id2(g . f)",
        "theta",
        "eta ; theta",
        "theta . id2(Phi)",
        "id2(f) (x) theta",
        "cyclic(f, g)",
        "cyclic(f, g) ; cyclic(g, f)",
        "(id2(f) . unit_r(f)) ; (counit_r(f) . id2(f))",
        "(eta ; theta) . id2(Phi)",
    };
}

dsl::Value ev_text(const std::string& text, const dsl::Environment& env) {
    return dsl::evaluate(dsl::parse_expr(text), env);
}

KVOneMor ev1(const std::string& text, const dsl::Environment& env) {
    return std::get<KVOneMor>(ev_text(text, env));
}

KVTwoMor ev2(const std::string& text, const dsl::Environment& env) {
    return std::get<KVTwoMor>(ev_text(text, env));
}

dsl::ParseError parse_error_of(const std::string& text, bool program = false) {
    try {
        if (program)
            dsl::parse_program(text);
        else
            dsl::parse_expr(text);
    } catch (const dsl::ParseError& e) {
        return e;
    }
    throw std::runtime_error("expected a parse error: " + text);
}

dsl::TypeError type_error_of(const std::string& text,
                             const dsl::Environment& env) {
    try {
        dsl::evaluate(dsl::parse_expr(text), env);
    } catch (const dsl::TypeError& e) {
        return e;
    }
    throw std::runtime_error("expected a type error: " + text);
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("parser produces the documented shapes") {
    auto e = dsl::parse_expr("ev(A) . (Phi (x) id(Aop)) . coev(A)");
    REQUIRE(e->kind == dsl::ExprKind::Compose);
    REQUIRE(e->args.size() == 3);
    CHECK(e->args[0]->kind == dsl::ExprKind::Ev);
    CHECK(e->args[0]->obj.factors == std::vector<std::string>{"A"});
    REQUIRE(e->args[1]->kind == dsl::ExprKind::Tensor);
    REQUIRE(e->args[1]->args.size() == 2);
    CHECK(e->args[1]->args[0]->kind == dsl::ExprKind::Gen);
    CHECK(e->args[1]->args[0]->name == "Phi");
    CHECK(e->args[1]->args[1]->kind == dsl::ExprKind::Id1);
    CHECK(e->args[1]->args[1]->obj.factors == std::vector<std::string>{"Aop"});
    CHECK(e->args[2]->kind == dsl::ExprKind::Coev);

    auto u = dsl::parse_expr("unit_r(Phi)");
    REQUIRE(u->kind == dsl::ExprKind::UnitR);
    REQUIRE(u->args.size() == 1);
    CHECK(u->args[0]->kind == dsl::ExprKind::Gen);
    CHECK(u->args[0]->name == "Phi");

    // precedence: ";" is loosest, "(x)" is tightest
    auto p = dsl::parse_expr("a ; b . c (x) d");
    REQUIRE(p->kind == dsl::ExprKind::VComp);
    REQUIRE(p->args.size() == 2);
    CHECK(p->args[0]->kind == dsl::ExprKind::Gen);
    REQUIRE(p->args[1]->kind == dsl::ExprKind::Compose);
    CHECK(p->args[1]->args[0]->name == "b");
    CHECK(p->args[1]->args[1]->kind == dsl::ExprKind::Tensor);

    // unparenthesized chains stay flat, parentheses nest
    auto flat = dsl::parse_expr("a . b . c");
    CHECK(flat->args.size() == 3);
    auto nested = dsl::parse_expr("(a . b) . c");
    REQUIRE(nested->args.size() == 2);
    CHECK(nested->args[0]->kind == dsl::ExprKind::Compose);
    CHECK(nested->args[0]->args.size() == 2);

    // "(x)" is one token; a parenthesized generator x needs spaces
    auto gx = dsl::parse_expr("( x )");
    CHECK(gx->kind == dsl::ExprKind::Gen);
    CHECK(gx->name == "x");
    CHECK(dsl::parse_expr("x (x) y")->kind == dsl::ExprKind::Tensor);

    // source locations point at the first token of each node
    auto lc = dsl::parse_expr("id(A) . foo");
    CHECK(lc->loc.line == 1);
    CHECK(lc->loc.col == 1);
    CHECK(lc->args[1]->loc.col == 9);
}

TEST_CASE("parse errors carry line and column") {
    auto e1 = parse_error_of("ev(A");
    CHECK(e1.loc.line == 1);
    CHECK(e1.loc.col == 5);
    CHECK(contains(e1.what(), "expected ')'"));
    CHECK(contains(e1.what(), "line 1, col 5"));

    auto e2 = parse_error_of("g . . f");
    CHECK(e2.loc.col == 5);
    CHECK(contains(e2.what(), "expected an expression"));

    auto e3 = parse_error_of("a $ b");
    CHECK(e3.loc.col == 3);
    CHECK(contains(e3.what(), "unexpected character"));

    // newlines inside an expression are whitespace; positions still track
    auto e4 = parse_error_of("id(A) .\n. id(A)");
    CHECK(e4.loc.line == 2);
    CHECK(e4.loc.col == 1);

    auto e5 = parse_error_of("obj");
    CHECK(contains(e5.what(), "reserved word"));

    // statement boundaries in program mode
    auto p1 = parse_error_of("obj A 2\nid(A) id(B)\n", true);
    CHECK(p1.loc.line == 2);
    CHECK(p1.loc.col == 7);
    CHECK(contains(p1.what(), "end of statement"));

    auto p2 = parse_error_of("obj A 2\nid(A)\nobj B 3\n", true);
    CHECK(p2.loc.line == 3);
    CHECK(contains(p2.what(), "declarations must precede expressions"));
}

TEST_CASE("printing is canonical and parsing it back is the identity") {
    CHECK(dsl::print_expr(*dsl::parse_expr("g.f")) == "g . f");
    CHECK(dsl::print_expr(*dsl::parse_expr("(a;b).c")) == "(a ; b) . c");
    CHECK(dsl::print_expr(*dsl::parse_expr("a (x) (b . c)")) ==
          "a (x) (b . c)");
    CHECK(dsl::print_expr(*dsl::parse_expr("id(1)")) == "id(1)");
    // printing drops parentheses the precedence rules make redundant
    CHECK(dsl::print_expr(*dsl::parse_expr(
              "ev(A) . (Phi (x) id(Aop)) . coev(A)")) ==
          "ev(A) . Phi (x) id(Aop) . coev(A)");

    for (const auto& text : corpus()) {
        CAPTURE(text);
        auto e = dsl::parse_expr(text);
        std::string printed = dsl::print_expr(*e);
        auto back = dsl::parse_expr(printed);
        CHECK(dsl::ast_equal(*e, *back));
        CHECK(dsl::print_expr(*back) == printed);
    }
}

TEST_CASE("typecheck annotates boundaries") {
    std::mt19937_64 rng(11);
    auto t = make_env(rng);

    auto e = dsl::parse_expr("ev(A)");
    const auto& ti = dsl::typecheck(e, t.env);
    CHECK(ti.layer == 1);
    CHECK(ti.src1.rank == 4);
    CHECK(ti.tgt1.rank == 1);

    auto r = dsl::parse_expr("radj(f)");
    const auto& tr_ = dsl::typecheck(r, t.env);
    CHECK(tr_.src1.rank == 3);
    CHECK(tr_.tgt1.rank == 2);

    auto c = dsl::parse_expr("g . f");
    const auto& tc = dsl::typecheck(c, t.env);
    CHECK(tc.src1.rank == 2);
    CHECK(tc.tgt1.rank == 2);
    REQUIRE(c->args[0]->type != nullptr);
    CHECK(c->args[0]->type->layer == 1);
    CHECK(c->args[0]->type->src1.rank == 3);

    auto u = dsl::parse_expr("unit_r(f)");
    const auto& tu = dsl::typecheck(u, t.env);
    CHECK(tu.layer == 2);
    CHECK(tu.src2 == id1(KVObject{2}));
    CHECK(tu.tgt2 == compose1(transpose_mor(t.f), t.f));

    auto y = dsl::parse_expr("cyclic(f, g)");
    const auto& ty = dsl::typecheck(y, t.env);
    CHECK(ty.layer == 2);
    CHECK(ty.src2.src.rank == 1);
    CHECK(ty.src2.dims[0][0] == tr::trace_of(compose1(t.f, t.g)).dim);
    CHECK(ty.tgt2.dims[0][0] == tr::trace_of(compose1(t.g, t.f)).dim);
}

TEST_CASE("type errors name the offender and both boundaries") {
    std::mt19937_64 rng(12);
    auto t = make_env(rng);

    CHECK(contains(type_error_of("nosuch", t.env).what(),
                   "unknown name 'nosuch'"));
    CHECK(contains(type_error_of("A", t.env).what(), "names an object"));
    CHECK(contains(type_error_of("id(C)", t.env).what(),
                   "unknown object 'C'"));

    auto m = type_error_of("f . f", t.env);
    CHECK(contains(m.what(), "source rank 2"));
    CHECK(contains(m.what(), "target rank 3"));
    CHECK(m.loc.col == 5);

    // the first bad junction is the one reported
    auto m2 = type_error_of("g . f . f", t.env);
    CHECK(m2.loc.col == 9);

    auto v = type_error_of("theta ; theta", t.env);
    CHECK(contains(v.what(), "vertical boundary mismatch"));
    CHECK(contains(v.what(), "ends at"));
    CHECK(contains(v.what(), "starts at"));
    CHECK(contains(v.what(), "dims"));

    CHECK(contains(type_error_of("f (x) theta", t.env).what(), "id2("));
    CHECK(contains(type_error_of("f . theta", t.env).what(),
                   "cannot compose"));
    CHECK(contains(type_error_of("f ; f", t.env).what(),
                   "2-morphism expressions"));
    CHECK(contains(type_error_of("radj(theta)", t.env).what(),
                   "radj applies to a 1-morphism"));
    CHECK(contains(type_error_of("unit_r(theta)", t.env).what(),
                   "unit_r applies to a 1-morphism"));

    auto cy = type_error_of("cyclic(f, f)", t.env);
    CHECK(contains(cy.what(), "opposite boundaries"));
    CHECK(contains(cy.what(), "first factor"));
    CHECK(contains(cy.what(), "second factor"));

    auto moded = t.env;
    moded.mode = ScalarMode{5};
    CHECK(contains(type_error_of("theta", moded).what(), "carries mode"));

    auto dup = t.env;
    dup.two_mors.emplace("Phi", t.theta);
    CHECK_THROWS_AS(ev_text("Phi", dup), std::invalid_argument);
}

TEST_CASE("evaluation matches direct backend constructions") {
    std::mt19937_64 rng(13);
    auto t = make_env(rng);
    KVObject A{2};

    // the trace pipeline evaluates to the closed loop of Phi
    auto loop = ev1("ev(A) . (Phi (x) id(Aop)) . coev(A)", t.env);
    CHECK(loop.src.rank == 1);
    CHECK(loop.tgt.rank == 1);
    CHECK(loop.dims[0][0] == tr::trace_of(t.Phi).dim);

    // zig-zag composites are identities
    CHECK(ev1("(ev(A) (x) id(A)) . (id(A) (x) coev(A))", t.env) == id1(A));
    CHECK(ev1("(id(A) (x) ev(A)) . (coev(A) (x) id(A))", t.env) == id1(A));

    CHECK(ev1("serre_r(A)", t.env) == serre(A).r);
    CHECK(ev1("radj(f)", t.env) == transpose_mor(t.f));
    CHECK(ev1("radj(ladj(f))", t.env) == t.f);
    CHECK(ev1("g . f", t.env) == compose1(t.g, t.f));
    CHECK(ev1("f (x) g", t.env) == tensor(t.f, t.g));

    // adjunction cells
    CHECK(ev2("unit_r(f)", t.env) == right_adjoint(t.f, Q).unit);
    CHECK(ev2("counit_r(f)", t.env) == right_adjoint(t.f, Q).counit);
    CHECK(ev2("unit_l(f)", t.env) == left_adjoint(t.f, Q).unit);
    CHECK(ev2("counit_l(f)", t.env) == left_adjoint(t.f, Q).counit);
    CHECK(ev2("id2(g . f)", t.env) == id2(compose1(t.g, t.f), Q));

    // horizontal composition lands in the flat chain basis
    CHECK(ev2("theta . eta", t.env) == hcompose2(t.theta, t.eta));
    CHECK(ev2("theta . eta . eta", t.env) ==
          hchain({t.eta, t.eta, t.theta}));

    CHECK(ev2("eta ; theta", t.env) == vcompose2(t.theta, t.eta));
    CHECK(ev2("eta (x) theta", t.env) == tensor(t.eta, t.theta));

    // the rotation 2-cell between trace loops, and its involution
    auto cy = ev2("cyclic(f, g)", t.env);
    CHECK(cy.blocks[0][0] == tr::cyclic(t.f, t.g, Q));
    auto tr_fg = make_one_mor(unit_object(), unit_object(),
                              {{tr::trace_of(compose1(t.f, t.g)).dim}});
    CHECK(ev2("cyclic(f, g) ; cyclic(g, f)", t.env) == id2(tr_fg, Q));

    // the whiskered triangle: the two halves live over reassociated
    // composites, so the value is checked against the backend's own
    // nesting (the identity form holds through chain moves, not here)
    auto ra = right_adjoint(t.f, Q);
    CHECK(ev2("(id2(f) . unit_r(f)) ; (counit_r(f) . id2(f))", t.env) ==
          vcompose2(hcompose2(ra.counit, id2(t.f, Q)),
                    hcompose2(id2(t.f, Q), ra.unit)));

    // prime field coefficients
    ScalarMode F5{5};
    auto env5 = t.env;
    env5.mode = F5;
    env5.two_mors.clear();
    CHECK(ev2("unit_r(f)", env5) == right_adjoint(t.f, F5).unit);
    CHECK(ev2("cyclic(f, g)", env5).blocks[0][0] ==
          tr::cyclic(t.f, t.g, F5));
}

TEST_CASE("evaluation is stable under print and reparse") {
    std::mt19937_64 rng(14);
    auto t = make_env(rng);
    for (const auto& text : corpus()) {
        CAPTURE(text);
        auto e = dsl::parse_expr(text);
        auto direct = dsl::evaluate(e, t.env);
        auto again = dsl::evaluate(dsl::parse_expr(dsl::print_expr(*e)), t.env);
        CHECK(direct == again);
    }
}

TEST_CASE("programs apply declarations before expressions") {
    std::mt19937_64 rng(15);
    KVObject A{2};
    auto phi = random_mor(rng, A, A);
    auto th = random_two_mor(rng, phi, phi, Q);
    dsl::Environment env;
    env.one_mors.emplace("Phi", phi);
    env.two_mors.emplace("t", th);

    auto prog = dsl::parse_program(
        "-- preamble\n"
        "obj A 2\n"
        "gen1 Phi : A -> A\n"
        "gen2 t : Phi => Phi\n"
        "unit_r(Phi)\n"
        "ev(A) . coev(A)\n");
    REQUIRE(prog.decls.size() == 3);
    REQUIRE(prog.exprs.size() == 2);
    auto res = dsl::run_program(prog, env);
    CHECK(res.env.objects.at("A") == 2);
    REQUIRE(res.values.size() == 2);
    CHECK(std::get<KVTwoMor>(res.values[0]) == right_adjoint(phi, Q).unit);
    CHECK(std::get<KVOneMor>(res.values[1]).dims[0][0] == 2);

    // a newline inside parentheses continues the statement
    auto cont = dsl::parse_program("obj A 2\ngen1 Phi : A -> A\n(Phi .\n Phi)\n");
    REQUIRE(cont.exprs.size() == 1);
    auto rc = dsl::run_program(cont, env);
    CHECK(std::get<KVOneMor>(rc.values[0]) == compose1(phi, phi));

    auto run_error = [&](const std::string& text,
                         const dsl::Environment& e) -> std::string {
        try {
            dsl::run_program(dsl::parse_program(text), e);
        } catch (const dsl::TypeError& err) {
            return err.what();
        }
        return "";
    };
    CHECK(contains(run_error("obj A 2\ngen1 Foo : A -> A\n", env),
                   "declared but not bound"));
    CHECK(contains(run_error("obj A 2\nobj B 3\ngen1 Phi : A -> B\n", env),
                   "declared as rank 2 -> rank 3"));
    CHECK(contains(run_error("obj A 2\nobj A 3\n", env),
                   "redeclared with rank"));
    CHECK(contains(run_error("obj Phi 2\n", env), "already bound"));
    CHECK(contains(
        run_error("obj A 2\ngen1 Phi : A -> A\ngen2 t : Phi . Phi => Phi\n",
                  env),
        "declared between"));
}

TEST_CASE("transcribed saturated-set values match the handle functor") {
    // DSL spellings of the four-strand atoms; braid is the symmetry that
    // moves the fourth strand to the front so ev can reach the outer pair.
    const std::string ev4 = "(ev(A) . (id(A) (x) ev(A) (x) id(A)))";
    const std::string coev4 = "(coev(A) (x) coev(A))";
    const std::string cap12 = "(ev(A) (x) id(A (x) A))";
    const std::string cap14 =
        "((ev(A) (x) id(A (x) A)) . (id(A) (x) braid))";
    const std::string cup14 = "radj(" + cap14 + ")";
    const std::string cup12 = "radj(" + cap12 + ")";
    auto on1 = [](const std::string& x) {
        return "(" + x + " (x) id(A (x) A (x) A))";
    };
    const std::string fa = on1("phia"), fb = on1("phib");
    const std::string far = on1("radj(phia)"), fbr = on1("radj(phib)");

    // application-order atom lists for each saturated set's realization
    std::map<std::string, std::vector<std::string>> chains = {
        {"empty", {}},
        {"full", {}},
        {"m", {coev4, ev4}},
        {"m_a", {coev4, fa, far, ev4}},
        {"m_b", {coev4, fb, fbr, ev4}},
        {"m_a|m_b", {coev4, fa, far, fb, fbr, ev4}},
        {"cross", {coev4, fa, fb, far, fbr, ev4}},
        {"s_a", {coev4, fa, cap14, cup14, far, ev4}},
        {"M_a", {coev4, fa, cap14, cup14, far, ev4}},
        {"s_b", {coev4, fb, cap12, cup12, fbr, ev4}},
        {"M_b", {coev4, fb, cap12, cup12, fbr, ev4}},
        {"s_a|m_b", {coev4, fa, cap14, cup14, far, fb, fbr, ev4}},
        {"m_a|s_b", {coev4, fa, far, fb, cap12, cup12, fbr, ev4}},
        {"s_a|cross", {coev4, fa, cap14, cup14, fb, far, fbr, ev4}},
        {"cross|s_b", {coev4, fa, fb, far, cap12, cup12, fbr, ev4}},
        {"s_a|s_b",
         {coev4, fa, cap14, cup14, far, fb, cap12, cup12, fbr, ev4}},
        {"s_a|cross|s_b",
         {coev4, fa, cap14, cup14, fb, far, cap12, cup12, fbr, ev4}},
        {"M_a|s_b", {coev4, fa, cap14, cup14, far, cap12, cup12, ev4}},
        {"s_a|M_b", {coev4, cap14, cup14, fb, cap12, cup12, fbr, ev4}},
        {"M_a|M_b", {coev4, cap14, cup14, cap12, cup12, ev4}},
    };
    auto chain_text = [](const std::vector<std::string>& atoms) {
        if (atoms.empty()) return std::string("id(1)");
        std::string s;
        for (std::size_t i = atoms.size(); i-- > 0;) {
            if (!s.empty()) s += " . ";
            s += atoms[i];
        }
        return s;
    };

    std::mt19937_64 rng(16);
    auto self = random_mor(rng, {2}, {2});
    std::vector<tr::CommutingPair> pairs = {
        permutation_pair({1, 2, 0}, {2, 0, 1}),
        tr::make_commuting_pair(self, self,
                                id2(compose1(self, self), Q)),
        permutation_pair({0, 1}, {0, 1}),
    };
    for (const auto& pair : pairs) {
        std::size_t n = pair.phi_a.src.rank;
        dsl::Environment env;
        env.objects.emplace("A", n);
        env.one_mors.emplace("phia", pair.phi_a);
        env.one_mors.emplace("phib", pair.phi_b);
        env.one_mors.emplace("braid", sigma1(KVObject{n * n}, KVObject{n}));
        for (morse::Node nd : morse::all_nodes()) {
            CAPTURE(morse::node_name(nd));
            auto v = ev1(chain_text(chains.at(morse::node_name(nd))), env);
            CHECK(v.src.rank == 1);
            CHECK(v.tgt.rank == 1);
            auto ts =
                morse::T_object(morse::SaturatedSet{morse::node_mask(nd)}, pair);
            CHECK(v.dims[0][0] == ts.dim);
        }
    }

    // for the identity pair the closed membrane is the rank of the object
    dsl::Environment idenv;
    idenv.objects.emplace("A", 2);
    idenv.one_mors.emplace("phia", id1(KVObject{2}));
    idenv.one_mors.emplace("phib", id1(KVObject{2}));
    idenv.one_mors.emplace("braid", sigma1(KVObject{4}, KVObject{2}));
    CHECK(ev1(chain_text(chains.at("m")), idenv).dims[0][0] == 2);
}
