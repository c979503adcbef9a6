#include "dsl/dsl.hpp"

#include <cctype>
#include <sstream>
#include <utility>

#include "trace/trace.hpp"

namespace kvt::dsl {
namespace {

std::string located(const std::string& what, SourceLoc l) {
    std::ostringstream os;
    os << "line " << l.line << ", col " << l.col << ": " << what;
    return os.str();
}

// ---- lexer ----

enum class Tok {
    Name, Nat, Dot, Semi, Tensor, LParen, RParen, Comma, Colon,
    Arrow, DArrow, Newline, End,
};

struct Token {
    Tok kind{};
    std::string text;    // Name
    std::size_t nat = 0;  // Nat
    SourceLoc loc;
};

std::string tok_desc(const Token& t) {
    switch (t.kind) {
        case Tok::Name: return "'" + t.text + "'";
        case Tok::Nat: return "'" + std::to_string(t.nat) + "'";
        case Tok::Dot: return "'.'";
        case Tok::Semi: return "';'";
        case Tok::Tensor: return "'(x)'";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::Comma: return "','";
        case Tok::Colon: return "':'";
        case Tok::Arrow: return "'->'";
        case Tok::DArrow: return "'=>'";
        case Tok::Newline: return "end of statement";
        case Tok::End: return "end of input";
    }
    return "?";
}

bool name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool name_char(char c) { return name_start(c) || std::isdigit(static_cast<unsigned char>(c)); }

std::vector<Token> lex(const std::string& text) {
    std::vector<Token> out;
    std::size_t i = 0, n = text.size(), line = 1, col = 1;
    if (n >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) i = 3;
    auto push = [&](Tok k, std::size_t len) {
        out.push_back({k, "", 0, {line, col}});
        i += len;
        col += len;
    };
    while (i < n) {
        char c = text[i];
        if (c == '\n') {
            out.push_back({Tok::Newline, "", 0, {line, col}});
            ++i;
            ++line;
            col = 1;
        } else if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
            ++col;
        } else if (c == '-' && i + 1 < n && text[i + 1] == '-') {
            while (i < n && text[i] != '\n') {
                ++i;
                ++col;
            }
        } else if (c == '-' && i + 1 < n && text[i + 1] == '>') {
            push(Tok::Arrow, 2);
        } else if (c == '=' && i + 1 < n && text[i + 1] == '>') {
            push(Tok::DArrow, 2);
        } else if (c == '(') {
            if (i + 2 < n && text[i + 1] == 'x' && text[i + 2] == ')')
                push(Tok::Tensor, 3);
            else
                push(Tok::LParen, 1);
        } else if (c == ')') {
            push(Tok::RParen, 1);
        } else if (c == '.') {
            push(Tok::Dot, 1);
        } else if (c == ';') {
            push(Tok::Semi, 1);
        } else if (c == ',') {
            push(Tok::Comma, 1);
        } else if (c == ':') {
            push(Tok::Colon, 1);
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            SourceLoc l{line, col};
            std::size_t j = i;
            while (j < n && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            if (j < n && name_start(text[j]))
                throw ParseError("a name may not start with a digit", l);
            std::string digits = text.substr(i, j - i);
            if (digits.size() > 9)
                throw ParseError("number is out of range", l);
            Token t{Tok::Nat, "", std::stoull(digits), l};
            out.push_back(t);
            col += j - i;
            i = j;
        } else if (name_start(c)) {
            SourceLoc l{line, col};
            std::size_t j = i;
            while (j < n && name_char(text[j])) ++j;
            out.push_back({Tok::Name, text.substr(i, j - i), 0, l});
            col += j - i;
            i = j;
        } else {
            throw ParseError(std::string("unexpected character '") + c + "'",
                             {line, col});
        }
    }
    out.push_back({Tok::End, "", 0, {line, col}});
    return out;
}

// Expression mode treats newlines as whitespace; program mode keeps them as
// statement separators except inside an open parenthesis.
std::vector<Token> strip_newlines(std::vector<Token> toks, bool all) {
    std::vector<Token> out;
    long depth = 0;
    for (auto& t : toks) {
        if (t.kind == Tok::LParen) ++depth;
        if (t.kind == Tok::RParen && depth > 0) --depth;
        if (t.kind == Tok::Newline && (all || depth > 0)) continue;
        out.push_back(std::move(t));
    }
    return out;
}

bool reserved(const std::string& w) {
    static const char* const words[] = {
        "id",     "ev",     "coev",      "serre_r",   "serre_l", "radj",
        "ladj",   "id2",    "unit_r",    "unit_l",    "counit_r", "counit_l",
        "cyclic", "obj",    "gen1",      "gen2",
    };
    for (const char* k : words)
        if (w == k) return true;
    return false;
}

// ---- parser ----

struct Parser {
    const std::vector<Token>& toks;
    std::size_t pos = 0;

    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = pos + ahead;
        return i < toks.size() ? toks[i] : toks.back();
    }
    Token eat() { return toks[pos < toks.size() - 1 ? pos++ : pos]; }
    bool at(Tok k) const { return peek().kind == k; }
    Token expect(Tok k, const char* what) {
        if (!at(k))
            throw ParseError(std::string("expected ") + what + ", found " +
                                 tok_desc(peek()),
                             peek().loc);
        return eat();
    }

    ExprPtr node(ExprKind k, SourceLoc l) {
        auto e = std::make_shared<Expr>();
        e->kind = k;
        e->loc = l;
        return e;
    }

    ObjRef obj_ref() {
        ObjRef o;
        o.loc = peek().loc;
        for (;;) {
            if (at(Tok::Nat)) {
                Token t = eat();
                if (t.nat != 1)
                    throw ParseError("only 1, the unit object, may appear as "
                                     "a number in an object reference",
                                     t.loc);
            } else if (at(Tok::Name)) {
                Token t = eat();
                if (reserved(t.text))
                    throw ParseError("reserved word " + tok_desc(t) +
                                         " cannot name an object",
                                     t.loc);
                o.factors.push_back(t.text);
            } else {
                throw ParseError("expected an object name, found " +
                                     tok_desc(peek()),
                                 peek().loc);
            }
            if (!at(Tok::Tensor)) break;
            eat();
        }
        return o;
    }

    ExprPtr atom() {
        const Token& t = peek();
        if (t.kind == Tok::LParen) {
            eat();
            auto e = expr();
            expect(Tok::RParen, "')'");
            return e;
        }
        if (t.kind != Tok::Name)
            throw ParseError("expected an expression, found " + tok_desc(t),
                             t.loc);
        const std::string& w = t.text;
        auto obj_call = [&](ExprKind k) {
            auto e = node(k, eat().loc);
            expect(Tok::LParen, "'('");
            e->obj = obj_ref();
            expect(Tok::RParen, "')'");
            return e;
        };
        auto expr_call = [&](ExprKind k) {
            auto e = node(k, eat().loc);
            expect(Tok::LParen, "'('");
            e->args.push_back(expr());
            expect(Tok::RParen, "')'");
            return e;
        };
        if (w == "id") return obj_call(ExprKind::Id1);
        if (w == "ev") return obj_call(ExprKind::Ev);
        if (w == "coev") return obj_call(ExprKind::Coev);
        if (w == "serre_r") return obj_call(ExprKind::SerreR);
        if (w == "serre_l") return obj_call(ExprKind::SerreL);
        if (w == "radj") return expr_call(ExprKind::RAdj);
        if (w == "ladj") return expr_call(ExprKind::LAdj);
        if (w == "id2") return expr_call(ExprKind::Id2);
        if (w == "unit_r") return expr_call(ExprKind::UnitR);
        if (w == "unit_l") return expr_call(ExprKind::UnitL);
        if (w == "counit_r") return expr_call(ExprKind::CounitR);
        if (w == "counit_l") return expr_call(ExprKind::CounitL);
        if (w == "cyclic") {
            auto e = node(ExprKind::Cyclic, eat().loc);
            expect(Tok::LParen, "'('");
            e->args.push_back(expr());
            expect(Tok::Comma, "','");
            e->args.push_back(expr());
            expect(Tok::RParen, "')'");
            return e;
        }
        if (reserved(w))
            throw ParseError("reserved word " + tok_desc(t) +
                                 " cannot be used here",
                             t.loc);
        auto e = node(ExprKind::Gen, t.loc);
        e->name = w;
        eat();
        return e;
    }

    ExprPtr chain(ExprKind kind, Tok sep, ExprPtr (Parser::*sub)()) {
        auto first = (this->*sub)();
        if (!at(sep)) return first;
        auto e = node(kind, first->loc);
        e->args.push_back(std::move(first));
        while (at(sep)) {
            eat();
            e->args.push_back((this->*sub)());
        }
        return e;
    }

    ExprPtr texpr() { return chain(ExprKind::Tensor, Tok::Tensor, &Parser::atom); }
    ExprPtr cexpr() { return chain(ExprKind::Compose, Tok::Dot, &Parser::texpr); }
    ExprPtr expr() { return chain(ExprKind::VComp, Tok::Semi, &Parser::cexpr); }

    Declaration declaration() {
        Declaration d;
        Token kw = eat();
        d.loc = kw.loc;
        Token name = expect(Tok::Name, "a name");
        if (reserved(name.text))
            throw ParseError("reserved word " + tok_desc(name) +
                                 " cannot be declared",
                             name.loc);
        d.name = name.text;
        if (kw.text == "obj") {
            d.kind = Declaration::Kind::Object;
            d.rank = expect(Tok::Nat, "a rank").nat;
        } else if (kw.text == "gen1") {
            d.kind = Declaration::Kind::Gen1;
            expect(Tok::Colon, "':'");
            d.src_obj = obj_ref();
            expect(Tok::Arrow, "'->'");
            d.tgt_obj = obj_ref();
        } else {
            d.kind = Declaration::Kind::Gen2;
            expect(Tok::Colon, "':'");
            d.src_expr = expr();
            expect(Tok::DArrow, "'=>'");
            d.tgt_expr = expr();
        }
        return d;
    }
};

// ---- boundary resolution and evaluation ----

std::string mor_str(const kv::KVOneMor& f) {
    std::ostringstream os;
    os << "rank " << f.src.rank << " -> rank " << f.tgt.rank << " with dims [";
    for (std::size_t i = 0; i < f.dims.size(); ++i) {
        os << (i ? "," : "") << "[";
        for (std::size_t j = 0; j < f.dims[i].size(); ++j)
            os << (j ? "," : "") << f.dims[i][j];
        os << "]";
    }
    os << "]";
    return os.str();
}

const char* kind_word(ExprKind k) {
    switch (k) {
        case ExprKind::RAdj: return "radj";
        case ExprKind::LAdj: return "ladj";
        case ExprKind::Id2: return "id2";
        case ExprKind::UnitR: return "unit_r";
        case ExprKind::UnitL: return "unit_l";
        case ExprKind::CounitR: return "counit_r";
        case ExprKind::CounitL: return "counit_l";
        default: return "?";
    }
}

kv::KVObject resolve_obj(const Environment& env, const ObjRef& o) {
    kv::KVObject acc = kv::unit_object();
    for (const auto& f : o.factors) {
        auto it = env.objects.find(f);
        if (it == env.objects.end())
            throw TypeError("unknown object '" + f + "'", o.loc);
        acc = kv::tensor(acc, kv::KVObject{it->second});
    }
    return acc;
}

// Trace spaces as 1-morphisms of the unit object.
kv::KVOneMor trace_loop(const kv::KVOneMor& h) {
    return kv::make_one_mor(kv::unit_object(), kv::unit_object(),
                            {{tr::trace_of(h).dim}});
}

struct Eval {
    const Environment& env;

    // Re-annotates unconditionally: the same AST may be checked against
    // several environments, and annotations must reflect the current one.
    const TypeInfo& check(const ExprPtr& e) {
        annotate(*e);
        return *e->type;
    }

    void require1(const Expr& parent, const Expr& child) {
        if (child.type->layer != 1)
            throw TypeError(std::string(kind_word(parent.kind)) +
                                " applies to a 1-morphism expression",
                            child.loc);
    }

    void annotate(Expr& e) {
        auto info = std::make_shared<TypeInfo>();
        switch (e.kind) {
            case ExprKind::Gen: {
                auto o1 = env.one_mors.find(e.name);
                auto o2 = env.two_mors.find(e.name);
                if (o1 != env.one_mors.end() && o2 != env.two_mors.end())
                    throw TypeError("name '" + e.name +
                                        "' is bound as both a 1- and a "
                                        "2-morphism",
                                    e.loc);
                if (o1 != env.one_mors.end()) {
                    info->layer = 1;
                    info->src1 = o1->second.src;
                    info->tgt1 = o1->second.tgt;
                } else if (o2 != env.two_mors.end()) {
                    if (!(o2->second.mode == env.mode))
                        throw TypeError(
                            "generator '" + e.name + "' carries mode " +
                                lin::to_string(o2->second.mode) +
                                " but the environment mode is " +
                                lin::to_string(env.mode),
                            e.loc);
                    info->layer = 2;
                    info->src2 = o2->second.src;
                    info->tgt2 = o2->second.tgt;
                } else if (env.objects.count(e.name)) {
                    throw TypeError("'" + e.name +
                                        "' names an object, not a morphism",
                                    e.loc);
                } else {
                    throw TypeError("unknown name '" + e.name + "'", e.loc);
                }
                break;
            }
            case ExprKind::Id1: {
                info->layer = 1;
                info->src1 = info->tgt1 = resolve_obj(env, e.obj);
                break;
            }
            case ExprKind::Ev:
            case ExprKind::Coev: {
                auto d = kv::duality_data(resolve_obj(env, e.obj));
                const kv::KVOneMor& m = e.kind == ExprKind::Ev ? d.ev : d.coev;
                info->layer = 1;
                info->src1 = m.src;
                info->tgt1 = m.tgt;
                break;
            }
            case ExprKind::SerreR:
            case ExprKind::SerreL: {
                info->layer = 1;
                info->src1 = info->tgt1 = resolve_obj(env, e.obj);
                break;
            }
            case ExprKind::RAdj:
            case ExprKind::LAdj: {
                const TypeInfo& c = check(e.args[0]);
                require1(e, *e.args[0]);
                info->layer = 1;
                info->src1 = c.tgt1;
                info->tgt1 = c.src1;
                break;
            }
            case ExprKind::Id2: {
                check(e.args[0]);
                require1(e, *e.args[0]);
                info->layer = 2;
                info->src2 = info->tgt2 = eval1(*e.args[0]);
                break;
            }
            case ExprKind::UnitR:
            case ExprKind::UnitL:
            case ExprKind::CounitR:
            case ExprKind::CounitL: {
                check(e.args[0]);
                require1(e, *e.args[0]);
                kv::KVOneMor f = eval1(*e.args[0]);
                kv::KVOneMor fd = kv::transpose_mor(f);
                info->layer = 2;
                switch (e.kind) {
                    case ExprKind::UnitR:
                        info->src2 = kv::id1(f.src);
                        info->tgt2 = kv::compose1(fd, f);
                        break;
                    case ExprKind::CounitR:
                        info->src2 = kv::compose1(f, fd);
                        info->tgt2 = kv::id1(f.tgt);
                        break;
                    case ExprKind::UnitL:
                        info->src2 = kv::id1(f.tgt);
                        info->tgt2 = kv::compose1(f, fd);
                        break;
                    default:
                        info->src2 = kv::compose1(fd, f);
                        info->tgt2 = kv::id1(f.src);
                        break;
                }
                break;
            }
            case ExprKind::Cyclic: {
                check(e.args[0]);
                check(e.args[1]);
                for (const auto& a : e.args)
                    if (a->type->layer != 1)
                        throw TypeError("cyclic applies to a pair of "
                                        "1-morphism expressions",
                                        a->loc);
                kv::KVOneMor f = eval1(*e.args[0]);
                kv::KVOneMor g = eval1(*e.args[1]);
                if (!(f.src == g.tgt) || !(f.tgt == g.src))
                    throw TypeError(
                        "cyclic needs opposite boundaries: first factor is " +
                            mor_str(f) + ", second factor is " + mor_str(g),
                        e.loc);
                info->layer = 2;
                info->src2 = trace_loop(kv::compose1(f, g));
                info->tgt2 = trace_loop(kv::compose1(g, f));
                break;
            }
            case ExprKind::Compose: {
                int layer = common_layer(e, "compose");
                info->layer = layer;
                if (layer == 1) {
                    for (std::size_t i = 0; i + 1 < e.args.size(); ++i) {
                        const TypeInfo& l = *e.args[i]->type;
                        const TypeInfo& r = *e.args[i + 1]->type;
                        if (!(l.src1 == r.tgt1))
                            throw TypeError(
                                "composition boundary mismatch: left factor "
                                "has source rank " +
                                    std::to_string(l.src1.rank) +
                                    ", right factor has target rank " +
                                    std::to_string(r.tgt1.rank),
                                e.args[i + 1]->loc);
                    }
                    info->src1 = e.args.back()->type->src1;
                    info->tgt1 = e.args.front()->type->tgt1;
                } else {
                    for (std::size_t i = 0; i + 1 < e.args.size(); ++i) {
                        const TypeInfo& l = *e.args[i]->type;
                        const TypeInfo& r = *e.args[i + 1]->type;
                        if (!(l.src2.src == r.src2.tgt))
                            throw TypeError(
                                "horizontal composition mismatch: left factor "
                                "sits over rank " +
                                    std::to_string(l.src2.src.rank) +
                                    ", right factor over rank " +
                                    std::to_string(r.src2.tgt.rank),
                                e.args[i + 1]->loc);
                    }
                    info->src2 = e.args.back()->type->src2;
                    info->tgt2 = e.args.back()->type->tgt2;
                    for (std::size_t i = e.args.size() - 1; i-- > 0;) {
                        info->src2 = kv::compose1(e.args[i]->type->src2, info->src2);
                        info->tgt2 = kv::compose1(e.args[i]->type->tgt2, info->tgt2);
                    }
                }
                break;
            }
            case ExprKind::Tensor: {
                int layer = common_layer(e, "tensor");
                info->layer = layer;
                if (layer == 1) {
                    info->src1 = e.args.front()->type->src1;
                    info->tgt1 = e.args.front()->type->tgt1;
                    for (std::size_t i = 1; i < e.args.size(); ++i) {
                        info->src1 = kv::tensor(info->src1, e.args[i]->type->src1);
                        info->tgt1 = kv::tensor(info->tgt1, e.args[i]->type->tgt1);
                    }
                } else {
                    info->src2 = e.args.front()->type->src2;
                    info->tgt2 = e.args.front()->type->tgt2;
                    for (std::size_t i = 1; i < e.args.size(); ++i) {
                        info->src2 = kv::tensor(info->src2, e.args[i]->type->src2);
                        info->tgt2 = kv::tensor(info->tgt2, e.args[i]->type->tgt2);
                    }
                }
                break;
            }
            case ExprKind::VComp: {
                for (const auto& a : e.args) {
                    check(a);
                    if (a->type->layer != 2)
                        throw TypeError("';' composes 2-morphism expressions "
                                        "vertically",
                                        a->loc);
                }
                for (std::size_t i = 0; i + 1 < e.args.size(); ++i) {
                    const TypeInfo& l = *e.args[i]->type;
                    const TypeInfo& r = *e.args[i + 1]->type;
                    if (!(l.tgt2 == r.src2))
                        throw TypeError(
                            "vertical boundary mismatch: step " +
                                std::to_string(i + 1) + " ends at " +
                                mor_str(l.tgt2) + " but step " +
                                std::to_string(i + 2) + " starts at " +
                                mor_str(r.src2),
                            e.args[i + 1]->loc);
                }
                info->layer = 2;
                info->src2 = e.args.front()->type->src2;
                info->tgt2 = e.args.back()->type->tgt2;
                break;
            }
        }
        e.type = std::move(info);
    }

    // Checks every argument of a chain node and requires one common layer;
    // flags the first argument that disagrees with the first one.
    int common_layer(Expr& e, const char* what) {
        int layer = 0;
        for (const auto& a : e.args) {
            check(a);
            if (layer == 0) {
                layer = a->type->layer;
            } else if (a->type->layer != layer) {
                std::string msg = std::string("cannot ") + what +
                                  " a 1-morphism expression with a "
                                  "2-morphism expression";
                if (e.kind == ExprKind::Tensor)
                    msg += "; wrap the 1-morphism in id2(...)";
                throw TypeError(msg, a->loc);
            }
        }
        return layer;
    }

    kv::KVOneMor eval1(const Expr& e) {
        switch (e.kind) {
            case ExprKind::Gen:
                return env.one_mors.at(e.name);
            case ExprKind::Id1:
                return kv::id1(e.type->src1);
            case ExprKind::Ev:
                return kv::duality_data(resolve_obj(env, e.obj)).ev;
            case ExprKind::Coev:
                return kv::duality_data(resolve_obj(env, e.obj)).coev;
            case ExprKind::SerreR:
                return kv::serre(resolve_obj(env, e.obj)).r;
            case ExprKind::SerreL:
                return kv::serre(resolve_obj(env, e.obj)).ell;
            case ExprKind::RAdj:
            case ExprKind::LAdj:
                return kv::transpose_mor(eval1(*e.args[0]));
            case ExprKind::Compose: {
                kv::KVOneMor acc = eval1(*e.args.back());
                for (std::size_t i = e.args.size() - 1; i-- > 0;)
                    acc = kv::compose1(eval1(*e.args[i]), acc);
                return acc;
            }
            case ExprKind::Tensor: {
                kv::KVOneMor acc = eval1(*e.args.front());
                for (std::size_t i = 1; i < e.args.size(); ++i)
                    acc = kv::tensor(acc, eval1(*e.args[i]));
                return acc;
            }
            default:
                throw std::logic_error("eval1 on a 2-level node");
        }
    }

    kv::KVTwoMor eval2(const Expr& e) {
        switch (e.kind) {
            case ExprKind::Gen:
                return env.two_mors.at(e.name);
            case ExprKind::Id2:
                return kv::id2(eval1(*e.args[0]), env.mode);
            case ExprKind::UnitR:
                return kv::right_adjoint(eval1(*e.args[0]), env.mode).unit;
            case ExprKind::CounitR:
                return kv::right_adjoint(eval1(*e.args[0]), env.mode).counit;
            case ExprKind::UnitL:
                return kv::left_adjoint(eval1(*e.args[0]), env.mode).unit;
            case ExprKind::CounitL:
                return kv::left_adjoint(eval1(*e.args[0]), env.mode).counit;
            case ExprKind::Cyclic: {
                kv::KVOneMor f = eval1(*e.args[0]);
                kv::KVOneMor g = eval1(*e.args[1]);
                return kv::make_two_mor(e.type->src2, e.type->tgt2, env.mode,
                                        {{tr::cyclic(f, g, env.mode)}});
            }
            case ExprKind::Compose: {
                std::vector<kv::KVTwoMor> thetas;
                thetas.reserve(e.args.size());
                for (std::size_t i = e.args.size(); i-- > 0;)
                    thetas.push_back(eval2(*e.args[i]));
                return kv::hchain(thetas);
            }
            case ExprKind::Tensor: {
                kv::KVTwoMor acc = eval2(*e.args.front());
                for (std::size_t i = 1; i < e.args.size(); ++i)
                    acc = kv::tensor(acc, eval2(*e.args[i]));
                return acc;
            }
            case ExprKind::VComp: {
                kv::KVTwoMor acc = eval2(*e.args.front());
                for (std::size_t i = 1; i < e.args.size(); ++i)
                    acc = kv::vcompose2(eval2(*e.args[i]), acc);
                return acc;
            }
            default:
                throw std::logic_error("eval2 on a 1-level node");
        }
    }
};

void require_unique_names(const Environment& env) {
    for (const auto& [k, v] : env.one_mors)
        if (env.objects.count(k) || env.two_mors.count(k))
            throw std::invalid_argument("environment name '" + k +
                                        "' is bound more than once");
    for (const auto& [k, v] : env.two_mors)
        if (env.objects.count(k))
            throw std::invalid_argument("environment name '" + k +
                                        "' is bound more than once");
}

}  // namespace

ParseError::ParseError(const std::string& what, SourceLoc l)
    : std::runtime_error(located(what, l)), loc(l) {}

TypeError::TypeError(const std::string& what, SourceLoc l)
    : std::runtime_error(located(what, l)), loc(l) {}

bool ast_equal(const Expr& a, const Expr& b) {
    if (a.kind != b.kind || a.name != b.name ||
        a.obj.factors != b.obj.factors || a.args.size() != b.args.size())
        return false;
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!ast_equal(*a.args[i], *b.args[i])) return false;
    return true;
}

ExprPtr parse_expr(const std::string& text) {
    auto toks = strip_newlines(lex(text), true);
    Parser p{toks};
    auto e = p.expr();
    p.expect(Tok::End, "end of input");
    return e;
}

namespace {

int prec(ExprKind k) {
    switch (k) {
        case ExprKind::VComp: return 0;
        case ExprKind::Compose: return 1;
        case ExprKind::Tensor: return 2;
        default: return 3;
    }
}

std::string obj_str(const ObjRef& o) {
    if (o.factors.empty()) return "1";
    std::string s = o.factors[0];
    for (std::size_t i = 1; i < o.factors.size(); ++i)
        s += " (x) " + o.factors[i];
    return s;
}

void print_into(const Expr& e, std::ostream& os) {
    auto call = [&](const char* head) {
        os << head << "(";
        print_into(*e.args[0], os);
        os << ")";
    };
    switch (e.kind) {
        case ExprKind::Gen: os << e.name; break;
        case ExprKind::Id1: os << "id(" << obj_str(e.obj) << ")"; break;
        case ExprKind::Ev: os << "ev(" << obj_str(e.obj) << ")"; break;
        case ExprKind::Coev: os << "coev(" << obj_str(e.obj) << ")"; break;
        case ExprKind::SerreR: os << "serre_r(" << obj_str(e.obj) << ")"; break;
        case ExprKind::SerreL: os << "serre_l(" << obj_str(e.obj) << ")"; break;
        case ExprKind::RAdj: call("radj"); break;
        case ExprKind::LAdj: call("ladj"); break;
        case ExprKind::Id2: call("id2"); break;
        case ExprKind::UnitR: call("unit_r"); break;
        case ExprKind::UnitL: call("unit_l"); break;
        case ExprKind::CounitR: call("counit_r"); break;
        case ExprKind::CounitL: call("counit_l"); break;
        case ExprKind::Cyclic:
            os << "cyclic(";
            print_into(*e.args[0], os);
            os << ", ";
            print_into(*e.args[1], os);
            os << ")";
            break;
        case ExprKind::Compose:
        case ExprKind::Tensor:
        case ExprKind::VComp: {
            const char* sep = e.kind == ExprKind::Compose  ? " . "
                              : e.kind == ExprKind::Tensor ? " (x) "
                                                           : " ; ";
            for (std::size_t i = 0; i < e.args.size(); ++i) {
                if (i) os << sep;
                bool parens = prec(e.args[i]->kind) <= prec(e.kind);
                if (parens) os << "(";
                print_into(*e.args[i], os);
                if (parens) os << ")";
            }
            break;
        }
    }
}

}  // namespace

std::string print_expr(const Expr& e) {
    std::ostringstream os;
    print_into(e, os);
    return os.str();
}

const TypeInfo& typecheck(const ExprPtr& e, const Environment& env) {
    require_unique_names(env);
    Eval ev{env};
    return ev.check(e);
}

Value evaluate(const ExprPtr& e, const Environment& env) {
    require_unique_names(env);
    Eval ev{env};
    const TypeInfo& info = ev.check(e);
    if (info.layer == 1) return ev.eval1(*e);
    return ev.eval2(*e);
}

Program parse_program(const std::string& text) {
    auto toks = strip_newlines(lex(text), false);
    Parser p{toks};
    Program prog;
    bool seen_expr = false;
    for (;;) {
        while (p.at(Tok::Newline)) p.eat();
        if (p.at(Tok::End)) break;
        const Token& t = p.peek();
        if (t.kind == Tok::Name &&
            (t.text == "obj" || t.text == "gen1" || t.text == "gen2")) {
            if (seen_expr)
                throw ParseError("declarations must precede expressions",
                                 t.loc);
            prog.decls.push_back(p.declaration());
        } else {
            prog.exprs.push_back(p.expr());
            seen_expr = true;
        }
        if (!p.at(Tok::End)) p.expect(Tok::Newline, "end of statement");
    }
    return prog;
}

ProgramResult run_program(const Program& p, const Environment& env0) {
    Environment env = env0;
    require_unique_names(env);
    for (const auto& d : p.decls) {
        switch (d.kind) {
            case Declaration::Kind::Object: {
                if (env.one_mors.count(d.name) || env.two_mors.count(d.name))
                    throw TypeError("'" + d.name +
                                        "' is already bound as a morphism",
                                    d.loc);
                auto [it, fresh] = env.objects.emplace(d.name, d.rank);
                if (!fresh && it->second != d.rank)
                    throw TypeError(
                        "object '" + d.name + "' redeclared with rank " +
                            std::to_string(d.rank) + "; it has rank " +
                            std::to_string(it->second),
                        d.loc);
                break;
            }
            case Declaration::Kind::Gen1: {
                auto it = env.one_mors.find(d.name);
                if (it == env.one_mors.end())
                    throw TypeError("generator '" + d.name +
                                        "' is declared but not bound in the "
                                        "environment",
                                    d.loc);
                kv::KVObject s = resolve_obj(env, d.src_obj);
                kv::KVObject t = resolve_obj(env, d.tgt_obj);
                if (!(it->second.src == s) || !(it->second.tgt == t))
                    throw TypeError(
                        "generator '" + d.name + "' is declared as rank " +
                            std::to_string(s.rank) + " -> rank " +
                            std::to_string(t.rank) + " but bound as " +
                            mor_str(it->second),
                        d.loc);
                break;
            }
            case Declaration::Kind::Gen2: {
                auto it = env.two_mors.find(d.name);
                if (it == env.two_mors.end())
                    throw TypeError("generator '" + d.name +
                                        "' is declared but not bound in the "
                                        "environment",
                                    d.loc);
                Eval ev{env};
                for (const auto& side : {d.src_expr, d.tgt_expr}) {
                    ev.check(side);
                    if (side->type->layer != 1)
                        throw TypeError("gen2 boundaries must be 1-morphism "
                                        "expressions",
                                        side->loc);
                }
                kv::KVOneMor s = ev.eval1(*d.src_expr);
                kv::KVOneMor t = ev.eval1(*d.tgt_expr);
                if (!(it->second.src == s) || !(it->second.tgt == t))
                    throw TypeError(
                        "generator '" + d.name + "' is declared between " +
                            mor_str(s) + " and " + mor_str(t) +
                            " but bound between " + mor_str(it->second.src) +
                            " and " + mor_str(it->second.tgt),
                        d.loc);
                break;
            }
        }
    }
    ProgramResult res{env, {}};
    for (const auto& e : p.exprs) res.values.push_back(evaluate(e, env));
    return res;
}

}  // namespace kvt::dsl
