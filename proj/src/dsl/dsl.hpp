#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "kv2vect/kv.hpp"

// Textual diagram language over the kv2vect backend: a parser with source
// locations, a printer that round-trips through the parser, a type checker
// that annotates every node with its resolved boundaries, and an evaluator
// producing backend 1- and 2-morphisms.
//
// Expression syntax, loosest to tightest binding:
//   e ; e      vertical composition of 2-morphisms; the left operand is
//              applied first
//   e . e      composition, right to left: "g . f" is g after f; between
//              2-morphisms this is horizontal composition
//   e (x) e    tensor, left major
// Atoms:
//   id(O)  ev(O)  coev(O)  serre_r(O)  serre_l(O)      object-based 1-atoms
//   radj(e)  ladj(e)                                   adjoints of a 1-expr
//   id2(e)  unit_r(e)  unit_l(e)  counit_r(e)  counit_l(e)
//   cyclic(e, f)                    rotation isomorphism between trace loops
//   name                            generator bound in the environment
// An object reference O is a tensor product of declared object names, or 1
// for the unit object. "(x)" is one token; a parenthesized generator named
// x must be written "( x )".
//
// Files hold one statement per line ("--" starts a comment; a newline inside
// an open parenthesis continues the statement): a preamble of declarations
//   obj A 3
//   gen1 Phi : A -> A
//   gen2 c : Phi . Phi => Phi . Phi
// followed by expressions. Generator declarations carry boundaries only;
// values are bound programmatically through the Environment, and
// run_program checks each bound value against its declared boundary.

namespace kvt::dsl {

struct SourceLoc {
    std::size_t line = 1, col = 1;
};

// Tensor product of named object factors; empty means the unit object.
struct ObjRef {
    std::vector<std::string> factors;
    SourceLoc loc;
};

enum class ExprKind {
    Gen,     // named generator, layer resolved against the environment
    Id1,     // identity of an object
    Ev,      // evaluation   A^op (x) A -> 1
    Coev,    // coevaluation 1 -> A^op (x) A
    SerreR,  // right Serre 1-morphism of an object
    SerreL,  // left Serre 1-morphism of an object
    RAdj,    // right adjoint of a 1-expression
    LAdj,    // left adjoint of a 1-expression
    Id2,     // identity 2-cell of a 1-expression
    UnitR,   // unit of f -| f^r
    UnitL,   // unit of f^l -| f
    CounitR, CounitL,
    Cyclic,   // rotation Tr(f o g) => Tr(g o f) between trace loops
    Compose,  // "." chain, arguments in written order, rightmost applied first
    Tensor,   // "(x)" chain, left major
    VComp,    // ";" chain, arguments in application order
};

struct Expr;
using ExprPtr = std::shared_ptr<Expr>;

// Boundary annotation attached by typecheck. Layer 1 records the object
// pair, layer 2 the full source and target 1-morphisms. Trace spaces live
// on the 2-level as 1-morphisms of the unit object.
struct TypeInfo {
    int layer = 0;
    kv::KVObject src1, tgt1;
    kv::KVOneMor src2, tgt2;
};

struct Expr {
    ExprKind kind{};
    std::string name;           // Gen
    ObjRef obj;                 // object-based atoms
    std::vector<ExprPtr> args;  // subexpressions
    SourceLoc loc;
    std::shared_ptr<TypeInfo> type;  // filled by typecheck
};

// Structural equality of ASTs, ignoring locations and annotations.
bool ast_equal(const Expr& a, const Expr& b);

// Generator bindings. Names must be unique across the three maps; the mode
// is used for every 2-cell the evaluator constructs, and bound 2-morphisms
// must carry it.
struct Environment {
    lin::ScalarMode mode{0};
    std::map<std::string, std::size_t> objects;  // name -> rank
    std::map<std::string, kv::KVOneMor> one_mors;
    std::map<std::string, kv::KVTwoMor> two_mors;
};

struct ParseError : std::runtime_error {
    SourceLoc loc;
    ParseError(const std::string& what, SourceLoc l);
};

struct TypeError : std::runtime_error {
    SourceLoc loc;
    TypeError(const std::string& what, SourceLoc l);
};

// Parse a single expression; the whole text must be consumed.
ExprPtr parse_expr(const std::string& text);

// Canonical text form. parse_expr(print_expr(e)) reproduces e up to source
// locations, so printing is a fixed point of parse-then-print.
std::string print_expr(const Expr& e);

// Annotate every node with resolved boundaries and return the root's.
// 2-level atoms need the values of their 1-level subexpressions, so the
// generators appearing under them must be bound, not merely declared.
const TypeInfo& typecheck(const ExprPtr& e, const Environment& env);

using Value = std::variant<kv::KVOneMor, kv::KVTwoMor>;

// Type-check, then evaluate. Composition folds right to left; an n-fold
// horizontal composite goes through kv::hchain so its matrices land in the
// flat chain basis.
Value evaluate(const ExprPtr& e, const Environment& env);

struct Declaration {
    enum class Kind { Object, Gen1, Gen2 };
    Kind kind{};
    std::string name;
    std::size_t rank = 0;        // Object
    ObjRef src_obj, tgt_obj;     // Gen1
    ExprPtr src_expr, tgt_expr;  // Gen2
    SourceLoc loc;
};

struct Program {
    std::vector<Declaration> decls;  // the preamble
    std::vector<ExprPtr> exprs;
};

Program parse_program(const std::string& text);

struct ProgramResult {
    Environment env;  // input environment extended by object declarations
    std::vector<Value> values;
};

// Apply the preamble (object declarations extend the environment, generator
// declarations must match a bound value), then evaluate each expression.
ProgramResult run_program(const Program& p, const Environment& env);

}  // namespace kvt::dsl
