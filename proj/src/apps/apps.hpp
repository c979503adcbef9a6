#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "trace/trace.hpp"

// Finite group actions on points-indexed vector bundles and their secondary
// characters: the 2-character of a commuting pair of group elements, its
// S/T-move symmetry, the brute-force fixed-point oracle it must match, and
// the discrete Lefschetz identity for equivariant bundles.
namespace kvt::apps {

struct FiniteGroup {
    std::size_t order = 0;
    std::vector<std::vector<std::size_t>> mul;  // mul[g][h]; 0 is the identity
    std::vector<std::size_t> inv;
};

// Validates the table laws (identity, associativity, two-sided inverses)
// and fills the inverse table.
FiniteGroup make_group(std::vector<std::vector<std::size_t>> mul);

// Closure of a set of permutations of {0..m-1} under composition; element 0
// is the identity and perms lists one permutation per element.
struct LoadedGroup {
    FiniteGroup group;
    std::vector<std::vector<std::size_t>> perms;  // empty for table input
};
LoadedGroup group_from_generators(
    const std::vector<std::vector<std::size_t>>& gens);

struct GroupAction {
    FiniteGroup group;
    std::size_t set_size = 0;
    std::vector<std::vector<std::size_t>> perm;  // perm[g]: bijection of X
};

// Validates that each perm[g] is a bijection, perm[0] = id, and
// perm[g*h] = perm[g] o perm[h].
GroupAction make_action(FiniteGroup group,
                        std::vector<std::vector<std::size_t>> perm);
GroupAction natural_action(const LoadedGroup& lg);  // by its own permutations
GroupAction regular_action(const FiniteGroup& g);   // on itself, x -> g*x

// The permutation 1-morphism of g on the rank-|X| object:
// dims[perm[g](x)][x] = 1.
kv::KVOneMor linearize(const GroupAction& a, std::size_t g);

// (linearize(g), linearize(h)) with the canonical identity commutor; the
// two composites share one delta grid exactly when g and h commute, and a
// non-commuting pair is rejected.
tr::CommutingPair action_pair(const GroupAction& a, std::size_t g,
                              std::size_t h, lin::ScalarMode mode);

// Secondary trace of the linearized pair; matches fixed_point_oracle as a
// field element.
lin::ExactScalar char2(const GroupAction& a, std::size_t g, std::size_t h,
                       lin::ScalarMode mode);

// |{x : g.x = x and h.x = x}| by direct enumeration.
std::size_t fixed_point_oracle(const GroupAction& a, std::size_t g,
                               std::size_t h);

struct Char2Entry {
    std::size_t g = 0, h = 0;
    lin::ExactScalar chi;
};
struct Char2Table {
    FiniteGroup group;
    lin::ScalarMode mode{0};
    std::vector<Char2Entry> entries;  // every commuting pair, (g, h) lex
};
// jobs > 1 computes entries in parallel; the result is identical to the
// serial one. jobs = 0 uses the hardware thread count.
Char2Table char2_table(const GroupAction& a, lin::ScalarMode mode,
                       std::size_t jobs = 1);

struct SL2ZReport {
    bool ok = false;
    std::size_t checked = 0;
    std::vector<std::string> failures;
};
// S-move chi(g,h) = chi(h^-1,g) and T-move chi(g,h) = chi(gh,h) on every
// entry; the two moves generate the full modular group, so a clean report
// is orbit invariance.
SL2ZReport sl2z_check(const Char2Table& t);

struct EquivariantBundle {
    std::size_t base_size = 0;
    std::vector<std::size_t> fiber_dims;  // dim F_x
    std::vector<std::size_t> f;           // bijection of X
    std::vector<lin::Matrix> beta;        // beta[x]: F_{f(x)} -> F_x
};

// Validates shapes (beta[x] is dim F_x by dim F_{f(x)}), a single scalar
// mode, and invertibility of every beta[x].
EquivariantBundle make_bundle(std::vector<std::size_t> fiber_dims,
                              std::vector<std::size_t> f,
                              std::vector<lin::Matrix> beta);

// phi_a = pushforward along f (dims[x][f(x)] = 1), phi_b = fiberwise tensor
// (dims[x][x] = dim F_x), alpha placing beta_x in block (x, f(x)).
tr::CommutingPair lefschetz_pair(const EquivariantBundle& b);

struct LefschetzResult {
    lin::ExactScalar lhs;  // sum of tr(beta_x) over the fixed points of f
    lin::ExactScalar rhs;  // trace of the assembled pushforward matrix
};
// The two sides are computed independently: lhs walks the fixed points,
// rhs assembles the block permutation matrix on the direct sum of all
// fibers and takes its matrix trace.
LefschetzResult lefschetz(const EquivariantBundle& b);

// JSON loaders. Group documents: {"order": n, "mul": [[..]]} or
// {"generators": [[..]]}; action documents: {"perms": [[..]]}; bundle
// documents: {"fiber_dims": [..], "f": [..], "beta_blocks": [[[..]]]} with
// integer or "p/q" string entries. Malformed input raises invalid_argument.
LoadedGroup parse_group(const std::string& text);
GroupAction parse_action(const std::string& text, const LoadedGroup& lg);
EquivariantBundle parse_bundle(const std::string& text);
LoadedGroup load_group_file(const std::string& path);
GroupAction load_action_file(const std::string& path, const LoadedGroup& lg);
EquivariantBundle load_bundle_file(const std::string& path);

}  // namespace kvt::apps
