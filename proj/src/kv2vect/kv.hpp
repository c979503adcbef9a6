#pragma once

#include <cstddef>
#include <vector>

#include "linalg/matrix.hpp"

namespace kvt::kv {

// Strict skeletal 2-vector spaces: an object is determined by its rank (the
// number of simple summands), a 1-morphism by a grid of cell dimensions, a
// 2-morphism by a grid of matrices. Everything is immutable after build.
struct KVObject {
    std::size_t rank = 0;
    bool operator==(const KVObject&) const = default;
};

KVObject unit_object();
KVObject tensor(KVObject a, KVObject b);
// The monoidal dual; this backend is skeletal enough that A^op is A itself,
// with ev/coev carrying the pairing.
KVObject op(KVObject a);

struct KVOneMor {
    KVObject src, tgt;
    // dims[t][s] is the dimension of the cell sending summand s to summand t.
    std::vector<std::vector<std::size_t>> dims;

    std::size_t dim(std::size_t t, std::size_t s) const { return dims[t][s]; }
    bool operator==(const KVOneMor&) const = default;
};

KVOneMor make_one_mor(KVObject src, KVObject tgt,
                      std::vector<std::vector<std::size_t>> dims);
KVOneMor id1(KVObject a);
KVOneMor compose1(const KVOneMor& g, const KVOneMor& f);
KVOneMor tensor(const KVOneMor& f, const KVOneMor& g);
// Grid transpose; doubles as Phi^op and as the underlying 1-morphism of both
// adjoints (the backend is ambidextrous).
KVOneMor transpose_mor(const KVOneMor& f);
// Symmetry A (x) B -> B (x) A, a permutation grid on paired indices.
KVOneMor sigma1(KVObject a, KVObject b);

struct KVTwoMor {
    KVOneMor src, tgt;
    lin::ScalarMode mode;
    // blocks[t][s] has shape tgt.dims[t][s] x src.dims[t][s].
    std::vector<std::vector<lin::Matrix>> blocks;

    bool operator==(const KVTwoMor&) const = default;
};

KVTwoMor make_two_mor(KVOneMor src, KVOneMor tgt, lin::ScalarMode mode,
                      std::vector<std::vector<lin::Matrix>> blocks);
KVTwoMor id2(const KVOneMor& f, lin::ScalarMode mode);
KVTwoMor vcompose2(const KVTwoMor& b, const KVTwoMor& a);

// Horizontal composition. The composite cell (i,k) enumerates (j, u_b, u_a)
// with j ascending outermost and the b-factor index major, matching compose1.
// Beware: this is not strictly associative at the 2-level; an n-fold
// horizontal composite must be folded right-nested (see hchain) to land in
// the flat chain basis. A left-nested fold produces matrices in a different
// (reassociated) basis even though the boundary grids agree.
KVTwoMor hcompose2(const KVTwoMor& b, const KVTwoMor& a);

// Flat horizontal composite of a nonempty composable list in application
// order (thetas[0] innermost). Equal to the right-nested hcompose2 fold.
KVTwoMor hchain(const std::vector<KVTwoMor>& thetas);

KVTwoMor tensor(const KVTwoMor& a, const KVTwoMor& b);

struct Adjunction {
    KVOneMor adj;
    KVTwoMor unit, counit;
};

// f -| f^r with f^r the transposed grid; unit: id_src => f^r o f has a 1
// where the two copies of the cell index agree, counit: f o f^r => id_tgt is
// the matching row. Triangle identities hold exactly.
Adjunction right_adjoint(const KVOneMor& f, lin::ScalarMode mode);
// f^l -| f; same transposed grid (the backend is ambidextrous), with
// unit: id_tgt => f o f^l and counit: f^l o f => id_src.
Adjunction left_adjoint(const KVOneMor& f, lin::ScalarMode mode);

struct DualityData {
    KVObject a_op;
    KVOneMor ev, coev;
};

// ev: A^op (x) A -> 1 is the delta-pattern row grid, coev its transpose;
// the zig-zag composites are structurally identity 1-morphisms.
DualityData duality_data(KVObject a);

struct EvAdjoints {
    KVOneMor L, R;
    KVTwoMor unit_R, counit_R;  // ev -| R
    KVTwoMor unit_L, counit_L;  // L -| ev
};

EvAdjoints ev_adjoints(KVObject a, lin::ScalarMode mode);

struct SerrePair {
    KVOneMor ell, r;
};

// Both Serre 1-morphisms are identities here (the backend is Calabi-Yau);
// exposed as named values so trace formulas can cite them literally.
SerrePair serre(KVObject a);

}  // namespace kvt::kv
