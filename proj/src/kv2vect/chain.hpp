#pragma once

#include <functional>
#include <vector>

#include "kv2vect/kv.hpp"

namespace kvt::kv {

// A chain is a list of composable 1-morphism atoms in application order:
// atoms[0] acts first. Its composite is the right-nested compose1 fold, and
// the basis of each composite cell (t,s) is the lexicographic enumeration of
// tuples (c_0=s, u_0, c_1, u_1, ..., c_{k-1}, u_{k-1}, c_k=t) ordered by
// (c_{k-1}, u_{k-1}, c_{k-2}, ..., c_1, u_1, u_0), leftmost most significant.
// The right-nested fold reproduces exactly this flat ordering; a left-nested
// fold does not, which is why every rewrite below speaks tuples, not kron
// factors.
struct Chain {
    KVObject src;
    std::vector<KVOneMor> atoms;
    bool operator==(const Chain&) const = default;
};

Chain make_chain(KVObject src, std::vector<KVOneMor> atoms);
// Object between atoms[cut-1] and atoms[cut]; cut ranges over [0, size].
KVObject chain_object_at(const Chain& ch, std::size_t cut);
KVObject chain_tgt(const Chain& ch);
KVOneMor chain_composite(const Chain& ch);

struct ChainTuple {
    std::vector<std::size_t> cvec;  // k+1 cell indices, endpoints included
    std::vector<std::size_t> uvec;  // k per-atom basis indices
    bool operator==(const ChainTuple&) const = default;
};

// Ranks chain tuples with a fixed source cell. N_[i][c] counts the tuples of
// the first i atoms ending at cell c; rank and unrank both validate their
// input and throw logic_error on malformed tuples, so every rewrite that
// goes through them is self-checking.
class ChainIndexer {
  public:
    ChainIndexer(Chain ch, std::size_t source_cell);

    std::size_t dim(std::size_t target_cell) const;
    std::size_t rank(const ChainTuple& t) const;
    ChainTuple unrank(std::size_t target_cell, std::size_t r) const;

  private:
    Chain chain_;
    std::size_t s_;
    std::vector<std::vector<std::size_t>> N_;
};

struct ChainMove {
    Chain result;
    KVTwoMor mor;  // composite(old chain) => composite(result)
};

// The one primitive rewrite: replace the atom segment [pos, pos+len) by the
// atoms of repl, transforming coefficients by theta, which must map the
// segment composite to the repl composite. Boundary cells are pinned; all
// other tuple entries pass through untouched. len = 0 inserts at a cut.
ChainMove chain_apply(const Chain& ch, std::size_t pos, std::size_t len,
                      const KVTwoMor& theta,
                      const std::vector<KVOneMor>& repl);

// Adjunction moves. unit_r inserts [f, f^r] at a cut whose object is f.src;
// unit_l inserts [f^l, f] at a cut whose object is f.tgt; counit_r removes a
// [f^r, f] segment; counit_l removes an [f, f^l] segment.
ChainMove unit_r(const Chain& ch, std::size_t cut, const KVOneMor& f,
                 lin::ScalarMode mode);
ChainMove unit_l(const Chain& ch, std::size_t cut, const KVOneMor& f,
                 lin::ScalarMode mode);
ChainMove counit_r(const Chain& ch, std::size_t pos, const KVOneMor& f,
                   lin::ScalarMode mode);
ChainMove counit_l(const Chain& ch, std::size_t pos, const KVOneMor& f,
                   lin::ScalarMode mode);

// fuse collapses a segment to a single atom whose raw cell basis is the
// segment enumeration (len = 0 inserts an identity atom); split is the
// inverse, expanding one atom into a chain with the same composite grid;
// drop_identity deletes an identity-grid atom.
ChainMove fuse(const Chain& ch, std::size_t pos, std::size_t len,
               lin::ScalarMode mode);
ChainMove split(const Chain& ch, std::size_t pos,
                const std::vector<KVOneMor>& repl, lin::ScalarMode mode);
ChainMove drop_identity(const Chain& ch, std::size_t pos,
                        lin::ScalarMode mode);

// Builds the 2-morphism whose matrix entries realize a semantic bijection of
// chain tuples; ranking the mapped tuple validates it, so a wrong map throws
// instead of producing a silently wrong permutation.
KVTwoMor theta_from_map(
    const Chain& src, const Chain& dst, lin::ScalarMode mode,
    const std::function<ChainTuple(const ChainTuple&)>& map);

// A traced chain is an endo-chain on base considered up to the trace: its
// space is the direct sum of the open diagonal cells (i,i), i ascending.
// Rewrites act per diagonal cell and never move atoms across the base point;
// traced_rotate is the one move that does, cycling the top r atoms around.
struct TracedChain {
    KVObject base;
    std::vector<KVOneMor> atoms;
    bool operator==(const TracedChain&) const = default;
};

TracedChain make_traced(KVObject base, std::vector<KVOneMor> atoms);
Chain open_chain(const TracedChain& tc);

struct TracedLayout {
    std::vector<std::size_t> cell_dims;  // dim of open cell (i,i), per i
    std::vector<std::size_t> offsets;
    std::size_t total = 0;
};

TracedLayout traced_layout(const TracedChain& tc);

struct TracedMove {
    TracedChain result;
    lin::Matrix m;
};

TracedMove traced_apply(const TracedChain& tc, std::size_t pos,
                        std::size_t len, const KVTwoMor& theta,
                        const std::vector<KVOneMor>& repl);
TracedMove traced_unit_r(const TracedChain& tc, std::size_t cut,
                         const KVOneMor& f, lin::ScalarMode mode);
TracedMove traced_unit_l(const TracedChain& tc, std::size_t cut,
                         const KVOneMor& f, lin::ScalarMode mode);
TracedMove traced_counit_r(const TracedChain& tc, std::size_t pos,
                           const KVOneMor& f, lin::ScalarMode mode);
TracedMove traced_counit_l(const TracedChain& tc, std::size_t pos,
                           const KVOneMor& f, lin::ScalarMode mode);
TracedMove traced_fuse(const TracedChain& tc, std::size_t pos, std::size_t len,
                       lin::ScalarMode mode);
TracedMove traced_split(const TracedChain& tc, std::size_t pos,
                        const std::vector<KVOneMor>& repl,
                        lin::ScalarMode mode);
TracedMove traced_drop_identity(const TracedChain& tc, std::size_t pos,
                                lin::ScalarMode mode);
TracedMove traced_rotate(const TracedChain& tc, std::size_t r,
                         lin::ScalarMode mode);

}  // namespace kvt::kv
