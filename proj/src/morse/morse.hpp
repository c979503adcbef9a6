#pragma once
// The torus factorization of the secondary trace: a 9-point critical poset,
// its downward-closed subsets, and the functor T assigning vector spaces to
// the named subsets and matrices to their inclusions. Composing the
// generating steps from the empty set to the full poset reproduces both
// secondary traces, giving an independent check of their equality.

#include <cstddef>
#include <string>
#include <vector>

#include "trace/trace.hpp"

namespace kvt::morse {

// Critical points are pairs (z1, z2) with z in {-1, i, 1}, encoded as
// idx(z1)*3 + idx(z2) with idx(-1)=0, idx(i)=1, idx(1)=2. The cover list is
// the Hasse diagram of the height function z1 + z2; each saddle covers only
// the minimum-side event of its own handle.
struct CriticalPoset {
    static constexpr std::size_t n_points = 9;
    std::vector<std::pair<unsigned, unsigned>> covers;  // (lower, upper)
};

CriticalPoset critical_poset();
std::string point_name(unsigned p);

// A downward-closed subset of the critical poset, as a 9-bit mask.
struct SaturatedSet {
    unsigned mask = 0;
    bool operator==(const SaturatedSet&) const = default;
};

// All downward-closed subsets, enumerated by brute force over 2^9 masks,
// ascending by (popcount, mask).
std::vector<SaturatedSet> saturated_sets();

// The named subsets on which T is defined.
enum class Node {
    Empty,
    M,           // m: the global minimum
    MA,          // m_a
    MB,          // m_b
    MAB,         // m_a | m_b
    Cross,       // cross
    SA,          // s_a
    SB,          // s_b
    SAMB,        // s_a | m_b
    MASB,        // m_a | s_b
    SACross,     // s_a | cross
    CrossSB,     // cross | s_b
    SASB,        // s_a | s_b
    SACrossSB,   // s_a | cross | s_b
    BigA,        // M_a
    BigB,        // M_b
    BigASB,      // M_a | s_b
    SABigB,      // s_a | M_b
    BigAB,       // M_a | M_b
    Full,        // the whole poset
};

inline constexpr std::size_t kNodeCount = 20;
const std::vector<Node>& all_nodes();
const char* node_name(Node n);
unsigned node_mask(Node n);

// The value of T on a named saturated set: the composite of the four-strand
// chain realization, as a one-cell trace space.
tr::TraceSpace T_object(const SaturatedSet& p, const tr::CommutingPair& pair);

// The matrix of T on an inclusion p <= q of named sets, computed by dynamic
// programming over the generating-step graph. Every path gives the same
// matrix; disagreement throws logic_error. Non-inclusions, unnamed sets, and
// unreachable pairs throw invalid_argument.
lin::Matrix T_morphism(const SaturatedSet& p, const SaturatedSet& q,
                       const tr::CommutingPair& pair);

// Endpoint comparison: T(empty, full) computed along the a-side chain and
// the b-side chain, against both secondary traces, plus the intermediate
// identifications of the saddle values with trace_duality data and of the
// maximum steps with the induced trace maps.
struct MainReport {
    lin::ExactScalar via_a;
    lin::ExactScalar via_b;
    lin::ExactScalar sec_a;
    lin::ExactScalar sec_b;
    bool ok = false;
    std::string detail;  // counterexample dump when !ok
};

MainReport verify_main(const tr::CommutingPair& pair);

}  // namespace kvt::morse
