#pragma once
// Traces of 1-endomorphisms and the calculus built on them: cyclic symmetry,
// functoriality along dualizable 1-morphisms, trace duality, secondary
// (iterated) traces, shearing, and dual trace maps. Every map is realized as
// a composite of chain moves, so all matrices live in the canonical diagonal
// trace bases and compose exactly.

#include <cstddef>
#include <utility>
#include <vector>

#include "kv2vect/chain.hpp"
#include "kv2vect/kv.hpp"

namespace kvt::tr {

// The trace space of an endomorphism: the direct sum of its diagonal cells,
// in ascending diagonal order. block_layout lists (cell index, cell dim).
struct TraceSpace {
    std::size_t dim = 0;
    std::vector<std::pair<std::size_t, std::size_t>> block_layout;
};

// Two commuting endomorphisms of one object, witnessed by a 2-morphism
// alpha: phi_a o phi_b => phi_b o phi_a.
struct CommutingPair {
    kv::KVOneMor phi_a;
    kv::KVOneMor phi_b;
    kv::KVTwoMor alpha;
};

CommutingPair make_commuting_pair(kv::KVOneMor phi_a, kv::KVOneMor phi_b,
                                  kv::KVTwoMor alpha);

// Trace of an endomorphism. Evaluated both as the closed loop
// ev o (phi (x) id) o coev and as the diagonal direct sum; the two
// enumerations must agree position by position or a logic_error is thrown.
TraceSpace trace_of(const kv::KVOneMor& phi);

// Functoriality of the trace on 2-morphisms between endomorphisms: the
// direct sum of the diagonal blocks.
lin::Matrix trace_2mor(const kv::KVTwoMor& theta);

// Cyclic symmetry m(phi, psi): Tr(phi o psi) -> Tr(psi o phi) for
// phi: A -> B and psi: B -> A, realized by rotating the traced chain
// [psi, phi] one step. Involution: cyclic(psi, phi) * cyclic(phi, psi) = id.
lin::Matrix cyclic(const kv::KVOneMor& phi, const kv::KVOneMor& psi,
                   lin::ScalarMode mode);

// The one-step loop automorphism of Tr(id_A) assembled from the two
// identity-loop insertions and the rotation connecting them. In this
// 1-truncated backend it is the identity matrix; callers assert that.
lin::Matrix bv_check(const kv::KVOneMor& phi, lin::ScalarMode mode);

// Trace map phi(psi, alpha): Tr(phi) -> Tr(phi_prime) along psi: A -> B,
// where phi is an endomorphism of A, phi_prime of B, and
// alpha: psi o phi => phi_prime o psi. Four chain moves: insert the
// psi-unit, apply alpha, rotate, contract with the psi-counit.
lin::Matrix trace_map(const kv::KVOneMor& psi, const kv::KVTwoMor& alpha,
                      const kv::KVOneMor& phi, const kv::KVOneMor& phi_prime);

// The same map routed through beta: phi o psi^r => psi^r o phi_prime, which
// is itself built from the unit, alpha, and the counit on an open chain.
// Agrees with trace_map exactly.
lin::Matrix trace_map_alt(const kv::KVOneMor& psi, const kv::KVTwoMor& alpha,
                          const kv::KVOneMor& phi,
                          const kv::KVOneMor& phi_prime);

// From alpha: phi_a o phi_b => phi_b o phi_a, the induced commutor
// phi_b o phi_a^r => phi_a^r o phi_b (unit, alpha, counit on an open chain).
kv::KVTwoMor induced_commutor(const CommutingPair& pair);

// Duality data for the trace space: coev: 1 -> Tr(phi^r) (x) Tr(phi) as a
// column, ev: Tr(phi) (x) Tr(phi^r) -> 1 as a row, both built by composing
// adjunction moves on traced chains over the unit object. Snake identities
// hold exactly under the kron conventions.
struct TraceDuality {
    lin::Matrix coev;
    lin::Matrix ev;
};

TraceDuality trace_duality(const kv::KVOneMor& phi, lin::ScalarMode mode);

// Trace of a matrix acting on Tr(phi), evaluated through the trace_duality
// pairing: ev o (m (x) id) o swap o coev. Agrees with mat_trace; the
// secondary traces below assert that agreement on every call.
lin::ExactScalar pairing_trace(const lin::Matrix& m, const TraceDuality& dual,
                               lin::ScalarMode mode);

// Secondary traces of a commuting pair. secondary_trace_b is the trace over
// Tr(phi_b) of the map induced by phi_a; secondary_trace_a is the trace over
// Tr(phi_a^r) of the map induced by phi_b through the induced commutor.
// The two agree on every pair.
lin::ExactScalar secondary_trace_b(const CommutingPair& pair);
lin::ExactScalar secondary_trace_a(const CommutingPair& pair);

// The commutor alpha': (phi_a o phi_b) o phi_b => phi_b o (phi_a o phi_b)
// obtained by splitting the fused composite, applying alpha, and refusing.
kv::KVTwoMor shear_commutor(const CommutingPair& pair);

// Shear invariance: the trace map of the fused pair (phi_a o phi_b, phi_b)
// with commutor alpha'. Exactly equals trace_map(phi_a, alpha, phi_b, phi_b).
lin::Matrix shear_map(const CommutingPair& pair);

// The mate alpha^r: psi^r o phi_prime^r => phi^r o psi^r of alpha, built
// from two unit insertions, alpha, and two counit contractions.
kv::KVTwoMor mate(const kv::KVOneMor& psi, const kv::KVTwoMor& alpha,
                  const kv::KVOneMor& phi, const kv::KVOneMor& phi_prime);

// Dual trace map phi(psi^r, alpha^r): Tr(phi_prime^r) -> Tr(phi^r).
// Also computed as the adjoint of trace_map(psi, alpha, phi, phi_prime)
// under the trace_duality pairings; throws logic_error if the two disagree.
lin::Matrix dual_trace_map(const kv::KVOneMor& psi, const kv::KVTwoMor& alpha,
                           const kv::KVOneMor& phi,
                           const kv::KVOneMor& phi_prime);

}  // namespace kvt::tr
