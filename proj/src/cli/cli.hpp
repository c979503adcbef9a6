#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "linalg/scalar.hpp"

// Command implementations behind the kvtrace binary: random-instance
// property suites over the trace calculus, the handle-decomposition runner,
// 2-character tables, the discrete Lefschetz check, and a diagram-language
// evaluator. Every command assembles its report by instance index, so a
// parallel run is byte-identical to the serial one, and identical configs
// always produce identical reports.
namespace kvt::cli {

// Instance-generation parameters shared by the random-suite commands.
// Random 1-morphisms draw every cell dimension uniformly from [0, max_dim]
// (zero-dimensional cells included on purpose); random 2-morphism blocks
// draw integer entries uniformly from [-max_numerator, max_numerator] over
// Q and from [0, p) over a prime field.
struct RunConfig {
    lin::ScalarMode mode{0};
    std::uint64_t seed = 0;
    std::size_t cases = 100;
    std::size_t max_rank = 3;
    std::size_t max_dim = 3;
    long max_numerator = 5;
};

enum class Format { Text, Json };

// status 0: every equality held; status 1: a counterexample was found and
// serialized into the report. Input problems are not statuses; they throw
// (std::invalid_argument, dsl::ParseError, dsl::TypeError) and the binary
// maps any such throw to exit code 2.
struct CommandResult {
    int status = 0;
    std::string report;
};

// "q" selects rationals, "fp:P" the prime field F_P. P is checked for
// primality here; everything downstream only assumes a fixed modulus.
lin::ScalarMode parse_field(const std::string& spec);

// cases, max_rank, max_dim, max_numerator must all be >= 1.
void validate(const RunConfig& cfg);

// Per-pair suite: secondary trace agreement, shearing, the alternative
// trace-map presentation, the dual trace map, trace-duality snakes, the
// cyclic involution, and the BV loop. The secondary, snake, cyclic, and bv
// checks draw at the configured bounds; the shear, alt, and dual checks
// draw at rank <= 2, dim <= 2 no matter the flags, because their 4- and
// 5-atom flattened chains square into dense exact matrices that exceed
// memory at rank 3.
CommandResult run_verify(const RunConfig& cfg, Format fmt, std::size_t jobs);

// Per-pair handle-decomposition suite: endpoint agreement of the
// factorization with both secondary traces, plus the minimum diamond and
// saddle interleaving path-independence squares.
CommandResult run_morse(const RunConfig& cfg, Format fmt, std::size_t jobs);

// 2-character table of a group file under an action: "natural" (the loaded
// permutation realization), "regular", or a path to an action document.
// Checks every commuting pair against the fixed-point oracle and runs the
// modular S/T-move symmetry.
CommandResult run_char2(const std::string& group_path,
                        const std::string& action_spec, lin::ScalarMode mode,
                        Format fmt, std::size_t jobs);

// Fixed-point sum vs global trace vs the secondary trace of the associated
// commuting pair, on one bundle document.
CommandResult run_lefschetz(const std::string& bundle_path, Format fmt);

// Parse and run a diagram program, binding generator values from an
// optional environment document (empty env_path means no bindings), and
// print each expression's denotation. Never returns status 1: evaluation
// has no equalities to refute, and bad input throws.
CommandResult run_eval(const std::string& program_path,
                       const std::string& env_path, lin::ScalarMode mode,
                       Format fmt);

}  // namespace kvt::cli
