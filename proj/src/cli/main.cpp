#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "cli/cli.hpp"

// kvtrace: exact property runs over the trace calculus. Exit codes:
// 0 every checked equality holds, 1 a counterexample was found,
// 2 bad flags or malformed input files.
namespace {

struct CommonFlags {
    std::string field = "q";
    std::string format = "text";
    std::size_t jobs = 1;
};

void add_common(CLI::App* c, CommonFlags& fl, bool with_jobs = true) {
    c->add_option("--field", fl.field, "Scalar field: q or fp:P with P prime")
        ->capture_default_str();
    c->add_option("--format", fl.format, "Report format")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();
    if (with_jobs)
        c->add_option("--jobs", fl.jobs,
                      "Worker threads, 0 = hardware count; the report is "
                      "identical for every value")
            ->capture_default_str();
}

void add_run_flags(CLI::App* c, kvt::cli::RunConfig& cfg,
                   bool deep_capped = false) {
    std::string rank_help = "Largest object rank drawn";
    std::string dim_help =
        "Largest cell dimension drawn; dimension 0 always possible";
    if (deep_capped) {
        rank_help += " (the shear, alt, dual checks stay at rank <= 2)";
        dim_help += " (the shear, alt, dual checks stay at dim <= 2)";
    }
    c->add_option("--cases", cfg.cases, "Number of random instances")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    c->add_option("--seed", cfg.seed,
                  "Root seed; instance i draws from its own derived stream")
        ->capture_default_str();
    c->add_option("--max-rank", cfg.max_rank, rank_help)
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    c->add_option("--max-dim", cfg.max_dim, dim_help)
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    c->add_option("--max-numerator", cfg.max_numerator,
                  "Entry bound over Q; ignored over a prime field")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
}

kvt::cli::Format format_of(const CommonFlags& fl) {
    return fl.format == "json" ? kvt::cli::Format::Json
                               : kvt::cli::Format::Text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact trace calculus over finite 2-vector spaces"};
    app.require_subcommand(1);

    kvt::cli::RunConfig vcfg;
    CommonFlags vfl;
    auto* verify = app.add_subcommand(
        "verify",
        "Run random commuting pairs through the trace-identity suite");
    add_run_flags(verify, vcfg, true);
    add_common(verify, vfl);

    kvt::cli::RunConfig mcfg;
    mcfg.cases = 25;
    mcfg.max_rank = 2;
    mcfg.max_dim = 2;
    mcfg.max_numerator = 3;
    CommonFlags mfl;
    auto* morse = app.add_subcommand(
        "morse",
        "Factor the secondary trace through the critical-poset functor");
    add_run_flags(morse, mcfg);
    add_common(morse, mfl);

    std::string group_path, action_spec = "natural";
    CommonFlags cfl;
    auto* char2 = app.add_subcommand(
        "char2", "2-character table of a finite group action");
    char2->add_option("--group", group_path, "Group document (JSON)")
        ->required();
    char2
        ->add_option("--action", action_spec,
                     "natural, regular, or a path to an action document")
        ->capture_default_str();
    add_common(char2, cfl);

    std::string bundle_path;
    CommonFlags lfl;
    auto* lefschetz = app.add_subcommand(
        "lefschetz", "Fixed-point count vs global trace on a bundle");
    lefschetz->add_option("bundle", bundle_path, "Bundle document (JSON)")
        ->required();
    add_common(lefschetz, lfl, false);

    std::string program_path, env_path;
    CommonFlags efl;
    auto* eval = app.add_subcommand(
        "eval", "Evaluate a diagram program and print the denotations");
    eval->add_option("program", program_path, "Diagram program file")
        ->required();
    eval->add_option("--env", env_path,
                     "Environment document binding generator values (JSON)");
    add_common(eval, efl, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        kvt::cli::CommandResult result;
        if (verify->parsed()) {
            vcfg.mode = kvt::cli::parse_field(vfl.field);
            result = kvt::cli::run_verify(vcfg, format_of(vfl), vfl.jobs);
        } else if (morse->parsed()) {
            mcfg.mode = kvt::cli::parse_field(mfl.field);
            result = kvt::cli::run_morse(mcfg, format_of(mfl), mfl.jobs);
        } else if (char2->parsed()) {
            result = kvt::cli::run_char2(group_path, action_spec,
                                         kvt::cli::parse_field(cfl.field),
                                         format_of(cfl), cfl.jobs);
        } else if (lefschetz->parsed()) {
            result = kvt::cli::run_lefschetz(bundle_path, format_of(lfl));
        } else {
            result = kvt::cli::run_eval(program_path, env_path,
                                        kvt::cli::parse_field(efl.field),
                                        format_of(efl));
        }
        std::cout << result.report;
        return result.status;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
